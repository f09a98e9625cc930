//! Numerical semigroups given by their minimal generating system.
//!
//! Membership, the Frobenius number and the genus are all read off Apéry
//! tables, which are computed as shortest paths on the residue graph modulo
//! the chosen element.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest generator accepted by [`NumericalSemigroup::new`].
pub const MAX_GENERATOR: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemigroupError {
    #[error("empty generator list")]
    EmptyInput,
    #[error("generator {0} is not allowed (generators must be at least 2)")]
    ContainsOneOrZero(u64),
    #[error("generator {value} exceeds the supported maximum {max}")]
    GeneratorTooLarge { value: u64, max: u64 },
    #[error("a numerical semigroup needs at least two minimal generators")]
    SingleGenerator,
    #[error("gcd is not 1 (gcd of the generators is {0})")]
    GcdNotOne(u64),
    #[error("not a minimal system of generators: {0} is a combination of the smaller generators")]
    NotMinimalSystem(u64),
    #[error("{0} is not an element of the semigroup")]
    NotAMember(u64),
    #[error("factorization has {got} coordinates but the semigroup has {expected} generators")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("arithmetic overflow while evaluating a factorization")]
    Overflow,
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Least element reachable in every residue class modulo `modulus`, using
/// non-negative combinations of `gens`. Unreachable classes hold `u64::MAX`.
fn residue_shortest_paths(gens: &[u64], modulus: u64) -> Vec<u64> {
    let n = modulus as usize;
    let mut dist = vec![u64::MAX; n];
    dist[0] = 0;
    let steps: Vec<(usize, u64)> =
        gens.iter().filter(|&&g| g % modulus != 0).map(|&g| ((g % modulus) as usize, g)).collect();
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((0u64, 0usize)));
    while let Some(Reverse((d, r))) = heap.pop() {
        if d > dist[r] {
            continue;
        }
        for &(step, weight) in &steps {
            let mut next = r + step;
            if next >= n {
                next -= n;
            }
            let candidate = d + weight;
            if candidate < dist[next] {
                dist[next] = candidate;
                heap.push(Reverse((candidate, next)));
            }
        }
    }
    dist
}

/// Least element of the semigroup in each residue class modulo an element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AperyTable {
    modulus: u64,
    entries: Vec<u64>,
}

impl AperyTable {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Entries indexed by residue class.
    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn entry(&self, residue: u64) -> u64 {
        self.entries[(residue % self.modulus) as usize]
    }

    pub fn max(&self) -> u64 {
        self.entries.iter().copied().max().unwrap_or(0)
    }

    /// Smallest non-zero entry, or `None` for the trivial table of modulus 1.
    pub fn min_nonzero(&self) -> Option<u64> {
        self.entries.iter().copied().filter(|&e| e != 0).min()
    }

    fn contains(&self, s: i64) -> bool {
        s >= 0 && (s as u64) >= self.entry(s as u64)
    }
}

/// Submonoid of ℕ generated by an arbitrary list of positive integers.
///
/// When the gcd `d` of the list exceeds one, `s` is a member iff `d | s` and
/// `s / d` lies in the numerical semigroup spanned by the divided list.
#[derive(Debug, Clone)]
pub struct Submonoid {
    divisor: u64,
    modulus: u64,
    table: Vec<u64>,
}

impl Submonoid {
    pub fn new(gens: &[u64]) -> Self {
        let gens: Vec<u64> = gens.iter().copied().filter(|&g| g > 0).collect();
        if gens.is_empty() {
            return Submonoid { divisor: 0, modulus: 1, table: vec![0] };
        }
        let divisor = gens.iter().fold(0, |acc, &g| gcd(acc, g));
        let reduced: Vec<u64> = gens.iter().map(|g| g / divisor).collect();
        let modulus = *reduced.iter().min().expect("non-empty");
        let table = residue_shortest_paths(&reduced, modulus);
        Submonoid { divisor, modulus, table }
    }

    pub fn contains(&self, s: i64) -> bool {
        if s < 0 {
            return false;
        }
        if s == 0 {
            return true;
        }
        if self.divisor == 0 {
            return false;
        }
        let s = s as u64;
        if !s.is_multiple_of(self.divisor) {
            return false;
        }
        let t = s / self.divisor;
        t >= self.table[(t % self.modulus) as usize]
    }
}

/// A point of ℕ^p, read as a factorization over the generators.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FactorizationVector(Vec<u64>);

impl FactorizationVector {
    pub fn new(coords: Vec<u64>) -> Self {
        FactorizationVector(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        FactorizationVector(vec![0; dim])
    }

    /// The unit vector e_j.
    pub fn unit(dim: usize, j: usize) -> Self {
        let mut coords = vec![0; dim];
        coords[j] = 1;
        FactorizationVector(coords)
    }

    pub fn coords(&self) -> &[u64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// |x|, the number of generator copies used.
    pub fn length(&self) -> u64 {
        self.0.iter().sum()
    }

    /// Component-wise `self <= other`.
    pub fn le_componentwise(&self, other: &FactorizationVector) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn into_inner(self) -> Vec<u64> {
        self.0
    }
}

impl From<Vec<u64>> for FactorizationVector {
    fn from(coords: Vec<u64>) -> Self {
        FactorizationVector(coords)
    }
}

impl fmt::Display for FactorizationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// S = ⟨n_1, …, n_p⟩ with n_1 < … < n_p its minimal generating system.
#[derive(Debug, Clone)]
pub struct NumericalSemigroup {
    generators: Vec<u64>,
    // One lazily computed Apéry table per generator.
    apery_cache: Vec<OnceLock<AperyTable>>,
}

impl PartialEq for NumericalSemigroup {
    fn eq(&self, other: &Self) -> bool {
        self.generators == other.generators
    }
}

impl Eq for NumericalSemigroup {}

impl NumericalSemigroup {
    /// Validates `gens` as a minimal generating system. Input order and
    /// repetitions do not matter.
    pub fn new(gens: &[u64]) -> Result<Self, SemigroupError> {
        if gens.is_empty() {
            return Err(SemigroupError::EmptyInput);
        }
        if let Some(&bad) = gens.iter().find(|&&g| g < 2) {
            return Err(SemigroupError::ContainsOneOrZero(bad));
        }
        if let Some(&big) = gens.iter().find(|&&g| g > MAX_GENERATOR) {
            return Err(SemigroupError::GeneratorTooLarge { value: big, max: MAX_GENERATOR });
        }
        let mut generators = gens.to_vec();
        generators.sort_unstable();
        generators.dedup();
        if generators.len() < 2 {
            return Err(SemigroupError::SingleGenerator);
        }
        let g = generators.iter().fold(0, |acc, &n| gcd(acc, n));
        if g != 1 {
            return Err(SemigroupError::GcdNotOne(g));
        }
        // A generator can only be a combination of strictly smaller ones.
        for i in 1..generators.len() {
            if Submonoid::new(&generators[..i]).contains(generators[i] as i64) {
                return Err(SemigroupError::NotMinimalSystem(generators[i]));
            }
        }
        let apery_cache = generators.iter().map(|_| OnceLock::new()).collect();
        Ok(NumericalSemigroup { generators, apery_cache })
    }

    pub fn generators(&self) -> &[u64] {
        &self.generators
    }

    pub fn generator(&self, i: usize) -> u64 {
        self.generators[i]
    }

    /// The embedding dimension p.
    pub fn embedding_dimension(&self) -> usize {
        self.generators.len()
    }

    pub fn multiplicity(&self) -> u64 {
        self.generators[0]
    }

    /// Apéry table of the i-th generator, computed once and cached.
    pub fn apery_of_generator(&self, i: usize) -> &AperyTable {
        self.apery_cache[i].get_or_init(|| AperyTable {
            modulus: self.generators[i],
            entries: residue_shortest_paths(&self.generators, self.generators[i]),
        })
    }

    /// Ap(S, n) for an arbitrary non-zero element n of S.
    pub fn apery(&self, n: u64) -> Result<AperyTable, SemigroupError> {
        if n == 0 || !self.contains(n as i64) {
            return Err(SemigroupError::NotAMember(n));
        }
        if let Some(i) = self.generators.iter().position(|&g| g == n) {
            return Ok(self.apery_of_generator(i).clone());
        }
        Ok(AperyTable { modulus: n, entries: residue_shortest_paths(&self.generators, n) })
    }

    pub fn contains(&self, s: i64) -> bool {
        self.apery_of_generator(0).contains(s)
    }

    /// Largest integer outside S.
    pub fn frobenius(&self) -> u64 {
        let table = self.apery_of_generator(0);
        table.max() - table.modulus()
    }

    /// Number of gaps, Σ_r (w_r - r) / m over the Apéry table of the multiplicity.
    pub fn genus(&self) -> u64 {
        let table = self.apery_of_generator(0);
        table.entries().iter().enumerate().map(|(r, &w)| (w - r as u64) / table.modulus()).sum()
    }

    /// The factorization homomorphism, Σ x_i n_i.
    pub fn evaluate(&self, x: &FactorizationVector) -> Result<u64, SemigroupError> {
        if x.dim() != self.generators.len() {
            return Err(SemigroupError::DimensionMismatch { expected: self.generators.len(), got: x.dim() });
        }
        x.coords().iter().zip(&self.generators).try_fold(0u64, |acc, (&c, &n)| {
            c.checked_mul(n).and_then(|t| acc.checked_add(t)).ok_or(SemigroupError::Overflow)
        })
    }
}

impl fmt::Display for NumericalSemigroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, g) in self.generators.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, ">")
    }
}
