//! Brute-force reference computations.
//!
//! Everything here is enumeration: membership comes from a reachable-sum
//! sieve rather than Apéry tables, and minimal elements come from filtering
//! every feasible point of the box. Slow, but independent of [`crate::oes`]
//! apart from the box itself.

use thiserror::Error;

use crate::oes::bound_matrix;
use crate::semigroup::{FactorizationVector, NumericalSemigroup};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("points have mixed dimensions ({expected} and {got})")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("generator index {index} out of range for embedding dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
}

/// Points not component-wise above another distinct point, in input order,
/// without repeats.
pub fn pareto_filter(points: &[FactorizationVector]) -> Result<Vec<FactorizationVector>, OracleError> {
    if let Some(first) = points.first() {
        if let Some(bad) = points.iter().find(|p| p.dim() != first.dim()) {
            return Err(OracleError::DimensionMismatch { expected: first.dim(), got: bad.dim() });
        }
    }
    let mut unique: Vec<&FactorizationVector> = Vec::with_capacity(points.len());
    for p in points {
        if !unique.contains(&p) {
            unique.push(p);
        }
    }
    Ok(unique
        .iter()
        .filter(|&&p| !unique.iter().any(|&q| q != p && q.le_componentwise(p)))
        .map(|&p| p.clone())
        .collect())
}

/// Antichain of the minimal points inserted so far.
#[derive(Debug, Clone, Default)]
pub struct ParetoFront {
    points: Vec<FactorizationVector>,
}

impl ParetoFront {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns false if `x` is above a point already present.
    pub fn insert(&mut self, x: FactorizationVector) -> bool {
        if self.points.iter().any(|q| q.le_componentwise(&x)) {
            return false;
        }
        self.points.retain(|q| !x.le_componentwise(q));
        self.points.push(x);
        true
    }

    pub fn points(&self) -> &[FactorizationVector] {
        &self.points
    }

    pub fn into_points(self) -> Vec<FactorizationVector> {
        self.points
    }
}

/// Reachable sums of the generators; everything past `n_1·n_p` is reachable.
struct Sieve {
    reach: Vec<bool>,
}

impl Sieve {
    fn new(s: &NumericalSemigroup) -> Self {
        let gens = s.generators();
        let limit = (gens[0] * gens[gens.len() - 1]) as usize;
        let mut reach = vec![false; limit + 1];
        reach[0] = true;
        for v in 1..=limit {
            reach[v] = gens.iter().any(|&g| g as usize <= v && reach[v - g as usize]);
        }
        Sieve { reach }
    }

    fn contains(&self, v: i64) -> bool {
        v >= 0 && self.reach.get(v as usize).copied().unwrap_or(true)
    }
}

/// Gaps of S, in increasing order.
pub fn gaps_direct(s: &NumericalSemigroup) -> Vec<u64> {
    let sieve = Sieve::new(s);
    (0..sieve.reach.len() as u64).filter(|&v| !sieve.reach[v as usize]).collect()
}

/// Number of points [`minimals_of_z`] enumerates for generator `j`.
pub fn enumeration_size(s: &NumericalSemigroup, j: usize) -> Result<u128, OracleError> {
    let p = s.embedding_dimension();
    if j >= p {
        return Err(OracleError::IndexOutOfRange { index: j, dim: p });
    }
    Ok(bound_matrix(s)
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != j)
        .fold(1u128, |acc, (_, row)| acc.saturating_mul(u128::from(row[j]) + 1)))
}

/// Minimals Z(n_j + S): e_j first, then the remaining minimal elements in
/// lexicographic order.
pub fn minimals_of_z(s: &NumericalSemigroup, j: usize) -> Result<Vec<FactorizationVector>, OracleError> {
    minimals_of_z_with_margin(s, j, 0)
}

/// Same as [`minimals_of_z`] over a box enlarged by `margin` per coordinate.
/// The result must not depend on the margin.
pub fn minimals_of_z_with_margin(
    s: &NumericalSemigroup,
    j: usize,
    margin: u64,
) -> Result<Vec<FactorizationVector>, OracleError> {
    let p = s.embedding_dimension();
    if j >= p {
        return Err(OracleError::IndexOutOfRange { index: j, dim: p });
    }
    let gens = s.generators();
    let caps: Vec<u64> =
        bound_matrix(s).iter().enumerate().map(|(i, row)| if i == j { 0 } else { row[j] + margin }).collect();
    let sieve = Sieve::new(s);
    let target = gens[j] as i64;

    let mut front = ParetoFront::new();
    let mut x = vec![0u64; p];
    let mut value: i64 = 0;
    loop {
        if sieve.contains(value - target) {
            front.insert(FactorizationVector::new(x.clone()));
        }
        // Odometer over the box, last coordinate fastest.
        let mut i = p;
        loop {
            if i == 0 {
                let mut minimals = front.into_points();
                minimals.sort();
                minimals.insert(0, FactorizationVector::unit(p, j));
                return Ok(minimals);
            }
            i -= 1;
            if x[i] < caps[i] {
                x[i] += 1;
                value += gens[i] as i64;
                break;
            }
            value -= (x[i] * gens[i]) as i64;
            x[i] = 0;
        }
    }
}

/// ω(S, n_j) as the largest length in Minimals Z(n_j + S).
pub fn omega_bruteforce(s: &NumericalSemigroup, j: usize) -> Result<u64, OracleError> {
    Ok(minimals_of_z(s, j)?.iter().map(FactorizationVector::length).max().unwrap_or(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sg(gens: &[u64]) -> NumericalSemigroup {
        NumericalSemigroup::new(gens).unwrap()
    }

    fn fv(c: &[u64]) -> FactorizationVector {
        FactorizationVector::new(c.to_vec())
    }

    #[test]
    fn filter_examples() {
        let out = pareto_filter(&[fv(&[0, 1]), fv(&[1, 1]), fv(&[2, 0])]).unwrap();
        assert_eq!(out, vec![fv(&[0, 1]), fv(&[2, 0])]);
        assert_eq!(pareto_filter(&[]).unwrap(), vec![]);
        // (0,1,9) lies above (0,0,3).
        let pts = [fv(&[0, 2, 0]), fv(&[0, 0, 3]), fv(&[0, 1, 9])];
        assert_eq!(pareto_filter(&pts).unwrap(), vec![fv(&[0, 2, 0]), fv(&[0, 0, 3])]);
        let dup = [fv(&[1, 0]), fv(&[1, 0]), fv(&[2, 2])];
        assert_eq!(pareto_filter(&dup).unwrap(), vec![fv(&[1, 0])]);
        assert_eq!(
            pareto_filter(&[fv(&[1]), fv(&[1, 2])]),
            Err(OracleError::DimensionMismatch { expected: 1, got: 2 })
        );
    }

    #[test]
    fn minimal_sets() {
        assert_eq!(minimals_of_z(&sg(&[2, 3]), 0).unwrap(), vec![fv(&[1, 0]), fv(&[0, 2])]);
        let m = minimals_of_z(&sg(&[6, 13, 14]), 0).unwrap();
        assert_eq!(m, vec![fv(&[1, 0, 0]), fv(&[0, 0, 3]), fv(&[0, 2, 0])]);
        assert_eq!(minimals_of_z(&sg(&[5, 86, 99, 148, 152]), 0).unwrap().len(), 11);
        assert!(minimals_of_z(&sg(&[2, 3]), 2).is_err());
        // Tight box (-, 2, 3) for generator 6.
        assert_eq!(enumeration_size(&sg(&[6, 13, 14]), 0), Ok(12));
        assert!(enumeration_size(&sg(&[2, 3]), 5).is_err());
    }

    #[test]
    fn brute_force_omega() {
        assert_eq!(omega_bruteforce(&sg(&[6, 13, 14]), 0), Ok(3));
        assert_eq!(omega_bruteforce(&sg(&[2, 3]), 1), Ok(3));
        let s = sg(&[5, 86, 99, 148, 152]);
        assert_eq!(omega_bruteforce(&s, 3), Ok(60));
        assert!(minimals_of_z(&s, 3).unwrap().contains(&fv(&[60, 0, 0, 0, 0])));
    }

    #[test]
    fn gap_lists() {
        assert_eq!(gaps_direct(&sg(&[2, 3])), vec![1]);
        assert_eq!(gaps_direct(&sg(&[3, 4])), vec![1, 2, 5]);
        let g = gaps_direct(&sg(&[6, 13, 14]));
        assert_eq!(g.len(), 18);
        assert_eq!(g.last(), Some(&35));
    }

    #[test]
    fn front_replaces_dominated_points() {
        let mut f = ParetoFront::new();
        assert!(f.insert(fv(&[2, 2])));
        assert!(f.insert(fv(&[3, 0])));
        assert!(!f.insert(fv(&[3, 3])));
        assert!(f.insert(fv(&[1, 1])));
        assert_eq!(f.points(), &[fv(&[3, 0]), fv(&[1, 1])]);
    }

    fn small_semigroup() -> impl Strategy<Value = NumericalSemigroup> {
        prop::collection::vec(2u64..40, 2..5).prop_filter_map("not minimal", |g| NumericalSemigroup::new(&g).ok())
    }

    proptest! {
        #[test]
        fn filter_output_is_an_antichain_covering_the_input(raw in prop::collection::vec(prop::collection::vec(0u64..4, 3), 0..25)) {
            let pts: Vec<FactorizationVector> = raw.into_iter().map(FactorizationVector::new).collect();
            let out = pareto_filter(&pts).unwrap();
            for (a, x) in out.iter().enumerate() {
                for (b, y) in out.iter().enumerate() {
                    prop_assert!(a == b || !x.le_componentwise(y));
                }
            }
            for p in &pts {
                prop_assert!(out.iter().any(|m| m.le_componentwise(p)));
            }
        }

        #[test]
        fn minimal_sets_are_stable_under_box_enlargement(s in small_semigroup(), j in 0usize..4) {
            let j = j % s.embedding_dimension();
            let m = minimals_of_z(&s, j).unwrap();
            prop_assert_eq!(&m, &minimals_of_z_with_margin(&s, j, 2).unwrap());
            prop_assert_eq!(&m[0], &FactorizationVector::unit(s.embedding_dimension(), j));
            prop_assert!(m[1..].iter().all(|x| x.coords()[j] == 0));
            prop_assert!(m.iter().map(FactorizationVector::length).max().unwrap() >= 2);
        }

        #[test]
        fn sieve_matches_apery_invariants(s in small_semigroup()) {
            let gaps = gaps_direct(&s);
            prop_assert_eq!(gaps.len() as u64, s.genus());
            prop_assert_eq!(*gaps.last().unwrap(), s.frobenius());
        }
    }
}
