//! ω(S, n_j) by optimizing length over the efficient set.
//!
//! The minimal elements of Z(n_j + S) other than e_j are the non-dominated
//! points of the bounded multiobjective program
//!
//! ```text
//! min (x_1, …, x_p)  s.t.  Σ n_i x_i − Σ n_i y_i = n_j,  x_j = 0,  x ≤ box,  x, y ∈ ℕ^p
//! ```
//!
//! and ω(S, n_j) is the largest length among them. [`omega_j`] never
//! enumerates that efficient set. It alternates three single-objective
//! programs:
//!
//! * the relaxation, which maximizes length over all feasible points;
//! * the dominance step, which replaces a feasible point by a feasible point
//!   of least length in its down-set (necessarily a minimal element);
//! * the exclusion step, which maximizes length over feasible points that are
//!   not above any minimal element found so far, using one block of binary
//!   indicators and big-M rows per excluded point.
//!
//! The loop stops once the exclusion step is infeasible or cannot beat the
//! longest minimal element found.

use std::thread;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ilp::{self, IlpError, IntegerProgram, LinearConstraint, Relation, Sense, SolveOutcome, SolverConfig};
use crate::semigroup::{FactorizationVector, NumericalSemigroup, Submonoid};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OmegaError {
    #[error("generator index {index} out of range for embedding dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("point {0} is not feasible for the multiobjective region")]
    InfeasibleInput(FactorizationVector),
    #[error("internal error: {0} subproblem is infeasible")]
    InternalInfeasible(&'static str),
    #[error("invariant violated: {0}")]
    InvariantViolated(String),
    #[error("time limit reached")]
    TimedOut,
    #[error(transparent)]
    Solver(IlpError),
}

impl From<IlpError> for OmegaError {
    fn from(e: IlpError) -> Self {
        match e {
            IlpError::Interrupted => OmegaError::TimedOut,
            other => OmegaError::Solver(other),
        }
    }
}

/// Which per-variable box the multiobjective region uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundMode {
    /// box[i] = ub_{i,j}, the least multiple of n_i lying in n_j + ⟨n_t : t ≠ i⟩.
    #[default]
    Tight,
    /// box[i] = max_t ub_t for every i, one cap shared by all coordinates.
    Loose,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmegaOptions {
    pub bound_mode: BoundMode,
    /// Bound Σ n_i y_i between the multiplicity and max ⋃ Ap(S, n_i).
    pub apery_cuts: bool,
    /// Added to box[i] to form the big-M constant of coordinate i.
    pub big_m_slack: u64,
    /// Ask the exclusion step only for points longer than the best length found.
    pub length_cut: bool,
    #[serde(skip)]
    pub deadline: Option<Instant>,
}

impl Default for OmegaOptions {
    fn default() -> Self {
        OmegaOptions {
            bound_mode: BoundMode::Tight,
            apery_cuts: false,
            big_m_slack: 0,
            length_cut: true,
            deadline: None,
        }
    }
}

fn check_index(s: &NumericalSemigroup, index: usize) -> Result<(), OmegaError> {
    let dim = s.embedding_dimension();
    if index >= dim {
        return Err(OmegaError::IndexOutOfRange { index, dim });
    }
    Ok(())
}

/// Membership in ⟨n_t : t ≠ i⟩.
fn complement_submonoid(s: &NumericalSemigroup, i: usize) -> Submonoid {
    let others: Vec<u64> = s.generators().iter().enumerate().filter(|&(t, _)| t != i).map(|(_, &g)| g).collect();
    Submonoid::new(&others)
}

fn least_multiple(sub: &Submonoid, n_i: u64, n_k: u64) -> u64 {
    // x = n_k always works: n_i·n_k − n_k = (n_i − 1)·n_k.
    (1..=n_k).find(|&x| sub.contains((n_i * x) as i64 - n_k as i64)).expect("x = n_k is always representable")
}

/// ub_{ik}: the least x ≥ 1 with n_i·x − n_k ∈ ⟨n_t : t ≠ i⟩.
pub fn upper_bound(s: &NumericalSemigroup, i: usize, k: usize) -> Result<u64, OmegaError> {
    check_index(s, i)?;
    check_index(s, k)?;
    if i == k {
        return Err(OmegaError::InvariantViolated(format!("upper_bound needs distinct indices, got {i} twice")));
    }
    Ok(least_multiple(&complement_submonoid(s, i), s.generator(i), s.generator(k)))
}

/// Matrix of all ub_{ik}; the diagonal is zero.
pub fn bound_matrix(s: &NumericalSemigroup) -> Vec<Vec<u64>> {
    let p = s.embedding_dimension();
    (0..p)
        .map(|i| {
            let sub = complement_submonoid(s, i);
            (0..p).map(|k| if i == k { 0 } else { least_multiple(&sub, s.generator(i), s.generator(k)) }).collect()
        })
        .collect()
}

/// ub_i = max_k ub_{ik}, one cap per variable valid for every generator.
pub fn variable_bounds(s: &NumericalSemigroup) -> Vec<u64> {
    bound_matrix(s).iter().map(|row| row.iter().copied().max().unwrap_or(0)).collect()
}

/// The bounded multiobjective region attached to one generator.
#[derive(Debug, Clone)]
pub struct OmegaProblem<'a> {
    semigroup: &'a NumericalSemigroup,
    j: usize,
    x_bounds: Vec<u64>,
    big_m: Vec<u64>,
    y_bounds: Vec<u64>,
    bound_mode: BoundMode,
    apery_cut: Option<(u64, u64)>,
    deadline: Option<Instant>,
}

impl<'a> OmegaProblem<'a> {
    pub fn new(s: &'a NumericalSemigroup, j: usize, options: &OmegaOptions) -> Result<Self, OmegaError> {
        check_index(s, j)?;
        let p = s.embedding_dimension();
        let x_bounds: Vec<u64> = match options.bound_mode {
            BoundMode::Tight => (0..p)
                .map(|i| {
                    if i == j {
                        0
                    } else {
                        least_multiple(&complement_submonoid(s, i), s.generator(i), s.generator(j))
                    }
                })
                .collect(),
            BoundMode::Loose => {
                let cap = variable_bounds(s).into_iter().max().unwrap_or(0);
                (0..p).map(|i| if i == j { 0 } else { cap }).collect()
            }
        };
        let big_m = x_bounds.iter().map(|&b| b + options.big_m_slack).collect();
        // Σ n_i y_i = π(x) − n_j never exceeds π(box) − n_j.
        let reach: u64 = x_bounds.iter().zip(s.generators()).map(|(b, n)| b * n).sum::<u64>() - s.generator(j);
        let y_bounds = s.generators().iter().map(|n| reach / n).collect();
        let apery_cut = options.apery_cuts.then(|| {
            let top = (0..p).map(|i| s.apery_of_generator(i).max()).max().unwrap_or(0);
            (s.multiplicity(), top)
        });
        Ok(OmegaProblem {
            semigroup: s,
            j,
            x_bounds,
            big_m,
            y_bounds,
            bound_mode: options.bound_mode,
            apery_cut,
            deadline: options.deadline,
        })
    }

    pub fn semigroup(&self) -> &NumericalSemigroup {
        self.semigroup
    }

    pub fn generator_index(&self) -> usize {
        self.j
    }

    /// Per-coordinate caps on x; the entry for the generator itself is 0.
    pub fn x_bounds(&self) -> &[u64] {
        &self.x_bounds
    }

    pub fn big_m(&self) -> &[u64] {
        &self.big_m
    }

    pub fn y_bounds(&self) -> &[u64] {
        &self.y_bounds
    }

    pub fn bound_mode(&self) -> BoundMode {
        self.bound_mode
    }

    /// `(lower, upper)` bounds on Σ n_i y_i when Apéry cuts are attached.
    pub fn apery_cut(&self) -> Option<(u64, u64)> {
        self.apery_cut
    }

    fn dim(&self) -> usize {
        self.semigroup.embedding_dimension()
    }

    /// Whether `x` lies in the region: right dimension, inside the box with
    /// x_j = 0, π(x) − n_j ∈ S, and within the Apéry cuts when present.
    pub fn is_feasible(&self, x: &FactorizationVector) -> bool {
        if x.dim() != self.dim() || x.coords().iter().zip(&self.x_bounds).any(|(c, b)| c > b) {
            return false;
        }
        let Ok(value) = self.semigroup.evaluate(x) else {
            return false;
        };
        let w = value as i64 - self.semigroup.generator(self.j) as i64;
        let in_cut = self.apery_cut.is_none_or(|(lo, hi)| w >= lo as i64 && w <= hi as i64);
        in_cut && self.semigroup.contains(w)
    }

    /// Columns: x_0..x_{p-1}, then y_0..y_{p-1}, then any extra columns.
    fn program(&self, sense: Sense, extra: usize) -> IntegerProgram {
        let p = self.dim();
        let n = 2 * p + extra;
        let mut ip = IntegerProgram::new(n, sense);
        let gens = self.semigroup.generators();
        for i in 0..p {
            ip.set_bounds(i, 0, self.x_bounds[i] as i64);
            ip.set_bounds(p + i, 0, self.y_bounds[i] as i64);
        }
        let mut row = vec![0i64; n];
        for (i, &g) in gens.iter().enumerate() {
            row[i] = g as i64;
            row[p + i] = -(g as i64);
        }
        ip.add_constraint(LinearConstraint::new(row, Relation::Eq, gens[self.j] as i64));
        if let Some((lo, hi)) = self.apery_cut {
            let terms: Vec<(usize, i64)> = gens.iter().enumerate().map(|(i, &g)| (p + i, g as i64)).collect();
            ip.add_constraint(LinearConstraint::sparse(n, &terms, Relation::Ge, lo as i64));
            ip.add_constraint(LinearConstraint::sparse(n, &terms, Relation::Le, hi as i64));
        }
        ip
    }

    fn set_length_objective(&self, ip: &mut IntegerProgram) {
        for i in 0..self.dim() {
            ip.set_objective_coefficient(i, 1);
        }
    }

    fn solve(&self, ip: &IntegerProgram) -> Result<SolveOutcome, OmegaError> {
        Ok(ilp::solve_with(ip, &SolverConfig { deadline: self.deadline })?)
    }

    fn x_part(&self, witness: &[i64]) -> FactorizationVector {
        FactorizationVector::new(witness[..self.dim()].iter().map(|&v| v as u64).collect())
    }

    /// Longest feasible point, ignoring minimality.
    pub fn relaxation(&self) -> Result<FactorizationVector, OmegaError> {
        let mut ip = self.program(Sense::Maximize, 0);
        self.set_length_objective(&mut ip);
        match self.solve(&ip)? {
            SolveOutcome::Optimal { witness, .. } => Ok(self.x_part(&witness)),
            SolveOutcome::Infeasible => Err(OmegaError::InternalInfeasible("relaxation")),
        }
    }

    /// A feasible point of least length below `x_star`. Such a point is a
    /// minimal element of the region that dominates `x_star`.
    pub fn ecker_kouada(&self, x_star: &FactorizationVector) -> Result<FactorizationVector, OmegaError> {
        if !self.is_feasible(x_star) {
            return Err(OmegaError::InfeasibleInput(x_star.clone()));
        }
        let mut ip = self.program(Sense::Minimize, 0);
        self.set_length_objective(&mut ip);
        for (i, &c) in x_star.coords().iter().enumerate() {
            ip.set_bounds(i, 0, c as i64);
        }
        match self.solve(&ip)? {
            SolveOutcome::Optimal { witness, .. } => Ok(self.x_part(&witness)),
            SolveOutcome::Infeasible => Err(OmegaError::InternalInfeasible("dominance")),
        }
    }

    /// Longest feasible point that is not component-wise above any point of
    /// `excluded`, optionally restricted to length at least `min_length`.
    /// `None` when no such point exists.
    pub fn nemhauser_wolsey(
        &self,
        excluded: &[FactorizationVector],
        min_length: Option<u64>,
    ) -> Result<Option<FactorizationVector>, OmegaError> {
        let p = self.dim();
        if let Some(bad) = excluded.iter().find(|e| e.dim() != p) {
            return Err(OmegaError::InfeasibleInput(bad.clone()));
        }
        let mut ip = self.program(Sense::Maximize, excluded.len() * p);
        self.set_length_objective(&mut ip);
        let n = ip.num_vars();
        for (k, point) in excluded.iter().enumerate() {
            let z = |i: usize| 2 * p + k * p + i;
            for i in 0..p {
                ip.set_binary(z(i));
                // x_i ≤ z·(x̄_i − 1) + M_i·(1 − z)
                let m = self.big_m[i] as i64;
                let coef = m - point.coords()[i] as i64 + 1;
                ip.add_constraint(LinearConstraint::sparse(n, &[(i, 1), (z(i), coef)], Relation::Le, m));
            }
            let any: Vec<(usize, i64)> = (0..p).map(|i| (z(i), 1)).collect();
            ip.add_constraint(LinearConstraint::sparse(n, &any, Relation::Ge, 1));
        }
        if let Some(len) = min_length {
            let terms: Vec<(usize, i64)> = (0..p).map(|i| (i, 1)).collect();
            ip.add_constraint(LinearConstraint::sparse(n, &terms, Relation::Ge, len as i64));
        }
        Ok(self.solve(&ip)?.witness().map(|w| self.x_part(w)))
    }
}

/// One pass of the main loop.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Relaxation point on the first pass, previous exclusion point after.
    pub start_point: FactorizationVector,
    /// Minimal element obtained from `start_point`.
    pub ek_point: FactorizationVector,
    /// Exclusion-step optimum; `None` when infeasible.
    pub nw_point: Option<FactorizationVector>,
    /// Longest minimal length found so far.
    pub lower: u64,
    /// Upper bound on ω(S, n_j) after this pass.
    pub upper: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmegaResult {
    pub generator: u64,
    pub index: usize,
    pub omega: u64,
    /// A discovered minimal element of length `omega`.
    pub witness: FactorizationVector,
    /// Minimal elements met by the dominance step, in discovery order
    /// (e_j is not among them).
    pub minimals_found: Vec<FactorizationVector>,
    pub iterations: usize,
    pub ek_solves: usize,
    pub nw_solves: usize,
    pub trace: Vec<IterationRecord>,
}

/// ω(S, n_j) for the generator with index `j` (0-based).
pub fn omega_j(s: &NumericalSemigroup, j: usize, options: &OmegaOptions) -> Result<OmegaResult, OmegaError> {
    let problem = OmegaProblem::new(s, j, options)?;
    let first = problem.relaxation()?;
    let mut lower = 0;
    let mut witness: Option<FactorizationVector> = None;
    let mut found: Vec<FactorizationVector> = Vec::new();
    let mut trace = Vec::new();
    let mut current = first;
    let mut nw_solves = 0;

    loop {
        let minimal = problem.ecker_kouada(&current)?;
        if found.contains(&minimal) {
            return Err(OmegaError::InvariantViolated(format!("minimal element {minimal} found twice")));
        }
        if minimal.length() > lower {
            lower = minimal.length();
            witness = Some(minimal.clone());
        }
        found.push(minimal.clone());

        let min_length = options.length_cut.then_some(lower + 1);
        let next = problem.nemhauser_wolsey(&found, min_length)?;
        nw_solves += 1;
        let (upper, stop) = match &next {
            Some(point) => (point.length(), point.length() <= lower),
            None => (lower, true),
        };
        trace.push(IterationRecord {
            iteration: trace.len() + 1,
            start_point: current.clone(),
            ek_point: minimal,
            nw_point: next.clone(),
            lower,
            upper,
        });
        match next {
            Some(point) if !stop => current = point,
            _ => break,
        }
    }

    let witness = witness.expect("at least one iteration ran");
    if lower < 2 {
        return Err(OmegaError::InvariantViolated(format!("omega(S, {}) = {lower} < 2", s.generator(j))));
    }
    Ok(OmegaResult {
        generator: s.generator(j),
        index: j,
        omega: lower,
        witness,
        iterations: trace.len(),
        ek_solves: found.len(),
        nw_solves,
        minimals_found: found,
        trace,
    })
}

/// ω(S) together with the per-generator results, ordered by generator.
pub fn omega(s: &NumericalSemigroup, options: &OmegaOptions) -> Result<(u64, Vec<OmegaResult>), OmegaError> {
    omega_parallel(s, options, 1)
}

/// Like [`omega`], spreading the generators over `jobs` threads.
pub fn omega_parallel(
    s: &NumericalSemigroup,
    options: &OmegaOptions,
    jobs: usize,
) -> Result<(u64, Vec<OmegaResult>), OmegaError> {
    let p = s.embedding_dimension();
    let jobs = jobs.clamp(1, p);
    let results: Vec<Result<OmegaResult, OmegaError>> = if jobs == 1 {
        (0..p).map(|j| omega_j(s, j, options)).collect()
    } else {
        let mut slots: Vec<Option<Result<OmegaResult, OmegaError>>> = vec![None; p];
        thread::scope(|scope| {
            let handles: Vec<_> = (0..jobs)
                .map(|w| {
                    scope.spawn(move || (w..p).step_by(jobs).map(|j| (j, omega_j(s, j, options))).collect::<Vec<_>>())
                })
                .collect();
            for h in handles {
                for (j, r) in h.join().expect("omega worker panicked") {
                    slots[j] = Some(r);
                }
            }
        });
        slots.into_iter().map(|r| r.expect("every generator assigned")).collect()
    };
    let results = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let best = results.iter().map(|r| r.omega).max().unwrap_or(0);
    Ok((best, results))
}
