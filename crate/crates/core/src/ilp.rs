//! Exact solver for bounded integer linear programs.
//!
//! Depth-first branch-and-bound over the integer box. Every node runs
//! interval bound propagation over the constraint rows; equality rows are
//! additionally screened with reachable-sum tables (for the suffix of the row
//! that is still free) or, when a table would be too large, with a gcd test.
//! All arithmetic is integral.
//!
//! Among optimal solutions the lexicographically smallest witness is
//! returned. For maximization the optimum value is found first with values
//! tried in descending order, then a second ascending pass locates the
//! lexicographically smallest point attaining it.

use std::time::Instant;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Le,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Integer,
    Binary,
}

/// `coefficients · x  (relation)  rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearConstraint {
    pub coefficients: Vec<i64>,
    pub relation: Relation,
    pub rhs: i64,
}

impl LinearConstraint {
    pub fn new(coefficients: Vec<i64>, relation: Relation, rhs: i64) -> Self {
        LinearConstraint { coefficients, relation, rhs }
    }

    /// Builds a dense row from `(variable, coefficient)` pairs.
    pub fn sparse(num_vars: usize, terms: &[(usize, i64)], relation: Relation, rhs: i64) -> Self {
        let mut coefficients = vec![0; num_vars];
        for &(v, c) in terms {
            coefficients[v] += c;
        }
        LinearConstraint { coefficients, relation, rhs }
    }

    fn satisfied_by(&self, x: &[i64]) -> bool {
        let lhs: i128 = self.coefficients.iter().zip(x).map(|(&a, &v)| a as i128 * v as i128).sum();
        let rhs = self.rhs as i128;
        match self.relation {
            Relation::Eq => lhs == rhs,
            Relation::Le => lhs <= rhs,
            Relation::Ge => lhs >= rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerProgram {
    num_vars: usize,
    sense: Sense,
    objective: Vec<i64>,
    constraints: Vec<LinearConstraint>,
    lower: Vec<i64>,
    upper: Vec<Option<i64>>,
    kinds: Vec<VarKind>,
}

impl IntegerProgram {
    /// A program with zero objective, no constraints and every variable in
    /// `[0, ∞)`; upper bounds must be set before solving.
    pub fn new(num_vars: usize, sense: Sense) -> Self {
        IntegerProgram {
            num_vars,
            sense,
            objective: vec![0; num_vars],
            constraints: Vec::new(),
            lower: vec![0; num_vars],
            upper: vec![None; num_vars],
            kinds: vec![VarKind::Integer; num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn objective(&self) -> &[i64] {
        &self.objective
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    pub fn bounds(&self, var: usize) -> (i64, Option<i64>) {
        (self.lower[var], self.upper[var])
    }

    pub fn kind(&self, var: usize) -> VarKind {
        self.kinds[var]
    }

    pub fn set_objective(&mut self, coefficients: Vec<i64>) {
        self.objective = coefficients;
    }

    pub fn set_objective_coefficient(&mut self, var: usize, c: i64) {
        self.objective[var] = c;
    }

    pub fn add_constraint(&mut self, constraint: LinearConstraint) {
        self.constraints.push(constraint);
    }

    pub fn set_bounds(&mut self, var: usize, lower: i64, upper: i64) {
        self.lower[var] = lower;
        self.upper[var] = Some(upper);
    }

    pub fn set_upper(&mut self, var: usize, upper: i64) {
        self.upper[var] = Some(upper);
    }

    pub fn set_binary(&mut self, var: usize) {
        self.kinds[var] = VarKind::Binary;
        self.lower[var] = self.lower[var].max(0);
        self.upper[var] = Some(self.upper[var].map_or(1, |u| u.min(1)));
    }

    pub fn objective_value(&self, x: &[i64]) -> i64 {
        self.objective.iter().zip(x).map(|(&c, &v)| c * v).sum()
    }

    /// Exact check of bounds, kinds and every constraint.
    pub fn is_feasible(&self, x: &[i64]) -> bool {
        x.len() == self.num_vars
            && (0..self.num_vars).all(|v| {
                let (lo, hi) = (self.lower[v], self.upper[v]);
                let binary_ok = self.kinds[v] == VarKind::Integer || (0..=1).contains(&x[v]);
                x[v] >= lo && hi.is_none_or(|h| x[v] <= h) && binary_ok
            })
            && self.constraints.iter().all(|c| c.satisfied_by(x))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    Optimal { value: i64, witness: Vec<i64> },
    Infeasible,
}

impl SolveOutcome {
    pub fn is_optimal(&self) -> bool {
        matches!(self, SolveOutcome::Optimal { .. })
    }

    pub fn value(&self) -> Option<i64> {
        match self {
            SolveOutcome::Optimal { value, .. } => Some(*value),
            SolveOutcome::Infeasible => None,
        }
    }

    pub fn witness(&self) -> Option<&[i64]> {
        match self {
            SolveOutcome::Optimal { witness, .. } => Some(witness),
            SolveOutcome::Infeasible => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IlpError {
    #[error("variable {0} has no finite upper bound")]
    UnboundedVariable(usize),
    #[error("malformed model: {0}")]
    ModelMalformed(String),
    #[error("deadline reached before the search finished")]
    Interrupted,
}

#[derive(Debug, Clone, Default)]
pub struct SolverConfig {
    /// Abort with [`IlpError::Interrupted`] once this instant has passed.
    pub deadline: Option<Instant>,
}

/// Magnitude cap for row activities; keeps all propagation arithmetic in i64.
const MAGNITUDE_LIMIT: i128 = 1 << 60;
const NO_BOUND: i64 = 1 << 61;
/// Reachable-sum tables larger than this many bits are not built.
const MAX_TABLE_BITS: u64 = 1 << 24;

pub fn solve(ip: &IntegerProgram) -> Result<SolveOutcome, IlpError> {
    solve_with(ip, &SolverConfig::default())
}

pub fn solve_with(ip: &IntegerProgram, config: &SolverConfig) -> Result<SolveOutcome, IlpError> {
    validate(ip)?;
    let Some(model) = Model::build(ip) else {
        return Ok(SolveOutcome::Infeasible);
    };

    // Phase 1: optimum value, improving direction first.
    let improving_order: Vec<bool> = model.objective.iter().map(|&c| c <= 0).collect();
    let mut search = Search::new(&model, improving_order, Goal::Optimize, config.deadline);
    search.run(model.root.clone())?;
    let Some((best, mut witness)) = search.best.take() else {
        return Ok(SolveOutcome::Infeasible);
    };

    // With every variable ascending, phase 1 already visited leaves in
    // lexicographic order.
    if model.objective.iter().any(|&c| c > 0) {
        let ascending = vec![true; model.n];
        let mut search = Search::new(&model, ascending, Goal::Reach(best), config.deadline);
        search.run(model.root.clone())?;
        let (_, w) = search.best.take().expect("phase 1 optimum exists");
        witness = w;
    }

    debug_assert!(ip.is_feasible(&witness));
    let value = ip.objective_value(&witness);
    Ok(SolveOutcome::Optimal { value, witness })
}

fn validate(ip: &IntegerProgram) -> Result<(), IlpError> {
    let n = ip.num_vars;
    if ip.objective.len() != n {
        return Err(IlpError::ModelMalformed(format!(
            "objective has {} coefficients, expected {n}",
            ip.objective.len()
        )));
    }
    if ip.lower.len() != n || ip.upper.len() != n || ip.kinds.len() != n {
        return Err(IlpError::ModelMalformed("bound vectors do not match num_vars".into()));
    }
    for (i, c) in ip.constraints.iter().enumerate() {
        if c.coefficients.len() != n {
            return Err(IlpError::ModelMalformed(format!(
                "constraint {i} has {} coefficients, expected {n}",
                c.coefficients.len()
            )));
        }
    }
    if let Some(v) = ip.upper.iter().position(Option::is_none) {
        return Err(IlpError::UnboundedVariable(v));
    }
    let magnitude = |v: usize| (ip.lower[v].unsigned_abs()).max(ip.upper[v].unwrap().unsigned_abs()) as i128;
    let too_big = |coefs: &[i64], rhs: i64| {
        let act: i128 = coefs.iter().enumerate().map(|(v, &a)| a.unsigned_abs() as i128 * magnitude(v)).sum();
        act > MAGNITUDE_LIMIT || (rhs.unsigned_abs() as i128) > MAGNITUDE_LIMIT
    };
    if too_big(&ip.objective, 0) {
        return Err(IlpError::ModelMalformed("objective range exceeds 2^60".into()));
    }
    if let Some(i) = ip.constraints.iter().position(|c| too_big(&c.coefficients, c.rhs)) {
        return Err(IlpError::ModelMalformed(format!("constraint {i} range exceeds 2^60")));
    }
    Ok(())
}

fn floor_div(n: i64, d: i64) -> i64 {
    if d < 0 {
        (-n).div_euclid(-d)
    } else {
        n.div_euclid(d)
    }
}

fn ceil_div(n: i64, d: i64) -> i64 {
    -floor_div(-n, d)
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Set of integers in `[base, base + len)`, stored as bits.
#[derive(Debug, Clone)]
struct Reach {
    base: i64,
    len: u64,
    bits: Vec<u64>,
}

impl Reach {
    fn zero() -> Self {
        Reach { base: 0, len: 1, bits: vec![1] }
    }

    fn contains(&self, v: i64) -> bool {
        if v < self.base {
            return false;
        }
        let off = (v - self.base) as u64;
        off < self.len && (self.bits[(off / 64) as usize] >> (off % 64)) & 1 == 1
    }

    /// `{ s + a·t : s ∈ self, t ∈ [lo, hi] }`, or `None` when too large.
    fn extend(&self, a: i64, lo: i64, hi: i64) -> Option<Reach> {
        let step = a.unsigned_abs();
        let width = (hi - lo) as u64;
        let len = self.len.checked_add(step.checked_mul(width)?)?;
        if len > MAX_TABLE_BITS {
            return None;
        }
        let base = self.base + (a * lo).min(a * hi);
        let mut bits = vec![0u64; len.div_ceil(64) as usize];
        bits[..self.bits.len()].copy_from_slice(&self.bits);
        // Binary splitting of [0, width] into chunks 1, 2, 4, …, remainder.
        let mut remaining = width;
        let mut chunk = 1u64;
        while remaining > 0 {
            let take = chunk.min(remaining);
            or_shifted(&mut bits, step * take);
            remaining -= take;
            chunk *= 2;
        }
        let tail = len % 64;
        if tail != 0 {
            *bits.last_mut().unwrap() &= (1u64 << tail) - 1;
        }
        Some(Reach { base, len, bits })
    }
}

/// `bits |= bits << shift`, in place.
fn or_shifted(bits: &mut [u64], shift: u64) {
    let words = (shift / 64) as usize;
    let offset = (shift % 64) as u32;
    if words >= bits.len() {
        return;
    }
    for i in (words..bits.len()).rev() {
        let src = i - words;
        let mut w = bits[src] << offset;
        if offset > 0 && src > 0 {
            w |= bits[src - 1] >> (64 - offset);
        }
        bits[i] |= w;
    }
}

#[derive(Debug)]
struct Row {
    vars: Vec<usize>,
    coefs: Vec<i64>,
    lo: i64,
    hi: i64,
    /// For equality rows: `tables[k]` holds the sums reachable by positions
    /// `k..` under the root domains, when small enough to store.
    tables: Vec<Option<Reach>>,
}

impl Row {
    fn is_eq(&self) -> bool {
        self.lo == self.hi
    }
}

type Domains = Vec<(i64, i64)>;

#[derive(Debug)]
struct Model {
    n: usize,
    /// Objective in maximization form.
    objective: Vec<i64>,
    rows: Vec<Row>,
    var_rows: Vec<Vec<usize>>,
    /// Per variable: `(row, position)` for each equality row it occurs in.
    var_eq_positions: Vec<Vec<(usize, usize)>>,
    root: Domains,
}

impl Model {
    /// `None` when the root node is already infeasible.
    fn build(ip: &IntegerProgram) -> Option<Model> {
        let n = ip.num_vars;
        let objective: Vec<i64> = match ip.sense {
            Sense::Maximize => ip.objective.clone(),
            Sense::Minimize => ip.objective.iter().map(|c| -c).collect(),
        };
        let mut root: Domains = (0..n).map(|v| (ip.lower[v], ip.upper[v].unwrap())).collect();
        for (v, d) in root.iter_mut().enumerate() {
            if ip.kinds[v] == VarKind::Binary {
                d.0 = d.0.max(0);
                d.1 = d.1.min(1);
            }
            if d.0 > d.1 {
                return None;
            }
        }

        let mut rows = Vec::new();
        for c in &ip.constraints {
            let (vars, coefs): (Vec<usize>, Vec<i64>) =
                c.coefficients.iter().enumerate().filter(|(_, &a)| a != 0).map(|(v, &a)| (v, a)).unzip();
            let (lo, hi) = match c.relation {
                Relation::Eq => (c.rhs, c.rhs),
                Relation::Le => (-NO_BOUND, c.rhs),
                Relation::Ge => (c.rhs, NO_BOUND),
            };
            if vars.is_empty() {
                if lo > 0 || hi < 0 {
                    return None;
                }
                continue;
            }
            rows.push(Row { vars, coefs, lo, hi, tables: Vec::new() });
        }

        let mut var_rows = vec![Vec::new(); n];
        let mut var_eq_positions = vec![Vec::new(); n];
        for (r, row) in rows.iter().enumerate() {
            for (k, &v) in row.vars.iter().enumerate() {
                var_rows[v].push(r);
                if row.is_eq() {
                    var_eq_positions[v].push((r, k));
                }
            }
        }

        let mut model = Model { n, objective, rows, var_rows, var_eq_positions, root };
        let mut root = std::mem::take(&mut model.root);
        let all_rows: Vec<usize> = (0..model.rows.len()).collect();
        if !model.propagate(&mut root, &all_rows) {
            return None;
        }
        for row in model.rows.iter_mut().filter(|r| r.is_eq()) {
            let len = row.vars.len();
            let mut tables: Vec<Option<Reach>> = vec![None; len + 1];
            tables[len] = Some(Reach::zero());
            for k in (0..len).rev() {
                let (lo, hi) = root[row.vars[k]];
                match tables[k + 1].as_ref().and_then(|t| t.extend(row.coefs[k], lo, hi)) {
                    Some(t) => tables[k] = Some(t),
                    None => break,
                }
            }
            row.tables = tables;
        }
        if !model.tables_admit(&root) {
            return None;
        }
        model.root = root;
        Some(model)
    }

    /// Interval propagation to a (capped) fixpoint. Returns false on an
    /// empty domain or a violated row.
    fn propagate(&self, dom: &mut Domains, seeds: &[usize]) -> bool {
        let mut queued = vec![false; self.rows.len()];
        let mut queue: Vec<usize> = Vec::with_capacity(seeds.len());
        for &r in seeds {
            if !queued[r] {
                queued[r] = true;
                queue.push(r);
            }
        }
        let mut budget = 32 * self.rows.len() + 256;
        let mut head = 0;
        while head < queue.len() {
            let r = queue[head];
            head += 1;
            queued[r] = false;
            if budget == 0 {
                // Still check the remaining rows for violation.
                if !self.row_consistent(&self.rows[r], dom) {
                    return false;
                }
                continue;
            }
            budget -= 1;
            let row = &self.rows[r];
            let (mut min_act, mut max_act) = (0i64, 0i64);
            for (&v, &a) in row.vars.iter().zip(&row.coefs) {
                let (lo, hi) = dom[v];
                let (p, q) = (a * lo, a * hi);
                min_act += p.min(q);
                max_act += p.max(q);
            }
            if min_act > row.hi || max_act < row.lo {
                return false;
            }
            for (&v, &a) in row.vars.iter().zip(&row.coefs) {
                let (lo, hi) = dom[v];
                let (p, q) = (a * lo, a * hi);
                let rest_min = min_act - p.min(q);
                let rest_max = max_act - p.max(q);
                let (mut new_lo, mut new_hi) = (lo, hi);
                if row.hi < NO_BOUND {
                    let cap = row.hi - rest_min;
                    if a > 0 {
                        new_hi = new_hi.min(floor_div(cap, a));
                    } else {
                        new_lo = new_lo.max(ceil_div(cap, a));
                    }
                }
                if row.lo > -NO_BOUND {
                    let floor = row.lo - rest_max;
                    if a > 0 {
                        new_lo = new_lo.max(ceil_div(floor, a));
                    } else {
                        new_hi = new_hi.min(floor_div(floor, a));
                    }
                }
                if new_lo > new_hi {
                    return false;
                }
                if (new_lo, new_hi) != (lo, hi) {
                    dom[v] = (new_lo, new_hi);
                    for &r2 in &self.var_rows[v] {
                        if r2 != r && !queued[r2] {
                            queued[r2] = true;
                            queue.push(r2);
                        }
                    }
                }
            }
        }
        true
    }

    fn row_consistent(&self, row: &Row, dom: &Domains) -> bool {
        let (mut min_act, mut max_act) = (0i64, 0i64);
        for (&v, &a) in row.vars.iter().zip(&row.coefs) {
            let (p, q) = (a * dom[v].0, a * dom[v].1);
            min_act += p.min(q);
            max_act += p.max(q);
        }
        min_act <= row.hi && max_act >= row.lo
    }

    /// Reachability (or gcd) screening of every equality row.
    fn tables_admit(&self, dom: &Domains) -> bool {
        self.rows.iter().filter(|r| r.is_eq()).all(|row| {
            let k = row.vars.iter().position(|&v| dom[v].0 != dom[v].1).unwrap_or(row.vars.len());
            let prefix: i64 = (0..k).map(|i| row.coefs[i] * dom[row.vars[i]].0).sum();
            if let Some(table) = &row.tables.get(k).and_then(Option::as_ref) {
                return table.contains(row.lo - prefix);
            }
            let mut residual = row.lo - prefix;
            let mut g = 0;
            for i in k..row.vars.len() {
                let (lo, hi) = dom[row.vars[i]];
                if lo == hi {
                    residual -= row.coefs[i] * lo;
                } else {
                    g = gcd_i64(g, row.coefs[i]);
                }
            }
            if g == 0 {
                residual == 0
            } else {
                residual % g == 0
            }
        })
    }

    fn bound(&self, dom: &Domains) -> i64 {
        self.objective.iter().zip(dom).map(|(&c, &(lo, hi))| (c * lo).max(c * hi)).sum()
    }
}

#[derive(Debug, Clone, Copy)]
enum Goal {
    /// Strictly improve on the incumbent until the tree is exhausted.
    Optimize,
    /// Stop at the first leaf whose value reaches the target.
    Reach(i64),
}

struct Search<'m> {
    model: &'m Model,
    ascending: Vec<bool>,
    goal: Goal,
    best: Option<(i64, Vec<i64>)>,
    deadline: Option<Instant>,
    nodes: u64,
}

impl<'m> Search<'m> {
    fn new(model: &'m Model, ascending: Vec<bool>, goal: Goal, deadline: Option<Instant>) -> Self {
        Search { model, ascending, goal, best: None, deadline, nodes: 0 }
    }

    fn run(&mut self, root: Domains) -> Result<(), IlpError> {
        self.check_deadline()?;
        self.dfs(root).map(|_| ())
    }

    fn check_deadline(&self) -> Result<(), IlpError> {
        match self.deadline {
            Some(d) if Instant::now() >= d => Err(IlpError::Interrupted),
            _ => Ok(()),
        }
    }

    fn admits(&self, bound: i64) -> bool {
        match self.goal {
            Goal::Optimize => self.best.as_ref().is_none_or(|(b, _)| bound > *b),
            Goal::Reach(t) => bound >= t,
        }
    }

    /// Explores the subtree of an already propagated node. Returns true when
    /// the search should stop.
    fn dfs(&mut self, dom: Domains) -> Result<bool, IlpError> {
        self.nodes += 1;
        if self.nodes.is_multiple_of(4096) {
            self.check_deadline()?;
        }
        let m = self.model;
        let bound = m.bound(&dom);
        if !self.admits(bound) {
            return Ok(false);
        }
        let Some(var) = (0..m.n).find(|&v| dom[v].0 != dom[v].1) else {
            let x: Vec<i64> = dom.iter().map(|d| d.0).collect();
            if m.rows.iter().all(|r| {
                let act: i64 = r.vars.iter().zip(&r.coefs).map(|(&v, &a)| a * x[v]).sum();
                r.lo <= act && act <= r.hi
            }) {
                let value: i64 = m.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
                self.best = Some((value, x));
                return Ok(matches!(self.goal, Goal::Reach(_)));
            }
            return Ok(false);
        };

        let c = m.objective[var];
        let (lo, hi) = dom[var];
        let rest = bound - (c * lo).max(c * hi);

        // Equality rows where `var` is the first free position: the value
        // must leave a residual reachable by the rest of the row.
        let screens: Vec<(&Reach, i64, i64)> = m.var_eq_positions[var]
            .iter()
            .filter_map(|&(r, k)| {
                let row = &m.rows[r];
                let prefix_fixed = row.vars[..k].iter().all(|&u| dom[u].0 == dom[u].1);
                let table = row.tables.get(k + 1)?.as_ref()?;
                prefix_fixed.then(|| {
                    let prefix: i64 = (0..k).map(|i| row.coefs[i] * dom[row.vars[i]].0).sum();
                    (table, row.lo - prefix, row.coefs[k])
                })
            })
            .collect();

        let ascending = self.ascending[var];
        let mut value = if ascending { lo } else { hi };
        loop {
            if value < lo || value > hi {
                break;
            }
            let child_bound = rest + c * value;
            if !self.admits(child_bound) {
                // Further values in this direction only get worse when the
                // order follows the objective.
                let worsening = (ascending && c < 0) || (!ascending && c > 0);
                if worsening || c == 0 {
                    break;
                }
            } else if screens.iter().all(|(t, residual, a)| t.contains(residual - a * value)) {
                let mut child = dom.clone();
                child[var] = (value, value);
                if m.propagate(&mut child, &m.var_rows[var]) && m.tables_admit(&child) && self.dfs(child)? {
                    return Ok(true);
                }
            }
            value += if ascending { 1 } else { -1 };
        }
        Ok(false)
    }
}
