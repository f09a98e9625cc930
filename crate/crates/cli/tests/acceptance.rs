//! Acceptance suite. Prints one PASS, FAIL or SKIP line per criterion and
//! exits non-zero if any criterion fails.

use std::cell::RefCell;
use std::process::Command;
use std::time::{Duration, Instant};

use omega_core::ilp::{self, IntegerProgram, LinearConstraint, Relation, Sense, SolveOutcome};
use omega_core::oes::{omega_j, variable_bounds, BoundMode, OmegaError, OmegaOptions, OmegaResult};
use omega_core::oracle::{gaps_direct, minimals_of_z, omega_bruteforce};
use omega_core::NumericalSemigroup;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

enum Verdict {
    Pass(String),
    Fail(String),
    Skip(String),
}

/// A row of the p=5 results table: generators, then per generator
/// (ω, printed witness, #min).
struct TableRow {
    name: &'static str,
    generators: [u64; 5],
    omega: [u64; 5],
    witnesses: [[u64; 5]; 5],
    min_counts: [usize; 5],
}

const P5_ROWS: [TableRow; 5] = [
    TableRow {
        name: "S5(1)",
        generators: [20, 354, 402, 417, 429],
        omega: [4, 60, 63, 60, 60],
        witnesses: [[0, 0, 0, 0, 4], [60, 0, 0, 0, 0], [63, 0, 0, 0, 0], [60, 0, 0, 0, 0], [60, 0, 0, 0, 0]],
        min_counts: [12, 14, 17, 16, 20],
    },
    TableRow {
        name: "S5(2)",
        generators: [7, 292, 359, 645, 755],
        omega: [3, 93, 93, 200, 200],
        witnesses: [[0, 3, 0, 0, 0], [93, 0, 0, 0, 0], [93, 0, 0, 0, 0], [200, 0, 0, 0, 0], [200, 0, 0, 0, 0]],
        min_counts: [11, 11, 13, 15, 19],
    },
    TableRow {
        name: "S5(3)",
        generators: [5, 86, 99, 148, 152],
        omega: [2, 37, 37, 60, 60],
        witnesses: [[0, 0, 0, 2, 0], [37, 0, 0, 0, 0], [37, 0, 0, 0, 0], [60, 0, 0, 0, 0], [60, 0, 0, 0, 0]],
        min_counts: [11, 12, 12, 13, 13],
    },
    TableRow {
        name: "S5(4)",
        generators: [41, 65, 155, 317, 377],
        omega: [14, 22, 24, 22, 31],
        witnesses: [[0, 14, 0, 0, 0], [22, 0, 0, 0, 0], [24, 0, 0, 0, 0], [21, 0, 1, 0, 0], [31, 0, 0, 0, 0]],
        min_counts: [14, 14, 18, 28, 35],
    },
    TableRow {
        name: "S5(5)",
        generators: [28, 55, 125, 233, 590],
        omega: [10, 25, 27, 26, 30],
        witnesses: [[0, 10, 0, 0, 0], [25, 0, 0, 0, 0], [27, 0, 0, 0, 0], [26, 0, 0, 0, 0], [24, 5, 0, 1, 0]],
        min_counts: [12, 12, 15, 17, 48],
    },
];

/// Every ω value computed by the suite, for the global lower-bound check.
struct Ledger {
    solved: RefCell<Vec<(Vec<u64>, u64, u64)>>,
}

impl Ledger {
    fn solve(&self, s: &NumericalSemigroup, j: usize, options: &OmegaOptions) -> Result<OmegaResult, OmegaError> {
        let r = omega_j(s, j, options)?;
        self.solved.borrow_mut().push((s.generators().to_vec(), r.generator, r.omega));
        Ok(r)
    }
}

fn random_semigroup(rng: &mut ChaCha8Rng, dims: &[usize], max_gen: u64) -> NumericalSemigroup {
    loop {
        let p = *dims.choose(rng).unwrap();
        let gens: Vec<u64> = (0..p).map(|_| rng.gen_range(2..=max_gen)).collect();
        if let Ok(s) = NumericalSemigroup::new(&gens) {
            if s.embedding_dimension() == p {
                return s;
            }
        }
    }
}

fn criterion_worked_example() -> Verdict {
    let bin = env!("CARGO_BIN_EXE_nsomega");
    let start = Instant::now();
    let out = Command::new(bin).args(["omega", "--gens", "6,13,14", "--format", "json"]).output().unwrap();
    let elapsed = start.elapsed();
    if !out.status.success() {
        return Verdict::Fail(format!("exit status {}", out.status));
    }
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let per: Vec<u64> =
        json["per_generator"].as_array().unwrap().iter().map(|g| g["omega"].as_u64().unwrap()).collect();
    if json["omega"] != 9 || per != [3, 9, 7] || elapsed >= Duration::from_secs(1) {
        return Verdict::Fail(format!("omega {} per generator {per:?} in {elapsed:?}", json["omega"]));
    }

    let out = Command::new(bin)
        .args(["omega", "--gens", "6,13,14", "--bound-mode", "loose", "--trace", "--generator", "6"])
        .output()
        .unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    let expected =
        ["iteration 1: start (0,9,9) ek (0,2,0) nw (0,1,9)", "iteration 2: start (0,1,9) ek (0,0,3) nw infeasible"];
    let traced: Vec<&str> = text.lines().filter(|l| l.trim_start().starts_with("iteration")).collect();
    let ok = traced.len() == 2 && traced.iter().zip(expected).all(|(line, want)| line.trim_start().starts_with(want));
    if !ok {
        return Verdict::Fail(format!("trace was {traced:?}"));
    }
    Verdict::Pass(format!("omega 9 = max(3, 9, 7) in {elapsed:?}; loose trace matches"))
}

fn criterion_bounds() -> Verdict {
    let s = NumericalSemigroup::new(&[6, 13, 14]).unwrap();
    let ub = variable_bounds(&s);
    if ub == [9, 2, 4] {
        Verdict::Pass("ub = (9, 2, 4)".into())
    } else {
        Verdict::Fail(format!("ub = {ub:?}"))
    }
}

fn criterion_p5_omega(ledger: &Ledger, ek_counts: &mut Vec<(String, u64, usize)>) -> Verdict {
    let mut worst = Duration::ZERO;
    for row in &P5_ROWS {
        let s = NumericalSemigroup::new(&row.generators).unwrap();
        let start = Instant::now();
        for j in 0..5 {
            let r = match ledger.solve(&s, j, &OmegaOptions::default()) {
                Ok(r) => r,
                Err(e) => return Verdict::Fail(format!("{} n_j={}: {e}", row.name, row.generators[j])),
            };
            let printed_len: u64 = row.witnesses[j].iter().sum();
            let shifted = s.evaluate(&r.witness).unwrap() as i64 - row.generators[j] as i64;
            if r.omega != row.omega[j] || r.witness.length() != printed_len || !s.contains(shifted) {
                return Verdict::Fail(format!(
                    "{} n_j={}: omega {} witness {} (expected {})",
                    row.name, row.generators[j], r.omega, r.witness, row.omega[j]
                ));
            }
            ek_counts.push((row.name.to_string(), row.generators[j], r.ek_solves));
        }
        let elapsed = start.elapsed();
        worst = worst.max(elapsed);
        if elapsed >= Duration::from_secs(30) {
            return Verdict::Fail(format!("{} took {elapsed:?}", row.name));
        }
    }
    Verdict::Pass(format!("25/25 generators exact, slowest semigroup {worst:?}"))
}

fn criterion_p5_min_counts() -> Verdict {
    for row in &P5_ROWS {
        let s = NumericalSemigroup::new(&row.generators).unwrap();
        let counts: Vec<usize> = (0..5).map(|j| minimals_of_z(&s, j).unwrap().len()).collect();
        if counts != row.min_counts {
            return Verdict::Fail(format!("{}: {counts:?} vs {:?}", row.name, row.min_counts));
        }
    }
    Verdict::Pass("25/25 counts exact (e_j included)".into())
}

fn criterion_p10(ledger: &Ledger) -> Verdict {
    let limit = Duration::from_secs(600);
    let s1 = NumericalSemigroup::new(&[43, 63, 68, 108, 120, 135, 142, 150, 177, 224]).unwrap();
    let s3 = NumericalSemigroup::new(&[20, 22, 24, 26, 54, 77, 83, 89, 93, 95]).unwrap();
    let mut notes = Vec::new();
    for (name, s, check) in [("S10(1)", &s1, true), ("S10(3)", &s3, false)] {
        let start = Instant::now();
        let options = OmegaOptions { deadline: Some(start + limit), ..OmegaOptions::default() };
        let mut values = Vec::new();
        for j in 0..10 {
            match ledger.solve(s, j, &options) {
                Ok(r) => values.push(r.omega),
                Err(OmegaError::TimedOut) => return Verdict::Skip(format!("{name} exceeded {limit:?}")),
                Err(e) => return Verdict::Fail(format!("{name}: {e}")),
            }
        }
        let best = values.iter().copied().max().unwrap();
        let ok = if check { values == [5, 8, 8, 7, 8, 9, 9, 7, 9, 9] } else { best == 10 };
        if !ok {
            return Verdict::Fail(format!("{name}: {values:?}"));
        }
        notes.push(format!("{name} omega {best} in {:?}", start.elapsed()));
    }
    Verdict::Pass(notes.join(", "))
}

fn criterion_oracle_equivalence(ledger: &Ledger, rng: &mut ChaCha8Rng) -> Verdict {
    let mut checked = 0;
    for _ in 0..200 {
        let s = random_semigroup(rng, &[2, 3, 4], 50);
        for j in 0..s.embedding_dimension() {
            let got = ledger.solve(&s, j, &OmegaOptions::default()).map(|r| r.omega);
            let want = omega_bruteforce(&s, j).unwrap();
            if got != Ok(want) {
                return Verdict::Fail(format!("{s} n_j={}: {got:?} vs oracle {want}", s.generator(j)));
            }
            checked += 1;
        }
    }
    Verdict::Pass(format!("200 semigroups, {checked} generators"))
}

fn criterion_mode_invariance(ledger: &Ledger, rng: &mut ChaCha8Rng) -> Verdict {
    let mut combos = Vec::new();
    for bound_mode in [BoundMode::Tight, BoundMode::Loose] {
        for apery_cuts in [false, true] {
            for big_m_slack in [0, 7] {
                combos.push(OmegaOptions { bound_mode, apery_cuts, big_m_slack, ..OmegaOptions::default() });
            }
        }
    }
    for _ in 0..50 {
        let s = random_semigroup(rng, &[2, 3, 4], 30);
        for j in 0..s.embedding_dimension() {
            let values: Vec<_> = combos.iter().map(|o| ledger.solve(&s, j, o).map(|r| r.omega)).collect();
            if values.iter().any(|v| v != &values[0] || v.is_err()) {
                return Verdict::Fail(format!("{s} n_j={}: {values:?}", s.generator(j)));
            }
        }
    }
    Verdict::Pass(format!("50 semigroups x {} option sets", combos.len()))
}

fn criterion_lower_bound(ledger: &Ledger) -> Verdict {
    let solved = ledger.solved.borrow();
    match solved.iter().find(|(_, _, omega)| *omega < 2) {
        Some((gens, n, omega)) => Verdict::Fail(format!("{gens:?} n_j={n}: omega {omega}")),
        None => Verdict::Pass(format!("{} solved instances, all omega >= 2", solved.len())),
    }
}

fn criterion_classical(rng: &mut ChaCha8Rng) -> Verdict {
    let mut pairs = 0;
    while pairs < 100 {
        let a = rng.gen_range(2..=200u64);
        let b = rng.gen_range(2..=200u64);
        let Ok(s) = NumericalSemigroup::new(&[a, b]) else { continue };
        if s.embedding_dimension() != 2 {
            continue;
        }
        if s.frobenius() != a * b - a - b || s.genus() != (a - 1) * (b - 1) / 2 {
            return Verdict::Fail(format!("<{a},{b}>: F {} g {}", s.frobenius(), s.genus()));
        }
        pairs += 1;
    }
    for _ in 0..100 {
        let s = random_semigroup(rng, &[2, 3, 4, 5], 60);
        let gaps = gaps_direct(&s);
        if s.genus() != gaps.len() as u64 || s.frobenius() != *gaps.last().unwrap() {
            return Verdict::Fail(format!("{s}: F {} g {} vs sieve", s.frobenius(), s.genus()));
        }
        for i in 0..s.embedding_dimension() {
            let n = s.generator(i);
            let table = s.apery_of_generator(i);
            for (r, &w) in table.entries().iter().enumerate() {
                // Least element of S in the class: a member, and w - n is a gap.
                let member = w as usize % n as usize == r && s.contains(w as i64);
                let least = w < n || gaps.binary_search(&(w - n)).is_ok();
                if !member || !least {
                    return Verdict::Fail(format!("{s}: Ap(S, {n})[{r}] = {w}"));
                }
            }
        }
    }
    Verdict::Pass("100 Selmer pairs, 100 semigroups against the sieve".into())
}

fn grid_optimum(ip: &IntegerProgram) -> Option<i64> {
    let n = ip.num_vars();
    let bounds: Vec<(i64, i64)> = (0..n).map(|v| (ip.bounds(v).0, ip.bounds(v).1.unwrap())).collect();
    let mut x: Vec<i64> = bounds.iter().map(|b| b.0).collect();
    let mut best: Option<i64> = None;
    if bounds.iter().any(|b| b.0 > b.1) {
        return None;
    }
    loop {
        let feasible = ip.constraints().iter().all(|c| {
            let lhs: i64 = c.coefficients.iter().zip(&x).map(|(a, b)| a * b).sum();
            match c.relation {
                Relation::Eq => lhs == c.rhs,
                Relation::Le => lhs <= c.rhs,
                Relation::Ge => lhs >= c.rhs,
            }
        });
        if feasible {
            let value: i64 = ip.objective().iter().zip(&x).map(|(a, b)| a * b).sum();
            best = Some(match (best, ip.sense()) {
                (None, _) => value,
                (Some(b), Sense::Maximize) => b.max(value),
                (Some(b), Sense::Minimize) => b.min(value),
            });
        }
        let mut v = 0;
        loop {
            if v == n {
                return best;
            }
            if x[v] < bounds[v].1 {
                x[v] += 1;
                break;
            }
            x[v] = bounds[v].0;
            v += 1;
        }
    }
}

fn criterion_ilp(rng: &mut ChaCha8Rng) -> Verdict {
    let (mut optimal, mut infeasible) = (0, 0);
    for case in 0..600 {
        let n = rng.gen_range(1..=4);
        let sense = if rng.gen_bool(0.5) { Sense::Maximize } else { Sense::Minimize };
        let mut ip = IntegerProgram::new(n, sense);
        ip.set_objective((0..n).map(|_| rng.gen_range(-5..=5)).collect());
        for v in 0..n {
            if rng.gen_bool(0.2) {
                ip.set_binary(v);
            } else {
                let lo = rng.gen_range(-3..=3);
                ip.set_bounds(v, lo, lo + rng.gen_range(0..=6));
            }
        }
        for _ in 0..rng.gen_range(0..=3) {
            let coefficients: Vec<i64> = (0..n).map(|_| rng.gen_range(-4..=4)).collect();
            let relation = [Relation::Eq, Relation::Le, Relation::Ge][rng.gen_range(0..3)];
            ip.add_constraint(LinearConstraint::new(coefficients, relation, rng.gen_range(-8..=8)));
        }
        let got = match ilp::solve(&ip) {
            Ok(outcome) => outcome,
            Err(e) => return Verdict::Fail(format!("case {case}: {e}")),
        };
        let want = grid_optimum(&ip);
        let agree = match (&got, want) {
            (SolveOutcome::Optimal { value, witness }, Some(v)) => *value == v && ip.is_feasible(witness),
            (SolveOutcome::Infeasible, None) => true,
            _ => false,
        };
        if !agree {
            return Verdict::Fail(format!("case {case}: solver {got:?}, grid {want:?}"));
        }
        if want.is_some() {
            optimal += 1;
        } else {
            infeasible += 1;
        }
    }
    Verdict::Pass(format!("600 programs ({optimal} optimal, {infeasible} infeasible)"))
}

fn criterion_iteration_economy(ek_counts: &[(String, u64, usize)]) -> Verdict {
    if ek_counts.len() != 25 {
        return Verdict::Fail(format!("only {} p=5 instances solved", ek_counts.len()));
    }
    for (name, n, ek) in ek_counts {
        let row = P5_ROWS.iter().find(|r| r.name == name).unwrap();
        let j = row.generators.iter().position(|g| g == n).unwrap();
        if *ek > row.min_counts[j] {
            return Verdict::Fail(format!("{name} n_j={n}: {ek} EK solves > #min {}", row.min_counts[j]));
        }
    }
    let total: usize = ek_counts.iter().map(|e| e.2).sum();
    let minimals: usize = P5_ROWS.iter().flat_map(|r| r.min_counts).sum();
    Verdict::Pass(format!("{total} EK solves against {minimals} minimal elements"))
}

fn main() {
    let ledger = Ledger { solved: RefCell::new(Vec::new()) };
    let mut rng = ChaCha8Rng::seed_from_u64(20_141_121);
    let mut ek_counts = Vec::new();

    let mut results: Vec<(&str, Verdict)> = vec![
        ("1 worked example", criterion_worked_example()),
        ("2 variable bounds", criterion_bounds()),
        ("3 p=5 omega values", criterion_p5_omega(&ledger, &mut ek_counts)),
        ("4 p=5 minimal counts", criterion_p5_min_counts()),
        ("5 p=10 rows", criterion_p10(&ledger)),
        ("6 oracle equivalence", criterion_oracle_equivalence(&ledger, &mut rng)),
        ("7 mode invariance", criterion_mode_invariance(&ledger, &mut rng)),
        ("9 classical invariants", criterion_classical(&mut rng)),
        ("10 ILP exactness", criterion_ilp(&mut rng)),
        ("11 iteration economy", criterion_iteration_economy(&ek_counts)),
        ("8 omega >= 2", criterion_lower_bound(&ledger)),
    ];
    results.sort_by_key(|(name, _)| name.split(' ').next().unwrap().parse::<u32>().unwrap());

    let (mut passed, mut skipped, mut failed) = (0, 0, 0);
    for (name, verdict) in &results {
        match verdict {
            Verdict::Pass(msg) => {
                passed += 1;
                println!("PASS  {name}: {msg}");
            }
            Verdict::Skip(msg) => {
                skipped += 1;
                println!("SKIP  {name}: {msg}");
            }
            Verdict::Fail(msg) => {
                failed += 1;
                println!("FAIL  {name}: {msg}");
            }
        }
    }
    println!("acceptance: {passed} passed, {skipped} skipped, {failed} failed");
    if failed > 0 {
        std::process::exit(1);
    }
}
