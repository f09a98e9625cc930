//! Instance files and the benchmark runner.
//!
//! An instance file holds one comma-separated generator list per line. A `#`
//! starts a comment; a comment after a generator list names that row.

use std::io::Write;
use std::time::Duration;

use omega_core::oracle;
use omega_core::{FactorizationVector, NumericalSemigroup, OmegaError};
use serde::{Deserialize, Serialize};

use crate::report::OptionsReport;
use crate::{parse_generators, solve_generators, CliError, SolverArgs};

#[derive(Debug, Clone)]
pub struct Instance {
    pub name: String,
    pub line: usize,
    pub semigroup: NumericalSemigroup,
}

/// Parses an instance file. Errors carry the 1-based line number.
pub fn parse_instances(text: &str) -> Result<Vec<Instance>, CliError> {
    let mut instances = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let (data, comment) = match raw.split_once('#') {
            Some((d, c)) => (d.trim(), Some(c.trim())),
            None => (raw.trim(), None),
        };
        if data.is_empty() {
            continue;
        }
        let gens = parse_generators(data).map_err(|e| CliError::Input(format!("line {line}: {e}")))?;
        let semigroup = NumericalSemigroup::new(&gens).map_err(|e| CliError::Input(format!("line {line}: {e}")))?;
        let name = comment.filter(|c| !c.is_empty()).map_or_else(|| format!("line{line}"), str::to_string);
        instances.push(Instance { name, line, semigroup });
    }
    if instances.is_empty() {
        return Err(CliError::Input("instance file contains no semigroups".to_string()));
    }
    Ok(instances)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowKind {
    Generator,
    Summary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowStatus {
    Ok,
    Timeout,
    /// Summary of a semigroup where some generator timed out.
    Incomplete,
}

/// One generator result, or with `kind = summary` the ω(S) line of a
/// semigroup.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchRow {
    pub name: String,
    pub kind: RowKind,
    pub generators: Vec<u64>,
    pub n: Option<u64>,
    pub omega: Option<u64>,
    pub witness: Option<FactorizationVector>,
    pub iterations: Option<usize>,
    pub ek_solves: Option<usize>,
    pub nw_solves: Option<usize>,
    pub millis: u64,
    /// Size of Minimals Z(n_j + S), when the oracle ran.
    pub min_count: Option<usize>,
    pub status: RowStatus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchReport {
    pub options: OptionsReport,
    pub rows: Vec<BenchRow>,
}

const CSV_HEADER: [&str; 12] = [
    "name",
    "kind",
    "generators",
    "n",
    "omega",
    "witness",
    "iterations",
    "ek_solves",
    "nw_solves",
    "millis",
    "min_count",
    "status",
];

fn cell<T: ToString>(value: &Option<T>) -> String {
    value.as_ref().map_or_else(String::new, T::to_string)
}

impl BenchReport {
    pub fn write_csv(&self, out: &mut dyn Write) -> Result<(), CliError> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(CSV_HEADER)?;
        for row in &self.rows {
            let gens: Vec<String> = row.generators.iter().map(u64::to_string).collect();
            let kind = match row.kind {
                RowKind::Generator => "generator",
                RowKind::Summary => "summary",
            };
            let status = match row.status {
                RowStatus::Ok => "ok",
                RowStatus::Timeout => "timeout",
                RowStatus::Incomplete => "incomplete",
            };
            writer.write_record([
                row.name.clone(),
                kind.to_string(),
                gens.join(" "),
                cell(&row.n),
                cell(&row.omega),
                cell(&row.witness),
                cell(&row.iterations),
                cell(&row.ek_solves),
                cell(&row.nw_solves),
                row.millis.to_string(),
                cell(&row.min_count),
                status.to_string(),
            ])?;
        }
        writer.flush()?;
        Ok(())
    }
}

/// Runs every generator of every instance. `oracle_limit` enables minimal
/// element counts for boxes with at most that many points.
pub fn run_bench(
    instances: &[Instance],
    solver: &SolverArgs,
    oracle_limit: Option<u128>,
    timeout: Option<Duration>,
) -> Result<BenchReport, CliError> {
    let options = solver.options();
    let mut rows = Vec::new();
    for inst in instances {
        let s = &inst.semigroup;
        let indices: Vec<usize> = (0..s.embedding_dimension()).collect();
        let mut best = 0;
        let mut total_millis = 0;
        let mut complete = true;
        for timed in solve_generators(s, &indices, &options, solver.jobs, timeout) {
            total_millis += timed.millis;
            let min_count = match oracle_limit {
                Some(limit) if oracle::enumeration_size(s, timed.index)? <= limit => {
                    Some(oracle::minimals_of_z(s, timed.index)?.len())
                }
                _ => None,
            };
            let mut row = BenchRow {
                name: inst.name.clone(),
                kind: RowKind::Generator,
                generators: s.generators().to_vec(),
                n: Some(s.generator(timed.index)),
                omega: None,
                witness: None,
                iterations: None,
                ek_solves: None,
                nw_solves: None,
                millis: timed.millis,
                min_count,
                status: RowStatus::Ok,
            };
            match timed.result {
                Ok(r) => {
                    best = best.max(r.omega);
                    row.omega = Some(r.omega);
                    row.witness = Some(r.witness);
                    row.iterations = Some(r.iterations);
                    row.ek_solves = Some(r.ek_solves);
                    row.nw_solves = Some(r.nw_solves);
                }
                Err(OmegaError::TimedOut) => {
                    complete = false;
                    row.status = RowStatus::Timeout;
                }
                Err(e) => return Err(e.into()),
            }
            rows.push(row);
        }
        rows.push(BenchRow {
            name: inst.name.clone(),
            kind: RowKind::Summary,
            generators: s.generators().to_vec(),
            n: None,
            omega: complete.then_some(best),
            witness: None,
            iterations: None,
            ek_solves: None,
            nw_solves: None,
            millis: total_millis,
            min_count: None,
            status: if complete { RowStatus::Ok } else { RowStatus::Incomplete },
        });
    }
    Ok(BenchReport { options: solver.report(), rows })
}
