//! Serializable command reports and their text rendering.
//!
//! Field names are part of the JSON output contract.

use std::io::{self, Write};

use omega_core::oes::IterationRecord;
use omega_core::{AperyTable, FactorizationVector, OmegaOptions, OmegaResult};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptionsReport {
    #[serde(flatten)]
    pub solver: OmegaOptions,
    pub jobs: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorReport {
    pub n: u64,
    pub omega: u64,
    pub witness: FactorizationVector,
    pub iterations: usize,
    pub ek_solves: usize,
    pub nw_solves: usize,
    pub millis: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<IterationRecord>>,
}

impl GeneratorReport {
    pub fn new(result: OmegaResult, millis: u64, trace: bool) -> Self {
        GeneratorReport {
            n: result.generator,
            omega: result.omega,
            witness: result.witness,
            iterations: result.iterations,
            ek_solves: result.ek_solves,
            nw_solves: result.nw_solves,
            millis,
            trace: trace.then_some(result.trace),
        }
    }
}

/// Output of `omega`. `omega` is the largest value over the reported
/// generators, which is ω(S) when no generator filter is given.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmegaReport {
    pub generators: Vec<u64>,
    pub omega: u64,
    pub per_generator: Vec<GeneratorReport>,
    pub options: OptionsReport,
}

fn semigroup_label(gens: &[u64]) -> String {
    let list: Vec<String> = gens.iter().map(u64::to_string).collect();
    format!("<{}>", list.join(","))
}

fn point_label(point: Option<&FactorizationVector>) -> String {
    point.map_or_else(|| "infeasible".to_string(), |p| p.to_string())
}

impl OmegaReport {
    pub fn write_text(&self, out: &mut dyn Write) -> io::Result<()> {
        let label = semigroup_label(&self.generators);
        if self.per_generator.len() == self.generators.len() {
            writeln!(out, "omega({label}) = {}", self.omega)?;
        } else {
            writeln!(out, "S = {label}")?;
        }
        writeln!(out, "{:>8} {:>7} {:>5} {:>5} {:>5} {:>8}  witness", "n_j", "omega", "it", "ek", "nw", "ms")?;
        for g in &self.per_generator {
            writeln!(
                out,
                "{:>8} {:>7} {:>5} {:>5} {:>5} {:>8}  {}",
                g.n, g.omega, g.iterations, g.ek_solves, g.nw_solves, g.millis, g.witness
            )?;
            for rec in g.trace.iter().flatten() {
                writeln!(
                    out,
                    "    iteration {}: start {} ek {} nw {} lower {} upper {}",
                    rec.iteration,
                    rec.start_point,
                    rec.ek_point,
                    point_label(rec.nw_point.as_ref()),
                    rec.lower,
                    rec.upper
                )?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantsReport {
    pub generators: Vec<u64>,
    pub embedding_dimension: usize,
    pub multiplicity: u64,
    pub frobenius: u64,
    pub genus: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub apery: Option<AperyTable>,
}

impl InvariantsReport {
    pub fn write_text(&self, out: &mut dyn Write) -> io::Result<()> {
        writeln!(out, "S = {}", semigroup_label(&self.generators))?;
        writeln!(out, "embedding dimension = {}", self.embedding_dimension)?;
        writeln!(out, "multiplicity = {}", self.multiplicity)?;
        writeln!(out, "Frobenius number = {}", self.frobenius)?;
        writeln!(out, "genus = {}", self.genus)?;
        if let Some(table) = &self.apery {
            let entries: Vec<String> = table.entries().iter().map(u64::to_string).collect();
            writeln!(out, "Ap(S, {}) = {{{}}}", table.modulus(), entries.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Match,
    Mismatch,
}

impl Verdict {
    fn as_str(self) -> &'static str {
        match self {
            Verdict::Match => "MATCH",
            Verdict::Mismatch => "MISMATCH",
        }
    }
}

/// A row matches when both ω values agree and every minimal element the
/// algorithm reported is in the enumerated set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyRow {
    pub n: u64,
    pub omega: u64,
    pub oracle_omega: u64,
    pub minimal_count: usize,
    pub ek_solves: usize,
    pub status: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub generators: Vec<u64>,
    pub per_generator: Vec<VerifyRow>,
    pub status: Verdict,
}

impl VerifyReport {
    pub fn write_text(&self, out: &mut dyn Write) -> io::Result<()> {
        writeln!(out, "S = {}", semigroup_label(&self.generators))?;
        writeln!(out, "{:>8} {:>7} {:>7} {:>6} {:>5}  status", "n_j", "omega", "oracle", "#min", "ek")?;
        for r in &self.per_generator {
            writeln!(
                out,
                "{:>8} {:>7} {:>7} {:>6} {:>5}  {}",
                r.n,
                r.omega,
                r.oracle_omega,
                r.minimal_count,
                r.ek_solves,
                r.status.as_str()
            )?;
        }
        writeln!(out, "{}", self.status.as_str())
    }
}
