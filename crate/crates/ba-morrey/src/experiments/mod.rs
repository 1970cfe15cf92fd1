//! The experiment catalogue: one self-contained verification run per entry,
//! each producing a table of measurements and a list of pass/fail checks.
//!
//! Experiments are pure given their configuration (grid, seed, parameters),
//! so identical configurations reproduce identical tables bit for bit.

use crate::error::{Error, Result};
use std::collections::BTreeMap;

mod ap;
mod beltrami_run;
mod chain;
mod cmo;
mod gap;
mod growth;
mod lemma34;
mod lemma35;
mod maximal;
mod productsets;
mod spectral;

/// A cell of an output table.
#[derive(Debug, Clone)]
pub enum Value {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Value {
    pub fn is_finite(&self) -> bool {
        match self {
            Value::Float(x) => x.is_finite(),
            _ => true,
        }
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Float(x)
    }
}

impl From<i64> for Value {
    fn from(x: i64) -> Self {
        Value::Int(x)
    }
}

impl From<usize> for Value {
    fn from(x: usize) -> Self {
        Value::Int(x as i64)
    }
}

impl From<&str> for Value {
    fn from(x: &str) -> Self {
        Value::Text(x.to_string())
    }
}

impl From<String> for Value {
    fn from(x: String) -> Self {
        Value::Text(x)
    }
}

/// Column-labelled measurement table with deterministic row order.
#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width mismatch");
        self.rows.push(row);
    }
}

/// One verification check with its outcome.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, pass: bool, detail: String) -> Self {
        Self { name: name.to_string(), pass, detail }
    }
}

/// Everything an experiment run produces.
#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub name: &'static str,
    pub anchor: &'static str,
    pub table: Table,
    pub checks: Vec<Check>,
    /// Fully resolved configuration, defaults included.
    pub resolved: Vec<(String, String)>,
}

impl ExperimentResult {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Run configuration: seed, optional grid overrides, and free-form
/// experiment-specific parameters.
#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub grid_n: Option<usize>,
    pub grid_l: Option<f64>,
    pub params: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed: Some(seed), ..Default::default() }
    }

    /// Seed, or an error when the experiment needs randomness.
    pub fn require_seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::InvalidConfig("a seed is mandatory for randomized probes".into()))
    }

    pub fn grid_n(&self, default: usize) -> usize {
        self.grid_n.unwrap_or(default)
    }

    pub fn grid_l(&self, default: f64) -> f64 {
        self.grid_l.unwrap_or(default)
    }

    pub fn f64_param(&self, key: &str, default: f64) -> Result<f64> {
        match self.params.get(key) {
            None => Ok(default),
            Some(raw) => raw
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("parameter {key} = {raw} is not a number"))),
        }
    }

    pub fn usize_param(&self, key: &str, default: usize) -> Result<usize> {
        match self.params.get(key) {
            None => Ok(default),
            Some(raw) => raw
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("parameter {key} = {raw} is not an integer"))),
        }
    }

    pub fn text_param(&self, key: &str, default: &str) -> String {
        self.params.get(key).cloned().unwrap_or_else(|| default.to_string())
    }
}

/// Catalogue entry.
#[derive(Debug, Clone, Copy)]
pub struct ExperimentInfo {
    pub name: &'static str,
    /// The mathematical claim the experiment exercises.
    pub anchor: &'static str,
}

/// The full experiment catalogue, in the order the runner reports it.
pub fn catalogue() -> Vec<ExperimentInfo> {
    vec![
        ExperimentInfo { name: "isometry", anchor: "L2 isometry and multiplier powers of the transform" },
        ExperimentInfo { name: "cauchy-identities", anchor: "Cauchy transform inverts dbar and intertwines with d" },
        ExperimentInfo { name: "lemma32-gap", anchor: "truncation gap bounded by scale times gradient times maximal function" },
        ExperimentInfo { name: "lemma33-maximal", anchor: "maximal transform and maximal function bounded on the weighted Morrey scale" },
        ExperimentInfo { name: "ap-constant", anchor: "weight characteristic constant over declared square families" },
        ExperimentInfo { name: "doubling", anchor: "weight growth under square dilation stays polynomial" },
        ExperimentInfo { name: "lemma21-productsets", anchor: "median product sets cover, fill half, dominate, and keep one sign" },
        ExperimentInfo { name: "thm13-chain", anchor: "oscillation dominated by the commutator through the sign-definite kernel chain" },
        ExperimentInfo { name: "lemma34-bounds", anchor: "test-family lower and upper bounds on shifted dilates" },
        ExperimentInfo { name: "lemma35-separation", anchor: "commutator images of disjoint test functions stay separated" },
        ExperimentInfo { name: "cmo-probe", anchor: "three-limit vanishing-oscillation probe" },
        ExperimentInfo { name: "beltrami-solve", anchor: "Neumann-series solution of the Beltrami equation with a-priori control" },
        ExperimentInfo { name: "n2-growth", anchor: "iterated transform norm growth within an N^2-times-geometric envelope" },
    ]
}

/// Look up an experiment by name and run it.
pub fn run(name: &str, config: &RunConfig) -> Result<ExperimentResult> {
    match name {
        "isometry" => spectral::isometry(config),
        "cauchy-identities" => spectral::cauchy_identities(config),
        "lemma32-gap" => gap::run(config),
        "lemma33-maximal" => maximal::run(config),
        "ap-constant" => ap::ap_constant_run(config),
        "doubling" => ap::doubling_run(config),
        "lemma21-productsets" => productsets::run(config),
        "thm13-chain" => chain::run(config),
        "lemma34-bounds" => lemma34::run(config),
        "lemma35-separation" => lemma35::run(config),
        "cmo-probe" => cmo::run(config),
        "beltrami-solve" => beltrami_run::run(config),
        "n2-growth" => growth::run(config),
        _ => {
            let names: Vec<&str> = catalogue().iter().map(|e| e.name).collect();
            Err(Error::InvalidConfig(format!(
                "unknown experiment {name}; valid names: {}",
                names.join(", ")
            )))
        }
    }
}

pub(crate) fn anchor_of(name: &'static str) -> &'static str {
    catalogue()
        .iter()
        .find(|e| e.name == name)
        .map(|e| e.anchor)
        .expect("experiment name registered")
}
