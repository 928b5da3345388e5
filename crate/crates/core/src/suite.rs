//! Benchmark suites: run a solver and its exact oracle over a seeded family
//! and tabulate cost ratios and length violations.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::generate::{gen_ndbd, gen_slst, gen_spanner, GraphParams};
use crate::instance::Ratio;
use crate::oracle::{exact_dslst, exact_ndbd, exact_spanner, DSLST_EDGE_CAP, NDBD_EDGE_CAP, SPANNER_EDGE_CAP};
use crate::pipeline::{ndbd_allowed_factor, solve_ndbd, solve_slst, solve_spanner, spanner_allowed_factor, SolveParams};
use crate::slst::{ratio_bound, SlstParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    Slst,
    Ndbd,
    Spanner,
}

fn default_eps() -> f64 {
    0.5
}
fn default_level() -> usize {
    2
}
fn default_cost() -> u64 {
    50
}
fn default_length() -> u64 {
    10
}
fn default_true() -> bool {
    true
}

/// Suite description, read from JSON. Each `(n, m)` size gets `count`
/// instances; row `i` (over all sizes, in order) uses seed `seed + i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub problem: Problem,
    pub sizes: Vec<(usize, usize)>,
    pub count: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default = "default_level")]
    pub level: usize,
    #[serde(default = "default_cost")]
    pub max_cost: u64,
    #[serde(default = "default_length")]
    pub max_length: u64,
    /// NDBD bound; the generated graph's diameter when absent.
    #[serde(default)]
    pub bound: Option<u64>,
    /// Spanner stretch, `"a/b"` or `"a"`.
    #[serde(default)]
    pub stretch: Option<String>,
    /// SLST terminal count.
    #[serde(default)]
    pub terminals: Option<usize>,
    /// SLST bounds are `floor(slack * ℓ̄(r, t))`.
    #[serde(default)]
    pub slack: Option<String>,
    #[serde(default = "default_true")]
    pub oracle: bool,
    /// Wall-clock times make the table irreproducible, so they are opt-in.
    #[serde(default)]
    pub record_runtime: bool,
}

impl SuiteConfig {
    pub fn rows(&self) -> usize {
        self.sizes.len() * self.count
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub approx_cost: Option<u64>,
    pub oracle_cost: Option<u64>,
    pub ratio: Option<f64>,
    pub violation: Option<f64>,
    pub bound: Option<f64>,
    pub runtime_ms: Option<f64>,
    pub error: Option<String>,
}

fn parse_ratio(s: &Option<String>, default: Ratio) -> Result<Ratio, String> {
    s.as_deref().map_or(Ok(default), str::parse)
}

fn run_row(cfg: &SuiteConfig, n: usize, m: usize, seed: u64) -> BenchRow {
    let mut row = BenchRow {
        n,
        m,
        seed,
        ..Default::default()
    };
    if let Err(e) = fill_row(cfg, &mut row) {
        row.error = Some(e);
    }
    row
}

fn fill_row(cfg: &SuiteConfig, row: &mut BenchRow) -> Result<(), String> {
    let gp = GraphParams {
        n: row.n,
        m: row.m,
        max_cost: cfg.max_cost,
        max_length: cfg.max_length,
        seed: row.seed,
    };
    let start = Instant::now();
    let s = |e: &dyn std::fmt::Display| e.to_string();
    match cfg.problem {
        Problem::Slst => {
            let slack = parse_ratio(&cfg.slack, Ratio::new(3, 2).expect("nonzero"))?;
            let k = cfg.terminals.unwrap_or(((row.n - 1) / 2).max(1));
            let inst = gen_slst(&gp, k, slack).map_err(|e| s(&e))?;
            let (tree, report) = solve_slst(&inst, &SlstParams::new(cfg.level, cfg.eps), false).map_err(|e| s(&e))?;
            row.runtime_ms = Some(start.elapsed().as_secs_f64() * 1e3);
            row.approx_cost = Some(tree.cost);
            row.violation = report.max_violation_factor;
            row.bound = (cfg.level >= 2).then(|| ratio_bound(cfg.level, inst.terminals.len()));
            if cfg.oracle && row.m <= DSLST_EDGE_CAP {
                row.oracle_cost = Some(exact_dslst(&inst, inst.terminals.len()).map_err(|e| s(&e))?.cost);
            }
        }
        Problem::Ndbd => {
            let inst = gen_ndbd(&gp, cfg.bound).map_err(|e| s(&e))?;
            let out = solve_ndbd(&inst, &SolveParams::new(cfg.eps, cfg.level, row.seed)).map_err(|e| s(&e))?;
            row.runtime_ms = Some(start.elapsed().as_secs_f64() * 1e3);
            row.approx_cost = Some(out.report.cost);
            row.violation = out.report.max_violation_factor;
            row.bound = Some(ndbd_allowed_factor(cfg.eps));
            if cfg.oracle && row.m <= NDBD_EDGE_CAP {
                row.oracle_cost = Some(inst.graph.cost_of(&exact_ndbd(&inst).map_err(|e| s(&e))?));
            }
        }
        Problem::Spanner => {
            let stretch = parse_ratio(&cfg.stretch, Ratio::integer(2))?;
            let inst = gen_spanner(&gp, stretch).map_err(|e| s(&e))?;
            let out = solve_spanner(&inst, &SolveParams::new(cfg.eps, cfg.level, row.seed)).map_err(|e| s(&e))?;
            row.runtime_ms = Some(start.elapsed().as_secs_f64() * 1e3);
            row.approx_cost = Some(out.report.cost);
            row.violation = out.report.max_violation_factor;
            row.bound = Some(spanner_allowed_factor(stretch, cfg.eps));
            if cfg.oracle && row.m <= SPANNER_EDGE_CAP {
                row.oracle_cost = Some(inst.graph.cost_of(&exact_spanner(&inst).map_err(|e| s(&e))?));
            }
        }
    }
    if !cfg.record_runtime {
        row.runtime_ms = None;
    }
    row.ratio = match (row.approx_cost, row.oracle_cost) {
        (Some(a), Some(0)) => Some(if a == 0 { 1.0 } else { f64::INFINITY }),
        (Some(a), Some(o)) => Some(a as f64 / o as f64),
        _ => None,
    };
    Ok(())
}

/// Runs every row (concurrently) and returns them in row order.
pub fn run_suite(cfg: &SuiteConfig) -> Vec<BenchRow> {
    let jobs: Vec<(usize, usize, u64)> = cfg
        .sizes
        .iter()
        .flat_map(|&(n, m)| std::iter::repeat_n((n, m), cfg.count))
        .enumerate()
        .map(|(i, (n, m))| (n, m, cfg.seed.wrapping_add(i as u64)))
        .collect();
    jobs.into_par_iter().map(|(n, m, seed)| run_row(cfg, n, m, seed)).collect()
}

pub const CSV_HEADER: [&str; 10] = [
    "n",
    "m",
    "seed",
    "approx_cost",
    "oracle_cost",
    "ratio",
    "violation",
    "bound",
    "runtime_ms",
    "error",
];

/// `,`-separated, `.` decimals, LF line ends; missing values are empty.
pub fn rows_to_csv(rows: &[BenchRow]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    let opt = |v: Option<String>| v.unwrap_or_default();
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.m.to_string(),
            r.seed.to_string(),
            opt(r.approx_cost.map(|v| v.to_string())),
            opt(r.oracle_cost.map(|v| v.to_string())),
            opt(r.ratio.map(|v| v.to_string())),
            opt(r.violation.map(|v| v.to_string())),
            opt(r.bound.map(|v| v.to_string())),
            opt(r.runtime_ms.map(|v| v.to_string())),
            opt(r.error.clone()),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("CSV is UTF-8")
}

/// Pretty JSON array of rows, with a trailing newline. Infinite ratios
/// become `null`.
pub fn rows_to_json(rows: &[BenchRow]) -> String {
    let mut s = serde_json::to_string_pretty(rows).expect("rows serialize");
    s.push('\n');
    s
}
