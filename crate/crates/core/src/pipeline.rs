//! End-to-end solvers and the solution verifier.
//!
//! The two-stage solvers return `H1 ∪ H2`: `H1` rounds the fractional LP
//! solution over all pairs (settling thin pairs with high probability) and
//! `H2` unions shallow-light out- and in-trees at sampled roots (settling
//! thick pairs). The user-facing `eps` is split evenly between the LP and the
//! tree stage.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::SolveError;
use crate::graph::{edge_mask, Digraph, Distance, EdgeId, NodeId};
use crate::instance::{Instance, NdbdInstance, Ratio, SlstInstance, SpannerInstance};
use crate::report::{finite_or_none, InstanceSummary, ReportParams, RunReport, StageSummary};
use crate::slst::{shallow_light, SlstParams};
use crate::solution::TreeSolution;
use crate::thick::{default_delta, sample_roots, union_thick, RootBounds, SampleConfig};
use crate::thin_lp::{round_edges, rounding_gamma, satisfiable_pairs, solve_fractional, LpConfig, PairDemand};

#[derive(Clone, Debug, PartialEq)]
pub struct SolveParams {
    pub eps: f64,
    pub level: usize,
    pub seed: u64,
    /// Sampled roots; defaults to `ceil(3 sqrt(n) ln n)` clamped to `n`.
    pub delta: Option<usize>,
    pub lp_max_rounds: usize,
    /// Record wall-clock stage timings in the report.
    pub timings: bool,
}

impl SolveParams {
    pub fn new(eps: f64, level: usize, seed: u64) -> Self {
        SolveParams {
            eps,
            level,
            seed,
            delta: None,
            lp_max_rounds: 10_000,
            timings: false,
        }
    }

    fn lp_eps(&self) -> f64 {
        self.eps / 2.0
    }

    fn tree_eps(&self) -> f64 {
        self.eps / 2.0
    }
}

/// What a subgraph must satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Requirement {
    /// Every ordered pair within `L`.
    Distance(u64),
    /// Every pair connected in `G` within `α ℓ̄_G`.
    Stretch(Ratio),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Offense {
    pub from: NodeId,
    pub to: NodeId,
    pub distance: Distance,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verification {
    pub ok: bool,
    /// Largest `ℓ̄_H / bound`; infinite when a constrained pair is disconnected.
    pub worst_violation: f64,
    /// Largest `ℓ̄_H / ℓ̄_G` over pairs with positive `ℓ̄_G` (stretch requirements).
    pub worst_stretch: Option<f64>,
    /// Pairs whose factor exceeds the allowed one.
    pub offending: Vec<Offense>,
    /// Pairs meeting their bound exactly.
    pub settled: usize,
    pub total: usize,
}

fn factor(dist: Distance, bound: f64) -> f64 {
    match dist {
        Distance::Unreachable => f64::INFINITY,
        Distance::Finite(0) => 0.0,
        Distance::Finite(d) if bound > 0.0 => d as f64 / bound,
        Distance::Finite(_) => f64::INFINITY,
    }
}

/// Recomputes all-pairs distances inside `edges` and checks each constrained
/// pair against `allowed` times its bound.
pub fn verify_solution(g: &Digraph, edges: &[EdgeId], req: Requirement, allowed: f64) -> Verification {
    let n = g.node_count();
    let mask = edge_mask(g.edge_count(), edges.iter().copied());
    let base = match req {
        Requirement::Stretch(_) => Some(g.all_pairs()),
        Requirement::Distance(_) => None,
    };
    let rows: Vec<Vec<Distance>> = (0..n)
        .into_par_iter()
        .map(|u| g.shortest_lengths_within(u, &mask))
        .collect();
    let mut out = Verification {
        ok: true,
        worst_violation: 0.0,
        worst_stretch: base.as_ref().map(|_| 1.0),
        offending: Vec::new(),
        settled: 0,
        total: 0,
    };
    let tol = 1e-12;
    for (u, row) in rows.iter().enumerate() {
        for (v, &dist) in row.iter().enumerate() {
            if u == v {
                continue;
            }
            let bound = match (req, &base) {
                (Requirement::Distance(l), _) => l as f64,
                (Requirement::Stretch(alpha), Some(base)) => match base.get(u, v) {
                    Distance::Finite(d) => {
                        if d > 0 {
                            let s = factor(dist, d as f64);
                            out.worst_stretch = out.worst_stretch.map(|w| w.max(s));
                        }
                        alpha.to_f64() * d as f64
                    }
                    Distance::Unreachable => continue,
                },
                (Requirement::Stretch(_), None) => unreachable!("base distances computed for stretch"),
            };
            out.total += 1;
            let f = factor(dist, bound);
            if f <= 1.0 + tol {
                out.settled += 1;
            }
            out.worst_violation = out.worst_violation.max(f);
            if f > allowed * (1.0 + tol) {
                out.ok = false;
                out.offending.push(Offense {
                    from: u,
                    to: v,
                    distance: dist,
                    bound,
                });
            }
        }
    }
    out
}

/// Bicriteria factor allowed over `L` for the NDBD solver: `2 (1 + eps)`.
pub fn ndbd_allowed_factor(eps: f64) -> f64 {
    2.0 * (1.0 + eps)
}

/// Factor allowed over `α ℓ̄_G` for the spanner solver: `α + eps'` with
/// `eps' = α * eps1` and `eps1 = eps / 2` the tree slack.
pub fn spanner_allowed_factor(stretch: Ratio, eps: f64) -> f64 {
    let a = stretch.to_f64();
    a + a * eps / 2.0
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineOutput {
    pub edges: Vec<EdgeId>,
    pub report: RunReport,
    pub verification: Verification,
}

struct Timer {
    on: bool,
    stages: BTreeMap<String, f64>,
    last: Instant,
}

impl Timer {
    fn new(on: bool) -> Self {
        Timer {
            on,
            stages: BTreeMap::new(),
            last: Instant::now(),
        }
    }

    fn lap(&mut self, stage: &str) {
        let now = Instant::now();
        if self.on {
            self.stages
                .insert(stage.to_string(), (now - self.last).as_secs_f64() * 1e3);
        }
        self.last = now;
    }
}

fn two_stage(
    g: &Digraph,
    demands: &[PairDemand],
    bounds: RootBounds,
    req: Requirement,
    allowed: f64,
    params: &SolveParams,
    instance: InstanceSummary,
) -> Result<PipelineOutput, SolveError> {
    if params.eps.is_nan() || params.eps <= 0.0 || params.level == 0 {
        return Err(SolveError::BadParams("eps must be positive and level at least 1".into()));
    }
    let n = g.node_count();
    let mut timer = Timer::new(params.timings);
    let lp_cfg = LpConfig {
        max_rounds: params.lp_max_rounds,
        ..LpConfig::new(params.lp_eps())
    };
    let frac = solve_fractional(g, demands, &lp_cfg)?;
    timer.lap("lp");
    let thin = round_edges(&frac.x, n, params.seed);
    timer.lap("rounding");

    let delta = params.delta.map_or(default_delta(n), |d| d.clamp(1, n.max(1)));
    let roots = sample_roots(n, &SampleConfig::with_delta(n, delta, params.seed));
    let tree_params = SlstParams::new(params.level, params.tree_eps());
    let thick = union_thick(g, &roots, bounds, &tree_params)?;
    timer.lap("trees");

    let mut edges: Vec<EdgeId> = thin.iter().chain(&thick.edges).copied().collect();
    edges.sort_unstable();
    edges.dedup();
    let verification = verify_solution(g, &edges, req, allowed);
    timer.lap("verify");

    let gamma = rounding_gamma(n);
    let mut report = RunReport {
        instance,
        params: ReportParams {
            eps: params.eps,
            level: params.level,
            seed: Some(params.seed),
            gamma: Some(gamma),
            delta: Some(delta),
            lp_eps: Some(params.lp_eps()),
            tree_eps: Some(params.tree_eps()),
        },
        cost: g.cost_of(&edges),
        max_violation_factor: finite_or_none(verification.worst_violation),
        per_stage_timings_ms: timer.stages,
        settled_pairs: verification.settled,
        total_pairs: verification.total,
        worst_stretch: verification.worst_stretch,
        stages: Some(StageSummary {
            lp_objective: frac.objective,
            lp_rounds: frac.rounds,
            lp_columns: frac.column_count(),
            thin_edges: thin.len(),
            thin_cost: g.cost_of(&thin),
            roots: roots.iter().map(|r| r + 1).collect(),
            thick_edges: thick.edges.len(),
            thick_cost: g.cost_of(&thick.edges),
        }),
        ..Default::default()
    };
    report.set_edges(&edges);
    if !verification.ok {
        report.notes.push(format!(
            "{} pair(s) exceed the allowed factor {allowed}",
            verification.offending.len()
        ));
    }
    Ok(PipelineOutput {
        edges,
        report,
        verification,
    })
}

/// NDBD: every ordered pair within `(2 + eps) L`, cost within
/// `O(n^(1/2 + eps))` of optimal.
pub fn solve_ndbd(inst: &NdbdInstance, params: &SolveParams) -> Result<PipelineOutput, SolveError> {
    if !inst.check_feasible() {
        return Err(SolveError::InfeasibleInstance);
    }
    let l = inst.bound;
    let demands = satisfiable_pairs(&inst.graph, |_| l);
    two_stage(
        &inst.graph,
        &demands,
        RootBounds::Uniform(l),
        Requirement::Distance(l),
        ndbd_allowed_factor(params.eps),
        params,
        InstanceSummary::of(&Instance::Ndbd(inst.clone())),
    )
}

/// Light-weight α-spanner with every connected pair within
/// `(α + eps') α ℓ̄_G`.
pub fn solve_spanner(inst: &SpannerInstance, params: &SolveParams) -> Result<PipelineOutput, SolveError> {
    let alpha = inst.stretch;
    let demands = satisfiable_pairs(&inst.graph, |d| alpha.floor_mul(d));
    two_stage(
        &inst.graph,
        &demands,
        RootBounds::Stretch(alpha),
        Requirement::Stretch(alpha),
        spanner_allowed_factor(alpha, params.eps),
        params,
        InstanceSummary::of(&Instance::Spanner(inst.clone())),
    )
}

/// Standalone shallow-light tree with a report of per-terminal factors.
pub fn solve_slst(inst: &SlstInstance, params: &SlstParams, timings: bool) -> Result<(TreeSolution, RunReport), SolveError> {
    let mut timer = Timer::new(timings);
    let tree = shallow_light(inst, params)?;
    timer.lap("slst");
    let factors: BTreeMap<usize, f64> = tree
        .distances
        .iter()
        .map(|(&t, &d)| (t + 1, factor(Distance::Finite(d), inst.terminals[&t] as f64)))
        .collect();
    let worst = factors.values().copied().fold(0.0, f64::max);
    let settled = tree
        .distances
        .iter()
        .filter(|&(t, &d)| d <= inst.terminals[t])
        .count();
    let mut report = RunReport {
        instance: InstanceSummary::of(&Instance::Slst(inst.clone())),
        params: ReportParams {
            eps: params.eps,
            level: params.level,
            ..Default::default()
        },
        cost: tree.cost,
        max_violation_factor: finite_or_none(worst),
        per_stage_timings_ms: timer.stages,
        settled_pairs: settled,
        total_pairs: inst.terminals.len(),
        terminal_violation: Some(factors),
        ..Default::default()
    };
    report.set_edges(&tree.edges);
    if params.is_pruned() {
        report.notes.push("pruning knobs active; ratio guarantee is heuristic".into());
    }
    Ok((tree, report))
}
