//! Path-based LP relaxation for settling thin pairs, and its rounding.
//!
//! ```text
//! min  Σ_e c_e x_e
//! s.t. Σ_{P ∈ cols(d)} f_P >= 1            for every demand d
//!      Σ_{P ∈ cols(d), P ∋ e} f_P <= x_e   for every demand d, edge e
//!      x, f >= 0
//! ```
//!
//! The path set is exponential, so the LP is solved by column generation:
//! the restricted master holds the columns found so far, and for each demand
//! the pricing step looks for a length-feasible path whose dual weight
//! `Σ_{e ∈ P} β_{d,e}` is below `α_d`, using the weight-approximate
//! restricted shortest path search with the caller's `eps`. When no demand
//! prices out, `α / (1 + eps)` together with `β` is feasible for the full
//! dual, so the restricted objective is within `(1 + eps)` of the LP optimum.
//!
//! Linking rows exist only for (demand, edge) pairs that occur in a column of
//! that demand; all other `β` are implicitly zero.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashSet};

use clarabel::algebra::CscMatrix;
use clarabel::solver::{DefaultSettingsBuilder, DefaultSolver, IPSolver, NonnegativeConeT, SolverStatus};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::LpError;
use crate::graph::{Digraph, Distance, EdgeId, NodeId};
use crate::rng::stream;
use crate::rsp::min_weight_path_hassin;
use crate::solution::PathWitness;

/// Ordered pair with its length bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PairDemand {
    pub from: NodeId,
    pub to: NodeId,
    pub bound: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Column {
    pub path: PathWitness,
    pub flow: f64,
}

/// Duals of the restricted master, `β` stored sparsely per demand.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct DualSolution {
    pub alpha: Vec<f64>,
    pub beta: Vec<BTreeMap<EdgeId, f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FractionalSolution {
    /// One value per edge of the graph.
    pub x: Vec<f64>,
    /// Generated columns, indexed like the demand list.
    pub columns: Vec<Vec<Column>>,
    pub objective: f64,
    pub duals: DualSolution,
    pub rounds: usize,
}

impl FractionalSolution {
    pub fn nonzero_x(&self, tol: f64) -> usize {
        self.x.iter().filter(|&&v| v > tol).count()
    }

    pub fn column_count(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LpConfig {
    /// Pricing accuracy; the objective is within `(1 + eps)` of optimal.
    pub eps: f64,
    pub max_rounds: usize,
    /// Feasibility tolerance reported by the invariants.
    pub feas_tol: f64,
}

impl LpConfig {
    pub fn new(eps: f64) -> Self {
        LpConfig {
            eps,
            max_rounds: 10_000,
            feas_tol: 1e-6,
        }
    }
}

/// Every ordered pair `u != v` with `ℓ̄(u, v)` finite, bounded by
/// `bound(ℓ̄(u, v))`. Pairs whose bound is below their distance are dropped.
pub fn satisfiable_pairs(g: &Digraph, bound: impl Fn(u64) -> u64) -> Vec<PairDemand> {
    let mut out = Vec::new();
    for u in 0..g.node_count() {
        for (v, d) in g.shortest_lengths_from(u).into_iter().enumerate() {
            if let (true, Distance::Finite(d)) = (u != v, d) {
                let b = bound(d);
                if d <= b {
                    out.push(PairDemand { from: u, to: v, bound: b });
                }
            }
        }
    }
    out
}

pub fn solve_fractional(g: &Digraph, demands: &[PairDemand], cfg: &LpConfig) -> Result<FractionalSolution, LpError> {
    let m = g.edge_count();
    if demands.is_empty() {
        return Ok(FractionalSolution {
            x: vec![0.0; m],
            columns: Vec::new(),
            objective: 0.0,
            duals: DualSolution::default(),
            rounds: 0,
        });
    }
    let costs: Vec<f64> = g.edges().iter().map(|e| e.cost as f64).collect();

    // Seed each demand with its cheapest length-feasible path.
    let seeds: Vec<Result<PathWitness, LpError>> = demands
        .par_iter()
        .map(|d| {
            min_weight_path_hassin(g, &costs, d.from, d.to, d.bound, cfg.eps)
                .map(|w| w.path)
                .map_err(|_| LpError::UnsatisfiableDemand(d.from, d.to))
        })
        .collect();
    let mut columns: Vec<Vec<PathWitness>> = Vec::with_capacity(demands.len());
    for s in seeds {
        columns.push(vec![s?]);
    }
    let mut known: Vec<HashSet<Vec<EdgeId>>> = columns
        .iter()
        .map(|cs| cs.iter().map(|p| p.edges.clone()).collect())
        .collect();

    let pricing_eps = cfg.eps / 2.0;
    for round in 1..=cfg.max_rounds {
        let master = Master::build(g, &columns);
        let sol = master.solve()?;
        let priced: Vec<(f64, Option<PathWitness>)> = demands
            .par_iter()
            .enumerate()
            .map(|(d, dem)| {
                let alpha = sol.alpha[d];
                if alpha <= 1e-9 {
                    return (0.0, None);
                }
                let mut w = vec![0.0; m];
                for (&e, &b) in &sol.beta[d] {
                    w[e] = b;
                }
                let threshold = alpha * (1.0 - 1e-7) - 1e-9;
                // Ignoring the length bound gives a lower bound on the priced
                // weight, and the exact optimum when the path happens to fit.
                let Some((free_weight, free_path)) = min_weight_path_unbounded(g, &w, dem.from, dem.to) else {
                    return (0.0, None);
                };
                if free_weight >= threshold {
                    return (free_weight, None);
                }
                let free = PathWitness::from_edges(g, free_path);
                if free.length <= dem.bound {
                    return (free_weight, Some(free));
                }
                match min_weight_path_hassin(g, &w, dem.from, dem.to, dem.bound, pricing_eps) {
                    Ok(found) => (
                        free_weight.max(found.weight / (1.0 + pricing_eps)),
                        (found.weight < threshold).then_some(found.path),
                    ),
                    Err(_) => (free_weight, None),
                }
            })
            .collect();
        // Σ_d min_P β_d(P) bounds the LP optimum from below once β respects
        // the edge costs; rescale to absorb solver tolerance.
        let mut load = vec![0.0; m];
        for b in &sol.beta {
            for (&e, &v) in b {
                load[e] += v;
            }
        }
        let scale = load
            .iter()
            .zip(g.edges())
            .filter(|(&l, _)| l > 0.0)
            .map(|(&l, e)| e.cost as f64 / l)
            .fold(1.0, f64::min);
        let lower = scale * priced.iter().map(|(lb, _)| lb).sum::<f64>();
        if sol.objective <= (1.0 + cfg.eps) * lower {
            return Ok(master.into_solution(columns, sol, round));
        }
        let fresh = priced.into_iter().map(|(_, p)| p);
        let mut added = 0;
        for (d, p) in fresh.enumerate() {
            if let Some(p) = p {
                if known[d].insert(p.edges.clone()) {
                    columns[d].push(p);
                    added += 1;
                }
            }
        }
        if added == 0 {
            return Ok(master.into_solution(columns, sol, round));
        }
    }
    Err(LpError::IterationLimit(cfg.max_rounds))
}

/// Dijkstra over nonnegative real weights; ties favour the lower edge id.
fn min_weight_path_unbounded(g: &Digraph, w: &[f64], u: NodeId, v: NodeId) -> Option<(f64, Vec<EdgeId>)> {
    let n = g.node_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred: Vec<Option<EdgeId>> = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[u] = 0.0;
    heap.push(Reverse((OrdF64(0.0), u)));
    while let Some(Reverse((OrdF64(d), x))) = heap.pop() {
        if done[x] {
            continue;
        }
        done[x] = true;
        if x == v {
            break;
        }
        for &e in g.out_edges(x) {
            let h = g.edge(e).head;
            let nd = d + w[e].max(0.0);
            if nd < dist[h] {
                dist[h] = nd;
                pred[h] = Some(e);
                heap.push(Reverse((OrdF64(nd), h)));
            }
        }
    }
    if !done[v] {
        return None;
    }
    let mut path = Vec::new();
    let mut x = v;
    while x != u {
        let e = pred[x].expect("settled nodes have predecessors");
        path.push(e);
        x = g.edge(e).tail;
    }
    path.reverse();
    Some((dist[v], path))
}

#[derive(Clone, Copy, PartialEq)]
struct OrdF64(f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

struct MasterSolution {
    x_active: Vec<f64>,
    flows: Vec<f64>,
    objective: f64,
    alpha: Vec<f64>,
    beta: Vec<BTreeMap<EdgeId, f64>>,
}

/// Restricted master in the `A v + s = b, s >= 0` form.
struct Master {
    m: usize,
    costs: Vec<f64>,
    /// Active edges (those in some column); `x` variable `i` is edge `active[i]`.
    active: Vec<EdgeId>,
    /// (demand, edge) of each linking row, in row order after the coverage rows.
    linking: Vec<(usize, EdgeId)>,
    n_cols: usize,
    demands: usize,
    a: CscMatrix<f64>,
    b: Vec<f64>,
}

impl Master {
    fn build(g: &Digraph, columns: &[Vec<PathWitness>]) -> Master {
        let m = g.edge_count();
        let mut active_flag = vec![false; m];
        for p in columns.iter().flatten() {
            for &e in &p.edges {
                active_flag[e] = true;
            }
        }
        let active: Vec<EdgeId> = (0..m).filter(|&e| active_flag[e]).collect();
        let mut x_index = vec![usize::MAX; m];
        for (i, &e) in active.iter().enumerate() {
            x_index[e] = i;
        }
        let nx = active.len();
        let n_cols: usize = columns.iter().map(Vec::len).sum();
        let demands = columns.len();

        let (mut ri, mut ci, mut vals) = (Vec::new(), Vec::new(), Vec::new());
        let mut b = Vec::new();
        let mut linking = Vec::new();
        // Coverage: -Σ f_P <= -1.
        let mut col = nx;
        for (d, cs) in columns.iter().enumerate() {
            for _ in cs {
                ri.push(d);
                ci.push(col);
                vals.push(-1.0);
                col += 1;
            }
            b.push(-1.0);
        }
        // Linking: Σ_{P ∋ e} f_P - x_e <= 0.
        let mut row = demands;
        let mut col_base = nx;
        for (d, cs) in columns.iter().enumerate() {
            let mut edges: Vec<EdgeId> = cs.iter().flat_map(|p| p.edges.iter().copied()).collect();
            edges.sort_unstable();
            edges.dedup();
            for &e in &edges {
                for (k, p) in cs.iter().enumerate() {
                    if p.edges.contains(&e) {
                        ri.push(row);
                        ci.push(col_base + k);
                        vals.push(1.0);
                    }
                }
                ri.push(row);
                ci.push(x_index[e]);
                vals.push(-1.0);
                b.push(0.0);
                linking.push((d, e));
                row += 1;
            }
            col_base += cs.len();
        }
        // Nonnegativity of every variable.
        for v in 0..nx + n_cols {
            ri.push(row);
            ci.push(v);
            vals.push(-1.0);
            b.push(0.0);
            row += 1;
        }
        let a = CscMatrix::new_from_triplets(row, nx + n_cols, ri, ci, vals);
        let mut costs = vec![0.0; nx + n_cols];
        for (i, &e) in active.iter().enumerate() {
            costs[i] = g.edge(e).cost as f64;
        }
        Master {
            m,
            costs,
            active,
            linking,
            n_cols,
            demands,
            a,
            b,
        }
    }

    fn solve(&self) -> Result<MasterSolution, LpError> {
        let nvar = self.costs.len();
        let p = CscMatrix::<f64>::zeros((nvar, nvar));
        let cones = [NonnegativeConeT(self.b.len())];
        let settings = DefaultSettingsBuilder::default()
            .verbose(false)
            .tol_gap_abs(1e-9)
            .tol_gap_rel(1e-9)
            .tol_feas(1e-9)
            .max_iter(500)
            .build()
            .map_err(|e| LpError::Backend(format!("{e:?}")))?;
        let mut solver = DefaultSolver::new(&p, &self.costs, &self.a, &self.b, &cones, settings)
            .map_err(|e| LpError::Backend(format!("{e:?}")))?;
        solver.solve();
        let s = &solver.solution;
        if !matches!(s.status, SolverStatus::Solved | SolverStatus::AlmostSolved) {
            return Err(LpError::Backend(format!("restricted master status {:?}", s.status)));
        }
        let nx = self.active.len();
        let clamp = |v: f64| if v > 0.0 { v } else { 0.0 };
        let mut beta = vec![BTreeMap::new(); self.demands];
        for (i, &(d, e)) in self.linking.iter().enumerate() {
            beta[d].insert(e, clamp(s.z[self.demands + i]));
        }
        Ok(MasterSolution {
            x_active: s.x[..nx].iter().map(|&v| clamp(v)).collect(),
            flows: s.x[nx..nx + self.n_cols].iter().map(|&v| clamp(v)).collect(),
            objective: s.obj_val,
            alpha: s.z[..self.demands].iter().map(|&v| clamp(v)).collect(),
            beta,
        })
    }

    fn into_solution(self, columns: Vec<Vec<PathWitness>>, sol: MasterSolution, rounds: usize) -> FractionalSolution {
        let mut x = vec![0.0; self.m];
        for (i, &e) in self.active.iter().enumerate() {
            x[e] = sol.x_active[i];
        }
        let mut flows = sol.flows.into_iter();
        let columns = columns
            .into_iter()
            .map(|cs| {
                cs.into_iter()
                    .map(|path| Column {
                        path,
                        flow: flows.next().expect("one flow per column"),
                    })
                    .collect()
            })
            .collect();
        FractionalSolution {
            x,
            columns,
            objective: sol.objective,
            duals: DualSolution {
                alpha: sol.alpha,
                beta: sol.beta,
            },
            rounds,
        }
    }
}

/// Sampling factor `sqrt(n) * ln n`.
pub fn rounding_gamma(n: usize) -> f64 {
    let n = n as f64;
    if n <= 1.0 {
        0.0
    } else {
        n.sqrt() * n.ln()
    }
}

/// Keeps edge `e` outright when `gamma * x_e >= 1`, otherwise with
/// probability `gamma * x_e`. One uniform draw per edge, in id order.
pub fn round_edges(x: &[f64], n: usize, seed: u64) -> Vec<EdgeId> {
    round_edges_with_gamma(x, rounding_gamma(n), seed)
}

pub fn round_edges_with_gamma(x: &[f64], gamma: f64, seed: u64) -> Vec<EdgeId> {
    let mut rng = stream(seed, crate::rng::ROUNDING_STREAM);
    let mut kept = Vec::new();
    for (e, &xe) in x.iter().enumerate() {
        let p = gamma * xe;
        let draw: f64 = rng.gen();
        if p >= 1.0 || draw < p {
            kept.push(e);
        }
    }
    kept
}

/// Demands whose shortest length inside `edges` exceeds their bound.
pub fn verify_settled(g: &Digraph, edges: &[EdgeId], demands: &[PairDemand]) -> Vec<PairDemand> {
    let mask = crate::graph::edge_mask(g.edge_count(), edges.iter().copied());
    let mut by_source: BTreeMap<NodeId, Vec<&PairDemand>> = BTreeMap::new();
    for d in demands {
        by_source.entry(d.from).or_default().push(d);
    }
    let mut out = Vec::new();
    for (u, ds) in by_source {
        let dist = g.shortest_lengths_within(u, &mask);
        out.extend(ds.into_iter().filter(|d| !dist[d.to].within(d.bound)).copied());
    }
    out.sort();
    out
}
