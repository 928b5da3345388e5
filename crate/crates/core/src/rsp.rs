//! Restricted (length-bounded) shortest paths.
//!
//! Three entry points share one layered dynamic program:
//!
//! * [`rsp_exact`]: minimum cost subject to `length <= D`, exact and
//!   pseudo-polynomial in `D`.
//! * [`min_cost_path_relaxed`]: cost no worse than the exact optimum at `D`,
//!   length at most `(1 + eps) * D`. Lengths are scaled so the table has
//!   about `n / eps` layers regardless of `D`.
//! * [`min_weight_path_hassin`]: length at most `D` exactly, real weight
//!   within `(1 + eps)` of optimal. Weights are scaled instead of lengths.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::RspError;
use crate::graph::{Digraph, EdgeId, NodeId};
use crate::solution::PathWitness;

/// Default cap on `(D + 1) * n` for [`rsp_exact`].
pub const DEFAULT_TABLE_CAP: u128 = 1_000_000;

const DISABLED: u64 = u64::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Label {
    value: u64,
    hops: u32,
    /// Incoming edge and the layer its tail label lives in.
    pred: Option<(EdgeId, u32)>,
}

impl Label {
    fn key(&self) -> (u64, u32, Option<EdgeId>) {
        (self.value, self.hops, self.pred.map(|p| p.0))
    }
}

/// `layers[b][v]` is the best walk from the source to `v` whose step total
/// is at most `b`, ordered by (objective, hop count, last edge id). The
/// optimum under this order is always a simple path since dropping a cycle
/// never increases objective or steps and strictly reduces hops.
struct LayeredDp<'g> {
    g: &'g Digraph,
    objective: Vec<u64>,
    step: Vec<u64>,
    layers: Vec<Vec<Option<Label>>>,
    has_zero_steps: bool,
    source: NodeId,
}

impl<'g> LayeredDp<'g> {
    fn new(g: &'g Digraph, source: NodeId, objective: Vec<u64>, step: Vec<u64>) -> Self {
        let has_zero_steps = step
            .iter()
            .zip(g.edges())
            .any(|(&s, e)| s == 0 && !e.is_self_loop());
        let mut dp = LayeredDp {
            g,
            objective,
            step,
            layers: Vec::new(),
            has_zero_steps,
            source,
        };
        dp.advance();
        dp
    }

    fn top(&self) -> usize {
        self.layers.len() - 1
    }

    fn advance(&mut self) {
        let b = self.layers.len();
        let mut cur: Vec<Option<Label>> = match self.layers.last() {
            Some(prev) => prev.clone(),
            None => vec![None; self.g.node_count()],
        };
        cur[self.source] = Some(Label {
            value: 0,
            hops: 0,
            pred: None,
        });
        if b > 0 {
            for (e, edge) in self.g.edges().iter().enumerate() {
                let s = self.step[e];
                if s == 0 || s == DISABLED || s as usize > b || edge.is_self_loop() {
                    continue;
                }
                let from_layer = b - s as usize;
                if let Some(from) = self.layers[from_layer][edge.tail] {
                    let cand = Label {
                        value: from.value.saturating_add(self.objective[e]),
                        hops: from.hops + 1,
                        pred: Some((e, from_layer as u32)),
                    };
                    relax(&mut cur[edge.head], cand);
                }
            }
        }
        if self.has_zero_steps {
            self.settle_zero_steps(&mut cur, b as u32);
        }
        self.layers.push(cur);
    }

    /// Dijkstra over zero-step edges inside one layer.
    fn settle_zero_steps(&self, cur: &mut [Option<Label>], layer: u32) {
        let mut heap: BinaryHeap<Reverse<(u64, u32, NodeId)>> = cur
            .iter()
            .enumerate()
            .filter_map(|(v, l)| l.map(|l| Reverse((l.value, l.hops, v))))
            .collect();
        let mut done = vec![false; cur.len()];
        while let Some(Reverse((value, hops, u))) = heap.pop() {
            if done[u] {
                continue;
            }
            match cur[u] {
                Some(l) if (l.value, l.hops) == (value, hops) => {}
                _ => continue,
            }
            done[u] = true;
            for &e in self.g.out_edges(u) {
                if self.step[e] != 0 {
                    continue;
                }
                let v = self.g.edge(e).head;
                if done[v] {
                    continue;
                }
                let cand = Label {
                    value: value.saturating_add(self.objective[e]),
                    hops: hops + 1,
                    pred: Some((e, layer)),
                };
                if relax(&mut cur[v], cand) {
                    heap.push(Reverse((cand.value, cand.hops, v)));
                }
            }
        }
    }

    fn label(&self, layer: usize, v: NodeId) -> Option<Label> {
        self.layers[layer][v]
    }

    fn path(&self, layer: usize, v: NodeId) -> Option<Vec<EdgeId>> {
        let mut label = self.layers[layer][v]?;
        let mut edges = Vec::with_capacity(label.hops as usize);
        while let Some((e, l)) = label.pred {
            edges.push(e);
            label = self.layers[l as usize][self.g.edge(e).tail].expect("predecessor label exists");
        }
        edges.reverse();
        Some(edges)
    }
}

fn relax(slot: &mut Option<Label>, cand: Label) -> bool {
    match slot {
        Some(old) if old.key() <= cand.key() => false,
        _ => {
            *slot = Some(cand);
            true
        }
    }
}

fn costs(g: &Digraph) -> Vec<u64> {
    g.edges().iter().map(|e| e.cost).collect()
}

fn lengths(g: &Digraph) -> Vec<u64> {
    g.edges().iter().map(|e| e.length).collect()
}

/// Cheapest path ignoring lengths, ties toward fewer edges.
pub fn min_cost_path_unbounded(g: &Digraph, u: NodeId, v: NodeId) -> Option<PathWitness> {
    let dp = LayeredDp::new(g, u, costs(g), vec![0; g.edge_count()]);
    dp.path(0, v).map(|p| PathWitness::from_edges(g, p))
}

/// Exact minimum-cost `u`-`v` path with length at most `bound`.
pub fn rsp_exact(g: &Digraph, u: NodeId, v: NodeId, bound: u64) -> Result<PathWitness, RspError> {
    rsp_exact_with_cap(g, u, v, bound, DEFAULT_TABLE_CAP)
}

pub fn rsp_exact_with_cap(
    g: &Digraph,
    u: NodeId,
    v: NodeId,
    bound: u64,
    cap: u128,
) -> Result<PathWitness, RspError> {
    if bound >= g.total_length() {
        return min_cost_path_unbounded(g, u, v).ok_or(RspError::Infeasible);
    }
    let cells = (bound as u128 + 1) * g.node_count() as u128;
    if cells > cap {
        return Err(RspError::BudgetTooLarge { cells, cap });
    }
    let mut dp = LayeredDp::new(g, u, costs(g), lengths(g));
    while dp.top() < bound as usize {
        dp.advance();
    }
    dp.path(dp.top(), v)
        .map(|p| PathWitness::from_edges(g, p))
        .ok_or(RspError::Infeasible)
}

/// Cheapest paths from `source` to every node under the length-relaxed
/// guarantee: each returned path has length at most `(1 + eps) * bound` and
/// cost at most that of the cheapest path of length at most `bound`. A
/// `None` entry means no path of length at most `bound` exists.
pub fn relaxed_paths_from(
    g: &Digraph,
    source: NodeId,
    bound: f64,
    eps: f64,
) -> Result<Vec<Option<PathWitness>>, RspError> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(RspError::BadEps);
    }
    let n = g.node_count();
    if bound < 0.0 || bound.is_nan() {
        // Even the empty path is too long.
        return Ok(vec![None; n]);
    }
    let dp = if bound >= g.total_length() as f64 {
        LayeredDp::new(g, source, costs(g), vec![0; g.edge_count()])
    } else if bound < 1.0 {
        // Only zero-length edges fit.
        LayeredDp::new(g, source, costs(g), lengths(g))
    } else {
        // A path of length <= bound has scaled length <= n/eps; one with at
        // most n-1 edges and scaled length <= n/eps has true length below
        // bound + (n-1)*eps*bound/n.
        let scale = n as f64 / (eps * bound);
        let budget = (n as f64 / eps * (1.0 + 1e-12)).floor() as u64;
        let step: Vec<u64> = g
            .edges()
            .iter()
            .map(|e| {
                let s = (e.length as f64 * scale * (1.0 - 1e-12)).floor();
                if s > budget as f64 {
                    DISABLED
                } else {
                    s as u64
                }
            })
            .collect();
        let mut dp = LayeredDp::new(g, source, costs(g), step);
        while (dp.top() as u64) < budget {
            dp.advance();
        }
        dp
    };
    let top = dp.top();
    Ok((0..n)
        .map(|t| dp.path(top, t).map(|p| PathWitness::from_edges(g, p)))
        .collect())
}

/// Single-target form of [`relaxed_paths_from`].
pub fn min_cost_path_relaxed(
    g: &Digraph,
    u: NodeId,
    v: NodeId,
    bound: f64,
    eps: f64,
) -> Result<PathWitness, RspError> {
    relaxed_paths_from(g, u, bound, eps)?
        .swap_remove(v)
        .ok_or(RspError::Infeasible)
}

/// A path together with its weight under caller-supplied edge weights.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedPath {
    pub path: PathWitness,
    pub weight: f64,
}

/// Length-exact, weight-approximate restricted shortest path.
///
/// Finds the bottleneck weight `W` (smallest threshold such that edges of
/// weight at most `W` still admit a feasible path), which brackets the
/// optimum in `[W, (n-1) W]`. Weights are then scaled by
/// `theta = eps * W / (n-1)` and a DP over scaled weight computes the
/// minimum length per node; the first layer that reaches `v` within the
/// bound yields the answer. Negative weights are treated as zero.
pub fn min_weight_path_hassin(
    g: &Digraph,
    weights: &[f64],
    u: NodeId,
    v: NodeId,
    bound: u64,
    eps: f64,
) -> Result<WeightedPath, RspError> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(RspError::BadEps);
    }
    assert_eq!(weights.len(), g.edge_count(), "one weight per edge");
    if u == v {
        return Ok(WeightedPath {
            path: PathWitness::empty(),
            weight: 0.0,
        });
    }
    let w: Vec<f64> = weights
        .iter()
        .map(|&x| if x > 0.0 { x } else { 0.0 })
        .collect();
    let n = g.node_count();

    let feasible_under = |threshold: f64| {
        let mask: Vec<bool> = w.iter().map(|&x| x <= threshold).collect();
        g.shortest_lengths_within(u, &mask)[v].within(bound)
    };
    let mut thresholds: Vec<f64> = w.clone();
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup();
    if thresholds.is_empty() || !feasible_under(*thresholds.last().unwrap()) {
        return Err(RspError::Infeasible);
    }
    let (mut lo, mut hi) = (0usize, thresholds.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible_under(thresholds[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let bottleneck = thresholds[lo];
    let lens = lengths(g);

    if bottleneck == 0.0 {
        let step = w.iter().map(|&x| if x == 0.0 { 0 } else { DISABLED }).collect();
        let dp = LayeredDp::new(g, u, lens, step);
        let edges = dp.path(0, v).expect("zero-weight path exists");
        return Ok(finish(g, &w, edges));
    }

    let hop_bound = (n.max(2) - 1) as f64;
    let theta = eps * bottleneck / hop_bound;
    let upper = hop_bound * bottleneck;
    let step: Vec<u64> = w
        .iter()
        .map(|&x| if x > upper { DISABLED } else { (x / theta).floor() as u64 })
        .collect();
    let max_layer = (upper / theta).ceil() as usize + n;
    let mut dp = LayeredDp::new(g, u, lens, step);
    loop {
        if let Some(l) = dp.label(dp.top(), v) {
            if l.value <= bound {
                let edges = dp.path(dp.top(), v).expect("label exists");
                return Ok(finish(g, &w, edges));
            }
        }
        if dp.top() >= max_layer {
            // Unreachable in exact arithmetic: the bottleneck path fits.
            return Err(RspError::Infeasible);
        }
        dp.advance();
    }
}

fn finish(g: &Digraph, w: &[f64], edges: Vec<EdgeId>) -> WeightedPath {
    let weight = edges.iter().map(|&e| w[e]).sum();
    WeightedPath {
        path: PathWitness::from_edges(g, edges),
        weight,
    }
}
