//! Directed shallow-light Steiner trees by recursive greedy.
//!
//! Level 1 joins the `k` cheapest length-relaxed root-terminal paths. Level
//! `i > 1` repeatedly picks the candidate of least relative cost, where a
//! candidate is a relaxed path from the root to some hub `v` (one per rung of
//! a geometric length ladder) joined with a level-`(i-1)` tree at `v` that
//! covers `k'` terminals under bounds reduced by the path length.
//!
//! Every bound seen anywhere in the recursion has the form
//! `d(t) - S / (1 + eps)` for the top-level bound `d(t)` and an integer
//! offset `S` (the total length of hub paths above). Caches are keyed on
//! that offset, which lets the greedy loop reuse level-1 path sets across
//! iterations.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::rc::Rc;

use crate::error::SlstError;
use crate::graph::{Digraph, Distance, EdgeId, NodeId};
use crate::instance::SlstInstance;
use crate::rsp::relaxed_paths_from;
use crate::solution::{PathWitness, TreeSolution};

/// Relative slack used when comparing real-valued bounds against integers.
const BOUND_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct SlstParams {
    /// Recursion level `i >= 1`.
    pub level: usize,
    /// Length slack; served terminals end up within `(1 + eps) * d(t)`.
    pub eps: f64,
    /// Terminals to cover; `None` means all of them.
    pub k: Option<usize>,
    /// Caps the `k'` values tried per hub. Off by default.
    pub max_k_prime: Option<usize>,
    /// Caps the number of ladder rungs tried per hub. Off by default.
    pub max_rungs: Option<usize>,
}

impl SlstParams {
    pub fn new(level: usize, eps: f64) -> Self {
        SlstParams {
            level,
            eps,
            k: None,
            max_k_prime: None,
            max_rungs: None,
        }
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }

    /// `true` when a pruning knob is on and the guarantees are heuristic.
    pub fn is_pruned(&self) -> bool {
        self.max_k_prime.is_some() || self.max_rungs.is_some()
    }
}

/// One greedy pick: a hub path joined with a lower-level tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialTree {
    pub hub: NodeId,
    /// Index into the length ladder (0 is the zero-length rung).
    pub rung: usize,
    pub k_prime: usize,
    /// Sorted edge ids of the candidate, shared edges counted once.
    pub edges: Vec<EdgeId>,
    pub cost: u64,
    /// Terminals the candidate serves within their relaxed bounds.
    pub covered: Vec<NodeId>,
}

impl PartialTree {
    /// `cost / |covered|`, infinite for the empty candidate.
    pub fn relative_cost(&self) -> f64 {
        if self.covered.is_empty() {
            f64::INFINITY
        } else {
            self.cost as f64 / self.covered.len() as f64
        }
    }
}

/// Approximation ratio `2 i^2 (i-1) k^(1/i) / 2^(1/i)` of the level-`i`
/// algorithm on `k` terminals.
pub fn ratio_bound(level: usize, k: usize) -> f64 {
    assert!(level >= 2 && k >= 1, "ratio_bound needs level >= 2 and k >= 1");
    let i = level as f64;
    2.0 * i * i * (i - 1.0) * (k as f64).powf(1.0 / i) / 2f64.powf(1.0 / i)
}

/// Shallow-light tree rooted at `inst.root` covering at least `k` terminals,
/// each within `(1 + eps) * d(t)`.
pub fn shallow_light(inst: &SlstInstance, params: &SlstParams) -> Result<TreeSolution, SlstError> {
    let k = validate(inst, params)?;
    let mut engine = Engine::new(inst, params);
    let built = engine
        .greedy(params.level, inst.root, 0, inst.terminal_ids(), k)
        .ok_or(SlstError::Infeasible { k })?;
    Ok(engine.finish(inst.root, &built))
}

/// Level-1 tree: the union of the `k` cheapest relaxed root-terminal paths.
pub fn level_one(inst: &SlstInstance, params: &SlstParams) -> Result<TreeSolution, SlstError> {
    shallow_light(
        inst,
        &SlstParams {
            level: 1,
            ..params.clone()
        },
    )
}

/// The candidate of least relative cost in the first greedy iteration at
/// `params.level` (which must be at least 2). Returns an empty candidate when
/// nothing is feasible.
pub fn best_subtree(inst: &SlstInstance, params: &SlstParams) -> Result<PartialTree, SlstError> {
    if params.level < 2 {
        return Err(SlstError::BadParams("best_subtree needs level >= 2".into()));
    }
    let k = validate(inst, params)?;
    let mut engine = Engine::new(inst, params);
    let terms = inst.terminal_ids();
    Ok(match engine.best_candidate(params.level, inst.root, 0, &terms, k) {
        Some(c) => {
            let covered = engine.served(inst.root, 0, &terms, &c.edges);
            PartialTree {
                hub: c.hub,
                rung: c.rung,
                k_prime: c.k_prime,
                cost: c.cost,
                edges: c.edges,
                covered,
            }
        }
        None => PartialTree {
            hub: inst.root,
            rung: 0,
            k_prime: 0,
            edges: Vec::new(),
            cost: 0,
            covered: Vec::new(),
        },
    })
}

fn validate(inst: &SlstInstance, params: &SlstParams) -> Result<usize, SlstError> {
    if params.level == 0 {
        return Err(SlstError::BadParams("level must be at least 1".into()));
    }
    if params.eps.is_nan() || params.eps <= 0.0 {
        return Err(SlstError::BadParams("eps must be positive".into()));
    }
    if inst.root >= inst.graph.node_count() || inst.terminals.keys().any(|&t| t >= inst.graph.node_count()) {
        return Err(SlstError::BadParams("root or terminal out of range".into()));
    }
    let k = params.k.unwrap_or(inst.terminals.len());
    if k == 0 || k > inst.terminals.len() {
        return Err(SlstError::BadParams(format!(
            "k = {k} must lie in 1..={}",
            inst.terminals.len()
        )));
    }
    Ok(k)
}

/// Edge set assembled by the recursion, not yet an arborescence.
#[derive(Clone, Debug)]
struct Built {
    edges: Vec<EdgeId>,
    covered: Vec<NodeId>,
}

#[derive(Clone, Debug)]
struct Candidate {
    hub: NodeId,
    rung: usize,
    k_prime: usize,
    edges: Vec<EdgeId>,
    cost: u64,
}

/// Total order used to pick the best candidate: relative cost, then hub,
/// then `k'`, then rung.
fn candidate_order(a: (u64, usize, NodeId, usize, usize), b: (u64, usize, NodeId, usize, usize)) -> Ordering {
    let (ca, na, va, ka, ja) = a;
    let (cb, nb, vb, kb, jb) = b;
    (ca as u128 * nb as u128)
        .cmp(&(cb as u128 * na as u128))
        .then(va.cmp(&vb))
        .then(ka.cmp(&kb))
        .then(ja.cmp(&jb))
}

type PathTable = Rc<Vec<Option<PathWitness>>>;
/// Per target node, the distinct hub paths as (ladder rung, path).
type HubPaths = Rc<Vec<Vec<(usize, Rc<PathWitness>)>>>;
/// (terminal, path) pairs sorted by (cost, terminal).
type LevelOneList = Rc<Vec<(NodeId, Rc<PathWitness>)>>;

struct Engine<'g> {
    g: &'g Digraph,
    eps: f64,
    bound: Vec<Option<f64>>,
    ladder: Vec<f64>,
    max_k_prime: usize,
    distances: HashMap<NodeId, Rc<Vec<Distance>>>,
    relaxed: HashMap<(NodeId, u64), PathTable>,
    /// `hubs[r][v]`: distinct relaxed `r`-`v` paths over the ladder.
    hubs: HashMap<NodeId, HubPaths>,
    /// Level-1 path sets at `(v, S)`, sorted by (cost, terminal).
    level_one: HashMap<(NodeId, u64), LevelOneList>,
}

impl<'g> Engine<'g> {
    fn new(inst: &'g SlstInstance, params: &SlstParams) -> Self {
        let g = &inst.graph;
        let mut bound = vec![None; g.node_count()];
        for (&t, &d) in &inst.terminals {
            bound[t] = Some(d as f64);
        }
        Engine {
            g,
            eps: params.eps,
            bound,
            ladder: ladder(g.total_length(), params.eps, params.max_rungs),
            max_k_prime: params.max_k_prime.unwrap_or(usize::MAX),
            distances: HashMap::new(),
            relaxed: HashMap::new(),
            hubs: HashMap::new(),
            level_one: HashMap::new(),
        }
    }

    /// Bound of terminal `t` at offset `s`.
    fn bound_at(&self, t: NodeId, s: u64) -> f64 {
        self.bound[t].expect("terminal has a bound") - s as f64 / (1.0 + self.eps)
    }

    fn dist_from(&mut self, v: NodeId) -> Rc<Vec<Distance>> {
        let g = self.g;
        self.distances
            .entry(v)
            .or_insert_with(|| Rc::new(g.shortest_lengths_from(v)))
            .clone()
    }

    fn relaxed_from(&mut self, v: NodeId, bound: f64) -> PathTable {
        let (g, eps) = (self.g, self.eps);
        self.relaxed
            .entry((v, bound.to_bits()))
            .or_insert_with(|| Rc::new(relaxed_paths_from(g, v, bound, eps).expect("eps validated")))
            .clone()
    }

    /// Exact feasibility: ℓ̄(v, t) within the bound at offset `s`.
    fn respects(&self, dist: &[Distance], t: NodeId, s: u64) -> Option<f64> {
        let b = self.bound_at(t, s);
        let d = dist[t].finite()? as f64;
        (d <= b + BOUND_TOL * b.abs().max(1.0)).then_some(b.max(d))
    }

    fn level_one_list(&mut self, v: NodeId, s: u64) -> LevelOneList {
        if let Some(hit) = self.level_one.get(&(v, s)) {
            return hit.clone();
        }
        let dist = self.dist_from(v);
        let mut out = Vec::new();
        for t in 0..self.g.node_count() {
            if self.bound[t].is_none() {
                continue;
            }
            let Some(b) = self.respects(&dist, t, s) else { continue };
            let table = self.relaxed_from(v, b);
            let p = table[t]
                .clone()
                .expect("a path within the bound exists, so the relaxed search finds one");
            out.push((t, Rc::new(p)));
        }
        out.sort_by_key(|(t, p)| (p.cost, *t));
        let out = Rc::new(out);
        self.level_one.insert((v, s), out.clone());
        out
    }

    fn hub_paths(&mut self, r: NodeId) -> HubPaths {
        if let Some(hit) = self.hubs.get(&r) {
            return hit.clone();
        }
        let n = self.g.node_count();
        let mut per_hub: Vec<Vec<(usize, Rc<PathWitness>)>> = vec![Vec::new(); n];
        let mut seen: Vec<HashSet<Vec<EdgeId>>> = vec![HashSet::new(); n];
        for j in 0..self.ladder.len() {
            let table = self.relaxed_from(r, self.ladder[j]);
            for v in 0..n {
                if let Some(p) = &table[v] {
                    if seen[v].insert(p.edges.clone()) {
                        per_hub[v].push((j, Rc::new(p.clone())));
                    }
                }
            }
        }
        let out = Rc::new(per_hub);
        self.hubs.insert(r, out.clone());
        out
    }

    fn feasible_count(&mut self, r: NodeId, s: u64, remaining: &[NodeId]) -> usize {
        let dist = self.dist_from(r);
        remaining
            .iter()
            .filter(|&&t| self.respects(&dist, t, s).is_some())
            .count()
    }

    fn greedy(&mut self, level: usize, r: NodeId, s: u64, mut remaining: Vec<NodeId>, k: usize) -> Option<Built> {
        if level == 1 {
            return self.level_one_tree(r, s, &remaining, k);
        }
        if self.feasible_count(r, s, &remaining) < k {
            return None;
        }
        let mut edges: Vec<EdgeId> = Vec::new();
        let mut covered = Vec::new();
        let mut k_left = k;
        while k_left > 0 {
            let best = self.best_candidate(level, r, s, &remaining, k_left)?;
            let newly = self.served(r, s, &remaining, &best.edges);
            if newly.is_empty() {
                return None;
            }
            edges.extend_from_slice(&best.edges);
            remaining.retain(|t| !newly.contains(t));
            k_left = k_left.saturating_sub(newly.len());
            covered.extend(newly);
        }
        edges.sort_unstable();
        edges.dedup();
        covered.sort_unstable();
        Some(Built { edges, covered })
    }

    fn level_one_tree(&mut self, r: NodeId, s: u64, remaining: &[NodeId], k: usize) -> Option<Built> {
        let list = self.level_one_list(r, s);
        let chosen: Vec<_> = list
            .iter()
            .filter(|(t, _)| remaining.binary_search(t).is_ok())
            .take(k)
            .collect();
        if chosen.len() < k {
            return None;
        }
        let mut edges: Vec<EdgeId> = chosen.iter().flat_map(|(_, p)| p.edges.iter().copied()).collect();
        edges.sort_unstable();
        edges.dedup();
        let mut covered: Vec<NodeId> = chosen.iter().map(|(t, _)| *t).collect();
        covered.sort_unstable();
        Some(Built { edges, covered })
    }

    /// Remaining terminals whose distance from `r` inside `edges` meets the
    /// relaxed bound at offset `s`.
    fn served(&self, r: NodeId, s: u64, remaining: &[NodeId], edges: &[EdgeId]) -> Vec<NodeId> {
        let mut mask = vec![false; self.g.edge_count()];
        for &e in edges {
            mask[e] = true;
        }
        let dist = self.g.shortest_lengths_within(r, &mask);
        remaining
            .iter()
            .copied()
            .filter(|&t| {
                let limit = (1.0 + self.eps) * self.bound_at(t, s);
                matches!(dist[t], Distance::Finite(d) if d as f64 <= limit + BOUND_TOL * limit.abs().max(1.0))
            })
            .collect()
    }

    fn best_candidate(&mut self, level: usize, r: NodeId, s: u64, remaining: &[NodeId], k: usize) -> Option<Candidate> {
        debug_assert!(level >= 2);
        let hubs = self.hub_paths(r);
        let mut best: Option<(u64, usize, NodeId, usize, usize)> = None;
        let mut best_edges: Vec<EdgeId> = Vec::new();
        let mut mask = vec![false; self.g.edge_count()];
        let g = self.g;
        let mut consider = |key: (u64, usize, NodeId, usize, usize), edges: &dyn Fn() -> Vec<EdgeId>| {
            if best.is_none_or(|b| candidate_order(key, b) == Ordering::Less) {
                best = Some(key);
                best_edges = edges();
            }
        };
        for v in 0..g.node_count() {
            for (rung, path) in hubs[v].iter() {
                let s_next = s + path.length;
                if level == 2 {
                    let list = self.level_one_list(v, s_next);
                    let usable: Vec<&(NodeId, Rc<PathWitness>)> = list
                        .iter()
                        .filter(|(t, _)| remaining.binary_search(t).is_ok())
                        .collect();
                    let k_max = k.min(usable.len()).min(self.max_k_prime);
                    let mut touched: Vec<EdgeId> = Vec::new();
                    let mut cost = 0u64;
                    for &e in &path.edges {
                        if !mask[e] {
                            mask[e] = true;
                            touched.push(e);
                            cost += g.edge(e).cost;
                        }
                    }
                    for kp in 1..=k_max {
                        for &e in &usable[kp - 1].1.edges {
                            if !mask[e] {
                                mask[e] = true;
                                touched.push(e);
                                cost += g.edge(e).cost;
                            }
                        }
                        consider((cost, kp, v, kp, *rung), &|| {
                            let mut es: Vec<EdgeId> = path.edges.clone();
                            for (_, p) in &usable[..kp] {
                                es.extend_from_slice(&p.edges);
                            }
                            es
                        });
                    }
                    for e in touched {
                        mask[e] = false;
                    }
                } else {
                    for kp in 1..=k.min(self.max_k_prime) {
                        let Some(sub) = self.greedy(level - 1, v, s_next, remaining.to_vec(), kp) else {
                            break;
                        };
                        let mut es = sub.edges.clone();
                        es.extend_from_slice(&path.edges);
                        es.sort_unstable();
                        es.dedup();
                        let cost = g.cost_of(&es);
                        consider((cost, sub.covered.len(), v, kp, *rung), &|| es.clone());
                    }
                }
            }
        }
        let (cost, _, hub, k_prime, rung) = best?;
        best_edges.sort_unstable();
        best_edges.dedup();
        Some(Candidate {
            hub,
            rung,
            k_prime,
            edges: best_edges,
            cost,
        })
    }

    fn finish(&self, root: NodeId, built: &Built) -> TreeSolution {
        let tree = TreeSolution::from_edge_set(self.g, root, &built.edges, &built.covered);
        debug_assert!(tree.distances.iter().all(|(&t, &d)| {
            let limit = (1.0 + self.eps) * self.bound[t].unwrap();
            d as f64 <= limit + BOUND_TOL * limit.max(1.0)
        }));
        tree
    }
}

/// Length ladder: a zero rung, then `(1 + eps)^j` for
/// `j = 0..=ceil(log_{1+eps} total_length)`. With `max_rungs`, an evenly
/// spaced subset that keeps the first and last rung.
fn ladder(total_length: u64, eps: f64, max_rungs: Option<usize>) -> Vec<f64> {
    let top = if total_length <= 1 {
        0
    } else {
        ((total_length as f64).ln() / (1.0 + eps).ln()).ceil() as i32
    };
    let mut rungs = vec![0.0];
    rungs.extend((0..=top).map(|j| (1.0 + eps).powi(j)));
    match max_rungs {
        Some(cap) if cap >= 2 && rungs.len() > cap => {
            let last = rungs.len() - 1;
            (0..cap).map(|i| rungs[i * last / (cap - 1)]).collect()
        }
        Some(cap) if rungs.len() > cap => vec![*rungs.last().unwrap()],
        _ => rungs,
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;

    /// Diamond: 1→2 (c1, ℓ5), 2→4 (c1, ℓ5), 1→3 (c10, ℓ1), 3→4 (c10, ℓ1).
    fn diamond(bound: u64) -> SlstInstance {
        let g = Digraph::from_tuples(4, &[(0, 1, 1, 5), (1, 3, 1, 5), (0, 2, 10, 1), (2, 3, 10, 1)]).unwrap();
        SlstInstance::new(g, 0, BTreeMap::from([(3, bound)]))
    }

    /// Stem: 1→2 (c9), 2→3 (c1), 2→4 (c1), 1→3 (c6), 1→4 (c6), unit lengths.
    fn stem() -> SlstInstance {
        let g = Digraph::from_tuples(
            4,
            &[(0, 1, 9, 1), (1, 2, 1, 1), (1, 3, 1, 1), (0, 2, 6, 1), (0, 3, 6, 1)],
        )
        .unwrap();
        SlstInstance::new(g, 0, BTreeMap::from([(2, 2), (3, 2)]))
    }

    #[test]
    fn diamond_tight_bound_goes_through_expensive_side() {
        for level in 1..=3 {
            let t = shallow_light(&diamond(4), &SlstParams::new(level, 0.1)).unwrap();
            assert_eq!(t.cost, 20, "level {level}");
            assert_eq!(t.edges, vec![2, 3]);
            assert!(t.is_valid_arborescence(&diamond(4).graph));
        }
    }

    #[test]
    fn diamond_loose_bound_goes_through_cheap_side() {
        for level in 1..=3 {
            let t = shallow_light(&diamond(10), &SlstParams::new(level, 0.1)).unwrap();
            assert_eq!(t.cost, 2, "level {level}");
        }
    }

    #[test]
    fn stem_needs_two_levels() {
        let inst = stem();
        assert_eq!(shallow_light(&inst, &SlstParams::new(1, 0.25)).unwrap().cost, 12);
        let t = shallow_light(&inst, &SlstParams::new(2, 0.25)).unwrap();
        assert_eq!(t.cost, 11);
        assert_eq!(t.edges, vec![0, 1, 2]);
        assert_eq!(t.distances, BTreeMap::from([(2, 2), (3, 2)]));
    }

    #[test]
    fn stem_first_pick_is_hub_two() {
        let p = best_subtree(&stem(), &SlstParams::new(2, 0.25)).unwrap();
        assert_eq!((p.hub, p.k_prime), (1, 2));
        assert_eq!(p.relative_cost(), 5.5);
        assert_eq!(p.covered, vec![2, 3]);
    }

    #[test]
    fn hub_at_root_reduces_to_lower_level() {
        // Single terminal: the best level-2 candidate costs exactly the
        // cheapest relaxed path.
        let inst = diamond(10);
        let p = best_subtree(&inst, &SlstParams::new(2, 0.1)).unwrap();
        assert_eq!(p.relative_cost(), 2.0);
        assert_eq!(p.hub, 0);
        assert_eq!(p.rung, 0);
    }

    #[test]
    fn level_one_single_edge_and_shared_prefix() {
        let g = Digraph::from_tuples(2, &[(0, 1, 5, 3)]).unwrap();
        let inst = SlstInstance::new(g, 0, BTreeMap::from([(1, 3)]));
        assert_eq!(level_one(&inst, &SlstParams::new(1, 0.5)).unwrap().cost, 5);

        let g = Digraph::from_tuples(3, &[(0, 1, 4, 1), (1, 2, 1, 1)]).unwrap();
        let inst = SlstInstance::new(g, 0, BTreeMap::from([(1, 1), (2, 2)]));
        let t = level_one(&inst, &SlstParams::new(1, 0.5)).unwrap();
        assert_eq!(t.cost, 5);
        assert!(t.cost < 4 + (4 + 1));
    }

    #[test]
    fn unreachable_terminals_are_infeasible() {
        let g = Digraph::from_tuples(3, &[(0, 1, 1, 5)]).unwrap();
        let inst = SlstInstance::new(g, 0, BTreeMap::from([(1, 4), (2, 10)]));
        for level in 1..=2 {
            assert_eq!(
                shallow_light(&inst, &SlstParams::new(level, 0.5).with_k(1)),
                Err(SlstError::Infeasible { k: 1 })
            );
        }
    }

    #[test]
    fn partial_cover() {
        let inst = stem();
        let t = shallow_light(&inst, &SlstParams::new(2, 0.25).with_k(1)).unwrap();
        assert_eq!(t.cost, 6);
        assert_eq!(t.distances.len(), 1);
    }

    #[test]
    fn root_as_terminal_costs_nothing() {
        let g = Digraph::from_tuples(2, &[(0, 1, 3, 1)]).unwrap();
        let inst = SlstInstance::new(g, 0, BTreeMap::from([(0, 0)]));
        let t = shallow_light(&inst, &SlstParams::new(2, 0.5)).unwrap();
        assert_eq!(t.cost, 0);
        assert_eq!(t.distances, BTreeMap::from([(0, 0)]));
    }

    #[test]
    fn bad_params() {
        let inst = stem();
        assert!(matches!(shallow_light(&inst, &SlstParams::new(0, 0.5)), Err(SlstError::BadParams(_))));
        assert!(matches!(shallow_light(&inst, &SlstParams::new(2, 0.0)), Err(SlstError::BadParams(_))));
        assert!(matches!(
            shallow_light(&inst, &SlstParams::new(2, 0.5).with_k(3)),
            Err(SlstError::BadParams(_))
        ));
    }

    #[test]
    fn ratio_bound_values() {
        assert!((ratio_bound(2, 4) - 11.313708498984761).abs() < 1e-12);
        assert!((ratio_bound(2, 1) - 5.656854249492381).abs() < 1e-12);
        assert!(ratio_bound(3, 1_000_000) < ratio_bound(2, 1_000_000));
    }

    #[test]
    fn ladder_shape() {
        let l = ladder(100, 1.0, None);
        assert_eq!(l[0], 0.0);
        assert_eq!(l[1], 1.0);
        assert_eq!(*l.last().unwrap(), 128.0);
        let capped = ladder(100, 1.0, Some(3));
        assert_eq!(capped, vec![0.0, 8.0, 128.0]);
    }

    #[test]
    fn pruning_knobs_still_produce_valid_trees() {
        let inst = stem();
        let mut params = SlstParams::new(2, 0.25);
        params.max_k_prime = Some(1);
        params.max_rungs = Some(2);
        assert!(params.is_pruned());
        let t = shallow_light(&inst, &params).unwrap();
        assert!(t.is_valid_arborescence(&inst.graph));
        assert_eq!(t.distances.len(), 2);
    }
}
