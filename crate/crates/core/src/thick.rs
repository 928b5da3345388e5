//! Settling thick pairs: sample roots, grow a shallow-light out-tree and
//! in-tree at each, and take the union.

use std::collections::BTreeMap;

use rand::seq::index;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::SlstError;
use crate::graph::{Digraph, Distance, EdgeId, NodeId};
use crate::instance::{Ratio, SlstInstance};
use crate::rng::{stream, ROOT_SAMPLING_STREAM};
use crate::slst::{shallow_light, SlstParams};
use crate::solution::TreeSolution;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleConfig {
    pub delta: usize,
    pub seed: u64,
}

impl SampleConfig {
    /// `delta = ceil(3 sqrt(n) ln n)` clamped to `1..=n`.
    pub fn new(n: usize, seed: u64) -> Self {
        SampleConfig {
            delta: default_delta(n),
            seed,
        }
    }

    pub fn with_delta(n: usize, delta: usize, seed: u64) -> Self {
        SampleConfig {
            delta: delta.clamp(1, n.max(1)),
            seed,
        }
    }
}

pub fn default_delta(n: usize) -> usize {
    let x = n as f64;
    let raw = (3.0 * x.sqrt() * x.ln()).ceil();
    (raw as usize).clamp(1, n.max(1))
}

/// Uniform sample of `min(delta, n)` distinct nodes, sorted.
pub fn sample_roots(n: usize, cfg: &SampleConfig) -> Vec<NodeId> {
    if n == 0 {
        return Vec::new();
    }
    let amount = cfg.delta.clamp(1, n);
    if amount == n {
        return (0..n).collect();
    }
    let mut rng = stream(cfg.seed, ROOT_SAMPLING_STREAM);
    let mut roots = index::sample(&mut rng, n, amount).into_vec();
    roots.sort_unstable();
    roots
}

/// Per-node distance bounds for the trees at a root.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootBounds {
    /// Every other node within `L`.
    Uniform(u64),
    /// Every node `v` reachable in `G` within `floor(α ℓ̄_G)` of the root
    /// (out-tree) or to the root (in-tree).
    Stretch(Ratio),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RootTrees {
    pub root: NodeId,
    pub out_tree: TreeSolution,
    /// Edge ids refer to `g`; `distances` are lengths from each node to the root.
    pub in_tree: TreeSolution,
}

fn tree_toward(g: &Digraph, root: NodeId, bounds: RootBounds, params: &SlstParams) -> Result<TreeSolution, SlstError> {
    let terminals: BTreeMap<NodeId, u64> = match bounds {
        RootBounds::Uniform(l) => (0..g.node_count()).filter(|&v| v != root).map(|v| (v, l)).collect(),
        RootBounds::Stretch(alpha) => g
            .shortest_lengths_from(root)
            .into_iter()
            .enumerate()
            .filter_map(|(v, d)| match d {
                Distance::Finite(d) if v != root => Some((v, alpha.floor_mul(d))),
                _ => None,
            })
            .collect(),
    };
    if terminals.is_empty() {
        return Ok(TreeSolution::from_edge_set(g, root, &[], &[]));
    }
    let inst = SlstInstance::new(g.clone(), root, terminals);
    shallow_light(&inst, params)
}

/// Out-tree on `g` and in-tree via the reversed graph.
pub fn build_root_trees(
    g: &Digraph,
    reversed: &Digraph,
    root: NodeId,
    bounds: RootBounds,
    params: &SlstParams,
) -> Result<RootTrees, SlstError> {
    Ok(RootTrees {
        root,
        out_tree: tree_toward(g, root, bounds, params)?,
        in_tree: tree_toward(reversed, root, bounds, params)?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThickUnion {
    pub edges: Vec<EdgeId>,
    pub trees: Vec<RootTrees>,
}

/// Trees for every root, built concurrently, and the sorted union of their edges.
pub fn union_thick(g: &Digraph, roots: &[NodeId], bounds: RootBounds, params: &SlstParams) -> Result<ThickUnion, SlstError> {
    let reversed = g.reverse();
    let trees = roots
        .par_iter()
        .map(|&r| build_root_trees(g, &reversed, r, bounds, params))
        .collect::<Result<Vec<_>, _>>()?;
    let mut edges: Vec<EdgeId> = trees
        .iter()
        .flat_map(|t| t.out_tree.edges.iter().chain(&t.in_tree.edges).copied())
        .collect();
    edges.sort_unstable();
    edges.dedup();
    Ok(ThickUnion { edges, trees })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PairClass {
    Thin,
    Thick,
    Unknown,
    Unsatisfiable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairClassification {
    pub from: NodeId,
    pub to: NodeId,
    pub class: PairClass,
    /// `|W_uv|`, nodes `w` with `ℓ̄(u, w) + ℓ̄(w, v) <= L`.
    pub candidates: usize,
    /// Nodes confirmed to lie on a simple `u`-`v` path of length at most `L`.
    pub confirmed: usize,
}

/// Thin/thick diagnostic for every ordered pair.
///
/// `W_uv` over-approximates the nodes on short simple paths, so
/// `|W_uv| <= sqrt(n)` proves thinness. A node `w` is confirmed when the
/// concatenated shortest paths `u ⇝ w ⇝ v` share no node but `w`; every node on
/// such a path is then confirmed too. More than `sqrt(n)` confirmed nodes
/// proves thickness; otherwise the pair is reported as unknown.
pub fn classify_pairs_diagnostic(g: &Digraph, bound: u64) -> Vec<PairClassification> {
    let n = g.node_count();
    let root_n = (n as f64).sqrt();
    let trees: Vec<(Vec<Distance>, Vec<Option<EdgeId>>)> =
        (0..n).into_par_iter().map(|s| g.shortest_path_tree(s, None)).collect();
    let path_nodes = |s: NodeId, t: NodeId| -> Vec<NodeId> {
        let mut nodes = vec![t];
        let mut v = t;
        while v != s {
            let e = trees[s].1[v].expect("target is reachable");
            v = g.edge(e).tail;
            nodes.push(v);
        }
        nodes.reverse();
        nodes
    };
    let pairs: Vec<(NodeId, NodeId)> = (0..n).flat_map(|u| (0..n).map(move |v| (u, v))).collect();
    pairs
        .into_par_iter()
        .map(|(u, v)| {
            let within = |w: NodeId| match (trees[u].0[w], trees[w].0[v]) {
                (Distance::Finite(a), Distance::Finite(b)) => a.saturating_add(b) <= bound,
                _ => false,
            };
            let w_set: Vec<NodeId> = (0..n).filter(|&w| within(w)).collect();
            if !trees[u].0[v].within(bound) {
                return PairClassification {
                    from: u,
                    to: v,
                    class: PairClass::Unsatisfiable,
                    candidates: w_set.len(),
                    confirmed: 0,
                };
            }
            let mut confirmed = vec![false; n];
            for &w in &w_set {
                if confirmed[w] {
                    continue;
                }
                let first = path_nodes(u, w);
                let second = path_nodes(w, v);
                let mut seen = vec![false; n];
                first.iter().for_each(|&x| seen[x] = true);
                if second[1..].iter().all(|&x| !seen[x]) {
                    first.iter().chain(&second).for_each(|&x| confirmed[x] = true);
                }
            }
            let confirmed = confirmed.iter().filter(|&&c| c).count();
            let class = if w_set.len() as f64 <= root_n {
                PairClass::Thin
            } else if confirmed as f64 > root_n {
                PairClass::Thick
            } else {
                PairClass::Unknown
            };
            PairClassification {
                from: u,
                to: v,
                class,
                candidates: w_set.len(),
                confirmed,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_cycle() -> Digraph {
        Digraph::from_tuples(2, &[(0, 1, 3, 1), (1, 0, 4, 1)]).unwrap()
    }

    fn params() -> SlstParams {
        SlstParams::new(2, 0.25)
    }

    #[test]
    fn sampling() {
        assert_eq!(default_delta(4), 4);
        assert_eq!(sample_roots(4, &SampleConfig::new(4, 9)), vec![0, 1, 2, 3]);
        assert_eq!(sample_roots(1, &SampleConfig::new(1, 9)), vec![0]);
        assert_eq!(default_delta(1000), 1000.min((3.0 * 1000f64.sqrt() * 1000f64.ln()).ceil() as usize));
        let cfg = SampleConfig::with_delta(50, 7, 3);
        let a = sample_roots(50, &cfg);
        assert_eq!(a, sample_roots(50, &cfg));
        assert_eq!(a.len(), 7);
        assert!(a.windows(2).all(|w| w[0] < w[1]));
        assert_ne!(a, sample_roots(50, &SampleConfig::with_delta(50, 7, 4)));
    }

    #[test]
    fn two_cycle_trees() {
        let g = two_cycle();
        let t = build_root_trees(&g, &g.reverse(), 0, RootBounds::Uniform(1), &params()).unwrap();
        assert_eq!(t.out_tree.edges, vec![0]);
        assert_eq!(t.in_tree.edges, vec![1]);
        assert_eq!(t.in_tree.distances[&1], 1);
        let u = union_thick(&g, &[0], RootBounds::Uniform(1), &params()).unwrap();
        assert_eq!(u.edges, vec![0, 1]);
        assert_eq!(g.cost_of(&u.edges), 7);
        assert_eq!(union_thick(&g, &[0, 1], RootBounds::Uniform(1), &params()).unwrap().edges, vec![0, 1]);
    }

    #[test]
    fn star_out_tree() {
        let g = Digraph::from_tuples(4, &[(0, 1, 1, 1), (0, 2, 1, 1), (0, 3, 1, 1), (1, 0, 1, 1), (2, 0, 1, 1), (3, 0, 1, 1)])
            .unwrap();
        let t = build_root_trees(&g, &g.reverse(), 0, RootBounds::Uniform(1), &params()).unwrap();
        assert_eq!(t.out_tree.edges, vec![0, 1, 2]);
        assert_eq!(t.in_tree.edges, vec![3, 4, 5]);
    }

    #[test]
    fn diamond_out_tree() {
        let g = Digraph::from_tuples(4, &[(0, 1, 1, 5), (1, 3, 1, 5), (0, 2, 10, 1), (2, 3, 10, 1)]).unwrap();
        let inst = SlstInstance::new(g, 0, BTreeMap::from([(3, 4)]));
        let t = shallow_light(&inst, &params()).unwrap();
        assert_eq!(t.cost, 20);
    }

    #[test]
    fn stretch_bounds_skip_unreachable() {
        let g = Digraph::from_tuples(3, &[(0, 1, 1, 2), (1, 2, 1, 2), (0, 2, 5, 1)]).unwrap();
        let t = build_root_trees(&g, &g.reverse(), 0, RootBounds::Stretch(Ratio::integer(2)), &params()).unwrap();
        assert_eq!(t.out_tree.edges, vec![0, 2]);
        assert!(t.in_tree.edges.is_empty());
    }

    #[test]
    fn classification() {
        let chain = Digraph::from_tuples(3, &[(0, 1, 1, 1), (1, 2, 1, 1)]).unwrap();
        let out = classify_pairs_diagnostic(&chain, 2);
        let p = out.iter().find(|c| c.from == 0 && c.to == 2).unwrap();
        assert_eq!(p.candidates, 3);
        assert_eq!(p.confirmed, 3);
        assert_eq!(p.class, PairClass::Thick);
        let back = out.iter().find(|c| c.from == 2 && c.to == 0).unwrap();
        assert_eq!(back.class, PairClass::Unsatisfiable);
        assert_eq!(back.candidates, 0);

        let g = two_cycle();
        let same = classify_pairs_diagnostic(&g, 2);
        let loop0 = same.iter().find(|c| c.from == 0 && c.to == 0).unwrap();
        assert_eq!(loop0.candidates, 2);
        let tight = classify_pairs_diagnostic(&g, 1);
        let p = tight.iter().find(|c| c.from == 0 && c.to == 1).unwrap();
        assert_eq!(p.candidates, 2);
        assert_eq!(p.class, PairClass::Thick);
    }
}
