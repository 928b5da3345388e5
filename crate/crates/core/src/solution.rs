//! Certified paths and trees.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::graph::{Digraph, Distance, EdgeId, NodeId};

/// A path given as an edge sequence, with its totals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PathWitness {
    pub edges: Vec<EdgeId>,
    pub cost: u64,
    pub length: u64,
}

impl PathWitness {
    /// The trivial `u`-`u` path.
    pub fn empty() -> Self {
        PathWitness {
            edges: Vec::new(),
            cost: 0,
            length: 0,
        }
    }

    pub fn from_edges(g: &Digraph, edges: Vec<EdgeId>) -> Self {
        let cost = g.cost_of(&edges);
        let length = edges.iter().map(|&e| g.edge(e).length).sum();
        PathWitness {
            edges,
            cost,
            length,
        }
    }

    /// Weight of the path under external per-edge weights.
    pub fn weight(&self, weights: &[f64]) -> f64 {
        self.edges.iter().map(|&e| weights[e]).sum()
    }

    /// Checks that the edges chain from `from` to `to` and the totals match.
    pub fn verify(&self, g: &Digraph, from: NodeId, to: NodeId) -> bool {
        let mut at = from;
        for &e in &self.edges {
            if e >= g.edge_count() || g.edge(e).tail != at {
                return false;
            }
            at = g.edge(e).head;
        }
        at == to && *self == PathWitness::from_edges(g, self.edges.clone())
    }
}

/// An out-arborescence rooted at `root`, with the achieved tree distance of
/// every terminal it serves.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeSolution {
    pub root: NodeId,
    /// Sorted edge ids.
    pub edges: Vec<EdgeId>,
    pub cost: u64,
    /// Served terminal → tree distance from the root.
    pub distances: BTreeMap<NodeId, u64>,
}

impl TreeSolution {
    /// Turns an arbitrary edge set into an arborescence serving `keep`.
    ///
    /// Takes the shortest-path tree (by length) from `root` inside `edges` and
    /// prunes every branch that reaches no node of `keep`. The result is a
    /// subset of `edges`, so cost never grows and every kept node's distance
    /// is at most its distance in the input edge set. Nodes of `keep` that
    /// the edge set does not reach are dropped.
    pub fn from_edge_set(g: &Digraph, root: NodeId, edges: &[EdgeId], keep: &[NodeId]) -> Self {
        let mut mask = vec![false; g.edge_count()];
        for &e in edges {
            mask[e] = true;
        }
        let (dist, parent) = g.shortest_path_tree(root, Some(&mask));
        let mut used = vec![false; g.edge_count()];
        let mut distances = BTreeMap::new();
        for &t in keep {
            let Distance::Finite(d) = dist[t] else { continue };
            distances.insert(t, d);
            let mut at = t;
            while let Some(e) = parent[at] {
                if used[e] {
                    break;
                }
                used[e] = true;
                at = g.edge(e).tail;
            }
        }
        let edges: Vec<EdgeId> = (0..g.edge_count()).filter(|&e| used[e]).collect();
        let cost = g.cost_of(&edges);
        TreeSolution {
            root,
            edges,
            cost,
            distances,
        }
    }

    /// Terminals the tree serves.
    pub fn covered(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.distances.keys().copied()
    }

    /// In-degree ≤ 1 everywhere, root in-degree 0, every edge reachable from
    /// the root, and stored distances equal to tree-path lengths.
    pub fn is_valid_arborescence(&self, g: &Digraph) -> bool {
        let n = g.node_count();
        let mut parent: Vec<Option<EdgeId>> = vec![None; n];
        for &e in &self.edges {
            let edge = g.edge(e);
            if edge.is_self_loop() || edge.head == self.root || parent[edge.head].is_some() {
                return false;
            }
            parent[edge.head] = Some(e);
        }
        // Walk each node up to the root; a cycle shows up as exceeding n steps.
        let mut depth_len: Vec<Option<u64>> = vec![None; n];
        depth_len[self.root] = Some(0);
        for &e in &self.edges {
            let mut chain = Vec::new();
            let mut at = g.edge(e).head;
            let mut steps = 0;
            while depth_len[at].is_none() {
                let Some(pe) = parent[at] else { return false };
                chain.push(pe);
                at = g.edge(pe).tail;
                steps += 1;
                if steps > n {
                    return false;
                }
            }
            let mut acc = depth_len[at].unwrap();
            for &pe in chain.iter().rev() {
                acc += g.edge(pe).length;
                depth_len[g.edge(pe).head] = Some(acc);
            }
        }
        self.cost == g.cost_of(&self.edges)
            && self
                .distances
                .iter()
                .all(|(&t, &d)| depth_len[t] == Some(d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_verification() {
        let g = Digraph::from_tuples(3, &[(0, 1, 1, 2), (1, 2, 1, 2), (0, 2, 5, 1)]).unwrap();
        let p = PathWitness::from_edges(&g, vec![0, 1]);
        assert_eq!((p.cost, p.length), (2, 4));
        assert!(p.verify(&g, 0, 2));
        assert!(!p.verify(&g, 1, 2));
        assert!(PathWitness::empty().verify(&g, 1, 1));
        let bad = PathWitness {
            cost: 3,
            ..p.clone()
        };
        assert!(!bad.verify(&g, 0, 2));
    }

    #[test]
    fn edge_set_to_arborescence() {
        // Two routes to node 2; the tree keeps the shorter one and drops the
        // dangling branch to node 3.
        let g = Digraph::from_tuples(
            4,
            &[(0, 1, 1, 1), (1, 2, 1, 1), (0, 2, 1, 5), (0, 3, 1, 1)],
        )
        .unwrap();
        let t = TreeSolution::from_edge_set(&g, 0, &[0, 1, 2, 3], &[2]);
        assert_eq!(t.edges, vec![0, 1]);
        assert_eq!(t.cost, 2);
        assert_eq!(t.distances.get(&2), Some(&2));
        assert!(t.is_valid_arborescence(&g));
    }

    #[test]
    fn rejects_non_trees() {
        let g = Digraph::from_tuples(3, &[(0, 1, 1, 1), (2, 1, 1, 1), (1, 2, 1, 1)]).unwrap();
        let two_parents = TreeSolution {
            root: 0,
            edges: vec![0, 1],
            cost: 2,
            distances: BTreeMap::new(),
        };
        assert!(!two_parents.is_valid_arborescence(&g));
        let detached_cycle = TreeSolution {
            root: 0,
            edges: vec![1, 2],
            cost: 2,
            distances: BTreeMap::new(),
        };
        assert!(!detached_cycle.is_valid_arborescence(&g));
    }
}
