//! Directed multigraph with per-edge cost and length, plus the shortest-path
//! primitives every solver builds on.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::GraphError;

pub type NodeId = usize;
pub type EdgeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub tail: NodeId,
    pub head: NodeId,
    pub cost: u64,
    pub length: u64,
}

impl Edge {
    pub fn new(tail: NodeId, head: NodeId, cost: u64, length: u64) -> Self {
        Edge {
            tail,
            head,
            cost,
            length,
        }
    }

    pub fn is_self_loop(&self) -> bool {
        self.tail == self.head
    }
}

/// A shortest-path length that may be infinite.
///
/// `Finite` orders before `Unreachable`, so `min`/`max` behave like the
/// extended naturals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Distance {
    Finite(u64),
    Unreachable,
}

impl Distance {
    pub fn finite(self) -> Option<u64> {
        match self {
            Distance::Finite(d) => Some(d),
            Distance::Unreachable => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Distance::Finite(_))
    }

    /// `true` iff the distance is finite and at most `bound`.
    pub fn within(self, bound: u64) -> bool {
        matches!(self, Distance::Finite(d) if d <= bound)
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(d) => write!(f, "{d}"),
            Distance::Unreachable => write!(f, "inf"),
        }
    }
}

/// Serialized as the length, or `null` when unreachable.
impl Serialize for Distance {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.finite().serialize(s)
    }
}

/// Immutable directed multigraph. Node ids are `0..n`; edge ids are the
/// positions in the edge list. Self-loops are stored but left out of the
/// adjacency index, so no traversal ever follows one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    edges: Vec<Edge>,
    out_adj: Vec<Vec<EdgeId>>,
    in_adj: Vec<Vec<EdgeId>>,
    total_cost: u64,
    total_length: u64,
}

impl Digraph {
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<Self, GraphError> {
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        let mut total_cost = 0u64;
        let mut total_length = 0u64;
        for (id, e) in edges.iter().enumerate() {
            if e.tail >= n || e.head >= n {
                return Err(GraphError::NodeOutOfRange {
                    edge: id,
                    node: e.tail.max(e.head),
                    n,
                });
            }
            total_cost = total_cost
                .checked_add(e.cost)
                .ok_or(GraphError::Overflow("total edge cost"))?;
            total_length = total_length
                .checked_add(e.length)
                .ok_or(GraphError::Overflow("total edge length"))?;
            if !e.is_self_loop() {
                out_adj[e.tail].push(id);
                in_adj[e.head].push(id);
            }
        }
        Ok(Digraph {
            n,
            edges,
            out_adj,
            in_adj,
            total_cost,
            total_length,
        })
    }

    /// Builds a graph from `(tail, head, cost, length)` tuples with 0-based ids.
    pub fn from_tuples(n: usize, tuples: &[(NodeId, NodeId, u64, u64)]) -> Result<Self, GraphError> {
        Digraph::new(
            n,
            tuples
                .iter()
                .map(|&(t, h, c, l)| Edge::new(t, h, c, l))
                .collect(),
        )
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn out_edges(&self, v: NodeId) -> &[EdgeId] {
        &self.out_adj[v]
    }

    pub fn in_edges(&self, v: NodeId) -> &[EdgeId] {
        &self.in_adj[v]
    }

    /// Sum of all edge costs.
    pub fn total_cost(&self) -> u64 {
        self.total_cost
    }

    /// Sum of all edge lengths, ℓ(E).
    pub fn total_length(&self) -> u64 {
        self.total_length
    }

    /// Cost of an edge set. Cannot overflow because the graph total fits.
    pub fn cost_of<'a>(&self, ids: impl IntoIterator<Item = &'a EdgeId>) -> u64 {
        ids.into_iter().map(|&e| self.edges[e].cost).sum()
    }

    /// Same edge ids, every edge flipped.
    pub fn reverse(&self) -> Digraph {
        Digraph {
            n: self.n,
            edges: self
                .edges
                .iter()
                .map(|e| Edge::new(e.head, e.tail, e.cost, e.length))
                .collect(),
            out_adj: self.in_adj.clone(),
            in_adj: self.out_adj.clone(),
            total_cost: self.total_cost,
            total_length: self.total_length,
        }
    }

    /// Single-source shortest lengths under ℓ.
    pub fn shortest_lengths_from(&self, source: NodeId) -> Vec<Distance> {
        self.dijkstra(source, None, Direction::Forward)
    }

    /// Shortest lengths from every node *to* `target`.
    pub fn shortest_lengths_to(&self, target: NodeId) -> Vec<Distance> {
        self.dijkstra(target, None, Direction::Backward)
    }

    /// Shortest lengths from `source` using only edges with `mask[e] == true`.
    pub fn shortest_lengths_within(&self, source: NodeId, mask: &[bool]) -> Vec<Distance> {
        self.dijkstra(source, Some(mask), Direction::Forward)
    }

    /// All-pairs shortest lengths, one Dijkstra per source.
    pub fn all_pairs(&self) -> DistanceMatrix {
        DistanceMatrix {
            rows: (0..self.n).map(|u| self.shortest_lengths_from(u)).collect(),
        }
    }

    /// All-pairs shortest lengths in the subgraph selected by `mask`.
    pub fn all_pairs_within(&self, mask: &[bool]) -> DistanceMatrix {
        use rayon::prelude::*;
        DistanceMatrix {
            rows: (0..self.n)
                .into_par_iter()
                .map(|u| self.shortest_lengths_within(u, mask))
                .collect(),
        }
    }

    /// Shortest-path tree by length from `source` inside `mask`; returns the
    /// parent edge of every node (`None` for the source and unreached nodes).
    /// Ties go to the cheaper edge, then the smaller edge id.
    pub fn shortest_path_tree(&self, source: NodeId, mask: Option<&[bool]>) -> (Vec<Distance>, Vec<Option<EdgeId>>) {
        let mut dist = vec![Distance::Unreachable; self.n];
        let mut parent: Vec<Option<EdgeId>> = vec![None; self.n];
        let mut heap = BinaryHeap::new();
        dist[source] = Distance::Finite(0);
        heap.push(Reverse((0u64, source)));
        let mut done = vec![false; self.n];
        while let Some(Reverse((d, u))) = heap.pop() {
            if done[u] {
                continue;
            }
            done[u] = true;
            for &e in &self.out_adj[u] {
                if mask.is_some_and(|m| !m[e]) {
                    continue;
                }
                let edge = &self.edges[e];
                let nd = d + edge.length;
                let v = edge.head;
                if done[v] {
                    continue;
                }
                let better = match dist[v] {
                    Distance::Unreachable => true,
                    Distance::Finite(old) => match nd.cmp(&old) {
                        Ordering::Less => true,
                        Ordering::Equal => {
                            let cur = parent[v].expect("finite non-source has a parent");
                            (edge.cost, e) < (self.edges[cur].cost, cur)
                        }
                        Ordering::Greater => false,
                    },
                };
                if better {
                    dist[v] = Distance::Finite(nd);
                    parent[v] = Some(e);
                    heap.push(Reverse((nd, v)));
                }
            }
        }
        (dist, parent)
    }

    fn dijkstra(&self, source: NodeId, mask: Option<&[bool]>, dir: Direction) -> Vec<Distance> {
        let mut dist = vec![u64::MAX; self.n];
        let mut heap = BinaryHeap::new();
        dist[source] = 0;
        heap.push(Reverse((0u64, source)));
        while let Some(Reverse((d, u))) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            let adj = match dir {
                Direction::Forward => &self.out_adj[u],
                Direction::Backward => &self.in_adj[u],
            };
            for &e in adj {
                if mask.is_some_and(|m| !m[e]) {
                    continue;
                }
                let edge = &self.edges[e];
                let v = match dir {
                    Direction::Forward => edge.head,
                    Direction::Backward => edge.tail,
                };
                let nd = d + edge.length;
                if nd < dist[v] {
                    dist[v] = nd;
                    heap.push(Reverse((nd, v)));
                }
            }
        }
        dist.into_iter()
            .map(|d| {
                if d == u64::MAX {
                    Distance::Unreachable
                } else {
                    Distance::Finite(d)
                }
            })
            .collect()
    }
}

#[derive(Clone, Copy)]
enum Direction {
    Forward,
    Backward,
}

/// Dense all-pairs distance table, `rows[u][v] = ℓ̄(u, v)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceMatrix {
    rows: Vec<Vec<Distance>>,
}

impl DistanceMatrix {
    pub fn get(&self, u: NodeId, v: NodeId) -> Distance {
        self.rows[u][v]
    }

    pub fn row(&self, u: NodeId) -> &[Distance] {
        &self.rows[u]
    }

    pub fn node_count(&self) -> usize {
        self.rows.len()
    }

    /// Largest finite-or-infinite entry over ordered pairs `u != v`.
    pub fn max_off_diagonal(&self) -> Distance {
        let mut worst = Distance::Finite(0);
        for (u, row) in self.rows.iter().enumerate() {
            for (v, &d) in row.iter().enumerate() {
                if u != v {
                    worst = worst.max(d);
                }
            }
        }
        worst
    }
}

/// Builds an edge mask of length `m` from a list of edge ids.
pub fn edge_mask(m: usize, ids: impl IntoIterator<Item = EdgeId>) -> Vec<bool> {
    let mut mask = vec![false; m];
    for e in ids {
        mask[e] = true;
    }
    mask
}

#[cfg(test)]
mod tests {
    use super::*;

    /// 1→2 (c1, ℓ2), 2→3 (c1, ℓ2), 1→3 (c5, ℓ1), written 0-based.
    fn g1() -> Digraph {
        Digraph::from_tuples(3, &[(0, 1, 1, 2), (1, 2, 1, 2), (0, 2, 5, 1)]).unwrap()
    }

    /// Length of the shortest simple path by enumeration.
    fn enumerate_shortest(g: &Digraph, u: NodeId, v: NodeId) -> Distance {
        fn walk(g: &Digraph, at: NodeId, v: NodeId, seen: &mut Vec<bool>, len: u64, best: &mut Distance) {
            if at == v {
                *best = (*best).min(Distance::Finite(len));
                return;
            }
            for &e in g.out_edges(at) {
                let h = g.edge(e).head;
                if !seen[h] {
                    seen[h] = true;
                    walk(g, h, v, seen, len + g.edge(e).length, best);
                    seen[h] = false;
                }
            }
        }
        let mut seen = vec![false; g.node_count()];
        seen[u] = true;
        let mut best = Distance::Unreachable;
        walk(g, u, v, &mut seen, 0, &mut best);
        best
    }

    #[test]
    fn unit_chain() {
        let g = Digraph::from_tuples(3, &[(0, 1, 1, 1), (1, 2, 1, 1)]).unwrap();
        assert_eq!(
            g.shortest_lengths_from(0),
            vec![Distance::Finite(0), Distance::Finite(1), Distance::Finite(2)]
        );
    }

    #[test]
    fn isolated_node_unreachable() {
        let g = Digraph::new(2, vec![]).unwrap();
        assert_eq!(
            g.shortest_lengths_from(0),
            vec![Distance::Finite(0), Distance::Unreachable]
        );
    }

    #[test]
    fn g1_lengths_match_enumeration() {
        let g = g1();
        let got = g.shortest_lengths_from(0);
        let want: Vec<_> = (0..3).map(|v| enumerate_shortest(&g, 0, v)).collect();
        assert_eq!(got, want);
        assert_eq!(got, vec![Distance::Finite(0), Distance::Finite(2), Distance::Finite(1)]);
    }

    #[test]
    fn reverse_single_edge() {
        let g = Digraph::from_tuples(2, &[(0, 1, 7, 3)]).unwrap();
        assert_eq!(g.reverse().edges(), &[Edge::new(1, 0, 7, 3)]);
    }

    #[test]
    fn reverse_is_involution_and_mirrors_lengths() {
        let g = g1();
        assert_eq!(g.reverse().reverse(), g);
        assert_eq!(
            g.shortest_lengths_from(0)[2],
            g.reverse().shortest_lengths_from(2)[0]
        );
        assert_eq!(g.shortest_lengths_to(2), g.reverse().shortest_lengths_from(2));
    }

    #[test]
    fn self_loops_are_ignored() {
        let g = Digraph::from_tuples(2, &[(0, 0, 0, 0), (0, 1, 1, 4)]).unwrap();
        assert!(g.out_edges(0) == [1]);
        assert_eq!(g.shortest_lengths_from(0)[1], Distance::Finite(4));
    }

    #[test]
    fn rejects_out_of_range_and_overflow() {
        assert!(matches!(
            Digraph::from_tuples(2, &[(0, 2, 1, 1)]),
            Err(GraphError::NodeOutOfRange { .. })
        ));
        assert!(matches!(
            Digraph::from_tuples(2, &[(0, 1, 1, u64::MAX), (1, 0, 1, 1)]),
            Err(GraphError::Overflow(_))
        ));
    }

    #[test]
    fn masked_distances() {
        let g = g1();
        let mask = edge_mask(3, [0, 1]);
        assert_eq!(g.shortest_lengths_within(0, &mask)[2], Distance::Finite(4));
        let (dist, parent) = g.shortest_path_tree(0, None);
        assert_eq!(dist[2], Distance::Finite(1));
        assert_eq!(parent[2], Some(2));
        assert_eq!(parent[0], None);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn bellman_ford(g: &Digraph, s: NodeId) -> Vec<Distance> {
            let mut d = vec![Distance::Unreachable; g.node_count()];
            d[s] = Distance::Finite(0);
            for _ in 0..g.node_count() {
                for e in g.edges() {
                    if let Distance::Finite(du) = d[e.tail] {
                        d[e.head] = d[e.head].min(Distance::Finite(du + e.length));
                    }
                }
            }
            d
        }

        fn arb_graph() -> impl Strategy<Value = Digraph> {
            (1usize..9).prop_flat_map(|n| {
                prop::collection::vec((0..n, 0..n, 0u64..20, 0u64..10), 0..25)
                    .prop_map(move |es| Digraph::from_tuples(n, &es).unwrap())
            })
        }

        proptest! {
            #[test]
            fn dijkstra_agrees_with_bellman_ford(g in arb_graph()) {
                for s in 0..g.node_count() {
                    prop_assert_eq!(g.shortest_lengths_from(s), bellman_ford(&g, s));
                }
            }

            #[test]
            fn reverse_twice_is_identity(g in arb_graph()) {
                prop_assert_eq!(g.reverse().reverse(), g);
            }
        }
    }
}
