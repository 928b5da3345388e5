//! Exact brute-force optima for desk-scale instances.
//!
//! All three oracles share one search: edge subsets are generated lazily in
//! nondecreasing total cost and the first subset passing the feasibility
//! test is optimal. Feasibility is monotone under adding edges, so the full
//! edge set is checked first and an infeasible instance fails fast.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::OracleError;
use crate::graph::{Digraph, EdgeId};
use crate::instance::{NdbdInstance, SlstInstance, SpannerInstance};
use crate::solution::TreeSolution;

pub const DSLST_EDGE_CAP: usize = 20;
pub const NDBD_EDGE_CAP: usize = 16;
pub const SPANNER_EDGE_CAP: usize = 16;

/// Cheapest k-terminal shallow-light tree under the exact bounds.
pub fn exact_dslst(inst: &SlstInstance, k: usize) -> Result<TreeSolution, OracleError> {
    let g = &inst.graph;
    check_cap(g, DSLST_EDGE_CAP)?;
    let served = |mask: &[bool]| {
        let dist = g.shortest_lengths_within(inst.root, mask);
        inst.terminals
            .iter()
            .filter(|&(&t, &d)| dist[t].within(d))
            .map(|(&t, _)| t)
            .collect::<Vec<_>>()
    };
    let edges = cheapest_subset(g, |mask| served(mask).len() >= k)?;
    let mask = crate::graph::edge_mask(g.edge_count(), edges.iter().copied());
    Ok(TreeSolution::from_edge_set(g, inst.root, &edges, &served(&mask)))
}

/// Cheapest subgraph in which every ordered pair is within the bound.
pub fn exact_ndbd(inst: &NdbdInstance) -> Result<Vec<EdgeId>, OracleError> {
    let g = &inst.graph;
    check_cap(g, NDBD_EDGE_CAP)?;
    let n = g.node_count();
    cheapest_subset(g, |mask| {
        // Every node needs an incoming and an outgoing edge once n >= 2.
        if n >= 2
            && (0..n).any(|v| {
                !g.out_edges(v).iter().any(|&e| mask[e]) || !g.in_edges(v).iter().any(|&e| mask[e])
            })
        {
            return false;
        }
        (0..n).all(|u| {
            g.shortest_lengths_within(u, mask)
                .iter()
                .all(|d| d.within(inst.bound))
        })
    })
}

/// Cheapest subgraph with `ℓ̄_H(u, v) <= α ℓ̄_G(u, v)` for every pair
/// connected in `G`.
pub fn exact_spanner(inst: &SpannerInstance) -> Result<Vec<EdgeId>, OracleError> {
    let g = &inst.graph;
    check_cap(g, SPANNER_EDGE_CAP)?;
    let base = g.all_pairs();
    let n = g.node_count();
    cheapest_subset(g, |mask| {
        (0..n).all(|u| {
            let row = g.shortest_lengths_within(u, mask);
            base.row(u).iter().zip(&row).all(|(dg, dh)| match dg.finite() {
                Some(d) => dh.within(inst.stretch.floor_mul(d)),
                None => true,
            })
        })
    })
}

fn check_cap(g: &Digraph, cap: usize) -> Result<(), OracleError> {
    if g.edge_count() > cap {
        Err(OracleError::CapExceeded {
            m: g.edge_count(),
            cap,
        })
    } else {
        Ok(())
    }
}

/// Lazily enumerates subsets of the non-loop edges in nondecreasing cost and
/// returns the first one accepted by `feasible`, as sorted edge ids.
///
/// With edges sorted by cost, the subset with largest index `i` spawns two
/// successors: add edge `i+1`, or swap edge `i` for edge `i+1`. Every
/// nonempty subset is produced exactly once and never before a cheaper one.
pub fn cheapest_subset(g: &Digraph, mut feasible: impl FnMut(&[bool]) -> bool) -> Result<Vec<EdgeId>, OracleError> {
    let mut order: Vec<EdgeId> = (0..g.edge_count())
        .filter(|&e| !g.edge(e).is_self_loop())
        .collect();
    order.sort_by_key(|&e| (g.edge(e).cost, e));
    assert!(order.len() < 64, "subset search is limited to 63 edges");

    let mut mask = vec![false; g.edge_count()];
    let to_ids = |bits: u64| -> Vec<EdgeId> {
        let mut ids: Vec<EdgeId> = (0..order.len())
            .filter(|&i| bits >> i & 1 == 1)
            .map(|i| order[i])
            .collect();
        ids.sort_unstable();
        ids
    };
    let mut test = |bits: u64, mask: &mut Vec<bool>| {
        mask.iter_mut().for_each(|m| *m = false);
        for (i, &e) in order.iter().enumerate() {
            if bits >> i & 1 == 1 {
                mask[e] = true;
            }
        }
        feasible(mask)
    };

    let full = if order.is_empty() { 0 } else { u64::MAX >> (64 - order.len()) };
    if !test(full, &mut mask) {
        return Err(OracleError::Infeasible);
    }
    if test(0, &mut mask) {
        return Ok(Vec::new());
    }
    let cost = |i: usize| g.edge(order[i]).cost;
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((cost(0), 1u64, 0usize)));
    while let Some(Reverse((sum, bits, last))) = heap.pop() {
        if test(bits, &mut mask) {
            return Ok(to_ids(bits));
        }
        if last + 1 < order.len() {
            let next = last + 1;
            heap.push(Reverse((sum + cost(next), bits | 1 << next, next)));
            heap.push(Reverse((sum - cost(last) + cost(next), (bits & !(1 << last)) | 1 << next, next)));
        }
    }
    unreachable!("the full edge set is feasible and is eventually generated")
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::instance::Ratio;

    /// Plain 2^m enumeration, used to cross-check the lazy search.
    fn brute_min(g: &Digraph, feasible: impl Fn(&[bool]) -> bool) -> Option<u64> {
        let m = g.edge_count();
        (0u64..1 << m)
            .filter_map(|bits| {
                let mask: Vec<bool> = (0..m).map(|i| bits >> i & 1 == 1).collect();
                feasible(&mask).then(|| (0..m).filter(|&i| mask[i]).map(|i| g.edge(i).cost).sum())
            })
            .min()
    }

    fn two_cycle() -> Digraph {
        Digraph::from_tuples(2, &[(0, 1, 3, 1), (1, 0, 4, 1)]).unwrap()
    }

    fn triangle() -> Digraph {
        let mut es = Vec::new();
        for u in 0..3 {
            for v in 0..3 {
                if u != v {
                    es.push((u, v, 1, 1));
                }
            }
        }
        Digraph::from_tuples(3, &es).unwrap()
    }

    #[test]
    fn dslst_diamond_and_stem() {
        let g = Digraph::from_tuples(4, &[(0, 1, 1, 5), (1, 3, 1, 5), (0, 2, 10, 1), (2, 3, 10, 1)]).unwrap();
        let inst = SlstInstance::new(g, 0, BTreeMap::from([(3, 4)]));
        assert_eq!(exact_dslst(&inst, 1).unwrap().cost, 20);

        let g = Digraph::from_tuples(
            4,
            &[(0, 1, 9, 1), (1, 2, 1, 1), (1, 3, 1, 1), (0, 2, 6, 1), (0, 3, 6, 1)],
        )
        .unwrap();
        let inst = SlstInstance::new(g, 0, BTreeMap::from([(2, 2), (3, 2)]));
        let t = exact_dslst(&inst, 2).unwrap();
        assert_eq!(t.cost, 11);
        assert!(t.is_valid_arborescence(&inst.graph));
        assert_eq!(exact_dslst(&inst, 1).unwrap().cost, 6);
    }

    #[test]
    fn dslst_root_terminal_is_free() {
        let inst = SlstInstance::new(two_cycle(), 0, BTreeMap::from([(0, 0)]));
        let t = exact_dslst(&inst, 1).unwrap();
        assert_eq!(t.cost, 0);
        assert!(t.edges.is_empty());
    }

    #[test]
    fn ndbd_small_cases() {
        let c2 = NdbdInstance::new(two_cycle(), 1);
        let sol = exact_ndbd(&c2).unwrap();
        assert_eq!(c2.graph.cost_of(&sol), 7);
        assert_eq!(exact_ndbd(&NdbdInstance::new(two_cycle(), 0)), Err(OracleError::Infeasible));

        let tri = NdbdInstance::new(triangle(), 1);
        assert_eq!(exact_ndbd(&tri).unwrap().len(), 6);

        // 4-edge example: a 2-cycle plus an expensive parallel edge.
        let g = Digraph::from_tuples(2, &[(0, 1, 1, 1), (1, 0, 1, 1), (0, 1, 9, 1), (1, 0, 2, 5)]).unwrap();
        let inst = NdbdInstance::new(g, 5);
        let sol = exact_ndbd(&inst).unwrap();
        let want = brute_min(&inst.graph, |m| {
            (0..2).all(|u| inst.graph.shortest_lengths_within(u, m).iter().all(|d| d.within(5)))
        });
        assert_eq!(Some(inst.graph.cost_of(&sol)), want);
        assert!(inst.graph.cost_of(&sol) < inst.graph.total_cost());
    }

    #[test]
    fn spanner_small_cases() {
        let cycle = Digraph::from_tuples(3, &[(0, 1, 2, 1), (1, 2, 3, 1), (2, 0, 4, 1)]).unwrap();
        let sol = exact_spanner(&SpannerInstance::new(cycle, Ratio::integer(1))).unwrap();
        assert_eq!(sol, vec![0, 1, 2]);

        let g1 = Digraph::from_tuples(3, &[(0, 1, 1, 2), (1, 2, 1, 2), (0, 2, 5, 1)]).unwrap();
        let sol = exact_spanner(&SpannerInstance::new(g1.clone(), Ratio::integer(3))).unwrap();
        assert_eq!(sol, vec![0, 1, 2]);

        // α large: only reachability matters, so the cheap 2-path replaces 1→3.
        let sol = exact_spanner(&SpannerInstance::new(g1.clone(), Ratio::integer(10))).unwrap();
        assert_eq!(sol, vec![0, 1]);
        let want = brute_min(&g1, |m| {
            (0..3).all(|u| {
                let base = g1.shortest_lengths_from(u);
                let row = g1.shortest_lengths_within(u, m);
                base.iter().zip(&row).all(|(a, b)| a.is_finite() == b.is_finite())
            })
        });
        assert_eq!(Some(g1.cost_of(&sol)), want);
    }

    #[test]
    fn caps_are_errors() {
        let es: Vec<_> = (0..17).map(|i| (i % 2, (i + 1) % 2, 1, 1)).collect();
        let g = Digraph::from_tuples(2, &es).unwrap();
        assert!(matches!(
            exact_ndbd(&NdbdInstance::new(g, 1)),
            Err(OracleError::CapExceeded { m: 17, cap: 16 })
        ));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]
            #[test]
            fn lazy_search_matches_full_enumeration(
                es in prop::collection::vec((0usize..4, 0usize..4, 1u64..10, 1u64..4), 1..10),
                bound in 2u64..8,
            ) {
                let g = Digraph::from_tuples(4, &es).unwrap();
                let feasible = |m: &[bool]| g.shortest_lengths_within(0, m).iter().filter(|d| d.within(bound)).count() >= 3;
                let lazy = cheapest_subset(&g, feasible).ok().map(|ids| g.cost_of(&ids));
                prop_assert_eq!(lazy, brute_min(&g, feasible));
            }
        }
    }
}
