//! The three problem inputs.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::graph::{Digraph, NodeId};

/// Non-negative rational `num/den`, used for the stretch factor α.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Option<Self> {
        (den > 0).then_some(Ratio { num, den })
    }

    pub fn integer(v: u64) -> Self {
        Ratio { num: v, den: 1 }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// ⌊self · x⌋, computed exactly.
    pub fn floor_mul(self, x: u64) -> u64 {
        let v = (self.num as u128 * x as u128) / self.den as u128;
        u64::try_from(v).unwrap_or(u64::MAX)
    }

    pub fn at_least_one(self) -> bool {
        self.num >= self.den
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Ratio {
    type Err = String;

    /// Accepts `num/den` or a plain natural.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (num, den) = match s.split_once('/') {
            Some((a, b)) => (a, b),
            None => (s, "1"),
        };
        let num: u64 = num.trim().parse().map_err(|_| format!("bad ratio numerator in {s:?}"))?;
        let den: u64 = den.trim().parse().map_err(|_| format!("bad ratio denominator in {s:?}"))?;
        Ratio::new(num, den).ok_or_else(|| format!("zero denominator in {s:?}"))
    }
}

/// Network design with a global distance bound `L`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NdbdInstance {
    pub graph: Digraph,
    pub bound: u64,
}

impl NdbdInstance {
    pub fn new(graph: Digraph, bound: u64) -> Self {
        NdbdInstance { graph, bound }
    }

    /// `true` iff every ordered pair is within `bound` in the full graph.
    pub fn check_feasible(&self) -> bool {
        (0..self.graph.node_count()).all(|u| {
            self.graph
                .shortest_lengths_from(u)
                .iter()
                .all(|d| d.within(self.bound))
        })
    }
}

/// Shallow-light Steiner tree input: root, terminals and per-terminal bounds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlstInstance {
    pub graph: Digraph,
    pub root: NodeId,
    /// Terminal → distance bound.
    pub terminals: BTreeMap<NodeId, u64>,
}

impl SlstInstance {
    pub fn new(graph: Digraph, root: NodeId, terminals: BTreeMap<NodeId, u64>) -> Self {
        SlstInstance {
            graph,
            root,
            terminals,
        }
    }

    pub fn terminal_ids(&self) -> Vec<NodeId> {
        self.terminals.keys().copied().collect()
    }

    /// Terminals whose exact shortest length from the root meets their bound.
    pub fn reachable_terminals(&self) -> Vec<NodeId> {
        let dist = self.graph.shortest_lengths_from(self.root);
        self.terminals
            .iter()
            .filter(|&(&t, &b)| dist[t].within(b))
            .map(|(&t, _)| t)
            .collect()
    }
}

/// Light-weight α-spanner input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpannerInstance {
    pub graph: Digraph,
    pub stretch: Ratio,
}

impl SpannerInstance {
    pub fn new(graph: Digraph, stretch: Ratio) -> Self {
        SpannerInstance { graph, stretch }
    }
}

/// Any parsed instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Instance {
    Ndbd(NdbdInstance),
    Slst(SlstInstance),
    Spanner(SpannerInstance),
}

impl Instance {
    pub fn graph(&self) -> &Digraph {
        match self {
            Instance::Ndbd(i) => &i.graph,
            Instance::Slst(i) => &i.graph,
            Instance::Spanner(i) => &i.graph,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Instance::Ndbd(_) => "ndbd",
            Instance::Slst(_) => "slst",
            Instance::Spanner(_) => "spanner",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_cycle() -> Digraph {
        Digraph::from_tuples(2, &[(0, 1, 3, 1), (1, 0, 4, 1)]).unwrap()
    }

    #[test]
    fn feasibility() {
        assert!(NdbdInstance::new(two_cycle(), 1).check_feasible());
        assert!(!NdbdInstance::new(two_cycle(), 0).check_feasible());
        let chain = Digraph::from_tuples(3, &[(0, 1, 1, 1), (1, 2, 1, 1)]).unwrap();
        assert!(!NdbdInstance::new(chain, 1_000).check_feasible());
    }

    #[test]
    fn ratio_parsing() {
        assert_eq!("3/2".parse::<Ratio>().unwrap(), Ratio { num: 3, den: 2 });
        assert_eq!("2".parse::<Ratio>().unwrap(), Ratio::integer(2));
        assert!("1/0".parse::<Ratio>().is_err());
        assert_eq!(Ratio { num: 3, den: 2 }.floor_mul(5), 7);
    }
}
