//! Seeded random instances.
//!
//! Every generated graph starts with a random Hamiltonian cycle so it is
//! strongly connected; the remaining `m - n` edges join uniformly random
//! distinct endpoints. Costs are drawn from `1..=max_cost`, lengths from
//! `1..=max_length`.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::GenError;
use crate::graph::{Digraph, Edge};
use crate::instance::{NdbdInstance, Ratio, SlstInstance, SpannerInstance};
use crate::rng::{stream, GENERATOR_STREAM};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GraphParams {
    pub n: usize,
    pub m: usize,
    pub max_cost: u64,
    pub max_length: u64,
    pub seed: u64,
}

impl GraphParams {
    fn check(&self) -> Result<(), GenError> {
        let bad = |msg: String| Err(GenError::UnsatisfiableParams(msg));
        if self.n == 0 {
            return bad("n must be positive".into());
        }
        if self.m < self.n {
            return bad(format!("m = {} is below n = {}", self.m, self.n));
        }
        if self.max_cost == 0 || self.max_length == 0 {
            return bad("max_cost and max_length must be positive".into());
        }
        Ok(())
    }
}

/// Backbone cycle with lengths capped at `backbone_length`, then filler edges.
fn random_graph(p: &GraphParams, backbone_length: u64, rng: &mut ChaCha8Rng) -> Digraph {
    let mut order: Vec<usize> = (0..p.n).collect();
    order.shuffle(rng);
    let mut edges = Vec::with_capacity(p.m);
    if p.n >= 2 {
        for i in 0..p.n {
            let (t, h) = (order[i], order[(i + 1) % p.n]);
            edges.push(Edge::new(t, h, rng.gen_range(1..=p.max_cost), rng.gen_range(1..=backbone_length)));
        }
    }
    while edges.len() < p.m {
        let t = rng.gen_range(0..p.n);
        let h = if p.n >= 2 {
            (t + rng.gen_range(1..p.n)) % p.n
        } else {
            t
        };
        edges.push(Edge::new(t, h, rng.gen_range(1..=p.max_cost), rng.gen_range(1..=p.max_length)));
    }
    Digraph::new(p.n, edges).expect("generated endpoints are in range")
}

/// Feasible NDBD instance. Backbone lengths are at most `L / (n-1)`, so every
/// pair is within `L` along the cycle. Without an explicit `L` the bound is
/// the diameter of the generated graph.
pub fn gen_ndbd(p: &GraphParams, bound: Option<u64>) -> Result<NdbdInstance, GenError> {
    p.check()?;
    let mut rng = stream(p.seed, GENERATOR_STREAM);
    let hops = (p.n as u64).saturating_sub(1).max(1);
    let backbone_length = match bound {
        Some(l) if l < hops && p.n >= 2 => {
            return Err(GenError::UnsatisfiableParams(format!(
                "L = {l} is below n - 1 = {hops}, the shortest possible backbone"
            )))
        }
        Some(l) => (l / hops).clamp(1, p.max_length),
        None => p.max_length,
    };
    let g = random_graph(p, backbone_length, &mut rng);
    let bound = bound.unwrap_or_else(|| g.all_pairs().max_off_diagonal().finite().unwrap_or(0));
    Ok(NdbdInstance::new(g, bound))
}

pub fn gen_spanner(p: &GraphParams, stretch: Ratio) -> Result<SpannerInstance, GenError> {
    p.check()?;
    if !stretch.at_least_one() {
        return Err(GenError::UnsatisfiableParams("stretch must be at least 1".into()));
    }
    let mut rng = stream(p.seed, GENERATOR_STREAM);
    Ok(SpannerInstance::new(random_graph(p, p.max_length, &mut rng), stretch))
}

/// Root and `terminals` distinct non-root terminals drawn uniformly; each
/// bound is `floor(slack * ℓ̄(r, t))`, so the instance is always feasible.
pub fn gen_slst(p: &GraphParams, terminals: usize, slack: Ratio) -> Result<SlstInstance, GenError> {
    p.check()?;
    if terminals == 0 || terminals >= p.n {
        return Err(GenError::UnsatisfiableParams(format!(
            "need 1 <= terminals <= n - 1, got {terminals} with n = {}",
            p.n
        )));
    }
    if !slack.at_least_one() {
        return Err(GenError::UnsatisfiableParams("bound slack must be at least 1".into()));
    }
    let mut rng = stream(p.seed, GENERATOR_STREAM);
    let g = random_graph(p, p.max_length, &mut rng);
    let root = rng.gen_range(0..p.n);
    let mut others: Vec<usize> = (0..p.n).filter(|&v| v != root).collect();
    others.shuffle(&mut rng);
    let dist = g.shortest_lengths_from(root);
    let chosen: BTreeMap<usize, u64> = others[..terminals]
        .iter()
        .map(|&t| {
            let d = dist[t].finite().expect("backbone makes every node reachable");
            (t, slack.floor_mul(d))
        })
        .collect();
    Ok(SlstInstance::new(g, root, chosen))
}
