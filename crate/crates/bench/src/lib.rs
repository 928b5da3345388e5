//! Benchmark fixtures: fixed-seed instances for the criterion benches and
//! the bundled suite configs for `slnet bench`.

use slnet::generate::{gen_ndbd, gen_slst, gen_spanner, GraphParams};
use slnet::suite::SuiteConfig;
use slnet::{NdbdInstance, Ratio, SlstInstance, SpannerInstance};

pub const SLST_SMALL: &str = include_str!("../suites/slst_small.json");
pub const NDBD_SMALL: &str = include_str!("../suites/ndbd_small.json");
pub const SPANNER_SMALL: &str = include_str!("../suites/spanner_small.json");

pub fn suite(json: &str) -> SuiteConfig {
    serde_json::from_str(json).expect("bundled suite configs parse")
}

fn params(n: usize, m: usize, seed: u64) -> GraphParams {
    GraphParams {
        n,
        m,
        max_cost: 50,
        max_length: 10,
        seed,
    }
}

/// `n` nodes, `2n` edges, `n / 2` terminals with bounds `1.5 ℓ̄(r, t)`.
pub fn slst_instance(n: usize, seed: u64) -> SlstInstance {
    gen_slst(&params(n, 2 * n, seed), n / 2, Ratio::new(3, 2).unwrap()).expect("valid parameters")
}

/// `n` nodes, `2n` edges, bound equal to the diameter.
pub fn ndbd_instance(n: usize, seed: u64) -> NdbdInstance {
    gen_ndbd(&params(n, 2 * n, seed), None).expect("valid parameters")
}

pub fn spanner_instance(n: usize, seed: u64) -> SpannerInstance {
    gen_spanner(&params(n, 2 * n, seed), Ratio::new(3, 2).unwrap()).expect("valid parameters")
}
