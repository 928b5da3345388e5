//! Bicriteria approximation algorithms for directed network design with
//! bounded distances, directed shallow-light Steiner trees and light-weight
//! directed α-spanners, together with exact brute-force oracles.

pub mod error;
pub mod format;
pub mod generate;
pub mod graph;
pub mod instance;
pub mod oracle;
pub mod pipeline;
pub mod report;
pub mod rng;
pub mod rsp;
pub mod slst;
pub mod solution;
pub mod suite;
pub mod thick;
pub mod thin_lp;

pub use error::*;
pub use graph::{Digraph, Distance, DistanceMatrix, Edge, EdgeId, NodeId};
pub use instance::{Instance, NdbdInstance, Ratio, SlstInstance, SpannerInstance};
pub use solution::{PathWitness, TreeSolution};
pub use format::{parse_instance, write_instance};
