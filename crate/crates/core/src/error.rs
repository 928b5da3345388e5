use thiserror::Error;

use crate::graph::{EdgeId, NodeId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge {edge} references node {node} but the graph has {n} nodes")]
    NodeOutOfRange { edge: EdgeId, node: NodeId, n: usize },
    #[error("{0} overflows 64 bits")]
    Overflow(&'static str),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(line: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            message: message.into(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RspError {
    #[error("no path of length at most the bound")]
    Infeasible,
    #[error("DP table of {cells} cells exceeds the cap of {cap}")]
    BudgetTooLarge { cells: u128, cap: u128 },
    #[error("eps must be positive")]
    BadEps,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SlstError {
    #[error("fewer than {k} terminals respect their distance bounds")]
    Infeasible { k: usize },
    #[error("invalid parameters: {0}")]
    BadParams(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("demand ({0}, {1}) has no path within its length bound")]
    UnsatisfiableDemand(NodeId, NodeId),
    #[error("column generation did not converge within {0} pricing rounds")]
    IterationLimit(usize),
    #[error("LP backend failed: {0}")]
    Backend(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance has {m} edges; the enumeration cap is {cap}")]
    CapExceeded { m: usize, cap: usize },
    #[error("no feasible solution exists")]
    Infeasible,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("instance is infeasible: some ordered pair has no path within the bound")]
    InfeasibleInstance,
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Slst(#[from] SlstError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("unsatisfiable generator parameters: {0}")]
    UnsatisfiableParams(String),
}
