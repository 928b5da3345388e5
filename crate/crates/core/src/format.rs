//! Plain-text instance format.
//!
//! ```text
//! c optional comment lines, anywhere
//! p ndbd <n> <m> <L>
//! p spanner <n> <m> <num/den>
//! p slst <n> <m> <root> <|R|>
//! t <terminal> <bound>            (slst only, |R| lines)
//! a <tail> <head> <cost> <length> (m lines)
//! ```
//!
//! Node ids are 1-based in the file and 0-based in memory. Edge ids follow
//! the order of the `a` lines.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::ParseError;
use crate::graph::{Digraph, Edge};
use crate::instance::{Instance, NdbdInstance, Ratio, SlstInstance, SpannerInstance};

enum Header {
    Ndbd { bound: u64 },
    Spanner { stretch: Ratio },
    Slst { root: usize, terminals: usize },
}

pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('c'));

    let (hline, header) = match lines.next() {
        Some((no, l)) if l.starts_with('p') => (no, l),
        Some((no, _)) => return Err(ParseError::new(no, "expected problem line `p <kind> <n> <m> ...`")),
        None => return Err(ParseError::new(1, "missing problem line")),
    };
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields[0] != "p" || fields.len() < 4 {
        return Err(ParseError::new(hline, "malformed problem line"));
    }
    let n: usize = num(fields[2], hline, "node count")?;
    let m: usize = num(fields[3], hline, "edge count")?;
    let want_params = |k: usize| {
        if fields.len() == 4 + k {
            Ok(())
        } else {
            Err(ParseError::new(hline, format!("`p {}` takes {k} parameter(s)", fields[1])))
        }
    };
    let kind = match fields[1] {
        "ndbd" => {
            want_params(1)?;
            Header::Ndbd {
                bound: num(fields[4], hline, "bound L")?,
            }
        }
        "spanner" => {
            want_params(1)?;
            let stretch: Ratio = fields[4].parse().map_err(|e: String| ParseError::new(hline, e))?;
            if !stretch.at_least_one() {
                return Err(ParseError::new(hline, "stretch must be at least 1"));
            }
            Header::Spanner { stretch }
        }
        "slst" => {
            want_params(2)?;
            let root: usize = num(fields[4], hline, "root")?;
            Header::Slst {
                root: node(root, n, hline)?,
                terminals: num(fields[5], hline, "terminal count")?,
            }
        }
        other => return Err(ParseError::new(hline, format!("unknown problem kind {other:?}"))),
    };

    let mut edges = Vec::with_capacity(m);
    let mut terminals = BTreeMap::new();
    let mut last_line = hline;
    for (no, line) in lines {
        last_line = no;
        let f: Vec<&str> = line.split_whitespace().collect();
        match f[0] {
            "a" => {
                if f.len() != 5 {
                    return Err(ParseError::new(no, "edge line needs `a <tail> <head> <cost> <length>`"));
                }
                if edges.len() == m {
                    return Err(ParseError::new(no, format!("more than the declared {m} edges")));
                }
                edges.push(Edge::new(
                    node(num(f[1], no, "tail")?, n, no)?,
                    node(num(f[2], no, "head")?, n, no)?,
                    num(f[3], no, "cost")?,
                    num(f[4], no, "length")?,
                ));
            }
            "t" => {
                let Header::Slst { terminals: want, .. } = kind else {
                    return Err(ParseError::new(no, "terminal lines are only valid for slst"));
                };
                if f.len() != 3 {
                    return Err(ParseError::new(no, "terminal line needs `t <terminal> <bound>`"));
                }
                if terminals.len() == want {
                    return Err(ParseError::new(no, format!("more than the declared {want} terminals")));
                }
                let t = node(num(f[1], no, "terminal")?, n, no)?;
                if terminals.insert(t, num(f[2], no, "bound")?).is_some() {
                    return Err(ParseError::new(no, format!("terminal {} listed twice", t + 1)));
                }
            }
            "p" => return Err(ParseError::new(no, "second problem line")),
            other => return Err(ParseError::new(no, format!("unknown line type {other:?}"))),
        }
    }
    if edges.len() != m {
        return Err(ParseError::new(
            last_line + 1,
            format!("expected {m} edges, found {}", edges.len()),
        ));
    }
    let graph = Digraph::new(n, edges).map_err(|e| ParseError::new(last_line, e.to_string()))?;
    Ok(match kind {
        Header::Ndbd { bound } => Instance::Ndbd(NdbdInstance::new(graph, bound)),
        Header::Spanner { stretch } => Instance::Spanner(SpannerInstance::new(graph, stretch)),
        Header::Slst { root, terminals: want } => {
            if terminals.len() != want || want == 0 {
                return Err(ParseError::new(
                    last_line + 1,
                    format!("expected {want} terminals (at least one), found {}", terminals.len()),
                ));
            }
            Instance::Slst(SlstInstance::new(graph, root, terminals))
        }
    })
}

fn num<T: std::str::FromStr>(s: &str, line: usize, what: &str) -> Result<T, ParseError> {
    s.parse()
        .map_err(|_| ParseError::new(line, format!("bad {what}: {s:?}")))
}

fn node(one_based: usize, n: usize, line: usize) -> Result<usize, ParseError> {
    if one_based == 0 || one_based > n {
        Err(ParseError::new(line, format!("node {one_based} outside 1..={n}")))
    } else {
        Ok(one_based - 1)
    }
}

/// Canonical text form: header, terminals sorted by id, edges in id order.
pub fn write_instance(inst: &Instance) -> String {
    let g = inst.graph();
    let mut out = String::new();
    match inst {
        Instance::Ndbd(i) => writeln!(out, "p ndbd {} {} {}", g.node_count(), g.edge_count(), i.bound),
        Instance::Spanner(i) => writeln!(out, "p spanner {} {} {}", g.node_count(), g.edge_count(), i.stretch),
        Instance::Slst(i) => writeln!(
            out,
            "p slst {} {} {} {}",
            g.node_count(),
            g.edge_count(),
            i.root + 1,
            i.terminals.len()
        ),
    }
    .unwrap();
    if let Instance::Slst(i) = inst {
        for (&t, &d) in &i.terminals {
            writeln!(out, "t {} {}", t + 1, d).unwrap();
        }
    }
    for e in g.edges() {
        writeln!(out, "a {} {} {} {}", e.tail + 1, e.head + 1, e.cost, e.length).unwrap();
    }
    out
}
