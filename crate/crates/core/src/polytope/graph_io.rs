//! Plain-text graph format.
//!
//! ```text
//! dag <nodes> <arcs>        pm <left> <right> <edges>
//! <tail> <head>             <left> <right>
//! ...                       ...
//! ```
//!
//! Indices are zero-based. Blank lines and lines starting with `#` are
//! skipped. DAG terminals are the unique node without in-arcs and the unique
//! node without out-arcs.

use std::fmt::Write as _;

use crate::error::{FwError, Result};

use super::{BipartiteGraph, BipartiteMatching, DagPaths, Polytope};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphSpec {
    Dag {
        num_nodes: usize,
        arcs: Vec<(usize, usize)>,
    },
    Pm {
        n_left: usize,
        n_right: usize,
        edges: Vec<(usize, usize)>,
    },
}

impl GraphSpec {
    pub fn into_polytope(self) -> Result<Polytope> {
        match self {
            Self::Dag { num_nodes, arcs } => Ok(Polytope::Dag(DagPaths::new(num_nodes, arcs)?)),
            Self::Pm { n_left, n_right, edges } => Ok(Polytope::Matching(BipartiteMatching::new(
                BipartiteGraph::new(n_left, n_right, edges)?,
            )?)),
        }
    }

    /// The graph underlying a DAG or matching polytope.
    pub fn from_polytope(p: &Polytope) -> Option<Self> {
        match p {
            Polytope::Simplex(_) => None,
            Polytope::Dag(d) => Some(Self::Dag {
                num_nodes: d.num_nodes(),
                arcs: d.arcs().to_vec(),
            }),
            Polytope::Matching(m) => Some(Self::Pm {
                n_left: m.graph().n_left(),
                n_right: m.graph().n_right(),
                edges: m.graph().edges().to_vec(),
            }),
        }
    }
}

fn parse_usize(tok: Option<&str>, line: usize, what: &str) -> Result<usize> {
    tok.ok_or_else(|| FwError::Parse {
        line,
        msg: format!("missing {what}"),
    })?
    .parse()
    .map_err(|e| FwError::Parse {
        line,
        msg: format!("bad {what}: {e}"),
    })
}

pub fn parse_graph(text: &str) -> Result<GraphSpec> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hl, header) = lines.next().ok_or(FwError::Parse {
        line: 0,
        msg: "empty graph file".into(),
    })?;
    let mut toks = header.split_whitespace();
    let kind = toks.next().unwrap_or_default();
    let (counts, n_pairs) = match kind {
        "dag" => {
            let nodes = parse_usize(toks.next(), hl, "node count")?;
            let arcs = parse_usize(toks.next(), hl, "arc count")?;
            ((nodes, 0), arcs)
        }
        "pm" => {
            let l = parse_usize(toks.next(), hl, "left count")?;
            let r = parse_usize(toks.next(), hl, "right count")?;
            let e = parse_usize(toks.next(), hl, "edge count")?;
            ((l, r), e)
        }
        other => {
            return Err(FwError::Parse {
                line: hl,
                msg: format!("unknown graph kind '{other}'"),
            })
        }
    };
    if toks.next().is_some() {
        return Err(FwError::Parse {
            line: hl,
            msg: "trailing tokens in header".into(),
        });
    }
    let mut pairs = Vec::with_capacity(n_pairs);
    for (ln, l) in lines {
        let mut t = l.split_whitespace();
        let a = parse_usize(t.next(), ln, "endpoint")?;
        let b = parse_usize(t.next(), ln, "endpoint")?;
        if t.next().is_some() {
            return Err(FwError::Parse {
                line: ln,
                msg: "expected two endpoints".into(),
            });
        }
        pairs.push((a, b));
    }
    if pairs.len() != n_pairs {
        return Err(FwError::Parse {
            line: hl,
            msg: format!("header announces {n_pairs} edges, found {}", pairs.len()),
        });
    }
    Ok(if kind == "dag" {
        GraphSpec::Dag {
            num_nodes: counts.0,
            arcs: pairs,
        }
    } else {
        GraphSpec::Pm {
            n_left: counts.0,
            n_right: counts.1,
            edges: pairs,
        }
    })
}

pub fn write_graph(spec: &GraphSpec) -> String {
    let mut out = String::new();
    let pairs = match spec {
        GraphSpec::Dag { num_nodes, arcs } => {
            writeln!(out, "dag {num_nodes} {}", arcs.len()).unwrap();
            arcs
        }
        GraphSpec::Pm { n_left, n_right, edges } => {
            writeln!(out, "pm {n_left} {n_right} {}", edges.len()).unwrap();
            edges
        }
    };
    for (a, b) in pairs {
        writeln!(out, "{a} {b}").unwrap();
    }
    out
}
