//! Text edge-list format: a header line `n d`, then one `u v` pair per line
//! with `u < v`, sorted lexicographically, ASCII decimal.

use std::fmt::Write as _;

use super::Graph;
use crate::error::{Error, Result};

pub fn write_edge_list(g: &Graph) -> String {
    let mut out = String::with_capacity(16 + 12 * g.edge_count());
    let _ = writeln!(out, "{} {}", g.n(), g.degree_bound());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

/// Parses the edge-list format. The header degree acts as the global cap.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (line, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "missing header".into(),
    })?;
    let (n, d) = pair(line, header)?;
    let mut edges = Vec::new();
    for (line, l) in lines {
        edges.push(pair(line, l)?);
    }
    Graph::with_degree_cap(n, edges, d)
}

fn pair(line: usize, l: &str) -> Result<(usize, usize)> {
    let mut it = l.split_ascii_whitespace().map(str::parse::<usize>);
    match (it.next(), it.next(), it.next()) {
        (Some(Ok(a)), Some(Ok(b)), None) => Ok((a, b)),
        _ => Err(Error::Parse {
            line,
            msg: format!("expected two integers, got {l:?}"),
        }),
    }
}
