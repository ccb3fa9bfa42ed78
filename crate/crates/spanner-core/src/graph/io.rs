//! Plain-text edge-list format.
//!
//! The first non-comment line is `n m`; each of the following `m` data
//! lines is one edge `u v` with 0-based IDs. Lines whose first non-blank
//! character is `#` and blank lines are ignored. Output is canonical:
//! smaller ID first per pair, pairs in lexicographic order, Unix newlines.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use super::Graph;
use crate::{Error, Result};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn two_ints(line_no: usize, line: &str) -> Result<(u64, u64)> {
    let mut it = line.split_whitespace();
    let a = it
        .next()
        .ok_or_else(|| parse_err(line_no, "expected two integers, found none"))?;
    let b = it
        .next()
        .ok_or_else(|| parse_err(line_no, format!("expected two integers, found only {a:?}")))?;
    if let Some(extra) = it.next() {
        return Err(parse_err(
            line_no,
            format!("unexpected trailing token {extra:?}"),
        ));
    }
    let parse = |tok: &str| {
        tok.parse::<u64>()
            .map_err(|_| parse_err(line_no, format!("{tok:?} is not a non-negative integer")))
    };
    Ok((parse(a)?, parse(b)?))
}

/// Parses the edge-list format, reporting 1-based line numbers on error.
pub fn read_edge_list(text: &str) -> Result<Graph> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges: Vec<(u32, u32)> = Vec::new();
    let mut seen = BTreeSet::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (a, b) = two_ints(line_no, line)?;
        let Some((n, m)) = header else {
            header = Some((a as usize, b as usize));
            continue;
        };
        if edges.len() == m {
            return Err(parse_err(
                line_no,
                format!("more than the {m} edges declared in the header"),
            ));
        }
        if a == b {
            return Err(parse_err(line_no, format!("self-loop at vertex {a}")));
        }
        if a as usize >= n || b as usize >= n {
            return Err(parse_err(
                line_no,
                format!("vertex ID out of range: edge ({a}, {b}) with n = {n}"),
            ));
        }
        let (u, v) = (a.min(b) as u32, a.max(b) as u32);
        if !seen.insert((u, v)) {
            return Err(parse_err(line_no, format!("duplicate edge ({u}, {v})")));
        }
        edges.push((u, v));
    }

    let Some((n, m)) = header else {
        return Err(parse_err(last_line + 1, "missing `n m` header line"));
    };
    if edges.len() != m {
        return Err(parse_err(
            last_line + 1,
            format!("header declared {m} edges, found {}", edges.len()),
        ));
    }
    Graph::from_edges(n, edges)
}

/// Canonical text form; `read_edge_list(write_edge_list(g))` reproduces `g`.
pub fn write_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", g.n(), g.m());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}
