//! DIMACS CNF and bipartite edge lists.

use std::fmt::Write;

use thiserror::Error;

use crate::gadgets::{BipartiteGraph, CnfFormula, GadgetError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Invalid(#[from] GadgetError),
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax { line, message: message.into() }
}

/// Reads `p cnf V C` followed by zero-terminated clauses. `c` lines are
/// comments and a line starting with `%` ends the input.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula, FormatError> {
    let mut header: Option<(u32, usize)> = None;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(syntax(line_no, "second problem line"));
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 4 || fields[0] != "p" || fields[1] != "cnf" {
                return Err(syntax(line_no, "expected `p cnf <variables> <clauses>`"));
            }
            let vars = fields[2].parse().map_err(|_| syntax(line_no, "bad variable count"))?;
            let count = fields[3].parse().map_err(|_| syntax(line_no, "bad clause count"))?;
            header = Some((vars, count));
            continue;
        }
        if header.is_none() {
            return Err(syntax(line_no, "clause before the problem line"));
        }
        for token in line.split_whitespace() {
            let literal: i32 = token.parse().map_err(|_| syntax(line_no, format!("bad literal `{token}`")))?;
            if literal == 0 {
                clauses.push(std::mem::take(&mut current));
            } else {
                current.push(literal);
            }
        }
    }
    let (vars, count) = header.ok_or_else(|| syntax(last_line, "missing problem line"))?;
    if !current.is_empty() {
        clauses.push(current);
    }
    if clauses.len() != count {
        return Err(syntax(last_line, format!("header declares {count} clauses, found {}", clauses.len())));
    }
    Ok(CnfFormula::new(vars, clauses)?)
}

pub fn write_dimacs(phi: &CnfFormula) -> String {
    let mut out = format!("p cnf {} {}\n", phi.vars(), phi.clauses().len());
    for clause in phi.clauses() {
        for literal in clause {
            let _ = write!(out, "{literal} ");
        }
        out.push_str("0\n");
    }
    out
}

/// One `u v` pair per line, both 1-based. `#` starts a comment. An optional
/// first line `p bipartite L R` fixes the side sizes; otherwise each side
/// has as many vertices as its largest index.
pub fn parse_edge_list(text: &str) -> Result<BipartiteGraph, FormatError> {
    let mut sizes: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields[0] == "p" {
            if sizes.is_some() || !edges.is_empty() {
                return Err(syntax(line_no, "the size line must come first"));
            }
            if fields.len() != 4 || fields[1] != "bipartite" {
                return Err(syntax(line_no, "expected `p bipartite <left> <right>`"));
            }
            let left = fields[2].parse().map_err(|_| syntax(line_no, "bad left size"))?;
            let right = fields[3].parse().map_err(|_| syntax(line_no, "bad right size"))?;
            sizes = Some((left, right));
            continue;
        }
        if fields.len() != 2 {
            return Err(syntax(line_no, "expected `u v`"));
        }
        let vertex = |s: &str| match s.parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n - 1),
            _ => Err(syntax(line_no, format!("bad vertex `{s}`"))),
        };
        let (u, v) = (vertex(fields[0])?, vertex(fields[1])?);
        if let Some((left, right)) = sizes {
            if u >= left || v >= right {
                return Err(syntax(line_no, format!("edge {} {} exceeds {left}x{right}", u + 1, v + 1)));
            }
        }
        edges.push((u, v));
    }
    let (left, right) = sizes.unwrap_or_else(|| {
        let left = edges.iter().map(|e| e.0 + 1).max().unwrap_or(0);
        let right = edges.iter().map(|e| e.1 + 1).max().unwrap_or(0);
        (left, right)
    });
    Ok(BipartiteGraph::new(left, right, edges)?)
}

pub fn write_edge_list(g: &BipartiteGraph) -> String {
    let mut out = format!("p bipartite {} {}\n", g.left(), g.right());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{} {}", u + 1, v + 1);
    }
    out
}
