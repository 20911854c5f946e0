//! Text formats: DIMACS edge files, plain 0-indexed edge lists and DIMACS
//! CNF (reduced to an independent-set instance).

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Non-fatal findings while reading a DIMACS file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Warning {
    EdgeCountMismatch { declared: usize, found: usize },
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_usize(tok: Option<&str>, line: usize, what: &str) -> Result<usize> {
    tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?
        .parse()
        .map_err(|_| parse_err(line, format!("invalid {what}")))
}

pub fn parse_dimacs(text: &str) -> Result<Graph> {
    parse_dimacs_with_warnings(text).map(|(g, _)| g)
}

/// Parses the DIMACS edge format (`p edge n m`, `e u v`, 1-indexed).
pub fn parse_dimacs_with_warnings(text: &str) -> Result<(Graph, Vec<Warning>)> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let mut toks = raw.split_whitespace();
        match toks.next() {
            None | Some("c") => {}
            Some("p") => {
                if header.is_some() {
                    return Err(parse_err(line, "duplicate problem line"));
                }
                match toks.next() {
                    Some("edge") | Some("col") => {}
                    _ => return Err(parse_err(line, "expected `p edge <n> <m>`")),
                }
                let n = parse_usize(toks.next(), line, "vertex count")?;
                let m = parse_usize(toks.next(), line, "edge count")?;
                header = Some((n, m));
            }
            Some("e") => {
                let (n, _) = header.ok_or_else(|| parse_err(line, "edge before problem line"))?;
                let u = parse_usize(toks.next(), line, "endpoint")?;
                let v = parse_usize(toks.next(), line, "endpoint")?;
                for w in [u, v] {
                    if w == 0 || w > n {
                        return Err(parse_err(line, format!("vertex {w} out of range 1..={n}")));
                    }
                }
                if u == v {
                    return Err(parse_err(line, format!("self-loop on vertex {u}")));
                }
                edges.push((u - 1, v - 1));
            }
            Some(tok) => return Err(parse_err(line, format!("unexpected token `{tok}`"))),
        }
    }
    let (n, m) = header.ok_or_else(|| parse_err(0, "missing problem line"))?;
    let graph = Graph::new(n, edges.iter().copied())?;
    let mut warnings = Vec::new();
    if edges.len() != m {
        warnings.push(Warning::EdgeCountMismatch {
            declared: m,
            found: edges.len(),
        });
    }
    Ok((graph, warnings))
}

pub fn write_dimacs(g: &Graph) -> String {
    let mut out = String::new();
    writeln!(out, "p edge {} {}", g.num_vertices(), g.num_edges()).unwrap();
    for &(u, v) in g.edges() {
        writeln!(out, "e {} {}", u + 1, v + 1).unwrap();
    }
    out
}

/// Plain `u v` lines, 0-indexed. The vertex count is one past the largest
/// endpoint unless a leading `# n <count>` line fixes it.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut declared = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if let Some(rest) = trimmed.strip_prefix('#') {
            let mut toks = rest.split_whitespace();
            if toks.next() == Some("n") {
                declared = Some(parse_usize(toks.next(), line, "vertex count")?);
            }
            continue;
        }
        if trimmed.is_empty() {
            continue;
        }
        let mut toks = trimmed.split_whitespace();
        let u = parse_usize(toks.next(), line, "endpoint")?;
        let v = parse_usize(toks.next(), line, "endpoint")?;
        if toks.next().is_some() {
            return Err(parse_err(line, "expected two endpoints"));
        }
        edges.push((u, v));
    }
    let n = declared.unwrap_or_else(|| {
        edges
            .iter()
            .map(|&(u, v)| u.max(v) + 1)
            .max()
            .unwrap_or(0)
    });
    Graph::new(n, edges)
}

pub fn write_edge_list(g: &Graph) -> String {
    let mut out = format!("# n {}\n", g.num_vertices());
    for &(u, v) in g.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}

/// Reads either format: DIMACS when a `p` line is present, else edge list.
pub fn parse_graph(text: &str) -> Result<Graph> {
    let is_dimacs = text
        .lines()
        .any(|l| l.split_whitespace().next() == Some("p"));
    if is_dimacs {
        parse_dimacs(text)
    } else {
        parse_edge_list(text)
    }
}

/// A CNF formula as a list of clauses of nonzero DIMACS literals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cnf {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i64>>,
}

pub fn parse_cnf(text: &str) -> Result<Cnf> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        // SATLIB files end with a `%` line followed by a stray `0`.
        if trimmed.starts_with('%') {
            break;
        }
        if trimmed.starts_with('p') {
            let mut toks = trimmed.split_whitespace().skip(1);
            if toks.next() != Some("cnf") {
                return Err(parse_err(line, "expected `p cnf <vars> <clauses>`"));
            }
            let vars = parse_usize(toks.next(), line, "variable count")?;
            let count = parse_usize(toks.next(), line, "clause count")?;
            header = Some((vars, count));
            continue;
        }
        let (vars, _) = header.ok_or_else(|| parse_err(line, "clause before problem line"))?;
        for tok in trimmed.split_whitespace() {
            let lit: i64 = tok
                .parse()
                .map_err(|_| parse_err(line, format!("invalid literal `{tok}`")))?;
            if lit == 0 {
                if current.is_empty() {
                    return Err(parse_err(line, "empty clause"));
                }
                clauses.push(std::mem::take(&mut current));
            } else {
                if lit.unsigned_abs() as usize > vars {
                    return Err(parse_err(line, format!("variable {lit} exceeds {vars}")));
                }
                current.push(lit);
            }
        }
    }
    let (num_vars, _) = header.ok_or_else(|| parse_err(0, "missing problem line"))?;
    if !current.is_empty() {
        // A final clause without its terminating 0.
        clauses.push(current);
    }
    if clauses.is_empty() {
        return Err(parse_err(last_line, "formula has no clauses"));
    }
    Ok(Cnf { num_vars, clauses })
}

/// Reduces a CNF formula to MIS: one vertex per literal occurrence (in
/// clause order), a clique per clause, and an edge between every pair of
/// complementary occurrences. The formula is satisfiable iff the maximum
/// independent set has one vertex per clause.
pub fn cnf_to_mis_graph(text: &str) -> Result<(Graph, usize)> {
    let cnf = parse_cnf(text)?;
    Ok((cnf_graph(&cnf), cnf.clauses.len()))
}

pub fn cnf_graph(cnf: &Cnf) -> Graph {
    let mut edges = Vec::new();
    let mut occurrences: HashMap<i64, Vec<usize>> = HashMap::new();
    let mut next = 0;
    for clause in &cnf.clauses {
        let start = next;
        for (offset, &lit) in clause.iter().enumerate() {
            let v = start + offset;
            for u in start..v {
                edges.push((u, v));
            }
            if let Some(opposite) = occurrences.get(&-lit) {
                edges.extend(opposite.iter().map(|&u| (u, v)));
            }
            occurrences.entry(lit).or_default().push(v);
        }
        next += clause.len();
    }
    Graph::new(next, edges).expect("reduction edges are in range and loop-free")
}
