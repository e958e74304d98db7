use std::collections::HashMap;
use std::io::{BufRead, Write};

use super::attributes::{Attribute, AttributeSet, LoadedAttributes, UnknownNodePolicy};
use super::{DirectedGraph, DropCounts};
use crate::error::{Error, Result};

/// Edge-list parsing options.
#[derive(Debug, Clone)]
pub struct EdgeListConfig {
    /// Lines whose first non-blank character is this are skipped.
    pub comment: char,
}

impl Default for EdgeListConfig {
    fn default() -> Self {
        EdgeListConfig { comment: '#' }
    }
}

#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: DirectedGraph,
    pub dropped: DropCounts,
    /// Number of `src dst` lines read, including dropped ones.
    pub edge_lines: usize,
}

fn significant_lines<R: BufRead>(reader: R, comment: char) -> impl Iterator<Item = Result<(usize, String)>> {
    reader.lines().enumerate().filter_map(move |(i, line)| match line {
        Err(e) => Some(Err(Error::Io(e))),
        Ok(line) => {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with(comment) {
                None
            } else {
                Some(Ok((i + 1, trimmed.to_owned())))
            }
        }
    })
}

fn two_tokens(line_no: usize, line: &str) -> Result<(&str, &str)> {
    let mut tokens = line.split_whitespace();
    match (tokens.next(), tokens.next(), tokens.next()) {
        (Some(a), Some(b), None) => Ok((a, b)),
        _ => Err(Error::Parse {
            line: line_no,
            message: format!("expected exactly two tokens, got `{line}`"),
        }),
    }
}

/// Reads a whitespace-separated `src dst` edge list (`src -> dst`).
///
/// Blank lines and comment lines are ignored. Nodes get dense indices in
/// first-seen order; self-loops and repeated links are dropped and counted.
pub fn load_edge_list<R: BufRead>(reader: R, config: &EdgeListConfig) -> Result<LoadedGraph> {
    let mut labels: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut edges = Vec::new();
    for item in significant_lines(reader, config.comment) {
        let (line_no, line) = item?;
        let (src, dst) = two_tokens(line_no, &line)?;
        let mut intern = |token: &str| -> usize {
            if let Some(&i) = index.get(token) {
                return i;
            }
            labels.push(token.to_owned());
            index.insert(token.to_owned(), labels.len() - 1);
            labels.len() - 1
        };
        let u = intern(src);
        let v = intern(dst);
        edges.push((u, v));
    }
    if edges.is_empty() {
        return Err(Error::EmptyInput);
    }
    let edge_lines = edges.len();
    let (graph, dropped) = DirectedGraph::from_edges(labels, edges);
    Ok(LoadedGraph {
        graph,
        dropped,
        edge_lines,
    })
}

/// Writes the canonical edge list: one `src\tdst` line per link, ordered by
/// tail index then head index.
pub fn write_edge_list<W: Write>(graph: &DirectedGraph, mut out: W) -> std::io::Result<()> {
    for (u, v) in graph.edges() {
        writeln!(out, "{}\t{}", graph.label(u), graph.label(v))?;
    }
    Ok(())
}

/// Reads `node attribute_name` lines into one bit-vector per attribute name,
/// in first-seen order of names.
pub fn load_attributes<R: BufRead>(
    reader: R,
    graph: &DirectedGraph,
    policy: UnknownNodePolicy,
) -> Result<LoadedAttributes> {
    let n = graph.node_count();
    let mut order: Vec<String> = Vec::new();
    let mut members: HashMap<String, Vec<bool>> = HashMap::new();
    let mut skipped_unknown = 0;
    for item in significant_lines(reader, '#') {
        let (line_no, line) = item?;
        let (node, name) = two_tokens(line_no, &line)?;
        let Some(v) = graph.index_of(node) else {
            match policy {
                UnknownNodePolicy::Error => {
                    return Err(Error::UnknownNode {
                        line: line_no,
                        token: node.to_owned(),
                    })
                }
                UnknownNodePolicy::Skip => {
                    skipped_unknown += 1;
                    continue;
                }
            }
        };
        let bits = members.entry(name.to_owned()).or_insert_with(|| {
            order.push(name.to_owned());
            vec![false; n]
        });
        bits[v] = true;
    }
    let mut attributes = AttributeSet::new(n);
    for name in order {
        let bits = members.remove(&name).expect("name recorded on first sight");
        attributes.insert(Attribute::new(name, bits));
    }
    Ok(LoadedAttributes {
        attributes,
        skipped_unknown,
    })
}

/// Writes `node\tattribute` lines, attribute by attribute.
pub fn write_attributes<W: Write>(graph: &DirectedGraph, attributes: &AttributeSet, mut out: W) -> std::io::Result<()> {
    for attr in attributes {
        for v in attr.holders() {
            writeln!(out, "{}\t{}", graph.label(v), attr.name())?;
        }
    }
    Ok(())
}
