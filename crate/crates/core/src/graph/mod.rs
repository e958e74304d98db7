//! Immutable sparse directed graphs.
//!
//! Nodes carry external string labels mapped to dense `0..n` indices in
//! first-seen order. Both directions are stored in CSR form: `followers(v)`
//! lists the heads of links `v -> .` and `friends(v)` lists the tails of
//! links `. -> v`, each sorted ascending.

mod attributes;
mod io;
mod peel;
mod summary;

use std::collections::HashMap;

pub use attributes::{Attribute, AttributeSet, LoadedAttributes, UnknownNodePolicy};
pub use io::{load_attributes, load_edge_list, write_attributes, write_edge_list, EdgeListConfig, LoadedGraph};
pub use peel::{nonzero_core, CoreReport};
pub(crate) use summary::integer_covariance as summary_covariance;
pub use summary::{degree_summary, DegreeSummary};

/// Compressed adjacency: `targets[offsets[v]..offsets[v + 1]]` are the
/// neighbours of `v`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Csr {
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

impl Csr {
    /// Builds from deduplicated `(row, col)` pairs.
    fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Self {
        let mut offsets = vec![0usize; n + 1];
        for &(r, _) in pairs {
            offsets[r + 1] += 1;
        }
        for v in 0..n {
            offsets[v + 1] += offsets[v];
        }
        let mut cursor = offsets.clone();
        let mut targets = vec![0usize; pairs.len()];
        for &(r, c) in pairs {
            targets[cursor[r]] = c;
            cursor[r] += 1;
        }
        for v in 0..n {
            targets[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        Csr { offsets, targets }
    }

    #[inline]
    fn row(&self, v: usize) -> &[usize] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    fn len(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }
}

/// Counts of links discarded while building a simple graph.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DropCounts {
    pub duplicates: usize,
    pub self_loops: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    out_adj: Csr,
    in_adj: Csr,
}

impl DirectedGraph {
    /// Builds a simple graph over `labels.len()` nodes. Self-loops and
    /// repeated links are dropped and counted.
    ///
    /// Panics if an endpoint is out of range or labels repeat.
    pub fn from_edges(labels: Vec<String>, edges: impl IntoIterator<Item = (usize, usize)>) -> (Self, DropCounts) {
        let n = labels.len();
        let mut drops = DropCounts::default();
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for (u, v) in edges {
            assert!(u < n && v < n, "edge ({u}, {v}) out of range for {n} nodes");
            if u == v {
                drops.self_loops += 1;
            } else {
                pairs.push((u, v));
            }
        }
        let before = pairs.len();
        pairs.sort_unstable();
        pairs.dedup();
        drops.duplicates = before - pairs.len();

        let index: HashMap<String, usize> = labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
        assert_eq!(index.len(), n, "node labels must be unique");
        let out_adj = Csr::from_pairs(n, &pairs);
        let reversed: Vec<(usize, usize)> = pairs.iter().map(|&(u, v)| (v, u)).collect();
        let in_adj = Csr::from_pairs(n, &reversed);
        (
            DirectedGraph {
                labels,
                index,
                out_adj,
                in_adj,
            },
            drops,
        )
    }

    /// Graph over nodes labelled `"0".."n-1"`.
    pub fn from_index_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> (Self, DropCounts) {
        Self::from_edges((0..n).map(|i| i.to_string()).collect(), edges)
    }

    /// Convenience constructor from labelled links; labels get indices in
    /// first-seen order.
    pub fn from_labeled_edges(edges: &[(&str, &str)]) -> Self {
        let mut labels: Vec<String> = Vec::new();
        let mut index: HashMap<&str, usize> = HashMap::new();
        let mut pairs = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            let mut intern = |s| {
                *index.entry(s).or_insert_with(|| {
                    labels.push(s.to_owned());
                    labels.len() - 1
                })
            };
            let u = intern(u);
            let v = intern(v);
            pairs.push((u, v));
        }
        Self::from_edges(labels, pairs).0
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.out_adj.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Number of followers of `v`.
    #[inline]
    pub fn out_degree(&self, v: usize) -> usize {
        self.out_adj.len(v)
    }

    /// Number of friends of `v`.
    #[inline]
    pub fn in_degree(&self, v: usize) -> usize {
        self.in_adj.len(v)
    }

    /// Heads of the links leaving `v`, sorted.
    #[inline]
    pub fn followers(&self, v: usize) -> &[usize] {
        self.out_adj.row(v)
    }

    /// Tails of the links entering `v`, sorted.
    #[inline]
    pub fn friends(&self, v: usize) -> &[usize] {
        self.in_adj.row(v)
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        (0..self.node_count()).map(|v| self.out_degree(v)).collect()
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        (0..self.node_count()).map(|v| self.in_degree(v)).collect()
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// All links `(u, v)` ordered by tail, then head.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.node_count()).flat_map(move |u| self.followers(u).iter().map(move |&v| (u, v)))
    }

    /// `E / N`, the common mean of in- and out-degrees.
    pub fn mean_degree(&self) -> f64 {
        self.edge_count() as f64 / self.node_count() as f64
    }

    /// Subgraph induced by nodes with `keep[v]`, preserving labels and
    /// relative order.
    pub fn induced(&self, keep: &[bool]) -> DirectedGraph {
        assert_eq!(keep.len(), self.node_count());
        let mut remap = vec![usize::MAX; self.node_count()];
        let mut labels = Vec::new();
        for v in 0..self.node_count() {
            if keep[v] {
                remap[v] = labels.len();
                labels.push(self.labels[v].clone());
            }
        }
        let edges: Vec<(usize, usize)> = self
            .edges()
            .filter(|&(u, v)| keep[u] && keep[v])
            .map(|(u, v)| (remap[u], remap[v]))
            .collect();
        DirectedGraph::from_edges(labels, edges).0
    }
}
