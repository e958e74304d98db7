use std::collections::VecDeque;

use super::DirectedGraph;

/// Outcome of [`nonzero_core`].
#[derive(Debug, Clone)]
pub struct CoreReport {
    pub graph: DirectedGraph,
    /// Labels of peeled nodes, in removal order.
    pub removed: Vec<String>,
    /// Node mask over the input graph (`true` = kept).
    pub kept: Vec<bool>,
    /// Number of peeling waves until the fixpoint.
    pub rounds: usize,
}

impl CoreReport {
    pub fn is_empty(&self) -> bool {
        self.graph.is_empty()
    }
}

/// Largest induced subgraph in which every node has at least one friend and
/// one follower.
///
/// Removing a node lowers its neighbours' degrees, so nodes are peeled in
/// waves until no zero-degree node remains.
pub fn nonzero_core(graph: &DirectedGraph) -> CoreReport {
    let n = graph.node_count();
    let mut od = graph.out_degrees();
    let mut id = graph.in_degrees();
    let mut alive = vec![true; n];
    let mut queued = vec![false; n];
    let mut queue: VecDeque<(usize, usize)> = VecDeque::new();
    for v in 0..n {
        if od[v] == 0 || id[v] == 0 {
            queued[v] = true;
            queue.push_back((v, 1));
        }
    }
    let mut removed = Vec::new();
    let mut rounds = 0;
    while let Some((v, wave)) = queue.pop_front() {
        rounds = rounds.max(wave);
        alive[v] = false;
        removed.push(graph.label(v).to_owned());
        for &w in graph.followers(v) {
            if alive[w] {
                id[w] -= 1;
                if id[w] == 0 && !queued[w] {
                    queued[w] = true;
                    queue.push_back((w, wave + 1));
                }
            }
        }
        for &u in graph.friends(v) {
            if alive[u] {
                od[u] -= 1;
                if od[u] == 0 && !queued[u] {
                    queued[u] = true;
                    queue.push_back((u, wave + 1));
                }
            }
        }
    }
    CoreReport {
        graph: graph.induced(&alive),
        removed,
        kept: alive,
        rounds,
    }
}
