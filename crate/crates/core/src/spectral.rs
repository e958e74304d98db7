//! Degree-discounted bibliographic coupling and the FPP variance bound.
//!
//! The coupling matrix is `B_d = D_o^{-1/2} A D_i^{-1} A^T D_o^{-1/2}`, with
//! entries
//!
//! ```text
//! B_d(i, j) = 1 / sqrt(od(i) od(j)) * sum_k A(i, k) A(j, k) / id(k)
//! ```
//!
//! so two nodes are coupled through every mutual follower `k`, discounted by
//! how many friends `k` has. `B_d = G G^T` with `G = D_o^{-1/2} A D_i^{-1/2}`
//! is positive semi-definite, and `w = D_o^{1/2} 1 / sqrt(M)` is an
//! eigenvector with eigenvalue 1 (`M` = number of links). The FPP variance
//! with budget `b` is
//!
//! ```text
//! Var = (h^T B_d h - (w^T h)^2) / (b M)   with h = D_o^{1/2} f,
//!     <= lambda_2 ||h||^2 / (b M)
//! ```
//!
//! Nodes without followers have no row in `B_d` and are left out of the
//! operator; they contribute nothing to `h`.
//!
//! The operator is never materialised: a product costs two passes over the
//! links. `lambda_2` comes from power iteration with the known top
//! eigenvector projected out at every step.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Attribute, DirectedGraph};
use crate::stats::CompensatedSum;

/// Implicit `B_d` restricted to nodes with at least one follower.
#[derive(Debug, Clone)]
pub struct CouplingOperator<'g> {
    graph: &'g DirectedGraph,
    active: Vec<usize>,
    position: Vec<Option<usize>>,
    inv_sqrt_out: Vec<f64>,
    inv_in: Vec<f64>,
    links: usize,
}

impl<'g> CouplingOperator<'g> {
    pub fn new(graph: &'g DirectedGraph) -> Result<Self> {
        if graph.edge_count() == 0 {
            return Err(Error::EmptyEdgeSet);
        }
        let n = graph.node_count();
        let mut active = Vec::new();
        let mut position = vec![None; n];
        for (v, slot) in position.iter_mut().enumerate() {
            if graph.out_degree(v) > 0 {
                *slot = Some(active.len());
                active.push(v);
            }
        }
        let inv_sqrt_out = active
            .iter()
            .map(|&v| 1.0 / (graph.out_degree(v) as f64).sqrt())
            .collect();
        let inv_in = (0..n)
            .map(|v| match graph.in_degree(v) {
                0 => 0.0,
                d => 1.0 / d as f64,
            })
            .collect();
        Ok(CouplingOperator {
            graph,
            active,
            position,
            inv_sqrt_out,
            inv_in,
            links: graph.edge_count(),
        })
    }

    /// Dimension of the operator.
    pub fn dim(&self) -> usize {
        self.active.len()
    }

    /// Graph indices of the operator's rows, ascending.
    pub fn active_nodes(&self) -> &[usize] {
        &self.active
    }

    /// Nodes left out because they have no followers.
    pub fn removed_count(&self) -> usize {
        self.graph.node_count() - self.active.len()
    }

    /// `M`, the number of links.
    pub fn links(&self) -> usize {
        self.links
    }

    /// `y = B_d x`.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.dim());
        assert_eq!(y.len(), self.dim());
        let n = self.graph.node_count();
        // t = D_i^{-1} A^T D_o^{-1/2} x, indexed by graph node
        let mut t = vec![0.0; n];
        for (k, slot) in t.iter_mut().enumerate() {
            let friends = self.graph.friends(k);
            if friends.is_empty() {
                continue;
            }
            let mut s = 0.0;
            for &i in friends {
                let p = self.position[i].expect("a friend has a follower");
                s += x[p] * self.inv_sqrt_out[p];
            }
            *slot = s * self.inv_in[k];
        }
        for (p, &i) in self.active.iter().enumerate() {
            let s: f64 = self.graph.followers(i).iter().map(|&k| t[k]).sum();
            y[p] = s * self.inv_sqrt_out[p];
        }
    }

    pub fn apply_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim()];
        self.apply(x, &mut y);
        y
    }

    /// `w = D_o^{1/2} 1 / sqrt(M)`, the unit eigenvector for eigenvalue 1.
    pub fn principal_vector(&self) -> Vec<f64> {
        let m = (self.links as f64).sqrt();
        self.active
            .iter()
            .map(|&v| (self.graph.out_degree(v) as f64).sqrt() / m)
            .collect()
    }

    /// `h = D_o^{1/2} f` over the active nodes.
    pub fn weighted_attribute(&self, attr: &Attribute) -> Vec<f64> {
        self.active
            .iter()
            .map(|&v| attr.value(v) * (self.graph.out_degree(v) as f64).sqrt())
            .collect()
    }

    /// FPP variance through the quadratic form `(h^T B_d h - (w^T h)^2) / (b M)`.
    pub fn quadratic_form_variance(&self, attr: &Attribute, budget: usize) -> f64 {
        let h = self.weighted_attribute(attr);
        let bh = self.apply_vec(&h);
        let w = self.principal_vector();
        let (quad, wh) = (dot(&h, &bh), dot(&w, &h));
        (quad - wh * wh) / (budget as f64 * self.links as f64)
    }

    /// Components of the support graph of `B_d` (nodes coupled through a
    /// mutual follower).
    pub fn support_components(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.dim()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for k in 0..self.graph.node_count() {
            let friends = self.graph.friends(k);
            let Some((&first, rest)) = friends.split_first() else {
                continue;
            };
            let a = self.position[first].expect("a friend has a follower");
            for &i in rest {
                let b = self.position[i].expect("a friend has a follower");
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
        (0..self.dim()).filter(|&x| find(&mut parent, x) == x).count()
    }

    /// Every active node has a positive diagonal entry (it shares its own
    /// followers with itself), so the support always holds an odd cycle.
    pub fn support_nonbipartite(&self) -> bool {
        self.active
            .iter()
            .any(|&i| self.graph.followers(i).iter().any(|&k| self.inv_in[k] > 0.0))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = CompensatedSum::new();
    for (x, y) in a.iter().zip(b) {
        acc.add(x * y);
    }
    acc.value()
}

fn remove_component(x: &mut [f64], w: &[f64]) {
    let c = dot(x, w);
    for (xi, wi) in x.iter_mut().zip(w) {
        *xi -= c * wi;
    }
}

/// `B_d` materialised entry by entry, for small graphs.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseCoupling {
    /// Graph indices of rows and columns.
    pub nodes: Vec<usize>,
    pub matrix: Vec<Vec<f64>>,
}

/// Builds `B_d` from its entrywise definition; refuses more than
/// `max_dim` rows.
pub fn dense_coupling(graph: &DirectedGraph, max_dim: usize) -> Result<DenseCoupling> {
    let nodes: Vec<usize> = (0..graph.node_count()).filter(|&v| graph.out_degree(v) > 0).collect();
    if nodes.len() > max_dim {
        return Err(Error::InvalidArgument(format!(
            "dense coupling matrix of dimension {} exceeds limit {max_dim}",
            nodes.len()
        )));
    }
    let mut pos = vec![usize::MAX; graph.node_count()];
    for (p, &v) in nodes.iter().enumerate() {
        pos[v] = p;
    }
    let mut matrix = vec![vec![0.0; nodes.len()]; nodes.len()];
    for k in 0..graph.node_count() {
        let friends = graph.friends(k);
        let discount = 1.0 / friends.len() as f64;
        for &i in friends {
            for &j in friends {
                matrix[pos[i]][pos[j]] += discount;
            }
        }
    }
    for (p, &i) in nodes.iter().enumerate() {
        for (q, &j) in nodes.iter().enumerate() {
            matrix[p][q] /= ((graph.out_degree(i) * graph.out_degree(j)) as f64).sqrt();
        }
    }
    Ok(DenseCoupling { nodes, matrix })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    /// Stop when successive Rayleigh quotients differ by less than this.
    pub tolerance: f64,
    pub max_iters: usize,
    /// Seed of the start vector.
    pub seed: u64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            tolerance: 1e-8,
            max_iters: 10_000,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lambda2 {
    pub lambda2: f64,
    pub iters: usize,
    /// Nodes without followers left out of the operator.
    pub removed_nodes: usize,
}

/// Second largest eigenvalue of `B_d`.
pub fn lambda2(graph: &DirectedGraph, options: &EigenOptions) -> Result<Lambda2> {
    let op = CouplingOperator::new(graph)?;
    lambda2_of(&op, options)
}

pub fn lambda2_of(op: &CouplingOperator<'_>, options: &EigenOptions) -> Result<Lambda2> {
    let w = op.principal_vector();
    let done = |lambda2: f64, iters: usize| Lambda2 {
        lambda2,
        iters,
        removed_nodes: op.removed_count(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut x: Vec<f64> = (0..op.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
    remove_component(&mut x, &w);
    let norm = dot(&x, &x).sqrt();
    if norm < 1e-12 {
        // one-dimensional operator: nothing left after removing w
        return Ok(done(0.0, 0));
    }
    x.iter_mut().for_each(|v| *v /= norm);

    let mut y = vec![0.0; op.dim()];
    let mut previous: Option<f64> = None;
    let mut rayleigh = 0.0;
    for iter in 1..=options.max_iters {
        op.apply(&x, &mut y);
        remove_component(&mut y, &w);
        rayleigh = dot(&x, &y);
        let norm = dot(&y, &y).sqrt();
        if norm == 0.0 {
            return Ok(done(0.0, iter));
        }
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / norm;
        }
        if let Some(p) = previous {
            if (rayleigh - p).abs() < options.tolerance {
                return Ok(done(rayleigh.max(0.0), iter));
            }
        }
        previous = Some(rayleigh);
    }
    let last = previous.unwrap_or(rayleigh);
    Err(Error::NoConvergence {
        iterations: options.max_iters,
        lower: last.min(rayleigh),
        upper: last.max(rayleigh),
    })
}

/// Exact FPP variance with budget `b`:
/// `(f^T A D_i^{-1} A^T f / M - (1^T A^T f / M)^2) / b`.
pub fn exact_fpp_variance(graph: &DirectedGraph, attr: &Attribute, budget: usize) -> Result<f64> {
    let m = graph.edge_count();
    if m == 0 {
        return Err(Error::EmptyEdgeSet);
    }
    if budget == 0 {
        return Err(Error::InvalidArgument("budget must be at least 1".into()));
    }
    let (mut first, mut second) = (CompensatedSum::new(), CompensatedSum::new());
    for k in 0..graph.node_count() {
        // (A^T f)_k: friends of k holding the attribute
        let g = graph.friends(k).iter().filter(|&&u| attr.has(u)).count();
        if g > 0 {
            first.add(g as f64);
            second.add((g * g) as f64 / graph.in_degree(k) as f64);
        }
    }
    let m = m as f64;
    let mean = first.value() / m;
    Ok(((second.value() / m - mean * mean) / budget as f64).max(0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralSummary {
    pub attribute: String,
    pub budget: usize,
    pub lambda2: f64,
    pub iters: usize,
    pub exact_variance: f64,
    /// `lambda_2 ||D_o^{1/2} f||^2 / (b M)`
    pub upper_bound: f64,
    pub bd_connected: bool,
    pub bd_nonbipartite: bool,
    pub removed_nodes: usize,
}

/// `lambda_2` and support diagnostics, shared by every attribute.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralAnalysis {
    pub lambda2: Lambda2,
    pub bd_connected: bool,
    pub bd_nonbipartite: bool,
    pub links: usize,
}

impl SpectralAnalysis {
    pub fn new(graph: &DirectedGraph, options: &EigenOptions) -> Result<Self> {
        let op = CouplingOperator::new(graph)?;
        Ok(SpectralAnalysis {
            lambda2: lambda2_of(&op, options)?,
            bd_connected: op.support_components() == 1,
            bd_nonbipartite: op.support_nonbipartite(),
            links: op.links(),
        })
    }

    pub fn summary(&self, graph: &DirectedGraph, attr: &Attribute, budget: usize) -> Result<SpectralSummary> {
        let exact_variance = exact_fpp_variance(graph, attr, budget)?;
        let weighted_norm: usize = attr.holders().map(|v| graph.out_degree(v)).sum();
        Ok(SpectralSummary {
            attribute: attr.name().to_owned(),
            budget,
            lambda2: self.lambda2.lambda2,
            iters: self.lambda2.iters,
            exact_variance,
            upper_bound: self.lambda2.lambda2 * weighted_norm as f64 / (budget as f64 * self.links as f64),
            bd_connected: self.bd_connected,
            bd_nonbipartite: self.bd_nonbipartite,
            removed_nodes: self.lambda2.removed_nodes,
        })
    }
}

pub fn variance_bound(
    graph: &DirectedGraph,
    attr: &Attribute,
    budget: usize,
    options: &EigenOptions,
) -> Result<SpectralSummary> {
    SpectralAnalysis::new(graph, options)?.summary(graph, attr, budget)
}
