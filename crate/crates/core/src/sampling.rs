//! Random node, random friend and random follower sampling.
//!
//! * uniform: `P(v) = 1/N` (a random node),
//! * out-degree: `P(v) = od(v) / sum od` (a random friend),
//! * in-degree: `P(v) = id(v) / sum id` (a random follower).
//!
//! Weighted modes use an integer alias table, so each draw costs two
//! uniform integers and the realised probabilities are exactly the
//! weight ratios.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;

/// Seeded ChaCha8 stream. Streams with the same seed and different indices
/// use disjoint ChaCha stream ids and are independent; the same
/// `(seed, index)` always yields the same sequence.
#[derive(Debug, Clone)]
pub struct RandomStream {
    seed: u64,
    index: u64,
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        RandomStream { seed, index, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    /// Fresh stream with the same seed and another index.
    pub fn substream(&self, index: u64) -> RandomStream {
        RandomStream::new(self.seed, index)
    }
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SamplingMode {
    /// Random node.
    Uniform,
    /// Random friend, proportional to out-degree.
    OutDegree,
    /// Random follower, proportional to in-degree.
    InDegree,
}

/// Alias table over integer weights with exact integer thresholds.
#[derive(Debug, Clone)]
struct AliasTable {
    total: u64,
    threshold: Vec<u64>,
    alias: Vec<usize>,
}

impl AliasTable {
    fn new(weights: &[u64]) -> Self {
        let n = weights.len();
        let total: u64 = weights.iter().sum();
        assert!(n > 0 && total > 0);
        let cap = total as u128;
        let mut scaled: Vec<u128> = weights.iter().map(|&w| w as u128 * n as u128).collect();
        let mut threshold = vec![total; n];
        let mut alias: Vec<usize> = (0..n).collect();
        let (mut small, mut large): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| scaled[i] < cap);
        while let (Some(&s), Some(&l)) = (small.last(), large.last()) {
            small.pop();
            threshold[s] = scaled[s] as u64;
            alias[s] = l;
            scaled[l] -= cap - scaled[s];
            if scaled[l] < cap {
                large.pop();
                small.push(l);
            }
        }
        // With integer arithmetic both stacks empty together; leftovers are full columns.
        AliasTable {
            total,
            threshold,
            alias,
        }
    }

    #[inline]
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let column = rng.random_range(0..self.threshold.len());
        let r = rng.random_range(0..self.total);
        if r < self.threshold[column] {
            column
        } else {
            self.alias[column]
        }
    }

    /// Probability mass of each outcome as `(numerator, n * total)`.
    fn masses(&self) -> (Vec<u128>, u128) {
        let n = self.threshold.len();
        let mut mass = vec![0u128; n];
        for i in 0..n {
            mass[i] += self.threshold[i] as u128;
            mass[self.alias[i]] += (self.total - self.threshold[i]) as u128;
        }
        (mass, n as u128 * self.total as u128)
    }
}

#[derive(Debug, Clone)]
enum Table {
    Uniform(usize),
    Alias(AliasTable),
}

/// Precomputed sampler over the nodes of a graph.
#[derive(Debug, Clone)]
pub struct NodeSampler {
    mode: Option<SamplingMode>,
    weights: Vec<u64>,
    total: u64,
    table: Table,
}

impl NodeSampler {
    /// Sampler for one of the three node distributions.
    pub fn new(graph: &DirectedGraph, mode: SamplingMode) -> Result<Self> {
        let n = graph.node_count();
        if n == 0 {
            return Err(Error::Degenerate("graph has no nodes".into()));
        }
        let mut sampler = match mode {
            SamplingMode::Uniform => NodeSampler {
                mode: None,
                weights: vec![1; n],
                total: n as u64,
                table: Table::Uniform(n),
            },
            SamplingMode::OutDegree => Self::from_weights(graph.out_degrees().into_iter().map(|d| d as u64).collect())?,
            SamplingMode::InDegree => Self::from_weights(graph.in_degrees().into_iter().map(|d| d as u64).collect())?,
        };
        sampler.mode = Some(mode);
        Ok(sampler)
    }

    /// Sampler with `P(v) = weights[v] / sum(weights)`.
    pub fn from_weights(weights: Vec<u64>) -> Result<Self> {
        let total: u64 = weights.iter().sum();
        if total == 0 {
            return Err(Error::Degenerate("all sampling weights are zero".into()));
        }
        let table = Table::Alias(AliasTable::new(&weights));
        Ok(NodeSampler {
            mode: None,
            weights,
            total,
            table,
        })
    }

    /// The graph distribution this sampler was built for, if any.
    pub fn mode(&self) -> Option<SamplingMode> {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `weights[v] / total`.
    pub fn probability(&self, v: usize) -> f64 {
        self.weights[v] as f64 / self.total as f64
    }

    pub fn probabilities(&self) -> Vec<f64> {
        (0..self.len()).map(|v| self.probability(v)).collect()
    }

    /// Draw probabilities realised by the internal table, as exact fractions
    /// `(numerators, denominator)`.
    pub fn table_masses(&self) -> (Vec<u128>, u128) {
        match &self.table {
            Table::Uniform(n) => (vec![1; *n], *n as u128),
            Table::Alias(t) => t.masses(),
        }
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        match &self.table {
            Table::Uniform(n) => rng.random_range(0..*n),
            Table::Alias(t) => t.sample(rng),
        }
    }

    /// `k` independent draws, with replacement.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R, k: usize) -> Vec<usize> {
        (0..k).map(|_| self.sample(rng)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;

    #[test]
    fn star_out_degree_is_a_point_mass() {
        let s = NodeSampler::new(&star(), SamplingMode::OutDegree).unwrap();
        assert_eq!(s.probabilities(), vec![1.0, 0.0, 0.0]);
        let mut rng = RandomStream::new(1, 0);
        assert_eq!(s.draw(&mut rng, 5), vec![0; 5]);
    }

    #[test]
    fn g5_in_degree_probabilities() {
        let g = g5();
        let s = NodeSampler::new(&g, SamplingMode::InDegree).unwrap();
        let p = |l: &str| s.probability(g.index_of(l).unwrap());
        assert_eq!((p("a"), p("b"), p("c")), (0.5, 0.25, 0.25));
    }

    #[test]
    fn uniform_mode() {
        let s = NodeSampler::new(&g3(), SamplingMode::Uniform).unwrap();
        assert!(s.probabilities().iter().all(|&p| p == 1.0 / 3.0));
    }

    #[test]
    fn all_zero_weights_are_degenerate() {
        let (g, _) = DirectedGraph::from_index_edges(3, []);
        assert!(matches!(
            NodeSampler::new(&g, SamplingMode::InDegree),
            Err(Error::Degenerate(_))
        ));
        assert!(NodeSampler::from_weights(vec![0, 0]).is_err());
    }

    #[test]
    fn alias_table_realises_exact_ratios() {
        let weights = vec![7u64, 0, 1, 3, 3, 0, 12, 1];
        let s = NodeSampler::from_weights(weights.clone()).unwrap();
        let (mass, denom) = s.table_masses();
        let total: u64 = weights.iter().sum();
        for (v, &w) in weights.iter().enumerate() {
            // mass / denom == w / total exactly
            assert_eq!(mass[v] * total as u128, w as u128 * denom);
        }
    }

    #[test]
    fn same_stream_same_draws() {
        let s = NodeSampler::new(&g5(), SamplingMode::InDegree).unwrap();
        let a = s.draw(&mut RandomStream::new(42, 3), 100);
        let b = s.draw(&mut RandomStream::new(42, 3), 100);
        let c = s.draw(&mut RandomStream::new(42, 4), 100);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn more_draws_than_nodes() {
        let s = NodeSampler::new(&g5(), SamplingMode::OutDegree).unwrap();
        let draws = s.draw(&mut RandomStream::new(0, 0), 50);
        assert_eq!(draws.len(), 50);
        assert!(draws.iter().all(|&v| v < 3));
    }

    #[test]
    fn g5_in_degree_frequencies_within_three_sigma() {
        let g = g5();
        let s = NodeSampler::new(&g, SamplingMode::InDegree).unwrap();
        let k = 1_000_000usize;
        let mut counts = [0usize; 3];
        let mut rng = RandomStream::new(2024, 0);
        for _ in 0..k {
            counts[s.sample(&mut rng)] += 1;
        }
        for v in 0..3 {
            let p = s.probability(v);
            let sigma = (k as f64 * p * (1.0 - p)).sqrt();
            assert!(
                (counts[v] as f64 - k as f64 * p).abs() < 3.0 * sigma,
                "node {v}: {counts:?}"
            );
        }
    }
}
