//! Synthetic graphs and planted attributes with controllable moments.
//!
//! Power-law graphs come from the directed configuration model: draw out-
//! and in-degree sequences, equalise their totals by random increments,
//! match stubs uniformly at random and erase self-loops and repeated links.
//! Regular graphs are built as random circulants, which are exactly regular
//! and simple.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Attribute, AttributeSet, DirectedGraph, DropCounts};
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DegreeLaw {
    /// Every node has `degree` friends and `degree` followers.
    Regular { degree: usize },
    /// `P(k) ~ k^-exponent` on `min_degree..=max_degree`.
    PowerLaw {
        exponent: f64,
        min_degree: usize,
        max_degree: usize,
    },
}

/// How a node's in-degree relates to its out-degree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coupling {
    Independent,
    /// `id(v) = od(v)` before stub matching.
    Identical,
    /// In-degrees rearranged until their Pearson correlation with the
    /// out-degrees is close to the target.
    Correlated(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphRecipe {
    pub nodes: usize,
    pub law: DegreeLaw,
    pub coupling: Coupling,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct SynthGraph {
    pub graph: DirectedGraph,
    /// Links erased during stub matching.
    pub erased: DropCounts,
    /// Unit increments added to equalise the degree totals.
    pub balance_increments: usize,
}

pub fn generate_graph(recipe: &GraphRecipe) -> Result<SynthGraph> {
    let n = recipe.nodes;
    if n < 2 {
        return Err(Error::Infeasible("need at least two nodes".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(recipe.seed);
    match recipe.law {
        DegreeLaw::Regular { degree } => {
            if degree == 0 || degree >= n {
                return Err(Error::Infeasible(format!(
                    "regular degree {degree} needs 1 <= d < n = {n}"
                )));
            }
            Ok(random_circulant(n, degree, &mut rng))
        }
        DegreeLaw::PowerLaw {
            exponent,
            min_degree,
            max_degree,
        } => {
            if !(exponent.is_finite() && exponent > 0.0) {
                return Err(Error::Infeasible(format!(
                    "power-law exponent {exponent} must be positive"
                )));
            }
            if min_degree == 0 || min_degree > max_degree || max_degree >= n {
                return Err(Error::Infeasible(format!(
                    "degree range {min_degree}..={max_degree} needs 1 <= min <= max < n = {n}"
                )));
            }
            let law = PowerLawSampler::new(exponent, min_degree, max_degree);
            let out: Vec<usize> = (0..n).map(|_| law.sample(&mut rng)).collect();
            let mut inn: Vec<usize> = match recipe.coupling {
                Coupling::Identical => out.clone(),
                Coupling::Independent => (0..n).map(|_| law.sample(&mut rng)).collect(),
                Coupling::Correlated(target) => {
                    let drawn: Vec<usize> = (0..n).map(|_| law.sample(&mut rng)).collect();
                    arrange_for_correlation(&out, drawn, target, &mut rng)?
                }
            };
            let mut out = out;
            let balance_increments = balance_totals(&mut out, &mut inn, &mut rng);
            Ok(match_stubs(&out, &inn, balance_increments, &mut rng))
        }
    }
}

fn random_circulant(n: usize, degree: usize, rng: &mut ChaCha8Rng) -> SynthGraph {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut shifts: Vec<usize> = (1..n).collect();
    shifts.shuffle(rng);
    let edges = shifts[..degree]
        .iter()
        .flat_map(|&s| (0..n).map(move |i| (i, s)))
        .map(|(i, s)| (order[i], order[(i + s) % n]))
        .collect::<Vec<_>>();
    let (graph, erased) = DirectedGraph::from_index_edges(n, edges);
    SynthGraph {
        graph,
        erased,
        balance_increments: 0,
    }
}

struct PowerLawSampler {
    min_degree: usize,
    cumulative: Vec<f64>,
}

impl PowerLawSampler {
    fn new(exponent: f64, min_degree: usize, max_degree: usize) -> Self {
        let mut total = 0.0;
        let cumulative = (min_degree..=max_degree)
            .map(|k| {
                total += (k as f64).powf(-exponent);
                total
            })
            .collect();
        PowerLawSampler { min_degree, cumulative }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().expect("non-empty degree range");
        let u = rng.random::<f64>() * total;
        let i = self
            .cumulative
            .partition_point(|&c| c <= u)
            .min(self.cumulative.len() - 1);
        self.min_degree + i
    }
}

fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let cov = stats::population_covariance(xs, ys);
    let (vx, vy) = (stats::population_variance(xs), stats::population_variance(ys));
    if vx > 0.0 && vy > 0.0 {
        cov / (vx.sqrt() * vy.sqrt())
    } else {
        0.0
    }
}

fn as_f64(xs: &[usize]) -> Vec<f64> {
    xs.iter().map(|&x| x as f64).collect()
}

/// Assigns `values` to nodes so that their correlation with `out` is near
/// `target`: start from the rank-aligned (or anti-aligned) assignment and
/// shuffle a growing share of positions, bisecting on that share.
fn arrange_for_correlation(
    out: &[usize],
    mut values: Vec<usize>,
    target: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<usize>> {
    if !(-1.0..=1.0).contains(&target) {
        return Err(Error::InvalidArgument(format!(
            "correlation target {target} outside [-1, 1]"
        )));
    }
    let n = out.len();
    let mut by_out: Vec<usize> = (0..n).collect();
    by_out.shuffle(rng);
    by_out.sort_by_key(|&v| out[v]);
    values.sort_unstable();
    if target < 0.0 {
        values.reverse();
    }
    let mut aligned = vec![0usize; n];
    for (rank, &v) in by_out.iter().enumerate() {
        aligned[v] = values[rank];
    }
    let mut positions: Vec<usize> = (0..n).collect();
    positions.shuffle(rng);
    let shuffle_seed: u64 = rng.random();
    let out_f = as_f64(out);
    let mixed = |share: f64| -> Vec<usize> {
        let k = ((share * n as f64).round() as usize).min(n);
        let chosen = &positions[..k];
        let mut picked: Vec<usize> = chosen.iter().map(|&p| aligned[p]).collect();
        picked.shuffle(&mut ChaCha8Rng::seed_from_u64(shuffle_seed));
        let mut result = aligned.clone();
        for (&p, v) in chosen.iter().zip(picked) {
            result[p] = v;
        }
        result
    };
    let corr = |share: f64| pearson(&out_f, &as_f64(&mixed(share)));

    let best_abs = corr(0.0).abs();
    if target.abs() > best_abs {
        return Err(Error::UnreachableCorrelation {
            target,
            max_abs: best_abs,
        });
    }
    // correlation magnitude falls as the shuffled share grows
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if corr(mid).abs() > target.abs() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(mixed(0.5 * (lo + hi)))
}

fn balance_totals(out: &mut [usize], inn: &mut [usize], rng: &mut ChaCha8Rng) -> usize {
    let (so, si): (usize, usize) = (out.iter().sum(), inn.iter().sum());
    let (short, gap) = if so < si { (out, si - so) } else { (inn, so - si) };
    for _ in 0..gap {
        let v = rng.random_range(0..short.len());
        short[v] += 1;
    }
    gap
}

fn match_stubs(out: &[usize], inn: &[usize], balance_increments: usize, rng: &mut ChaCha8Rng) -> SynthGraph {
    let tails: Vec<usize> = out
        .iter()
        .enumerate()
        .flat_map(|(v, &d)| std::iter::repeat_n(v, d))
        .collect();
    let mut heads: Vec<usize> = inn
        .iter()
        .enumerate()
        .flat_map(|(v, &d)| std::iter::repeat_n(v, d))
        .collect();
    heads.shuffle(rng);
    let (graph, erased) = DirectedGraph::from_index_edges(out.len(), tails.into_iter().zip(heads));
    SynthGraph {
        graph,
        erased,
        balance_increments,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttributeRecipe {
    pub prevalence: f64,
    /// Target Pearson correlation between the attribute and out-degree.
    pub correlation: f64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct PlantedAttribute {
    pub attribute: Attribute,
    pub realized_correlation: f64,
    /// Logistic tilt on out-degree rank that produced it.
    pub tilt: f64,
}

const MAX_TILT: f64 = 400.0;
const PLANTING_STREAM: u64 = 1;

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Intercept `c` with `sum_v logistic(tilt * z_v + c) = target`.
fn calibrate_intercept(z: &[f64], tilt: f64, target: f64) -> f64 {
    let mass = |c: f64| z.iter().map(|&zi| logistic(tilt * zi + c)).sum::<f64>();
    let (mut lo, mut hi) = (-1000.0, 1000.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if mass(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Plants a binary attribute whose holders are tilted toward high (or low)
/// out-degree nodes.
///
/// Node `v` holds the attribute when `u_v < logistic(tilt * z_v + c)`, where
/// `z_v` is the centred out-degree rank (ties share their mean rank), `u_v`
/// is a fixed uniform draw and `c` keeps the expected prevalence at `p`. The
/// tilt is found by bisection on the realised correlation.
pub fn plant_attribute(graph: &DirectedGraph, recipe: &AttributeRecipe, name: &str) -> Result<PlantedAttribute> {
    let p = recipe.prevalence;
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "prevalence {p} must lie strictly between 0 and 1"
        )));
    }
    if !(-1.0..=1.0).contains(&recipe.correlation) {
        return Err(Error::InvalidArgument(format!(
            "correlation target {} outside [-1, 1]",
            recipe.correlation
        )));
    }
    let n = graph.node_count();
    let od = graph.out_degrees();
    let od_f = as_f64(&od);
    let z = centred_ranks(&od);
    // separate stream, so a graph and an attribute sharing a seed stay independent
    let mut rng = ChaCha8Rng::seed_from_u64(recipe.seed);
    rng.set_stream(PLANTING_STREAM);
    let uniforms: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let target_mass = p * n as f64;

    let realise = |tilt: f64| -> (Vec<bool>, f64) {
        let c = calibrate_intercept(&z, tilt, target_mass);
        let members: Vec<bool> = z
            .iter()
            .zip(&uniforms)
            .map(|(&zi, &u)| u < logistic(tilt * zi + c))
            .collect();
        let f: Vec<f64> = members.iter().map(|&m| m as u8 as f64).collect();
        let rho = pearson(&f, &od_f);
        (members, rho)
    };

    let target = recipe.correlation;
    let done = |tilt: f64, (members, rho): (Vec<bool>, f64)| PlantedAttribute {
        attribute: Attribute::new(name, members),
        realized_correlation: rho,
        tilt,
    };
    if target == 0.0 {
        return Ok(done(0.0, realise(0.0)));
    }
    let direction = target.signum();
    let extreme = realise(direction * MAX_TILT);
    if extreme.1 * direction < target.abs() * 0.999 {
        return Err(Error::UnreachableCorrelation {
            target,
            max_abs: (extreme.1 * direction).max(0.0),
        });
    }
    let (mut lo, mut hi) = (0.0, MAX_TILT);
    let mut best = (direction * MAX_TILT, extreme);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let attempt = realise(direction * mid);
        let rho = attempt.1 * direction;
        if (attempt.1 - target).abs() < (best.1 .1 - target).abs() {
            best = (direction * mid, attempt);
        }
        if rho < target.abs() {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) < 1e-6 {
            break;
        }
    }
    Ok(done(best.0, best.1))
}

/// Ranks scaled to `[-1/2, 1/2]`, ties sharing their mean rank.
fn centred_ranks(values: &[usize]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| values[v]);
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let mean_rank = 0.5 * (i + j) as f64;
        for &v in &order[i..=j] {
            ranks[v] = mean_rank;
        }
        i = j + 1;
    }
    let centre = 0.5 * (n as f64 - 1.0);
    ranks.iter().map(|r| (r - centre) / n as f64).collect()
}

/// A batch of planted attributes with prevalence and correlation drawn
/// uniformly from ranges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttributeSuite {
    pub count: usize,
    pub prevalence: (f64, f64),
    pub correlation: (f64, f64),
    pub seed: u64,
}

/// Plants `suite.count` attributes named `attr000`, `attr001`, ...
pub fn plant_suite(graph: &DirectedGraph, suite: &AttributeSuite) -> Result<Vec<PlantedAttribute>> {
    let mut rng = ChaCha8Rng::seed_from_u64(suite.seed);
    let width = suite.count.saturating_sub(1).to_string().len().max(3);
    let mut draw = |(lo, hi): (f64, f64)| if hi > lo { rng.random_range(lo..hi) } else { lo };
    let recipes: Vec<AttributeRecipe> = (0..suite.count)
        .map(|i| AttributeRecipe {
            prevalence: draw(suite.prevalence),
            correlation: draw(suite.correlation),
            seed: suite.seed.wrapping_add(1 + i as u64),
        })
        .collect();
    recipes
        .iter()
        .enumerate()
        .map(|(i, r)| plant_attribute(graph, r, &format!("attr{i:0width$}")))
        .collect()
}

pub fn into_attribute_set(n: usize, planted: Vec<PlantedAttribute>) -> AttributeSet {
    let mut set = AttributeSet::new(n);
    for p in planted {
        set.insert(p.attribute);
    }
    set
}
