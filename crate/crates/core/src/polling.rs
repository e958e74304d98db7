//! Estimating an attribute's prevalence by polling.
//!
//! * intent polling (IP) asks `b` random nodes whether they hold the
//!   attribute;
//! * node perception polling (NPP) asks `b` random nodes what fraction of
//!   their friends hold it;
//! * follower perception polling (FPP) asks `b` random followers the same
//!   question;
//! * the reweighted follower estimator asks each follower `v` for
//!   `sum_{u in Fr(v)} f(u) / od(u)` and scales it by `1 / (N p_v)`, which
//!   removes the bias of FPP.
//!
//! Every method reduces to "draw `b` nodes i.i.d. from a sampling law and
//! average a per-node response", so a [`Poller`] stores the law and the
//! responses. The same data gives the exact mean and single-draw variance by
//! enumeration.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Attribute, AttributeSet, DirectedGraph};
use crate::perception::node_perception;
use crate::sampling::{NodeSampler, RandomStream, SamplingMode};
use crate::stats::{self, CompensatedSum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum PollMethod {
    #[serde(rename = "ip")]
    Ip,
    #[serde(rename = "npp")]
    Npp,
    #[serde(rename = "fpp")]
    Fpp,
    #[serde(rename = "fpp-unbiased")]
    FppUnbiased,
}

impl PollMethod {
    pub const ALL: [PollMethod; 4] = [
        PollMethod::Ip,
        PollMethod::Npp,
        PollMethod::Fpp,
        PollMethod::FppUnbiased,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PollMethod::Ip => "ip",
            PollMethod::Npp => "npp",
            PollMethod::Fpp => "fpp",
            PollMethod::FppUnbiased => "fpp-unbiased",
        }
    }
}

impl std::fmt::Display for PollMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for PollMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PollMethod::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown polling method `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PollSpec {
    pub method: PollMethod,
    pub budget: usize,
    pub seed: u64,
}

/// Exact moments of a single response under the method's sampling law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResponseMoments {
    pub mean: f64,
    pub variance: f64,
    /// Fourth central moment, for error bands on sample variances.
    pub fourth_central: f64,
}

/// A polling method prepared for one graph and attribute.
#[derive(Debug, Clone)]
pub struct Poller {
    method: PollMethod,
    sampler: NodeSampler,
    responses: Vec<f64>,
    excluded: usize,
}

impl Poller {
    pub fn new(graph: &DirectedGraph, attr: &Attribute, method: PollMethod) -> Result<Self> {
        let n = graph.node_count();
        if attr.node_count() != n {
            return Err(Error::InvalidArgument("attribute and graph sizes differ".into()));
        }
        let perceptions = || {
            (0..n)
                .map(|v| node_perception(graph, attr, v).unwrap_or(0.0))
                .collect::<Vec<f64>>()
        };
        let (sampler, responses, excluded) = match method {
            PollMethod::Ip => (
                NodeSampler::new(graph, SamplingMode::Uniform)?,
                (0..n).map(|v| attr.value(v)).collect(),
                0,
            ),
            PollMethod::Npp => {
                // friendless nodes have no perception: redraw them, i.e.
                // sample uniformly over nodes with a friend
                let weights: Vec<u64> = (0..n).map(|v| (graph.in_degree(v) > 0) as u64).collect();
                let excluded = weights.iter().filter(|&&w| w == 0).count();
                let sampler = NodeSampler::from_weights(weights)
                    .map_err(|_| Error::Degenerate("node perception polling needs a node with a friend".into()))?;
                (sampler, perceptions(), excluded)
            }
            PollMethod::Fpp => (follower_sampler(graph)?, perceptions(), 0),
            PollMethod::FppUnbiased => {
                let m = graph.edge_count() as f64;
                let responses = (0..n)
                    .map(|v| {
                        let friends = graph.friends(v);
                        if friends.is_empty() {
                            return 0.0;
                        }
                        // od(u) >= 1 because v follows u
                        let weighted: f64 = friends
                            .iter()
                            .filter(|&&u| attr.has(u))
                            .map(|&u| 1.0 / graph.out_degree(u) as f64)
                            .sum();
                        // 1 / (N p_v) with p_v = id(v) / M
                        weighted * m / (n as f64 * friends.len() as f64)
                    })
                    .collect();
                (follower_sampler(graph)?, responses, 0)
            }
        };
        Ok(Poller {
            method,
            sampler,
            responses,
            excluded,
        })
    }

    pub fn method(&self) -> PollMethod {
        self.method
    }

    /// Nodes that can never be polled (friendless nodes under NPP).
    pub fn excluded(&self) -> usize {
        self.excluded
    }

    pub fn sampler(&self) -> &NodeSampler {
        &self.sampler
    }

    /// The answer node `v` gives.
    pub fn response(&self, v: usize) -> f64 {
        self.responses[v]
    }

    /// One poll of `budget` i.i.d. respondents.
    pub fn poll_once<R: Rng + ?Sized>(&self, budget: usize, rng: &mut R) -> f64 {
        let mut total = 0.0;
        for _ in 0..budget {
            total += self.responses[self.sampler.sample(rng)];
        }
        total / budget as f64
    }

    /// Exact single-response moments by enumeration over the nodes.
    pub fn exact_moments(&self) -> ResponseMoments {
        let p = self.sampler.probabilities();
        let mean = stats::sum(p.iter().zip(&self.responses).map(|(p, r)| p * r));
        let mut second = CompensatedSum::new();
        let mut fourth = CompensatedSum::new();
        for (p, r) in p.iter().zip(&self.responses) {
            let c2 = (r - mean) * (r - mean);
            second.add(p * c2);
            fourth.add(p * c2 * c2);
        }
        ResponseMoments {
            mean,
            variance: second.value(),
            fourth_central: fourth.value(),
        }
    }
}

fn follower_sampler(graph: &DirectedGraph) -> Result<NodeSampler> {
    NodeSampler::new(graph, SamplingMode::InDegree)
        .map_err(|_| Error::Degenerate("follower polling needs at least one link".into()))
}

/// One poll of the given method on stream `stream`.
pub fn poll_once(graph: &DirectedGraph, attr: &Attribute, spec: &PollSpec, stream: &mut RandomStream) -> Result<f64> {
    if spec.budget == 0 {
        return Err(Error::InvalidArgument("budget must be at least 1".into()));
    }
    Ok(Poller::new(graph, attr, spec.method)?.poll_once(spec.budget, stream))
}

/// Monte-Carlo summary of repeated polls.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PollEvaluation {
    pub method: PollMethod,
    pub attribute: String,
    pub budget: usize,
    pub trials: usize,
    pub seed: u64,
    /// `E f(X)`, the quantity being estimated.
    pub target: f64,
    pub mean_estimate: f64,
    pub bias: f64,
    pub bias_squared: f64,
    pub variance: f64,
    pub mse: f64,
    pub excluded_respondents: usize,
}

/// Runs `trials` polls; trial `t` uses stream `(seed, t)`, so results do not
/// depend on how trials are spread over threads.
pub fn evaluate_poller(poller: &Poller, attr: &Attribute, spec: &PollSpec, trials: usize) -> Result<PollEvaluation> {
    if trials < 2 {
        return Err(Error::InvalidArgument("need at least two trials".into()));
    }
    if spec.budget == 0 {
        return Err(Error::InvalidArgument("budget must be at least 1".into()));
    }
    let estimates: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|t| poller.poll_once(spec.budget, &mut RandomStream::new(spec.seed, t)))
        .collect();
    let target = attr.prevalence();
    let mean_estimate = stats::mean(&estimates);
    let bias = mean_estimate - target;
    let variance = stats::population_variance(&estimates);
    Ok(PollEvaluation {
        method: spec.method,
        attribute: attr.name().to_owned(),
        budget: spec.budget,
        trials,
        seed: spec.seed,
        target,
        mean_estimate,
        bias,
        bias_squared: bias * bias,
        variance,
        mse: bias * bias + variance,
        excluded_respondents: poller.excluded(),
    })
}

pub fn evaluate(graph: &DirectedGraph, attr: &Attribute, spec: &PollSpec, trials: usize) -> Result<PollEvaluation> {
    evaluate_poller(&Poller::new(graph, attr, spec.method)?, attr, spec, trials)
}

/// Exact bias and variance of a `budget`-respondent poll.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactEvaluation {
    pub method: PollMethod,
    pub attribute: String,
    pub budget: usize,
    pub target: f64,
    pub expectation: f64,
    pub bias: f64,
    pub bias_squared: f64,
    pub variance: f64,
    pub mse: f64,
}

pub fn exact_evaluation(
    graph: &DirectedGraph,
    attr: &Attribute,
    method: PollMethod,
    budget: usize,
) -> Result<ExactEvaluation> {
    if budget == 0 {
        return Err(Error::InvalidArgument("budget must be at least 1".into()));
    }
    let moments = Poller::new(graph, attr, method)?.exact_moments();
    let target = attr.prevalence();
    let bias = moments.mean - target;
    let variance = moments.variance / budget as f64;
    Ok(ExactEvaluation {
        method,
        attribute: attr.name().to_owned(),
        budget,
        target,
        expectation: moments.mean,
        bias,
        bias_squared: bias * bias,
        variance,
        mse: bias * bias + variance,
    })
}

/// Share of attributes on which FPP has strictly lower MSE than `baseline`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WinRow {
    pub budget: usize,
    pub method_pair: String,
    pub win_fraction: f64,
    pub n_attrs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub rows: Vec<WinRow>,
    /// Every evaluation, ordered by budget, attribute, then method.
    pub evaluations: Vec<PollEvaluation>,
}

pub const BASELINES: [PollMethod; 2] = [PollMethod::Ip, PollMethod::Npp];

/// Win fractions of FPP against each baseline, from evaluations that share
/// one budget.
pub fn win_rows(budget: usize, evaluations: &[PollEvaluation]) -> Vec<WinRow> {
    let fpp: Vec<&PollEvaluation> = evaluations.iter().filter(|e| e.method == PollMethod::Fpp).collect();
    BASELINES
        .iter()
        .map(|&base| {
            let mut wins = 0;
            for f in &fpp {
                let b = evaluations
                    .iter()
                    .find(|e| e.method == base && e.attribute == f.attribute)
                    .expect("baseline evaluated for every attribute");
                if f.mse < b.mse {
                    wins += 1;
                }
            }
            WinRow {
                budget,
                method_pair: format!("fpp_vs_{}", base.name()),
                win_fraction: wins as f64 / fpp.len() as f64,
                n_attrs: fpp.len(),
            }
        })
        .collect()
}

/// Evaluates IP, NPP and FPP for every attribute and budget.
pub fn compare_methods(
    graph: &DirectedGraph,
    attrs: &AttributeSet,
    budgets: &[usize],
    trials: usize,
    seed: u64,
) -> Result<Comparison> {
    if attrs.is_empty() || budgets.is_empty() {
        return Err(Error::InvalidArgument(
            "need at least one attribute and one budget".into(),
        ));
    }
    let methods = [PollMethod::Ip, PollMethod::Npp, PollMethod::Fpp];
    let mut pollers = Vec::new();
    for attr in attrs {
        for method in methods {
            pollers.push((attr, Poller::new(graph, attr, method)?));
        }
    }
    let mut rows = Vec::new();
    let mut evaluations = Vec::new();
    for &budget in budgets {
        let evals = pollers
            .iter()
            .map(|(attr, poller)| {
                let spec = PollSpec {
                    method: poller.method(),
                    budget,
                    seed,
                };
                evaluate_poller(poller, attr, &spec, trials)
            })
            .collect::<Result<Vec<_>>>()?;
        rows.extend(win_rows(budget, &evals));
        evaluations.extend(evals);
    }
    Ok(Comparison { rows, evaluations })
}
