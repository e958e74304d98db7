//! The four directed friendship-paradox variants.
//!
//! With `X` a random node, `Y` a random friend and `Z` a random follower,
//!
//! | gap                 | closed form              | sign                   |
//! |---------------------|--------------------------|------------------------|
//! | `E od(Y) - d`       | `Var od / d`             | always `>= 0`          |
//! | `E id(Z) - d`       | `Var id / d`             | always `>= 0`          |
//! | `E id(Y) - d`       | `cov(id, od) / d`        | sign of `cov(id, od)`  |
//! | `E od(Z) - d`       | `cov(id, od) / d`        | sign of `cov(id, od)`  |
//!
//! [`paradox_gaps`] computes every gap twice, once from the degree moments
//! and once as a direct expectation over the sampling distribution, and
//! fails if the two disagree.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{degree_summary, DirectedGraph};
use crate::stats::{self, CompensatedSum};

/// Relative tolerance for the closed-form / direct cross-check.
pub const CROSS_CHECK_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Gap {
    pub closed_form: f64,
    pub direct: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParadoxReport {
    pub mean_degree: f64,
    /// `E od(Y) - d`: friends have more followers.
    pub out_friend: Gap,
    /// `E id(Z) - d`: followers have more friends.
    pub in_follower: Gap,
    /// `E id(Y) - d`: friends have more friends.
    pub in_friend: Gap,
    /// `E od(Z) - d`: followers have more followers.
    pub out_follower: Gap,
}

impl ParadoxReport {
    /// `E od(Y) - d`, also called the magnitude of the friendship paradox.
    pub fn magnitude(&self) -> f64 {
        self.out_friend.closed_form
    }
}

/// Expected degrees of a random friend and a random follower.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NeighbourExpectations {
    pub friend_out_degree: f64,
    pub friend_in_degree: f64,
    pub follower_in_degree: f64,
    pub follower_out_degree: f64,
}

/// Closed-form neighbour expectations from published degree moments.
pub fn expectations_from_moments(
    mean_degree: f64,
    var_out: f64,
    var_in: f64,
    cov_in_out: f64,
) -> NeighbourExpectations {
    NeighbourExpectations {
        friend_out_degree: mean_degree + var_out / mean_degree,
        friend_in_degree: mean_degree + cov_in_out / mean_degree,
        follower_in_degree: mean_degree + var_in / mean_degree,
        follower_out_degree: mean_degree + cov_in_out / mean_degree,
    }
}

/// `sum_v x(v) * w(v) / sum w`, with compensated summation.
fn weighted_expectation(values: &[usize], weights: &[usize]) -> f64 {
    let total: usize = weights.iter().sum();
    let total = total as f64;
    let mut acc = CompensatedSum::new();
    for (&x, &w) in values.iter().zip(weights) {
        acc.add(x as f64 * (w as f64 / total));
    }
    acc.value()
}

pub fn paradox_gaps(graph: &DirectedGraph) -> Result<ParadoxReport> {
    if graph.edge_count() == 0 {
        return Err(Error::EmptyEdgeSet);
    }
    let summary = degree_summary(graph);
    let d = summary.mean_degree;
    let od = graph.out_degrees();
    let id = graph.in_degrees();

    let gap = |closed_form: f64, direct_expectation: f64, what: &str| -> Result<Gap> {
        let direct = direct_expectation - d;
        if !stats::close(closed_form, direct, CROSS_CHECK_TOLERANCE, d) {
            return Err(Error::Inconsistent(format!(
                "{what}: closed form {closed_form} vs direct {direct}"
            )));
        }
        Ok(Gap { closed_form, direct })
    };

    Ok(ParadoxReport {
        mean_degree: d,
        out_friend: gap(summary.var_out / d, weighted_expectation(&od, &od), "E od(Y)")?,
        in_follower: gap(summary.var_in / d, weighted_expectation(&id, &id), "E id(Z)")?,
        in_friend: gap(summary.cov_in_out / d, weighted_expectation(&id, &od), "E id(Y)")?,
        out_follower: gap(summary.cov_in_out / d, weighted_expectation(&od, &id), "E od(Z)")?,
    })
}

/// Which neighbours are compared, and on which degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Mean out-degree of friends exceeds own out-degree.
    FriendsMoreFollowers,
    /// Mean in-degree of followers exceeds own in-degree.
    FollowersMoreFriends,
    /// Mean in-degree of friends exceeds own in-degree.
    FriendsMoreFriends,
    /// Mean out-degree of followers exceeds own out-degree.
    FollowersMoreFollowers,
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant::FriendsMoreFollowers,
        Variant::FollowersMoreFriends,
        Variant::FriendsMoreFriends,
        Variant::FollowersMoreFollowers,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::FriendsMoreFollowers => "friends-more-followers",
            Variant::FollowersMoreFriends => "followers-more-friends",
            Variant::FriendsMoreFriends => "friends-more-friends",
            Variant::FollowersMoreFollowers => "followers-more-followers",
        }
    }

    fn over_friends(self) -> bool {
        matches!(self, Variant::FriendsMoreFollowers | Variant::FriendsMoreFriends)
    }

    fn compares_out_degree(self) -> bool {
        matches!(self, Variant::FriendsMoreFollowers | Variant::FollowersMoreFollowers)
    }

    /// Degree on the curve's x-axis: in-degree for friend variants,
    /// out-degree for follower variants.
    pub fn axis_degree(self, graph: &DirectedGraph, v: usize) -> usize {
        if self.over_friends() {
            graph.in_degree(v)
        } else {
            graph.out_degree(v)
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown paradox variant `{s}`")))
    }
}

/// Whether `v` experiences the paradox: the mean degree over its friends (or
/// followers) strictly exceeds its own. `None` when that neighbour set is
/// empty.
pub fn node_experiences_paradox(graph: &DirectedGraph, v: usize, variant: Variant) -> Option<bool> {
    let neighbours = if variant.over_friends() {
        graph.friends(v)
    } else {
        graph.followers(v)
    };
    if neighbours.is_empty() {
        return None;
    }
    let degree = |u: usize| {
        if variant.compares_out_degree() {
            graph.out_degree(u)
        } else {
            graph.in_degree(u)
        }
    };
    // mean > own  <=>  sum > own * count, in integers
    let total: usize = neighbours.iter().map(|&u| degree(u)).sum();
    Some(total > degree(v) * neighbours.len())
}

/// Logarithmic degree bins.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Binning {
    pub bins_per_decade: u32,
}

impl Default for Binning {
    fn default() -> Self {
        Binning { bins_per_decade: 10 }
    }
}

impl Binning {
    fn edge(&self, k: i64) -> f64 {
        10f64.powf(k as f64 / self.bins_per_decade as f64)
    }

    /// Index `k` with `edge(k) <= degree < edge(k + 1)`; `degree >= 1`.
    fn bin_of(&self, degree: usize) -> i64 {
        let d = degree as f64;
        let mut k = (d.log10() * self.bins_per_decade as f64).floor() as i64;
        while self.edge(k + 1) <= d {
            k += 1;
        }
        while self.edge(k) > d {
            k -= 1;
        }
        k
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveBin {
    pub bin_lo: f64,
    pub bin_hi: f64,
    pub n_nodes: usize,
    pub fraction: f64,
}

/// Per-degree fraction of nodes experiencing one paradox variant. Only
/// non-empty bins are listed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParadoxCurve {
    pub variant: Variant,
    pub eligible: usize,
    pub experiencing: usize,
    pub bins: Vec<CurveBin>,
}

impl ParadoxCurve {
    /// Fraction of all eligible nodes that experience the paradox.
    pub fn overall_fraction(&self) -> f64 {
        self.experiencing as f64 / self.eligible as f64
    }
}

pub fn paradox_curve(graph: &DirectedGraph, variant: Variant, binning: &Binning) -> Result<ParadoxCurve> {
    if binning.bins_per_decade == 0 {
        return Err(Error::InvalidArgument("bins per decade must be positive".into()));
    }
    let mut per_bin: std::collections::BTreeMap<i64, (usize, usize)> = Default::default();
    let (mut eligible, mut experiencing) = (0, 0);
    for v in 0..graph.node_count() {
        let Some(hit) = node_experiences_paradox(graph, v, variant) else {
            continue;
        };
        // eligible nodes have a non-empty neighbour set, so the axis degree is >= 1
        let entry = per_bin
            .entry(binning.bin_of(variant.axis_degree(graph, v)))
            .or_default();
        entry.0 += 1;
        eligible += 1;
        if hit {
            entry.1 += 1;
            experiencing += 1;
        }
    }
    if eligible == 0 {
        return Err(Error::Degenerate(format!("no node is eligible for {}", variant.name())));
    }
    let bins = per_bin
        .into_iter()
        .map(|(k, (n, hits))| CurveBin {
            bin_lo: binning.edge(k),
            bin_hi: binning.edge(k + 1),
            n_nodes: n,
            fraction: hits as f64 / n as f64,
        })
        .collect();
    Ok(ParadoxCurve {
        variant,
        eligible,
        experiencing,
        bins,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;

    #[test]
    fn star_gaps() {
        let r = paradox_gaps(&star()).unwrap();
        // Y is a point mass on the hub: E od(Y) = 2, d = 2/3
        assert!((r.out_friend.closed_form - 4.0 / 3.0).abs() < 1e-12);
        assert!((r.out_friend.direct - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn cycle_has_no_gaps() {
        let r = paradox_gaps(&cycle3()).unwrap();
        for g in [r.out_friend, r.in_follower, r.in_friend, r.out_follower] {
            assert_eq!(g.closed_form, 0.0);
            assert!(g.direct.abs() < 1e-15);
        }
    }

    #[test]
    fn empty_edge_set() {
        let (g, _) = DirectedGraph::from_index_edges(2, []);
        assert!(matches!(paradox_gaps(&g), Err(Error::EmptyEdgeSet)));
    }

    #[test]
    fn published_moments() {
        let e = expectations_from_moments(123.55, 30096.16, 24338.66, 14226.32);
        assert!((e.friend_out_degree - 367.14).abs() < 0.02);
        assert!((e.follower_in_degree - 320.54).abs() < 0.02);
        assert!((e.friend_in_degree - 238.68).abs() < 0.02);
        assert_eq!(e.friend_in_degree, e.follower_out_degree);
    }

    #[test]
    fn negative_coupling_flips_theorem_two_gaps() {
        // hub 0 has many followers but one friend; leaves follow the hub and
        // each other in a ring
        let mut edges = vec![(5, 0)];
        for v in 1..=5 {
            edges.push((0, v));
        }
        for v in 1..5 {
            edges.push((v, v + 1));
        }
        let (g, _) = DirectedGraph::from_index_edges(6, edges);
        let s = degree_summary(&g);
        assert!(s.cov_in_out < 0.0);
        let r = paradox_gaps(&g).unwrap();
        assert!(r.in_friend.closed_form < 0.0);
        assert!(r.out_follower.direct < 0.0);
        assert!(r.out_friend.closed_form >= 0.0);
    }

    #[test]
    fn per_node_checks() {
        let s = star();
        assert_eq!(
            node_experiences_paradox(&s, 1, Variant::FriendsMoreFollowers),
            Some(true)
        );
        assert_eq!(node_experiences_paradox(&s, 0, Variant::FriendsMoreFollowers), None);
        let c = cycle3();
        for v in 0..3 {
            for variant in Variant::ALL {
                assert_eq!(node_experiences_paradox(&c, v, variant), Some(false));
            }
        }
        let g = g5();
        let b = g.index_of("b").unwrap();
        assert_eq!(node_experiences_paradox(&g, b, Variant::FriendsMoreFriends), Some(true));
    }

    #[test]
    fn cycle_curve_is_one_bin() {
        let c = paradox_curve(&cycle3(), Variant::FriendsMoreFollowers, &Binning::default()).unwrap();
        assert_eq!(c.bins.len(), 1);
        assert_eq!(c.bins[0].bin_lo, 1.0);
        assert_eq!(c.bins[0].n_nodes, 3);
        assert_eq!(c.bins[0].fraction, 0.0);
    }

    #[test]
    fn g5_curve_fraction() {
        let c = paradox_curve(&g5(), Variant::FriendsMoreFollowers, &Binning::default()).unwrap();
        assert_eq!(c.eligible, 3);
        assert_eq!(c.experiencing, 2);
        assert!((c.overall_fraction() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn bins_respect_decade_edges() {
        let b = Binning::default();
        assert_eq!(b.bin_of(1), 0);
        assert_eq!(b.bin_of(10), 10);
        assert_eq!(b.bin_of(100), 20);
        assert_eq!(b.bin_of(1000), 30);
        for d in 1..5000usize {
            let k = b.bin_of(d);
            assert!(b.edge(k) <= d as f64 && (d as f64) < b.edge(k + 1));
        }
    }

    #[test]
    fn variant_names_round_trip() {
        for v in Variant::ALL {
            assert_eq!(v.name().parse::<Variant>().unwrap(), v);
        }
    }
}
