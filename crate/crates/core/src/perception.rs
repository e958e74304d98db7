//! Global and local perception bias of binary attributes.
//!
//! A node's perception `q_f(v)` is the fraction of its friends holding the
//! attribute. The global bias compares a random friend with a random node,
//! `E f(Y) - E f(X) = cov(f, od) / d`; the local bias compares the mean
//! perception with the prevalence, `E q_f(X) - E f(X)`.
//!
//! Over a uniformly random link `(U, V)` with attention `A(V) = 1 / id(V)`,
//! `E q_f(X) = d * E[f(U) A(V)]` whenever every node has a friend, and then
//! `B_local - B_global = d * cov(f(U), A(V))`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{degree_summary, Attribute, AttributeSet, DirectedGraph};
use crate::stats::{self, CompensatedSum};

/// Absolute tolerance under which the link covariance counts as zero.
pub const EDGE_COVARIANCE_ZERO: f64 = 1e-9;

/// `q_f(v)`, or `None` when `v` has no friends.
pub fn node_perception(graph: &DirectedGraph, attr: &Attribute, v: usize) -> Option<f64> {
    let friends = graph.friends(v);
    if friends.is_empty() {
        return None;
    }
    let holders = friends.iter().filter(|&&u| attr.has(u)).count();
    Some(holders as f64 / friends.len() as f64)
}

/// Per-node perceptions; `None` where a node has no friends.
#[derive(Debug, Clone, PartialEq)]
pub struct PerceptionVector {
    pub values: Vec<Option<f64>>,
}

impl PerceptionVector {
    pub fn new(graph: &DirectedGraph, attr: &Attribute) -> Self {
        PerceptionVector {
            values: (0..graph.node_count())
                .map(|v| node_perception(graph, attr, v))
                .collect(),
        }
    }

    pub fn undefined_count(&self) -> usize {
        self.values.iter().filter(|q| q.is_none()).count()
    }

    pub fn defined(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().flatten().copied()
    }
}

/// How nodes without friends enter the mean perception.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZeroFriendPolicy {
    /// Average over nodes with at least one friend.
    #[default]
    Exclude,
    /// Count friendless nodes as perceiving 0.
    TreatAsZero,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasReport {
    pub attribute: String,
    /// `E f(X)`
    pub global_prevalence: f64,
    /// `E f(Y)`
    pub friend_prevalence: f64,
    pub b_global: f64,
    pub b_local: f64,
    /// `E q_f(X)` under `policy`
    pub mean_local_perception: f64,
    /// `cov(f(X), od(X))`
    pub cov_f_od: f64,
    /// Pearson correlation of `f` and out-degree; 0 if either is constant.
    pub corr_f_od: f64,
    pub sigma_od: f64,
    pub sigma_f: f64,
    /// `cov(f(U), A(V))` over uniformly random links.
    pub cov_edge: f64,
    /// `d * E[f(U) A(V)]`; equals the mean perception when no node is excluded.
    pub edge_mean_perception: f64,
    /// Nodes without friends.
    pub n_excluded: usize,
    pub policy: ZeroFriendPolicy,
}

impl BiasReport {
    /// The link identity for the mean perception holds only when every node
    /// has a friend.
    pub fn edge_identity_applicable(&self) -> bool {
        self.n_excluded == 0
    }

    /// Both covariance conditions for `B_local >= B_global >= 0` hold.
    pub fn sufficient_conditions_hold(&self) -> bool {
        self.cov_f_od >= 0.0 && self.cov_edge >= 0.0
    }

    /// `cov(f(U), A(V))` is zero within [`EDGE_COVARIANCE_ZERO`].
    pub fn edge_uncorrelated(&self) -> bool {
        self.cov_edge.abs() <= EDGE_COVARIANCE_ZERO
    }

    pub const CSV_HEADER: &'static str = "attribute,global_prevalence,friend_prevalence,b_global,b_local,\
mean_local_perception,cov_f_od,corr_f_od,sigma_od,sigma_f,cov_edge,edge_mean_perception,n_excluded";

    /// Numeric columns in [`Self::CSV_HEADER`] order, after the name.
    pub fn csv_values(&self) -> [f64; 11] {
        [
            self.global_prevalence,
            self.friend_prevalence,
            self.b_global,
            self.b_local,
            self.mean_local_perception,
            self.cov_f_od,
            self.corr_f_od,
            self.sigma_od,
            self.sigma_f,
            self.cov_edge,
            self.edge_mean_perception,
        ]
    }
}

pub fn bias_report(graph: &DirectedGraph, attr: &Attribute, policy: ZeroFriendPolicy) -> Result<BiasReport> {
    let m = graph.edge_count();
    if m == 0 {
        return Err(Error::EmptyEdgeSet);
    }
    let n = graph.node_count();
    let d = graph.mean_degree();
    let od = graph.out_degrees();

    let global_prevalence = attr.prevalence();
    let holders_out: usize = attr.holders().map(|v| od[v]).sum();
    let friend_prevalence = holders_out as f64 / m as f64;

    let f_int: Vec<usize> = attr.members().iter().map(|&b| b as usize).collect();
    let cov_f_od = crate::graph::summary_covariance(n, &f_int, &od);
    let sigma_od = degree_summary(graph).var_out.sqrt();
    let sigma_f = (global_prevalence * (1.0 - global_prevalence)).sqrt();
    let corr_f_od = if sigma_od > 0.0 && sigma_f > 0.0 {
        (cov_f_od / (sigma_od * sigma_f)).clamp(-1.0, 1.0)
    } else {
        0.0
    };

    let perceptions = PerceptionVector::new(graph, attr);
    let n_excluded = perceptions.undefined_count();
    let mean_local_perception = match policy {
        ZeroFriendPolicy::Exclude => {
            let defined = n - n_excluded;
            if defined == 0 {
                return Err(Error::Degenerate("no node has a friend".into()));
            }
            stats::sum(perceptions.defined()) / defined as f64
        }
        ZeroFriendPolicy::TreatAsZero => stats::sum(perceptions.defined()) / n as f64,
    };

    // link moments, straight from the edge list
    let (mut fa, mut f_u, mut a_v) = (CompensatedSum::new(), CompensatedSum::new(), CompensatedSum::new());
    for (u, v) in graph.edges() {
        let attention = 1.0 / graph.in_degree(v) as f64;
        let fu = attr.value(u);
        fa.add(fu * attention);
        f_u.add(fu);
        a_v.add(attention);
    }
    let m_f = m as f64;
    let e_fa = fa.value() / m_f;
    let cov_edge = e_fa - (f_u.value() / m_f) * (a_v.value() / m_f);

    Ok(BiasReport {
        attribute: attr.name().to_owned(),
        global_prevalence,
        friend_prevalence,
        b_global: friend_prevalence - global_prevalence,
        b_local: mean_local_perception - global_prevalence,
        mean_local_perception,
        cov_f_od,
        corr_f_od,
        sigma_od,
        sigma_f,
        cov_edge,
        edge_mean_perception: d * e_fa,
        n_excluded,
        policy,
    })
}

/// Bias reports for every attribute, in set order.
pub fn bias_reports(graph: &DirectedGraph, attrs: &AttributeSet, policy: ZeroFriendPolicy) -> Result<Vec<BiasReport>> {
    attrs
        .iter()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|a| bias_report(graph, a, policy))
        .collect()
}

/// Individual-level bias `q_f(v) - E f(X)` for nodes with friends.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndividualBias {
    pub attribute: String,
    pub values: Vec<Option<f64>>,
    pub n_positive: usize,
    pub n_negative: usize,
    pub n_zero: usize,
    pub mean: f64,
}

impl IndividualBias {
    pub fn defined(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().flatten().copied()
    }
}

pub fn individual_bias(graph: &DirectedGraph, attr: &Attribute) -> IndividualBias {
    let p = attr.prevalence();
    let values: Vec<Option<f64>> = PerceptionVector::new(graph, attr)
        .values
        .into_iter()
        .map(|q| q.map(|q| q - p))
        .collect();
    let defined: Vec<f64> = values.iter().flatten().copied().collect();
    IndividualBias {
        attribute: attr.name().to_owned(),
        n_positive: defined.iter().filter(|&&b| b > 0.0).count(),
        n_negative: defined.iter().filter(|&&b| b < 0.0).count(),
        n_zero: defined.iter().filter(|&&b| b == 0.0).count(),
        mean: if defined.is_empty() { 0.0 } else { stats::mean(&defined) },
        values,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RankKey {
    Local,
    Global,
}

impl std::str::FromStr for RankKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "local" => Ok(RankKey::Local),
            "global" => Ok(RankKey::Global),
            _ => Err(Error::InvalidArgument(format!("unknown rank key `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RankSection {
    Top,
    Bottom,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedAttribute {
    /// 1-based position in the full descending order.
    pub rank: usize,
    pub section: RankSection,
    pub attribute: String,
    pub key_value: f64,
    pub global_prevalence: f64,
    /// Mean local perception for the local key, friend prevalence for the
    /// global key.
    pub perceived: f64,
    pub b_global: f64,
    pub b_local: f64,
}

impl RankedAttribute {
    /// `#name: perceived 12.1%, actual 3.1%`
    pub fn render(&self) -> String {
        format!(
            "#{}: perceived {:.1}%, actual {:.1}%",
            self.attribute,
            self.perceived * 100.0,
            self.global_prevalence * 100.0
        )
    }
}

/// Orders reports by the chosen bias, descending, ties by name.
pub fn rank_reports(reports: &[BiasReport], key: RankKey, top_k: usize, bottom_k: usize) -> Vec<RankedAttribute> {
    let value = |r: &BiasReport| match key {
        RankKey::Local => r.b_local,
        RankKey::Global => r.b_global,
    };
    let mut order: Vec<&BiasReport> = reports.iter().collect();
    order.sort_by(|a, b| {
        value(b)
            .total_cmp(&value(a))
            .then_with(|| a.attribute.cmp(&b.attribute))
    });
    let n = order.len();
    let top = top_k.min(n);
    let bottom_start = n - bottom_k.min(n - top);
    order
        .into_iter()
        .enumerate()
        .filter(|&(i, _)| i < top || i >= bottom_start)
        .map(|(i, r)| RankedAttribute {
            rank: i + 1,
            section: if i < top { RankSection::Top } else { RankSection::Bottom },
            attribute: r.attribute.clone(),
            key_value: value(r),
            global_prevalence: r.global_prevalence,
            perceived: match key {
                RankKey::Local => r.mean_local_perception,
                RankKey::Global => r.friend_prevalence,
            },
            b_global: r.b_global,
            b_local: r.b_local,
        })
        .collect()
}

pub fn rank_attributes(
    graph: &DirectedGraph,
    attrs: &AttributeSet,
    key: RankKey,
    top_k: usize,
    bottom_k: usize,
) -> Result<Vec<RankedAttribute>> {
    if attrs.is_empty() {
        return Err(Error::InvalidArgument("no attributes to rank".into()));
    }
    let reports = bias_reports(graph, attrs, ZeroFriendPolicy::Exclude)?;
    Ok(rank_reports(&reports, key, top_k, bottom_k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;

    fn attr_on(g: &DirectedGraph, name: &str, labels: &[&str]) -> Attribute {
        Attribute::from_indices(name, g.node_count(), labels.iter().map(|l| g.index_of(l).unwrap()))
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn g5_perceptions() {
        let g = g5();
        let f = attr_on(&g, "f", &["a"]);
        let q = |l: &str| node_perception(&g, &f, g.index_of(l).unwrap());
        assert_eq!((q("a"), q("b"), q("c")), (Some(0.0), Some(1.0), Some(1.0)));
        assert_eq!(node_perception(&star(), &Attribute::constant("z", 3, true), 0), None);
    }

    #[test]
    fn g5_report() {
        let g = g5();
        let r = bias_report(&g, &attr_on(&g, "f", &["a"]), ZeroFriendPolicy::Exclude).unwrap();
        assert!(close(r.global_prevalence, 1.0 / 3.0));
        assert!(close(r.friend_prevalence, 0.5));
        assert!(close(r.b_global, 1.0 / 6.0));
        assert!(close(r.mean_local_perception, 2.0 / 3.0));
        assert!(close(r.b_local, 1.0 / 3.0));
        // E[fA] = 0.5, E[f(U)] = 0.5, E[A(V)] = 0.75
        assert!(close(r.cov_edge, 0.125));
        assert!(r.sufficient_conditions_hold());
        assert!(r.b_local > r.b_global && r.b_global > 0.0);
        assert!(close(r.edge_mean_perception, r.mean_local_perception));
    }

    #[test]
    fn g3_is_the_equality_case() {
        let g = g3();
        let r = bias_report(&g, &attr_on(&g, "f", &["a"]), ZeroFriendPolicy::Exclude).unwrap();
        assert!(close(r.b_global, 1.0 / 6.0));
        assert!(close(r.b_local, 1.0 / 6.0));
        assert!(r.edge_uncorrelated());
    }

    #[test]
    fn constant_attribute_has_no_bias() {
        let g = g5();
        let r = bias_report(&g, &Attribute::constant("all", 3, true), ZeroFriendPolicy::Exclude).unwrap();
        assert_eq!(
            (r.global_prevalence, r.friend_prevalence, r.mean_local_perception),
            (1.0, 1.0, 1.0)
        );
        assert_eq!((r.b_global, r.b_local, r.corr_f_od), (0.0, 0.0, 0.0));
    }

    #[test]
    fn eq8_forms_agree() {
        let g = g3();
        let r = bias_report(&g, &attr_on(&g, "f", &["a"]), ZeroFriendPolicy::Exclude).unwrap();
        let d = g.mean_degree();
        assert!(close(r.b_global, r.cov_f_od / d));
        assert!(close(r.b_global, r.corr_f_od * r.sigma_od * r.sigma_f / d));
    }

    #[test]
    fn zero_friend_policies() {
        // star: node 0 has no friends, leaves see the hub
        let g = star();
        let f = Attribute::from_indices("hub", 3, [0]);
        let ex = bias_report(&g, &f, ZeroFriendPolicy::Exclude).unwrap();
        let zero = bias_report(&g, &f, ZeroFriendPolicy::TreatAsZero).unwrap();
        assert_eq!(ex.n_excluded, 1);
        assert!(!ex.edge_identity_applicable());
        assert!(close(ex.mean_local_perception, 1.0));
        assert!(close(zero.mean_local_perception, 2.0 / 3.0));
    }

    #[test]
    fn individual_bias_g5() {
        let g = g5();
        let b = individual_bias(&g, &attr_on(&g, "f", &["a"]));
        let at = |l: &str| b.values[g.index_of(l).unwrap()].unwrap();
        assert!(close(at("b"), 2.0 / 3.0));
        assert!(close(at("c"), 2.0 / 3.0));
        assert!(close(at("a"), -1.0 / 3.0));
        let none = individual_bias(&g, &Attribute::constant("none", 3, false));
        assert!(none.defined().all(|x| x == 0.0));
    }

    #[test]
    fn majority_illusion_star() {
        // hub with the attribute, followed by every leaf
        let n = 8;
        let (g, _) = DirectedGraph::from_index_edges(n, (1..n).map(|v| (0, v)));
        let f = Attribute::from_indices("hub", n, [0]);
        let b = individual_bias(&g, &f);
        for v in 1..n {
            assert!(close(b.values[v].unwrap(), 1.0 - 1.0 / n as f64));
        }
        assert_eq!(b.values[0], None);
    }

    #[test]
    fn ranking_g5() {
        let g = g5();
        let mut set = AttributeSet::new(3);
        set.insert(attr_on(&g, "f2", &["b"]));
        set.insert(attr_on(&g, "f1", &["a"]));
        let ranked = rank_attributes(&g, &set, RankKey::Local, 20, 10).unwrap();
        assert_eq!(
            ranked.iter().map(|r| r.attribute.as_str()).collect::<Vec<_>>(),
            vec!["f1", "f2"]
        );
        assert!(close(ranked[1].key_value, -1.0 / 6.0));

        let mut single = AttributeSet::new(3);
        single.insert(attr_on(&g, "only", &["a"]));
        assert_eq!(rank_attributes(&g, &single, RankKey::Global, 1, 1).unwrap().len(), 1);
    }

    #[test]
    fn ranking_ties_break_by_name() {
        let g = g5();
        let mut set = AttributeSet::new(3);
        set.insert(attr_on(&g, "zeta", &["b"]));
        set.insert(attr_on(&g, "alpha", &["c"]));
        let ranked = rank_attributes(&g, &set, RankKey::Local, 2, 0).unwrap();
        assert_eq!(ranked[0].attribute, "alpha");
    }

    #[test]
    fn top_and_bottom_sections() {
        let reports: Vec<BiasReport> = (0..6)
            .map(|i| BiasReport {
                attribute: format!("h{i}"),
                global_prevalence: 0.0,
                friend_prevalence: 0.0,
                b_global: 0.0,
                b_local: i as f64,
                mean_local_perception: 0.0,
                cov_f_od: 0.0,
                corr_f_od: 0.0,
                sigma_od: 0.0,
                sigma_f: 0.0,
                cov_edge: 0.0,
                edge_mean_perception: 0.0,
                n_excluded: 0,
                policy: ZeroFriendPolicy::Exclude,
            })
            .collect();
        let ranked = rank_reports(&reports, RankKey::Local, 2, 1);
        let names: Vec<_> = ranked
            .iter()
            .map(|r| (r.attribute.as_str(), r.rank, r.section))
            .collect();
        assert_eq!(
            names,
            vec![
                ("h5", 1, RankSection::Top),
                ("h4", 2, RankSection::Top),
                ("h0", 6, RankSection::Bottom)
            ]
        );
    }

    #[test]
    fn render_shows_both_values() {
        let row = RankedAttribute {
            rank: 1,
            section: RankSection::Top,
            attribute: "ferguson".into(),
            key_value: 0.09,
            global_prevalence: 0.031,
            perceived: 0.121,
            b_global: 0.0,
            b_local: 0.09,
        };
        assert_eq!(row.render(), "#ferguson: perceived 12.1%, actual 3.1%");
    }
}
