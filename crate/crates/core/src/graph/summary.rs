use serde::Serialize;

use super::DirectedGraph;

/// Population degree moments over all nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DegreeSummary {
    pub n: usize,
    pub m: usize,
    pub mean_degree: f64,
    pub var_out: f64,
    pub var_in: f64,
    pub cov_in_out: f64,
    /// Pearson correlation of in- and out-degree; 0 when either degree
    /// sequence is constant.
    pub corr_in_out: f64,
}

/// `(n * sum(xy) - sum(x) * sum(y)) / n^2`, exact up to the final division.
pub(crate) fn integer_covariance(n: usize, xs: &[usize], ys: &[usize]) -> f64 {
    let sx: i128 = xs.iter().map(|&x| x as i128).sum();
    let sy: i128 = ys.iter().map(|&y| y as i128).sum();
    let sxy: i128 = xs.iter().zip(ys).map(|(&x, &y)| x as i128 * y as i128).sum();
    let numerator = n as i128 * sxy - sx * sy;
    numerator as f64 / (n as f64 * n as f64)
}

/// Degree moments of `graph`; `graph` must be non-empty.
///
/// Moments are taken with integer accumulators, so the only rounding is
/// the final division.
pub fn degree_summary(graph: &DirectedGraph) -> DegreeSummary {
    let n = graph.node_count();
    assert!(n > 0, "degree summary of an empty graph");
    let od = graph.out_degrees();
    let id = graph.in_degrees();
    let var_out = integer_covariance(n, &od, &od);
    let var_in = integer_covariance(n, &id, &id);
    let cov_in_out = integer_covariance(n, &id, &od);
    let corr_in_out = if var_out > 0.0 && var_in > 0.0 {
        (cov_in_out / (var_out.sqrt() * var_in.sqrt())).clamp(-1.0, 1.0)
    } else {
        0.0
    };
    DegreeSummary {
        n,
        m: graph.edge_count(),
        mean_degree: graph.mean_degree(),
        var_out,
        var_in,
        cov_in_out,
        corr_in_out,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::stats;

    #[test]
    fn g5_moments() {
        let s = degree_summary(&g5());
        assert_eq!(s.mean_degree, 4.0 / 3.0);
        assert!((s.var_out - 2.0 / 9.0).abs() < 1e-15);
        assert!((s.var_in - 2.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn regular_graph_has_no_spread() {
        let s = degree_summary(&cycle3());
        assert_eq!(s.mean_degree, 1.0);
        assert_eq!((s.var_out, s.var_in, s.cov_in_out, s.corr_in_out), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn moment_formula_matches_two_pass() {
        let g = crate::graph::DirectedGraph::from_index_edges(
            6,
            [(0, 1), (0, 2), (0, 3), (1, 0), (2, 0), (3, 4), (4, 5), (5, 0), (2, 5)],
        )
        .0;
        let s = degree_summary(&g);
        let od: Vec<f64> = g.out_degrees().iter().map(|&d| d as f64).collect();
        let id: Vec<f64> = g.in_degrees().iter().map(|&d| d as f64).collect();
        assert!(stats::close(
            s.cov_in_out,
            stats::population_covariance(&id, &od),
            1e-9,
            1e-12
        ));
        assert!(stats::close(s.var_out, stats::population_variance(&od), 1e-9, 1e-12));
    }

    #[test]
    fn published_moments_predict_friend_out_degree() {
        // mean 123.55 and out-degree variance 30096.16
        let predicted: f64 = 123.55 + 30096.16 / 123.55;
        assert!((predicted - 367.14).abs() < 0.01);
    }
}
