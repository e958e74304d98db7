use dirparadox::graph::degree_summary;
use dirparadox::perception::{bias_report, ZeroFriendPolicy};
use dirparadox::synth::{generate_graph, plant_attribute, AttributeRecipe, Coupling, DegreeLaw, GraphRecipe};
use dirparadox::{DirectedGraph, Error};

fn powerlaw(exponent: f64, min_degree: usize, max_degree: usize, coupling: Coupling, seed: u64) -> DirectedGraph {
    generate_graph(&GraphRecipe {
        nodes: 2000,
        law: DegreeLaw::PowerLaw {
            exponent,
            min_degree,
            max_degree,
        },
        coupling,
        seed,
    })
    .unwrap()
    .graph
}

fn b_global(g: &DirectedGraph, prevalence: f64, correlation: f64, seed: u64) -> Result<f64, Error> {
    let planted = plant_attribute(
        g,
        &AttributeRecipe {
            prevalence,
            correlation,
            seed,
        },
        "f",
    )?;
    Ok(bias_report(g, &planted.attribute, ZeroFriendPolicy::Exclude)?.b_global)
}

#[test]
fn positive_target_on_heavy_tail_gives_positive_global_bias() {
    // rare attributes leave the most room for positive correlation
    let g = powerlaw(2.5, 1, 200, Coupling::Identical, 1);
    assert!(b_global(&g, 0.02, 0.5, 3).unwrap() > 0.0);
}

#[test]
fn negative_target_gives_negative_global_bias() {
    // narrow degree range and a common attribute: strongly negative correlations are reachable
    let g = powerlaw(2.0, 5, 15, Coupling::Identical, 2);
    assert!(b_global(&g, 0.5, -0.5, 4).unwrap() < 0.0);
}

#[test]
fn heavy_tail_caps_negative_correlation() {
    let g = powerlaw(2.2, 1, 500, Coupling::Identical, 1);
    match b_global(&g, 0.2, -0.5, 3) {
        Err(Error::UnreachableCorrelation { max_abs, .. }) => assert!(max_abs < 0.5),
        other => panic!("expected an unreachable-correlation error, got {other:?}"),
    }
}

#[test]
fn zero_target_has_global_bias_near_zero() {
    let g = powerlaw(2.5, 1, 200, Coupling::Identical, 5);
    let s = degree_summary(&g);
    let p = 0.2;
    let n = g.node_count() as f64;
    // sd of cov(f, od) for independent Bernoulli(p) membership
    let band = 4.0 * s.var_out.sqrt() * (p * (1.0 - p) / n).sqrt() / s.mean_degree;
    for seed in 0..20 {
        let b = b_global(&g, p, 0.0, seed).unwrap();
        assert!(b.abs() < band, "seed {seed}: {b} outside {band}");
    }
}

#[test]
fn signs_follow_recipes_across_seeds() {
    let mut matches = 0;
    let mut total = 0;
    for seed in 0..50 {
        let g = powerlaw(2.8, 2, 80, Coupling::Correlated(0.4), seed);
        total += 1;
        if degree_summary(&g).cov_in_out > 0.0 {
            matches += 1;
        }
        let g = powerlaw(3.5, 3, 20, Coupling::Correlated(-0.2), seed);
        total += 1;
        if degree_summary(&g).cov_in_out < 0.0 {
            matches += 1;
        }
        for (target, p) in [(0.2, 0.1), (-0.1, 0.3)] {
            let planted = plant_attribute(
                &g,
                &AttributeRecipe {
                    prevalence: p,
                    correlation: target,
                    seed,
                },
                "f",
            )
            .unwrap();
            total += 1;
            if planted.realized_correlation.signum() == f64::signum(target) {
                matches += 1;
            }
        }
    }
    assert!(matches as f64 >= 0.95 * total as f64, "{matches}/{total}");
}
