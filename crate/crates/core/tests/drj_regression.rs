//! Pins the acceptance-ratio form against exact enumeration. The literal
//! proposal exponent (`AsPrinted`) misweights the forward and reverse jump
//! densities and settles on the wrong graph posterior; `Derived` matches the
//! closed form.

use gwishart::io::{compute_scatter, generate_dataset};
use gwishart::{
    exact_graph_posterior, run_drj, run_drj_chains, AlphaVariant, DrjConfig, EdgePrior,
    GWishartParams, Graph, Matrix, RngStream, SpdMatrix,
};

fn total_variation(variant: AlphaVariant) -> f64 {
    let k = Matrix::from_row_slice(3, 3, &[1.0, 0.4, 0.0, 0.4, 1.0, 0.4, 0.0, 0.4, 1.0]);
    let data = generate_dataset(&k, 30, &mut RngStream::new(2024)).unwrap();
    let sc = compute_scatter(&data, false);
    let prior = GWishartParams::new(3.0, SpdMatrix::identity(3)).unwrap();
    let exact = exact_graph_posterior(&sc.u, sc.n, &prior, &EdgePrior::Uniform).unwrap();
    let cfg = DrjConfig {
        iters: 52_000,
        burnin: 2_000,
        seed: 11,
        alpha_variant: variant,
        ..Default::default()
    };
    let (_, s) = run_drj_chains(&sc.u, sc.n, &prior, &Graph::empty(3), &cfg, 4).unwrap();
    exact
        .iter()
        .map(|(g, p)| (s.frequency_of(g).unwrap() - p).abs())
        .sum::<f64>()
        / 2.0
}

#[test]
fn derived_ratio_targets_the_exact_posterior() {
    let derived = total_variation(AlphaVariant::Derived);
    let printed = total_variation(AlphaVariant::AsPrinted);
    assert!(derived < 0.02, "derived TV {derived}");
    assert!(printed > 0.08, "as-printed TV {printed}");
    assert_eq!(AlphaVariant::default(), AlphaVariant::Derived);
}

#[test]
fn bernoulli_edge_prior_is_respected_under_null_data() {
    // With n = 0 the chain samples the graph prior itself.
    let prior = GWishartParams::new(3.0, SpdMatrix::identity(3)).unwrap();
    let cfg = DrjConfig {
        iters: 201_000,
        burnin: 1_000,
        seed: 3,
        edge_prior: EdgePrior::Bernoulli(0.25),
        ..Default::default()
    };
    let s = run_drj(&Matrix::zeros(3, 3), 0, &prior, &Graph::empty(3), &cfg).unwrap();
    let e = s.edge_prob();
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        assert!((e[(i, j)] - 0.25).abs() < 0.01, "edge ({i},{j}) {}", e[(i, j)]);
    }
}

#[test]
fn chains_are_reproducible() {
    let prior = GWishartParams::new(3.0, SpdMatrix::identity(3)).unwrap();
    let u = Matrix::from_row_slice(3, 3, &[4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 5.0]);
    let cfg = DrjConfig {
        iters: 3_000,
        burnin: 500,
        ..Default::default()
    };
    let (_, a) = run_drj_chains(&u, 10, &prior, &Graph::empty(3), &cfg, 3).unwrap();
    let (_, b) = run_drj_chains(&u, 10, &prior, &Graph::empty(3), &cfg, 3).unwrap();
    assert_eq!(a.edge_prob(), b.edge_prob());
    assert_eq!(a.mean_k(), b.mean_k());
    assert_eq!(a.n_accepted(), b.n_accepted());
}
