//! Posterior edge probabilities for the four Iris virginica measurements by
//! double reversible jump, four chains in parallel.
//!
//! ```bash
//! cargo run --release --example iris_structure -- 500000
//! ```

use gwishart::io::{compute_scatter, iris_virginica};
use gwishart::validate::{IRIS_ACCEPT_REFERENCE, IRIS_EDGE_REFERENCE};
use gwishart::{graph::pair_list, run_drj_chains, DrjConfig, GWishartParams, Graph, SpdMatrix};

fn main() -> gwishart::Result<()> {
    let recorded: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(200_000);
    let chains = 4;
    let iris = iris_virginica();
    let names = iris.variable_names.clone().unwrap_or_default();
    let scatter = compute_scatter(&iris, true);
    let prior = GWishartParams::new(3.0, SpdMatrix::identity(4))?;
    let cfg = DrjConfig {
        iters: recorded / chains + 5_000,
        burnin: 5_000,
        ..Default::default()
    };
    let (_, s) = run_drj_chains(&scatter.u, scatter.n, &prior, &Graph::empty(4), &cfg, chains)?;

    let e = s.edge_prob();
    println!("edge     posterior  reference");
    for ((i, j), reference) in pair_list(4).into_iter().zip(IRIS_EDGE_REFERENCE) {
        println!("{:>3}-{:<3}  {:>8.3}  {:>9.3}", names[i], names[j], e[(i, j)], reference);
    }
    println!("acceptance {:.3} (reference {IRIS_ACCEPT_REFERENCE})", s.accept_rate());

    let mut top = s.graph_freq().unwrap_or_default();
    top.sort_by(|a, b| b.1.total_cmp(&a.1));
    println!("most visited graphs:");
    for (g, f) in top.iter().take(3) {
        println!("  {f:.3}  {:?}", g.edge_list());
    }
    Ok(())
}
