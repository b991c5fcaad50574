//! The G-Wishart mode and a check that it is a stationary point.

use gwishart::{gwishart_mode, log_unnorm_density, CompletionSettings, GWishartParams, Graph, SpdMatrix};

fn main() -> gwishart::Result<()> {
    let g = Graph::from_edge_list(4, &[(1, 2), (2, 3), (3, 4), (4, 1), (1, 3)])?;
    let d = SpdMatrix::from_rows(&[
        &[2.0, 0.3, 0.1, 0.0],
        &[0.3, 1.5, 0.2, 0.1],
        &[0.1, 0.2, 1.0, 0.4],
        &[0.0, 0.1, 0.4, 1.2],
    ])?;
    let params = GWishartParams::new(8.0, d)?;
    let settings = CompletionSettings {
        tol: 1e-12,
        ..Default::default()
    };
    let mode = gwishart_mode(&g, &params, &settings)?.into_inner();
    println!("mode:{mode:.5}");

    let h = 1e-5;
    for (i, j) in (0..4).map(|i| (i, i)).chain(g.edges()) {
        let mut plus = mode.clone();
        let mut minus = mode.clone();
        for (a, b) in [(i, j), (j, i)].into_iter().take(if i == j { 1 } else { 2 }) {
            plus[(a, b)] += h;
            minus[(a, b)] -= h;
        }
        let grad = (log_unnorm_density(&plus, &params)? - log_unnorm_density(&minus, &params)?) / (2.0 * h);
        println!("d/dK({},{}) = {grad:+.1e}", i + 1, j + 1);
    }
    Ok(())
}
