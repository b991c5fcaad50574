//! Completing a covariance into the cone of a graph, with both engines and
//! through the Cholesky factor.

use gwishart::linalg::spd_inverse;
use gwishart::{
    chol_upper, complete_cholesky, gwishart_complete, CompletionSettings, Engine, Graph, Matrix,
};

fn main() -> gwishart::Result<()> {
    let g = Graph::from_edge_list(5, &[(1, 2), (2, 3), (3, 4), (4, 5), (5, 1)])?;
    let sigma = Matrix::from_fn(5, 5, |i, j| 0.6f64.powi((i as i32 - j as i32).abs()));

    for engine in [Engine::NodeWise, Engine::CliqueIps] {
        let k = gwishart_complete(&sigma, &g, &CompletionSettings::with_engine(engine))?;
        let back = spd_inverse(&k)?;
        let worst = g
            .edges()
            .chain((0..5).map(|i| (i, i)))
            .map(|(i, j)| (back[(i, j)] - sigma[(i, j)]).abs())
            .fold(0.0, f64::max);
        println!("{engine:?}: largest residual on the graph {worst:.1e}, K ={:.4}", k.as_matrix());
    }

    // Upper factor with free entries on the graph; the rest are determined.
    let phi = chol_upper(&spd_inverse(&sigma)?)?;
    let done = complete_cholesky(&phi, &g)?;
    let k = done.matrix().transpose() * done.matrix();
    println!("Φ'Φ after completion (zeros off the cycle):{k:.4}");
    Ok(())
}
