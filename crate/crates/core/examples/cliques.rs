//! Graph structure: maximal cliques, chordality, junction-tree separators and
//! the closed-form normalizing constant where it exists.

use gwishart::samplers::log_ig_decomposable;
use gwishart::{GWishartParams, Graph, SpdMatrix};

fn main() -> gwishart::Result<()> {
    let graphs = [
        ("path", Graph::from_edge_list(4, &[(1, 2), (2, 3), (3, 4)])?),
        ("four-cycle", Graph::from_edge_list(4, &[(1, 2), (2, 3), (3, 4), (4, 1)])?),
        ("chorded cycle", Graph::from_edge_list(4, &[(1, 2), (2, 3), (3, 4), (4, 1), (1, 3)])?),
        ("two triangles", Graph::from_edge_list(5, &[(1, 2), (2, 3), (1, 3), (3, 4), (4, 5), (3, 5)])?),
    ];
    // The library indexes nodes from 0; print them from 1 like the edge lists.
    let one_based = |sets: Vec<Vec<usize>>| -> Vec<Vec<usize>> {
        sets.into_iter().map(|s| s.into_iter().map(|v| v + 1).collect()).collect()
    };
    for (name, g) in &graphs {
        let params = GWishartParams::new(3.0, SpdMatrix::identity(g.p()))?;
        println!("{name}:");
        println!("  cliques     {:?}", one_based(g.maximal_cliques().cliques));
        println!("  decomposable {}", g.is_decomposable());
        match g.separators() {
            Ok(s) => {
                println!("  separators  {:?}", one_based(s));
                println!("  log I_G(3, I) = {:.6}", log_ig_decomposable(g, &params)?);
            }
            Err(e) => println!("  {e}"),
        }
    }
    Ok(())
}
