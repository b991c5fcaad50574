//! Block Gibbs sweeps against the direct sampler on the same target.

use gwishart::validate::c4_reference;
use gwishart::{gwishart_mode, BlockGibbs, CompletionSettings, GWishartSampler, Matrix, RngStream};

fn main() -> gwishart::Result<()> {
    let (g, params) = c4_reference();
    let n = 100_000;
    let burnin = 10_000;

    let gibbs = BlockGibbs::new(&g, &params)?;
    let mut rng = RngStream::new(2);
    let mut k = gwishart_mode(&g, &params, &CompletionSettings::default())?.into_inner();
    for _ in 0..burnin {
        k = gibbs.step(&k, &mut rng)?.into_inner();
    }
    let mut gibbs_sum = Matrix::zeros(4, 4);
    for _ in 0..n {
        k = gibbs.step(&k, &mut rng)?.into_inner();
        gibbs_sum += &k;
    }

    let direct = GWishartSampler::new(&g, &params, CompletionSettings::default())?;
    let mut direct_sum = Matrix::zeros(4, 4);
    for _ in 0..n {
        direct_sum += direct.sample(&mut rng)?.as_matrix();
    }

    let (gm, dm) = (gibbs_sum / n as f64, direct_sum / n as f64);
    println!("block Gibbs mean:{gm:.4}");
    println!("direct mean:{dm:.4}");
    println!("largest difference {:.5}", (gm - dm).amax());
    Ok(())
}
