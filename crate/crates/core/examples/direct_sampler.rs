//! Exact draws from the G-Wishart on a four-cycle and their Monte Carlo mean.
//!
//! ```bash
//! cargo run --release --example direct_sampler -- 200000
//! ```

use gwishart::validate::{c4_direct_reference_mean, c4_reference};
use gwishart::{CompletionSettings, GWishartSampler, RngStream};

fn main() -> gwishart::Result<()> {
    let draws: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100_000);
    let (g, params) = c4_reference();
    let sampler = GWishartSampler::new(&g, &params, CompletionSettings::default())?;
    let mut rng = RngStream::new(1);

    let mut sum = gwishart::Matrix::zeros(4, 4);
    for _ in 0..draws {
        sum += sampler.sample(&mut rng)?.as_matrix();
    }
    let mean = sum / draws as f64;

    println!("graph: {:?}, delta = {}", g.edge_list(), params.delta());
    println!("mean of {draws} draws:{mean:.4}");
    println!("reference:{:.4}", c4_direct_reference_mean());
    println!("max deviation {:.5}", (&mean - c4_direct_reference_mean()).amax());
    Ok(())
}
