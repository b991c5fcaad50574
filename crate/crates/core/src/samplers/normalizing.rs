use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::{log_det, submatrix};
use crate::params::GWishartParams;

/// `log Γ_k(a)`, the multivariate gamma function.
pub fn ln_multigamma(k: usize, a: f64) -> f64 {
    let kf = k as f64;
    kf * (kf - 1.0) / 4.0 * std::f64::consts::PI.ln()
        + (1..=k).map(|j| ln_gamma(a + (1.0 - j as f64) / 2.0)).sum::<f64>()
}

/// `log I` for the complete graph on the nodes `c`:
/// `((δ+k-1)k/2) log 2 + log Γ_k((δ+k-1)/2) - ((δ+k-1)/2) log|D_C|`.
fn ln_i_complete(delta: f64, d: &crate::linalg::Matrix, c: &[usize]) -> Result<f64> {
    let k = c.len();
    if k == 0 {
        return Ok(0.0);
    }
    let h = (delta + k as f64 - 1.0) / 2.0;
    let ld = log_det(&submatrix(d, c, c))?;
    Ok(h * k as f64 * std::f64::consts::LN_2 + ln_multigamma(k, h) - h * ld)
}

/// Closed-form `log I_G(δ, D)` for a decomposable graph: the clique terms
/// minus the separator terms of a junction tree. Non-decomposable graphs are
/// refused rather than approximated.
pub fn log_ig_decomposable(g: &Graph, params: &GWishartParams) -> Result<f64> {
    if g.p() != params.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.p(),
            got: params.dim(),
        });
    }
    let separators = g.separators()?;
    let d = params.d().as_matrix();
    let delta = params.delta();
    let mut total = 0.0;
    for c in g.maximal_cliques().iter() {
        total += ln_i_complete(delta, d, c)?;
    }
    for s in &separators {
        total -= ln_i_complete(delta, d, s)?;
    }
    Ok(total)
}
