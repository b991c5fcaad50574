use rand::Rng;

use crate::error::Result;
use crate::graph::Graph;
use crate::linalg::{Matrix, SpdMatrix};
use crate::params::GWishartParams;
use crate::samplers::completion::{CompletionSettings, Completer};
use crate::samplers::wishart::WishartSampler;

/// Exact sampler for `W_G(δ, D)`: draw `K* ~ W(δ, D)` on the full model, then
/// complete `Σ = (K*)^{-1}` into the cone of `G`. Each clique block keeps
/// `K_C - B_C(K∖K_C) = (Σ_C)^{-1}`, so the clique conditionals of the
/// G-Wishart are inherited from the full draw.
#[derive(Clone, Debug)]
pub struct GWishartSampler {
    wishart: WishartSampler,
    completer: Completer,
}

/// A G-Wishart draw with the full-model covariance it was completed from.
#[derive(Clone, Debug)]
pub struct DirectDraw {
    pub k: SpdMatrix,
    pub sigma: Matrix,
}

impl GWishartSampler {
    pub fn new(g: &Graph, params: &GWishartParams, settings: CompletionSettings) -> Result<Self> {
        if g.p() != params.dim() {
            return Err(crate::Error::DimensionMismatch {
                expected: g.p(),
                got: params.dim(),
            });
        }
        Ok(GWishartSampler {
            wishart: WishartSampler::new(params)?,
            completer: Completer::new(g, settings)?,
        })
    }

    pub fn graph(&self) -> &Graph {
        self.completer.graph()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<SpdMatrix> {
        Ok(self.sample_detailed(rng)?.k)
    }

    pub fn sample_detailed<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<DirectDraw> {
        let draw = self.wishart.sample_with_inverse(rng);
        // No determined entries: the completion is the identity map.
        let k = if self.graph().is_complete() {
            SpdMatrix::trusted(draw.k)
        } else {
            self.completer.complete(&draw.sigma)?
        };
        Ok(DirectDraw {
            k,
            sigma: draw.sigma,
        })
    }
}

/// One exact draw from `W_G(δ, D)`.
pub fn sample_gwishart<R: Rng + ?Sized>(
    g: &Graph,
    params: &GWishartParams,
    settings: &CompletionSettings,
    rng: &mut R,
) -> Result<SpdMatrix> {
    GWishartSampler::new(g, params, *settings)?.sample(rng)
}
