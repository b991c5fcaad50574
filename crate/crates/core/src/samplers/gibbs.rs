use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::{clique_transform, Matrix, SpdMatrix};
use crate::params::GWishartParams;
use crate::samplers::wishart::WishartSampler;

/// Block Gibbs sampler for `W_G(δ, D)`: every sweep resamples each maximal
/// clique block from its conditional law,
/// `K ← T_{C_J, Ã_J} ∘ … ∘ T_{C_1, Ã_1}(K)` with `Ã_j ~ W(δ, D_{C_j})`.
#[derive(Clone, Debug)]
pub struct BlockGibbs {
    g: Graph,
    cliques: Vec<Vec<usize>>,
    blocks: Vec<WishartSampler>,
}

impl BlockGibbs {
    pub fn new(g: &Graph, params: &GWishartParams) -> Result<Self> {
        if g.p() != params.dim() {
            return Err(Error::DimensionMismatch {
                expected: g.p(),
                got: params.dim(),
            });
        }
        let cliques = g.maximal_cliques().cliques;
        let blocks = cliques
            .iter()
            .map(|c| WishartSampler::new(&params.restrict(c)))
            .collect::<Result<_>>()?;
        Ok(BlockGibbs {
            g: g.clone(),
            cliques,
            blocks,
        })
    }

    pub fn step<R: Rng + ?Sized>(&self, k: &Matrix, rng: &mut R) -> Result<SpdMatrix> {
        let mut k = k.clone();
        for (c, block) in self.cliques.iter().zip(&self.blocks) {
            let a = block.sample(rng);
            k = clique_transform(&k, &self.g, c, &a)?.into_inner();
        }
        Ok(SpdMatrix::trusted(k))
    }
}

/// One full block Gibbs sweep from `k`, which must lie in the cone of `g`.
pub fn block_gibbs_step<R: Rng + ?Sized>(
    k: &Matrix,
    g: &Graph,
    params: &GWishartParams,
    rng: &mut R,
) -> Result<SpdMatrix> {
    BlockGibbs::new(g, params)?.step(k, rng)
}
