use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{chol_upper, symmetrize, upper_inverse, Matrix, SpdMatrix};
use crate::params::GWishartParams;

/// Bartlett-decomposition sampler for `W(δ, D)`.
///
/// `W(δ, D)` has density `∝ |K|^{(δ-2)/2} exp(-½⟨K, D⟩)` on all positive
/// definite matrices, which is the standard Wishart with `δ + p - 1` degrees
/// of freedom and scale `D^{-1}`. With `D = R'R`, draws are
/// `K = R^{-1} A A' R^{-T}` where `A` is the lower Bartlett factor.
#[derive(Clone, Debug)]
pub struct WishartSampler {
    p: usize,
    r: Matrix,
    r_inv: Matrix,
    chi: Vec<ChiSquared<f64>>,
}

/// A Wishart draw together with its inverse.
#[derive(Clone, Debug)]
pub struct WishartDraw {
    pub k: Matrix,
    pub sigma: Matrix,
}

impl WishartSampler {
    pub fn new(params: &GWishartParams) -> Result<Self> {
        let p = params.dim();
        let df = params.standard_df();
        if !(df > p as f64 - 1.0) {
            return Err(Error::InvalidParameter(format!(
                "improper Wishart: df {df} must exceed p - 1 = {}",
                p as f64 - 1.0
            )));
        }
        let r = chol_upper(params.d())?.into_inner();
        let r_inv = upper_inverse(&r);
        let chi = (0..p)
            .map(|i| {
                ChiSquared::new(df - i as f64)
                    .map_err(|e| Error::InvalidParameter(format!("chi-square df: {e}")))
            })
            .collect::<Result<_>>()?;
        Ok(WishartSampler { p, r, r_inv, chi })
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    fn bartlett<R: Rng + ?Sized>(&self, rng: &mut R) -> Matrix {
        let p = self.p;
        let mut a = Matrix::zeros(p, p);
        for i in 0..p {
            a[(i, i)] = self.chi[i].sample(rng).sqrt();
            for j in 0..i {
                a[(i, j)] = rng.sample(StandardNormal);
            }
        }
        a
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SpdMatrix {
        let b = &self.r_inv * self.bartlett(rng);
        SpdMatrix::trusted(symmetrize(&b * b.transpose()))
    }

    /// Draws `K` and also returns `Σ = K^{-1} = (A^{-1}R)'(A^{-1}R)`, which
    /// avoids inverting `K` directly.
    pub fn sample_with_inverse<R: Rng + ?Sized>(&self, rng: &mut R) -> WishartDraw {
        let a = self.bartlett(rng);
        let b = &self.r_inv * &a;
        let k = symmetrize(&b * b.transpose());
        // Solve A M = R by forward substitution.
        let p = self.p;
        let mut m = self.r.clone();
        for col in 0..p {
            for i in 0..p {
                let mut s = m[(i, col)];
                for l in 0..i {
                    s -= a[(i, l)] * m[(l, col)];
                }
                m[(i, col)] = s / a[(i, i)];
            }
        }
        let sigma = symmetrize(m.tr_mul(&m));
        WishartDraw { k, sigma }
    }
}

/// One draw from `W(δ, D)`.
pub fn sample_wishart<R: Rng + ?Sized>(params: &GWishartParams, rng: &mut R) -> Result<SpdMatrix> {
    Ok(WishartSampler::new(params)?.sample(rng))
}
