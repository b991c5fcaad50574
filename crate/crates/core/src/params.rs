use crate::error::{Error, Result};
use crate::linalg::{Matrix, SpdMatrix};

/// Parameters `(δ, D)` of `W_G(δ, D)`, whose density on the graph-constrained
/// cone is proportional to `|K|^{(δ-2)/2} exp(-½⟨K, D⟩)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GWishartParams {
    delta: f64,
    d: SpdMatrix,
}

impl GWishartParams {
    pub fn new(delta: f64, d: SpdMatrix) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "delta must be positive and finite, got {delta}"
            )));
        }
        // D may have been built through the semidefinite constructor.
        crate::linalg::chol_upper(&d)?;
        Ok(GWishartParams { delta, d })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn d(&self) -> &SpdMatrix {
        &self.d
    }

    pub fn dim(&self) -> usize {
        self.d.dim()
    }

    /// Degrees of freedom of the equivalent standard Wishart, `δ + p - 1`.
    /// The standard scale matrix is `D^{-1}`.
    pub fn standard_df(&self) -> f64 {
        self.delta + self.dim() as f64 - 1.0
    }

    /// Restriction to the index set `c`: `(δ, D_C)`.
    pub fn restrict(&self, c: &[usize]) -> GWishartParams {
        let sub = crate::linalg::submatrix(&self.d, c, c);
        GWishartParams {
            delta: self.delta,
            d: SpdMatrix::trusted(sub),
        }
    }
}

/// Conjugate update: `W_G(δ, D)` and data with scatter `U` from `n`
/// observations give `W_G(δ + n, D + U)`.
pub fn posterior_params(prior: &GWishartParams, u: &Matrix, n: usize) -> Result<GWishartParams> {
    if u.shape() != prior.d.shape() {
        return Err(Error::DimensionMismatch {
            expected: prior.dim(),
            got: u.nrows(),
        });
    }
    let d = SpdMatrix::new(prior.d.as_matrix() + u)?;
    GWishartParams::new(prior.delta + n as f64, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_delta() {
        assert!(GWishartParams::new(0.0, SpdMatrix::identity(2)).is_err());
        assert!(GWishartParams::new(f64::NAN, SpdMatrix::identity(2)).is_err());
        assert!(GWishartParams::new(2.5, SpdMatrix::identity(2)).is_ok());
    }

    #[test]
    fn posterior_update() {
        let prior = GWishartParams::new(3.0, SpdMatrix::identity(4)).unwrap();
        let same = posterior_params(&prior, &Matrix::zeros(4, 4), 0).unwrap();
        assert_eq!(same, prior);

        let prior = GWishartParams::new(2.0, SpdMatrix::identity(2)).unwrap();
        let z = nalgebra::DVector::from_vec(vec![1.0, -2.0]);
        let u = &z * z.transpose();
        let post = posterior_params(&prior, &u, 1).unwrap();
        assert_eq!(post.delta(), 3.0);
        assert_eq!(post.d().as_matrix(), &(Matrix::identity(2, 2) + u));
    }
}
