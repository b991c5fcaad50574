//! Dense symmetric-matrix kernels.
//!
//! Everything here works on small dense `nalgebra` matrices. The factor
//! convention is upper triangular: `Φ'Φ = K`.

use std::ops::Deref;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::params::GWishartParams;

pub type Matrix = DMatrix<f64>;

const SYMMETRY_TOL: f64 = 1e-8;

/// A symmetric matrix. Constructed through [`SpdMatrix::new`] it is also
/// verified positive definite; [`SpdMatrix::semidefinite`] only checks
/// symmetry and is meant for scatter matrices and other PSD quantities.
#[derive(Clone, Debug, PartialEq)]
pub struct SpdMatrix(Matrix);

impl SpdMatrix {
    /// Symmetrizes `m` and verifies positive definiteness by Cholesky.
    pub fn new(m: Matrix) -> Result<Self> {
        let s = Self::semidefinite(m)?;
        chol_upper(&s)?;
        Ok(s)
    }

    /// Symmetrizes `m` without a definiteness check. Asymmetry above `1e-8`
    /// (relative to the largest entry) is rejected.
    pub fn semidefinite(m: Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        let scale = m.amax();
        let asym = (&m - m.transpose()).amax();
        if scale > 0.0 && asym / scale > SYMMETRY_TOL {
            return Err(Error::NotSymmetric(asym / scale));
        }
        Ok(SpdMatrix(symmetrize(m)))
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let p = rows.len();
        for r in rows {
            if r.len() != p {
                return Err(Error::DimensionMismatch {
                    expected: p,
                    got: r.len(),
                });
            }
        }
        Self::new(Matrix::from_fn(p, p, |i, j| rows[i][j]))
    }

    pub fn identity(p: usize) -> Self {
        SpdMatrix(Matrix::identity(p, p))
    }

    /// Wraps a matrix the caller already knows to be symmetric positive
    /// definite (for example the product `Φ'Φ` of a valid factor).
    pub(crate) fn trusted(m: Matrix) -> Self {
        SpdMatrix(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_inner(self) -> Matrix {
        self.0
    }
}

impl Deref for SpdMatrix {
    type Target = Matrix;

    fn deref(&self) -> &Matrix {
        &self.0
    }
}

impl From<SpdMatrix> for Matrix {
    fn from(m: SpdMatrix) -> Matrix {
        m.0
    }
}

/// Upper-triangular Cholesky factor with strictly positive diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct CholeskyFactor(Matrix);

impl CholeskyFactor {
    /// Wraps an upper-triangular matrix. Entries below the diagonal are
    /// discarded.
    pub fn from_upper(mut m: Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        m.fill_lower_triangle(0.0, 1);
        for i in 0..m.nrows() {
            let d = m[(i, i)];
            if !(d > 0.0) {
                return Err(Error::NotPositiveDefinite {
                    pivot: i + 1,
                    value: d,
                });
            }
        }
        Ok(CholeskyFactor(m))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    /// `Φ'Φ`.
    pub fn product(&self) -> SpdMatrix {
        SpdMatrix::trusted(symmetrize(self.0.tr_mul(&self.0)))
    }

    /// `log |Φ'Φ| = 2 Σ log Φ_ii`.
    pub fn log_det_product(&self) -> f64 {
        2.0 * (0..self.dim()).map(|i| self.0[(i, i)].ln()).sum::<f64>()
    }

    pub fn into_inner(self) -> Matrix {
        self.0
    }
}

pub(crate) fn symmetrize(mut m: Matrix) -> Matrix {
    let p = m.nrows();
    for i in 0..p {
        for j in i + 1..p {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// Trace inner product `tr(A'B) = Σ a_ij b_ij`.
pub fn trace_inner(a: &Matrix, b: &Matrix) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            got: b.nrows(),
        });
    }
    Ok(a.component_mul(b).sum())
}

/// Upper Cholesky factor of a positive definite matrix.
pub fn chol_upper(k: &Matrix) -> Result<CholeskyFactor> {
    let p = k.nrows();
    if k.ncols() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            got: k.ncols(),
        });
    }
    let mut phi = Matrix::zeros(p, p);
    for i in 0..p {
        let mut d = k[(i, i)];
        for l in 0..i {
            d -= phi[(l, i)] * phi[(l, i)];
        }
        if !(d > 0.0) {
            return Err(Error::NotPositiveDefinite {
                pivot: i + 1,
                value: d,
            });
        }
        let d = d.sqrt();
        phi[(i, i)] = d;
        for j in i + 1..p {
            let mut s = k[(i, j)];
            for l in 0..i {
                s -= phi[(l, i)] * phi[(l, j)];
            }
            phi[(i, j)] = s / d;
        }
    }
    Ok(CholeskyFactor(phi))
}

/// The value a determined entry `(i, j)`, `i < j`, must take so that
/// `(Φ'Φ)_ij = 0`: `-(1/Φ_ii) Σ_{l<i} Φ_li Φ_lj`.
pub fn completion_value(phi: &Matrix, i: usize, j: usize) -> f64 {
    let s: f64 = (0..i).map(|l| phi[(l, i)] * phi[(l, j)]).sum();
    -s / phi[(i, i)]
}

pub(crate) fn complete_in_place(phi: &mut Matrix, g: &Graph) {
    let p = phi.nrows();
    for i in 0..p {
        for j in i + 1..p {
            if !g.has_edge(i, j) {
                phi[(i, j)] = completion_value(phi, i, j);
            }
        }
    }
}

/// Fills every entry `(i, j) ∉ g` of an upper factor so that `Φ'Φ` has zeros
/// at the non-edges of `g`. Rows are filled top to bottom; the sum in the
/// completion formula runs over strictly earlier rows.
pub fn complete_cholesky(phi: &CholeskyFactor, g: &Graph) -> Result<CholeskyFactor> {
    if phi.dim() != g.p() {
        return Err(Error::DimensionMismatch {
            expected: g.p(),
            got: phi.dim(),
        });
    }
    let mut m = CholeskyFactor::from_upper(phi.0.clone())?.0;
    complete_in_place(&mut m, g);
    Ok(CholeskyFactor(m))
}

/// `Σ_i ν_i log Φ_ii`, the log Jacobian of `K → Φ` up to the constant and the
/// `Φ_ii` powers shared by every graph.
pub fn log_jacobian_k_to_phi(phi: &CholeskyFactor, g: &Graph) -> f64 {
    g.nu_counts()
        .iter()
        .enumerate()
        .map(|(i, &nu)| nu as f64 * phi.get(i, i).ln())
        .sum()
}

/// Extracts the sub-matrix on `rows × cols`.
pub fn submatrix(m: &Matrix, rows: &[usize], cols: &[usize]) -> Matrix {
    Matrix::from_fn(rows.len(), cols.len(), |a, b| m[(rows[a], cols[b])])
}

/// Nodes of `0..p` not in `c` (which must be sorted).
pub(crate) fn complement(p: usize, c: &[usize]) -> Vec<usize> {
    (0..p).filter(|v| c.binary_search(v).is_err()).collect()
}

/// Solves `K X = B` given the upper factor of `K`.
pub(crate) fn chol_solve(phi: &Matrix, b: &Matrix) -> Matrix {
    let mut x = b.clone();
    let p = phi.nrows();
    for col in 0..x.ncols() {
        // Φ' y = b
        for i in 0..p {
            let mut s = x[(i, col)];
            for l in 0..i {
                s -= phi[(l, i)] * x[(l, col)];
            }
            x[(i, col)] = s / phi[(i, i)];
        }
        // Φ x = y
        for i in (0..p).rev() {
            let mut s = x[(i, col)];
            for l in i + 1..p {
                s -= phi[(i, l)] * x[(l, col)];
            }
            x[(i, col)] = s / phi[(i, i)];
        }
    }
    x
}

/// Inverse of an upper-triangular matrix.
pub(crate) fn upper_inverse(u: &Matrix) -> Matrix {
    let p = u.nrows();
    let mut inv = Matrix::zeros(p, p);
    for j in 0..p {
        inv[(j, j)] = 1.0 / u[(j, j)];
        for i in (0..j).rev() {
            let s: f64 = (i + 1..=j).map(|l| u[(i, l)] * inv[(l, j)]).sum();
            inv[(i, j)] = -s / u[(i, i)];
        }
    }
    inv
}

/// Inverse of a positive definite matrix.
pub fn spd_inverse(k: &Matrix) -> Result<Matrix> {
    let phi = chol_upper(k)?;
    let ui = upper_inverse(phi.matrix());
    Ok(symmetrize(&ui * ui.transpose()))
}

/// `log |K|` for positive definite `K`.
pub fn log_det(k: &Matrix) -> Result<f64> {
    Ok(chol_upper(k)?.log_det_product())
}

/// `B_C(K∖K_C) = K_{C,V∖C} (K_{V∖C})^{-1} K_{V∖C,C}`; zero when `C = V`.
pub fn schur_complement_b(k: &Matrix, c: &[usize]) -> Result<Matrix> {
    let p = k.nrows();
    let mut c = c.to_vec();
    c.sort_unstable();
    c.dedup();
    if c.is_empty() || c.iter().any(|&v| v >= p) {
        return Err(Error::InvalidParameter(format!(
            "node set {c:?} must be a nonempty subset of 0..{p}"
        )));
    }
    let rest = complement(p, &c);
    if rest.is_empty() {
        return Ok(Matrix::zeros(c.len(), c.len()));
    }
    let k_rest = submatrix(k, &rest, &rest);
    let k_rc = submatrix(k, &rest, &c);
    let phi = chol_upper(&k_rest)?;
    let x = chol_solve(phi.matrix(), &k_rc);
    Ok(symmetrize(k_rc.tr_mul(&x)))
}

/// `T_{C,A}`: replaces the `C` block of `k` by `a + B_C(k∖k_C)` and leaves
/// every other entry alone. `c` must be complete in `g`.
pub fn clique_transform(k: &Matrix, g: &Graph, c: &[usize], a: &Matrix) -> Result<SpdMatrix> {
    if !g.is_clique(c) || c.is_empty() {
        return Err(Error::NotAClique(c.iter().map(|v| v + 1).collect()));
    }
    if a.nrows() != c.len() || a.ncols() != c.len() {
        return Err(Error::DimensionMismatch {
            expected: c.len(),
            got: a.nrows(),
        });
    }
    let mut sorted = c.to_vec();
    sorted.sort_unstable();
    let order: Vec<usize> = c.iter().map(|v| sorted.binary_search(v).unwrap()).collect();
    let b = schur_complement_b(k, &sorted)?;
    let mut out = k.clone();
    for (x, &i) in c.iter().enumerate() {
        for (y, &j) in c.iter().enumerate() {
            out[(i, j)] = a[(x, y)] + b[(order[x], order[y])];
        }
    }
    Ok(SpdMatrix::trusted(symmetrize(out)))
}

/// `((δ-2)/2) log|K| - ½⟨K, D⟩`, the G-Wishart log-density without its
/// normalizing constant.
pub fn log_unnorm_density(k: &Matrix, params: &GWishartParams) -> Result<f64> {
    let ld = log_det(k)?;
    let tr = trace_inner(k, params.d())?;
    Ok(0.5 * (params.delta() - 2.0) * ld - 0.5 * tr)
}
