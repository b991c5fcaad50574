//! Positive definite completion into the cone of a graph.
//!
//! Given a covariance `Σ`, find the unique `K` with zeros at the non-edges of
//! `g` whose inverse agrees with `Σ` on the diagonal and on every edge. Two
//! engines are provided: the node-wise regression sweep (default) and clique
//! iterative proportional scaling, which also yields the G-Wishart mode.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::{
    chol_solve, chol_upper, clique_transform, spd_inverse, submatrix, symmetrize, Matrix,
    SpdMatrix,
};
use crate::params::GWishartParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    #[default]
    NodeWise,
    CliqueIps,
}

impl std::str::FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "node-wise" => Ok(Engine::NodeWise),
            "clique-ips" => Ok(Engine::CliqueIps),
            other => Err(Error::InvalidParameter(format!("unknown engine {other:?}"))),
        }
    }
}

/// Engine choice and stopping rule. A sweep converges when the largest
/// change of any entry of the working matrix, together with the tail it
/// implies at the observed contraction rate, falls below `tol`. The tolerance
/// is absolute for the node-wise engine (its working matrix is a covariance,
/// and a relative test there loses accuracy in `K` when `Σ` is ill
/// conditioned) and relative to the largest clique target entry for IPS.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompletionSettings {
    pub engine: Engine,
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for CompletionSettings {
    fn default() -> Self {
        CompletionSettings {
            engine: Engine::NodeWise,
            tol: 1e-8,
            max_sweeps: 1000,
        }
    }
}

impl CompletionSettings {
    pub fn with_engine(engine: Engine) -> Self {
        CompletionSettings {
            engine,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || self.max_sweeps == 0 {
            return Err(Error::InvalidParameter(format!(
                "completion needs tol > 0 and max_sweeps >= 1, got {} and {}",
                self.tol, self.max_sweeps
            )));
        }
        Ok(())
    }
}

/// Completion engine bound to a fixed graph, so repeated calls skip clique
/// enumeration.
#[derive(Clone, Debug)]
pub struct Completer {
    g: Graph,
    cliques: Vec<Vec<usize>>,
    settings: CompletionSettings,
}

fn clique_targets(sigma: &Matrix, cliques: &[Vec<usize>]) -> Result<Vec<Matrix>> {
    cliques
        .iter()
        .map(|c| spd_inverse(&submatrix(sigma, c, c)))
        .collect()
}

impl Completer {
    pub fn new(g: &Graph, settings: CompletionSettings) -> Result<Self> {
        settings.validate()?;
        // The node-wise engine keeps the cliques for its fallback.
        let cliques = g.maximal_cliques().cliques;
        Ok(Completer {
            g: g.clone(),
            cliques,
            settings,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.g
    }

    pub fn complete(&self, sigma: &Matrix) -> Result<SpdMatrix> {
        let p = self.g.p();
        if sigma.nrows() != p || sigma.ncols() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                got: sigma.nrows(),
            });
        }
        if self.g.is_complete() {
            return Ok(SpdMatrix::trusted(spd_inverse(sigma)?));
        }
        match self.settings.engine {
            Engine::NodeWise => match node_wise(sigma, &self.g, &self.settings) {
                // Near-singular Σ can stall the coordinate sweep for
                // thousands of passes while the clique updates settle in a
                // few; the limit is the same unique completion.
                Err(Error::NotConverged { sweeps, residual }) => {
                    log::debug!("node-wise stalled after {sweeps} sweeps ({residual:e}); using clique IPS");
                    let targets = clique_targets(sigma, &self.cliques)?;
                    clique_ips(&self.g, &self.cliques, &targets, &self.settings)
                }
                other => other,
            },
            Engine::CliqueIps => {
                let targets = clique_targets(sigma, &self.cliques)?;
                clique_ips(&self.g, &self.cliques, &targets, &self.settings)
            }
        }
    }
}

/// Regression coefficients of node `j` on its neighbors under the working
/// covariance `w`: `β* = W_{N}^{-1} Σ_{N,j}`.
fn neighbor_coefficients(w: &Matrix, sigma: &Matrix, nbrs: &[usize], j: usize) -> Result<Vec<f64>> {
    let w_nn = submatrix(w, nbrs, nbrs);
    let s = Matrix::from_fn(nbrs.len(), 1, |a, _| sigma[(nbrs[a], j)]);
    let phi = chol_upper(&w_nn)?;
    Ok(chol_solve(phi.matrix(), &s).column(0).iter().copied().collect())
}

/// Tracks sweep-to-sweep changes. Linear convergence at rate `r` leaves a
/// tail of about `change·r/(1-r)`, so a slowly contracting sweep is not
/// mistaken for a converged one.
struct Stopping {
    tol: f64,
    prev: f64,
}

impl Stopping {
    fn new(tol: f64) -> Self {
        Stopping { tol, prev: f64::INFINITY }
    }

    fn converged(&mut self, change: f64) -> bool {
        let r = change / self.prev;
        self.prev = change;
        if change >= self.tol {
            return false;
        }
        r < 1.0 && change * r / (1.0 - r) < self.tol
    }
}

fn node_wise(sigma: &Matrix, g: &Graph, settings: &CompletionSettings) -> Result<SpdMatrix> {
    let p = g.p();
    let mut stop = Stopping::new(settings.tol);
    let mut w = sigma.clone();
    let mut change = f64::INFINITY;
    let mut sweeps = 0;
    while !stop.converged(change) {
        if sweeps == settings.max_sweeps {
            return Err(Error::NotConverged {
                sweeps,
                residual: change,
            });
        }
        sweeps += 1;
        change = 0.0;
        for j in 0..p {
            let nbrs = g.neighbors(j);
            let beta = if nbrs.is_empty() {
                Vec::new()
            } else {
                neighbor_coefficients(&w, sigma, nbrs, j)?
            };
            for i in (0..p).filter(|&i| i != j) {
                let v: f64 = nbrs.iter().zip(&beta).map(|(&k, b)| w[(i, k)] * b).sum();
                change = change.max((v - w[(i, j)]).abs());
                w[(i, j)] = v;
                w[(j, i)] = v;
            }
        }
    }
    // Read K off the final regressions; non-edges are exactly zero.
    let mut k = Matrix::zeros(p, p);
    for j in 0..p {
        let nbrs = g.neighbors(j);
        if nbrs.is_empty() {
            k[(j, j)] = 1.0 / sigma[(j, j)];
            continue;
        }
        let beta = neighbor_coefficients(&w, sigma, nbrs, j)?;
        let resid = sigma[(j, j)] - nbrs.iter().zip(&beta).map(|(&i, b)| w[(j, i)] * b).sum::<f64>();
        let kjj = 1.0 / resid;
        k[(j, j)] = kjj;
        for (&i, b) in nbrs.iter().zip(&beta) {
            k[(i, j)] = -b * kjj;
        }
    }
    let k = symmetrize(k);
    chol_upper(&k)?;
    Ok(SpdMatrix::trusted(k))
}

/// Cyclic clique updates `K ← T_{C_J, A_J} ∘ … ∘ T_{C_1, A_1}(K)` from the
/// identity until the sweep change drops below `tol`, relative to the
/// largest clique target entry.
fn clique_ips(
    g: &Graph,
    cliques: &[Vec<usize>],
    targets: &[Matrix],
    settings: &CompletionSettings,
) -> Result<SpdMatrix> {
    let p = g.p();
    let scale = targets.iter().map(|a| a.amax()).fold(1.0, f64::max);
    let mut stop = Stopping::new(settings.tol * scale);
    let mut k = Matrix::identity(p, p);
    let mut change = f64::INFINITY;
    let mut sweeps = 0;
    while !stop.converged(change) {
        if sweeps == settings.max_sweeps {
            return Err(Error::NotConverged {
                sweeps,
                residual: change,
            });
        }
        sweeps += 1;
        change = 0.0;
        for (c, a) in cliques.iter().zip(targets) {
            let next = clique_transform(&k, g, c, a)?.into_inner();
            change = change.max((&next - &k).amax());
            k = next;
        }
    }
    chol_upper(&k)?;
    Ok(SpdMatrix::trusted(k))
}

/// Completes `sigma` into the cone of `g` with the engine in `settings`.
pub fn gwishart_complete(sigma: &Matrix, g: &Graph, settings: &CompletionSettings) -> Result<SpdMatrix> {
    Completer::new(g, *settings)?.complete(sigma)
}

/// The IPS limit with clique targets `(s_C)^{-1}`, started from the identity.
/// Always uses the clique engine regardless of `settings.engine`.
pub fn ips_fixed_point(g: &Graph, s: &Matrix, settings: &CompletionSettings) -> Result<SpdMatrix> {
    let settings = CompletionSettings {
        engine: Engine::CliqueIps,
        ..*settings
    };
    Completer::new(g, settings)?.complete(s)
}

/// Mode of `W_G(δ, D)`: the stationary point of `(δ-2)/2 log|K| - ½⟨K,D⟩`
/// over the cone, i.e. the completion of `D / (δ - 2)`.
pub fn gwishart_mode(g: &Graph, params: &GWishartParams, settings: &CompletionSettings) -> Result<SpdMatrix> {
    let delta = params.delta();
    if !(delta > 2.0) {
        return Err(Error::InvalidParameter(format!(
            "the mode exists only for delta > 2, got {delta}"
        )));
    }
    let target = params.d().as_matrix() / (delta - 2.0);
    ips_fixed_point(g, &target, settings)
}
