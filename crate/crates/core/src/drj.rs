//! Double reversible jump over Gaussian graphical models.
//!
//! Each move toggles one edge. A reversible jump on the posterior side
//! (`W_G(δ+n, D+U)`) is paired with the reverse jump on an auxiliary prior
//! draw (`W_G̃(δ, D)`), so the prior normalizing constants of both graphs
//! cancel from the acceptance ratio. Nothing in this module evaluates `I_G`
//! for a general graph; the exact enumeration oracle at the bottom is only
//! defined where the closed form exists.

use std::collections::BTreeMap;

use log::warn;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{pair_list, Graph};
use crate::linalg::{
    chol_upper, complete_in_place, completion_value, trace_inner, Matrix, SpdMatrix,
};
use crate::params::{posterior_params, GWishartParams};
use crate::rng::RngStream;
use crate::samplers::completion::{CompletionSettings, Completer};
use crate::samplers::normalizing::log_ig_decomposable;
use crate::samplers::wishart::WishartSampler;

/// Largest `p` for which visited graphs are tallied individually.
pub const GRAPH_FREQ_MAX_P: usize = 6;

/// Form of the proposal-density term in the acceptance ratio.
///
/// `Derived` is the standard reversible-jump bookkeeping: the forward draw
/// `γ ~ N(ϑ, σ²)` enters as `+(γ-ϑ)²/2σ²` and the reverse offset
/// `γ̃ = Φ̃⁰_lm - ϑ̃` as `-γ̃²/2σ²`. `AsPrinted` keeps the literal exponent
/// `-[(γ-ϑ)² - (γ̃-ϑ̃)²]/2σ²`; it does not target the posterior and is kept
/// for comparison only.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum AlphaVariant {
    AsPrinted,
    #[default]
    Derived,
}

impl std::str::FromStr for AlphaVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "as-printed" => Ok(AlphaVariant::AsPrinted),
            "derived" => Ok(AlphaVariant::Derived),
            other => Err(Error::InvalidParameter(format!(
                "unknown alpha variant {other:?}"
            ))),
        }
    }
}

/// Prior over graphs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum EdgePrior {
    #[default]
    Uniform,
    /// Independent edges, each present with the given probability.
    Bernoulli(f64),
}

impl EdgePrior {
    fn validate(&self) -> Result<()> {
        match *self {
            EdgePrior::Bernoulli(beta) if !(beta > 0.0 && beta < 1.0) => Err(
                Error::InvalidParameter(format!("edge probability must lie in (0, 1), got {beta}")),
            ),
            _ => Ok(()),
        }
    }

    /// `log p(G ∪ e) - log p(G)`.
    fn log_add_ratio(&self) -> f64 {
        match *self {
            EdgePrior::Uniform => 0.0,
            EdgePrior::Bernoulli(beta) => (beta / (1.0 - beta)).ln(),
        }
    }

    /// Unnormalized log prior of `g`.
    pub fn log_prior(&self, g: &Graph) -> f64 {
        match *self {
            EdgePrior::Uniform => 0.0,
            EdgePrior::Bernoulli(beta) => {
                let total = g.p() * g.p().saturating_sub(1) / 2;
                let e = g.n_edges();
                e as f64 * beta.ln() + (total - e) as f64 * (1.0 - beta).ln()
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DrjConfig {
    /// Proposal standard deviation `σ_g`.
    pub sigma_g: f64,
    /// Total iterations, burn-in included.
    pub iters: usize,
    pub burnin: usize,
    pub seed: u64,
    pub alpha_variant: AlphaVariant,
    pub edge_prior: EdgePrior,
    pub completion: CompletionSettings,
}

impl Default for DrjConfig {
    fn default() -> Self {
        DrjConfig {
            sigma_g: 1.0,
            iters: 10_000,
            burnin: 1_000,
            seed: 1,
            alpha_variant: AlphaVariant::default(),
            edge_prior: EdgePrior::default(),
            completion: CompletionSettings::default(),
        }
    }
}

impl DrjConfig {
    fn validate(&self) -> Result<()> {
        if !(self.sigma_g > 0.0) || !self.sigma_g.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "sigma_g must be positive, got {}",
                self.sigma_g
            )));
        }
        if self.burnin >= self.iters {
            return Err(Error::InvalidParameter(format!(
                "burnin ({}) must be smaller than iters ({})",
                self.burnin, self.iters
            )));
        }
        self.edge_prior.validate()
    }
}

/// Persistent chain state. `k` is always an exact draw from the posterior
/// G-Wishart of `g`.
#[derive(Clone, Debug)]
pub struct DrjChainState {
    pub g: Graph,
    pub k: SpdMatrix,
    pub rng: RngStream,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Add,
    Delete,
}

/// Scratch record of one move.
///
/// For an addition `gamma` is the proposed value and `gamma_tilde` the prior
/// side offset `Φ̃⁰_lm - ϑ̃`; for a deletion `gamma` is the current posterior
/// entry and `gamma_tilde` the value drawn for the prior side.
#[derive(Clone, Debug)]
pub struct DrjProposal {
    /// 0-based, `l < m`.
    pub edge: (usize, usize),
    pub direction: Direction,
    pub gamma: f64,
    pub gamma_tilde: f64,
    pub vartheta: f64,
    pub vartheta_tilde: f64,
    pub k_tilde: Matrix,
    pub k0: Matrix,
    pub k0_tilde: Matrix,
    pub log_alpha: f64,
}

/// Uniform pair `(l, m)`, `l < m`, and whether the move adds or deletes it.
pub fn propose_move<R: Rng + ?Sized>(g: &Graph, rng: &mut R) -> ((usize, usize), Direction) {
    let p = g.p();
    assert!(p >= 2, "edge moves need at least two nodes");
    let n_pairs = p * (p - 1) / 2;
    let mut k = rng.random_range(0..n_pairs);
    let mut l = 0;
    while k >= p - 1 - l {
        k -= p - 1 - l;
        l += 1;
    }
    let m = l + 1 + k;
    let direction = if g.has_edge(l, m) {
        Direction::Delete
    } else {
        Direction::Add
    };
    ((l, m), direction)
}

/// Inputs of one move once every random quantity has been drawn.
struct MoveInputs<'a> {
    g: &'a Graph,
    g_new: &'a Graph,
    edge: (usize, usize),
    /// Factor of the current posterior draw (cone of `g`).
    phi: Matrix,
    /// Factor of the auxiliary prior draw (cone of `g_new`).
    phi0_tilde: Matrix,
    /// Addition: proposed `γ`. Deletion: drawn prior-side value `γ̃`.
    draw: f64,
}

/// Deterministic half of a move: builds `Φ̃`, `Φ⁰` and `log α`.
fn evaluate_move(
    inputs: MoveInputs<'_>,
    direction: Direction,
    post_rate: &Matrix,
    prior_rate: &Matrix,
    sigma_g: f64,
    variant: AlphaVariant,
    edge_prior: &EdgePrior,
) -> Result<DrjProposal> {
    let MoveInputs {
        g,
        g_new,
        edge: (l, m),
        phi,
        phi0_tilde,
        draw,
    } = inputs;
    let vartheta = completion_value(&phi, l, m);
    let vartheta_tilde = completion_value(&phi0_tilde, l, m);

    let mut phi_tilde = phi.clone();
    let mut phi0 = phi0_tilde.clone();
    let (gamma, gamma_tilde) = match direction {
        Direction::Add => {
            phi_tilde[(l, m)] = draw;
            phi0[(l, m)] = vartheta_tilde;
            (draw, phi0_tilde[(l, m)] - vartheta_tilde)
        }
        Direction::Delete => {
            phi0[(l, m)] = draw;
            (phi[(l, m)], draw)
        }
    };
    complete_in_place(&mut phi_tilde, g_new);
    complete_in_place(&mut phi0, g);
    debug_assert!((0..phi.nrows()).all(|i| phi_tilde[(i, i)] == phi[(i, i)]));
    debug_assert!((0..phi.nrows()).all(|i| phi0[(i, i)] == phi0_tilde[(i, i)]));

    let k = phi.tr_mul(&phi);
    let k_tilde = phi_tilde.tr_mul(&phi_tilde);
    let k0 = phi0.tr_mul(&phi0);
    let k0_tilde = phi0_tilde.tr_mul(&phi0_tilde);

    // New minus current on both sides: the posterior moves K → K̃, the
    // auxiliary prior draw moves K̃⁰ → K⁰.
    let trace_terms = -0.5 * trace_inner(&(&k_tilde - &k), post_rate)?
        - 0.5 * trace_inner(&(&k0 - &k0_tilde), prior_rate)?;
    let two_var = 2.0 * sigma_g * sigma_g;
    let forward = (gamma - vartheta).powi(2);
    let log_alpha = match direction {
        Direction::Add => {
            let proposal = match variant {
                AlphaVariant::Derived => (forward - gamma_tilde.powi(2)) / two_var,
                AlphaVariant::AsPrinted => {
                    -(forward - (gamma_tilde - vartheta_tilde).powi(2)) / two_var
                }
            };
            trace_terms + (phi[(l, l)] / phi0[(l, l)]).ln() + proposal + edge_prior.log_add_ratio()
        }
        Direction::Delete => {
            // Reciprocal of the addition that would undo this move.
            let offset = gamma_tilde - vartheta_tilde;
            let proposal = match variant {
                AlphaVariant::Derived => -(forward - offset.powi(2)) / two_var,
                AlphaVariant::AsPrinted => (forward - (offset - vartheta_tilde).powi(2)) / two_var,
            };
            trace_terms + (phi0[(l, l)] / phi[(l, l)]).ln() + proposal - edge_prior.log_add_ratio()
        }
    };
    Ok(DrjProposal {
        edge: (l, m),
        direction,
        gamma,
        gamma_tilde,
        vartheta,
        vartheta_tilde,
        k_tilde,
        k0,
        k0_tilde,
        log_alpha,
    })
}

/// A prepared DRJ kernel for fixed prior and posterior parameters.
#[derive(Clone, Debug)]
pub struct Drj {
    prior: GWishartParams,
    post: GWishartParams,
    prior_wishart: WishartSampler,
    post_wishart: WishartSampler,
    proposal_sd: Normal<f64>,
    cfg: DrjConfig,
}

impl Drj {
    pub fn new(prior: &GWishartParams, post: &GWishartParams, cfg: &DrjConfig) -> Result<Self> {
        cfg.validate()?;
        if prior.dim() != post.dim() {
            return Err(Error::DimensionMismatch {
                expected: prior.dim(),
                got: post.dim(),
            });
        }
        if prior.dim() < 2 {
            return Err(Error::InvalidParameter(
                "structure search needs at least two variables".into(),
            ));
        }
        Ok(Drj {
            prior: prior.clone(),
            post: post.clone(),
            prior_wishart: WishartSampler::new(prior)?,
            post_wishart: WishartSampler::new(post)?,
            proposal_sd: Normal::new(0.0, cfg.sigma_g)
                .map_err(|e| Error::InvalidParameter(e.to_string()))?,
            cfg: cfg.clone(),
        })
    }

    pub fn config(&self) -> &DrjConfig {
        &self.cfg
    }

    fn draw(&self, wishart: &WishartSampler, g: &Graph, rng: &mut RngStream) -> Result<SpdMatrix> {
        let draw = wishart.sample_with_inverse(rng);
        if g.is_complete() {
            return Ok(SpdMatrix::trusted(draw.k));
        }
        Completer::new(g, self.cfg.completion)?.complete(&draw.sigma)
    }

    /// Exact draw from the posterior G-Wishart of `g`.
    pub fn sample_posterior(&self, g: &Graph, rng: &mut RngStream) -> Result<SpdMatrix> {
        self.draw(&self.post_wishart, g, rng)
    }

    /// Starting state: `g0` with a fresh posterior draw.
    pub fn init(&self, g0: &Graph, seed: u64, stream: u64) -> Result<DrjChainState> {
        let mut rng = RngStream::with_stream(seed, stream);
        let k = self.sample_posterior(g0, &mut rng)?;
        Ok(DrjChainState {
            g: g0.clone(),
            k,
            rng,
        })
    }

    /// One DRJ iteration. The current `state.k` serves as the step-1
    /// posterior draw; after the accept/reject decision `k` is refreshed with
    /// a new exact draw for the (possibly new) graph.
    pub fn step(&self, state: &mut DrjChainState) -> Result<(DrjProposal, bool)> {
        let (edge, direction) = propose_move(&state.g, &mut state.rng);
        let g_new = state.g.toggle_edge(edge.0, edge.1)?;

        let phi = chol_upper(&state.k)?.into_inner();
        let k0_tilde = self.draw(&self.prior_wishart, &g_new, &mut state.rng)?;
        let phi0_tilde = chol_upper(&k0_tilde)?.into_inner();
        let draw = match direction {
            Direction::Add => completion_value(&phi, edge.0, edge.1),
            Direction::Delete => completion_value(&phi0_tilde, edge.0, edge.1),
        } + self.proposal_sd.sample(&mut state.rng);

        let proposal = evaluate_move(
            MoveInputs {
                g: &state.g,
                g_new: &g_new,
                edge,
                phi,
                phi0_tilde,
                draw,
            },
            direction,
            self.post.d(),
            self.prior.d(),
            self.cfg.sigma_g,
            self.cfg.alpha_variant,
            &self.cfg.edge_prior,
        )?;

        let u: f64 = state.rng.random();
        let accepted = if proposal.log_alpha.is_nan() {
            warn!(
                "non-finite acceptance ratio for edge ({}, {}); rejecting",
                edge.0 + 1,
                edge.1 + 1
            );
            false
        } else {
            u.ln() < proposal.log_alpha
        };
        if accepted {
            state.g = g_new;
        }
        state.k = self.sample_posterior(&state.g, &mut state.rng)?;
        Ok((proposal, accepted))
    }
}

/// One DRJ iteration with freshly prepared samplers. Loops should build a
/// [`Drj`] once instead.
pub fn drj_step(
    state: &mut DrjChainState,
    prior: &GWishartParams,
    post: &GWishartParams,
    cfg: &DrjConfig,
) -> Result<(DrjProposal, bool)> {
    Drj::new(prior, post, cfg)?.step(state)
}

/// Accumulated output of one or more chains.
#[derive(Clone, Debug, PartialEq)]
pub struct DrjSummary {
    p: usize,
    n_recorded: u64,
    n_accepted: u64,
    edge_counts: Matrix,
    k_sum: Matrix,
    graph_counts: Option<BTreeMap<Graph, u64>>,
}

impl DrjSummary {
    pub fn new(p: usize) -> Self {
        DrjSummary {
            p,
            n_recorded: 0,
            n_accepted: 0,
            edge_counts: Matrix::zeros(p, p),
            k_sum: Matrix::zeros(p, p),
            graph_counts: (p <= GRAPH_FREQ_MAX_P).then(BTreeMap::new),
        }
    }

    pub fn record(&mut self, g: &Graph, k: &Matrix, accepted: bool) {
        self.n_recorded += 1;
        self.n_accepted += accepted as u64;
        for (i, j) in g.edges() {
            self.edge_counts[(i, j)] += 1.0;
            self.edge_counts[(j, i)] += 1.0;
        }
        self.k_sum += k;
        if let Some(counts) = &mut self.graph_counts {
            *counts.entry(g.clone()).or_insert(0) += 1;
        }
    }

    /// Combines two summaries; equivalent to weighting each by its record
    /// count. Associative and commutative.
    pub fn merge(&mut self, other: &DrjSummary) -> Result<()> {
        if self.p != other.p {
            return Err(Error::DimensionMismatch {
                expected: self.p,
                got: other.p,
            });
        }
        self.n_recorded += other.n_recorded;
        self.n_accepted += other.n_accepted;
        self.edge_counts += &other.edge_counts;
        self.k_sum += &other.k_sum;
        if let (Some(mine), Some(theirs)) = (&mut self.graph_counts, &other.graph_counts) {
            for (g, c) in theirs {
                *mine.entry(g.clone()).or_insert(0) += c;
            }
        }
        Ok(())
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn n_recorded(&self) -> u64 {
        self.n_recorded
    }

    pub fn n_accepted(&self) -> u64 {
        self.n_accepted
    }

    /// Posterior edge inclusion frequencies, unit diagonal.
    pub fn edge_prob(&self) -> Matrix {
        let n = self.n_recorded.max(1) as f64;
        let mut e = &self.edge_counts / n;
        e.fill_diagonal(1.0);
        e
    }

    pub fn accept_rate(&self) -> f64 {
        self.n_accepted as f64 / self.n_recorded.max(1) as f64
    }

    /// Model-averaged precision matrix.
    pub fn mean_k(&self) -> Matrix {
        &self.k_sum / self.n_recorded.max(1) as f64
    }

    /// Visited graphs and their frequencies (only for `p <= GRAPH_FREQ_MAX_P`).
    pub fn graph_freq(&self) -> Option<Vec<(Graph, f64)>> {
        let n = self.n_recorded.max(1) as f64;
        self.graph_counts
            .as_ref()
            .map(|c| c.iter().map(|(g, &k)| (g.clone(), k as f64 / n)).collect())
    }

    pub fn frequency_of(&self, g: &Graph) -> Option<f64> {
        let n = self.n_recorded.max(1) as f64;
        self.graph_counts
            .as_ref()
            .map(|c| c.get(g).copied().unwrap_or(0) as f64 / n)
    }
}

/// Runs one chain: `cfg.burnin` discarded iterations followed by
/// `cfg.iters - cfg.burnin` recorded ones.
pub fn run_drj(
    u: &Matrix,
    n: usize,
    prior: &GWishartParams,
    g0: &Graph,
    cfg: &DrjConfig,
) -> Result<DrjSummary> {
    run_chain(u, n, prior, g0, cfg, 0)
}

fn run_chain(
    u: &Matrix,
    n: usize,
    prior: &GWishartParams,
    g0: &Graph,
    cfg: &DrjConfig,
    stream: u64,
) -> Result<DrjSummary> {
    let post = posterior_params(prior, u, n)?;
    let drj = Drj::new(prior, &post, cfg)?;
    if g0.p() != prior.dim() {
        return Err(Error::DimensionMismatch {
            expected: prior.dim(),
            got: g0.p(),
        });
    }
    let mut state = drj.init(g0, cfg.seed, stream)?;
    let mut summary = DrjSummary::new(g0.p());
    for it in 0..cfg.iters {
        let (_, accepted) = drj.step(&mut state)?;
        if it >= cfg.burnin {
            summary.record(&state.g, &state.k, accepted);
        }
    }
    Ok(summary)
}

/// Runs `chains` independent chains on separate threads (stream `c` of
/// `cfg.seed` for chain `c`) and returns the per-chain summaries together
/// with their merge.
pub fn run_drj_chains(
    u: &Matrix,
    n: usize,
    prior: &GWishartParams,
    g0: &Graph,
    cfg: &DrjConfig,
    chains: usize,
) -> Result<(Vec<DrjSummary>, DrjSummary)> {
    let chains = chains.max(1);
    let per_chain: Vec<Result<DrjSummary>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..chains)
            .map(|c| scope.spawn(move || run_chain(u, n, prior, g0, cfg, c as u64)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("chain thread panicked"))
            .collect()
    });
    let per_chain = per_chain.into_iter().collect::<Result<Vec<_>>>()?;
    let mut merged = DrjSummary::new(g0.p());
    for s in &per_chain {
        merged.merge(s)?;
    }
    Ok((per_chain, merged))
}

/// Exact posterior over all graphs on `p <= 3` nodes, where every graph is
/// decomposable: `p(G | data) ∝ p(G) I_G(δ+n, D+U) / I_G(δ, D)`. Graphs are
/// listed in edge-mask order.
pub fn exact_graph_posterior(
    u: &Matrix,
    n: usize,
    prior: &GWishartParams,
    edge_prior: &EdgePrior,
) -> Result<Vec<(Graph, f64)>> {
    let p = prior.dim();
    if p > 3 {
        return Err(Error::EnumerationTooLarge(p));
    }
    edge_prior.validate()?;
    let post = posterior_params(prior, u, n)?;
    let n_graphs = 1u64 << (p * p.saturating_sub(1) / 2);
    let scored = (0..n_graphs)
        .map(|mask| {
            let g = Graph::from_mask(p, mask);
            let score = edge_prior.log_prior(&g) + log_ig_decomposable(&g, &post)?
                - log_ig_decomposable(&g, prior)?;
            Ok((g, score))
        })
        .collect::<Result<Vec<_>>>()?;
    let top = scored
        .iter()
        .map(|(_, s)| *s)
        .fold(f64::NEG_INFINITY, f64::max);
    let z: f64 = scored.iter().map(|(_, s)| (s - top).exp()).sum();
    Ok(scored
        .into_iter()
        .map(|(g, s)| (g, (s - top).exp() / z))
        .collect())
}

/// Edge-list labels of every unordered pair, 1-based, row-major.
pub fn pair_labels(p: usize) -> Vec<(usize, usize)> {
    pair_list(p).into_iter().map(|(i, j)| (i + 1, j + 1)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_factor(p: usize, g: &Graph, rng: &mut RngStream) -> Matrix {
        let mut phi = Matrix::zeros(p, p);
        for i in 0..p {
            phi[(i, i)] = 0.5 + rng.random::<f64>();
            for j in i + 1..p {
                phi[(i, j)] = rng.random::<f64>() - 0.5;
            }
        }
        complete_in_place(&mut phi, g);
        phi
    }

    #[test]
    fn proposals_cover_all_pairs() {
        let mut rng = RngStream::new(3);
        let g = Graph::empty(5);
        let mut seen = std::collections::BTreeSet::new();
        for _ in 0..2000 {
            let ((l, m), dir) = propose_move(&g, &mut rng);
            assert!(l < m && m < 5);
            assert_eq!(dir, Direction::Add);
            seen.insert((l, m));
        }
        assert_eq!(seen.len(), 10);
        let ((_, _), dir) = propose_move(&Graph::complete(5), &mut rng);
        assert_eq!(dir, Direction::Delete);
    }

    #[test]
    fn deletion_is_reciprocal_of_addition() {
        let p = 5;
        let mut rng = RngStream::new(17);
        let post_rate = Matrix::identity(p, p) * 3.0 + Matrix::from_element(p, p, 0.2);
        let prior_rate = Matrix::identity(p, p);
        for variant in [AlphaVariant::Derived, AlphaVariant::AsPrinted] {
            for _ in 0..20 {
                let g = Graph::from_edge_list(p, &[(1, 2), (2, 3), (3, 5), (1, 4)]).unwrap();
                let (l, m) = (1, 4);
                let g_new = g.toggle_edge(l, m).unwrap();
                let phi = random_factor(p, &g, &mut rng);
                let phi0_tilde = random_factor(p, &g_new, &mut rng);
                let gamma = rng.random::<f64>() * 2.0 - 1.0;
                let prior = EdgePrior::Bernoulli(0.3);
                let add = evaluate_move(
                    MoveInputs { g: &g, g_new: &g_new, edge: (l, m), phi: phi.clone(), phi0_tilde: phi0_tilde.clone(), draw: gamma },
                    Direction::Add, &post_rate, &prior_rate, 0.7, variant, &prior,
                )
                .unwrap();
                // Undo from the proposed state with the same auxiliary values.
                let phi_tilde = chol_upper(&add.k_tilde).unwrap().into_inner();
                let phi0 = chol_upper(&add.k0).unwrap().into_inner();
                let del = evaluate_move(
                    MoveInputs { g: &g_new, g_new: &g, edge: (l, m), phi: phi_tilde, phi0_tilde: phi0, draw: phi0_tilde[(l, m)] },
                    Direction::Delete, &post_rate, &prior_rate, 0.7, variant, &prior,
                )
                .unwrap();
                assert!((del.k_tilde.clone() - phi.tr_mul(&phi)).amax() < 1e-10);
                assert!((del.k0.clone() - phi0_tilde.tr_mul(&phi0_tilde)).amax() < 1e-10);
                if variant == AlphaVariant::Derived {
                    assert!((add.log_alpha + del.log_alpha).abs() < 1e-8, "{} vs {}", add.log_alpha, del.log_alpha);
                }
            }
        }
    }

    #[test]
    fn proposal_keeps_cones_and_determinants() {
        let p = 4;
        let mut rng = RngStream::new(5);
        let g = Graph::from_edge_list(p, &[(1, 2), (1, 3), (2, 4)]).unwrap();
        let g_new = g.toggle_edge(2, 3).unwrap();
        let phi = random_factor(p, &g, &mut rng);
        let phi0_tilde = random_factor(p, &g_new, &mut rng);
        let prop = evaluate_move(
            MoveInputs { g: &g, g_new: &g_new, edge: (2, 3), phi: phi.clone(), phi0_tilde, draw: 0.3 },
            Direction::Add, &Matrix::identity(p, p), &Matrix::identity(p, p), 1.0,
            AlphaVariant::Derived, &EdgePrior::Uniform,
        )
        .unwrap();
        for (k, graph) in [(&prop.k_tilde, &g_new), (&prop.k0, &g), (&prop.k0_tilde, &g_new)] {
            for i in 0..p {
                for j in 0..p {
                    if i != j && !graph.has_edge(i, j) {
                        assert!(k[(i, j)].abs() < 1e-12);
                    }
                }
            }
        }
        let ld = |k: &Matrix| crate::linalg::log_det(k).unwrap();
        assert!((ld(&prop.k_tilde) - ld(&phi.tr_mul(&phi))).abs() < 1e-10);
        assert!((ld(&prop.k0) - ld(&prop.k0_tilde)).abs() < 1e-10);
    }

    #[test]
    fn summary_merge_is_weighted() {
        let g1 = Graph::complete(3);
        let g2 = Graph::empty(3);
        let k = Matrix::identity(3, 3);
        let mut a = DrjSummary::new(3);
        a.record(&g1, &k, true);
        let mut b = DrjSummary::new(3);
        b.record(&g2, &(k.clone() * 3.0), false);
        b.record(&g2, &(k.clone() * 3.0), false);
        let mut ab = a.clone();
        ab.merge(&b).unwrap();
        let mut ba = b.clone();
        ba.merge(&a).unwrap();
        assert_eq!(ab, ba);
        assert!((ab.edge_prob()[(0, 1)] - 1.0 / 3.0).abs() < 1e-15);
        assert!((ab.accept_rate() - 1.0 / 3.0).abs() < 1e-15);
        assert!((ab.mean_k()[(0, 0)] - 7.0 / 3.0).abs() < 1e-15);
        assert!((ab.frequency_of(&g2).unwrap() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn config_validation() {
        let prior = GWishartParams::new(3.0, SpdMatrix::identity(3)).unwrap();
        let bad = DrjConfig { burnin: 10, iters: 10, ..Default::default() };
        assert!(Drj::new(&prior, &prior, &bad).is_err());
        let bad = DrjConfig { sigma_g: 0.0, ..Default::default() };
        assert!(Drj::new(&prior, &prior, &bad).is_err());
        let bad = DrjConfig { edge_prior: EdgePrior::Bernoulli(1.0), ..Default::default() };
        assert!(Drj::new(&prior, &prior, &bad).is_err());
    }

    #[test]
    fn exact_posterior_without_data_is_uniform() {
        let prior = GWishartParams::new(3.0, SpdMatrix::identity(3)).unwrap();
        let post = exact_graph_posterior(&Matrix::zeros(3, 3), 0, &prior, &EdgePrior::Uniform).unwrap();
        assert_eq!(post.len(), 8);
        for (_, pr) in post {
            assert!((pr - 0.125).abs() < 1e-12);
        }
        let prior4 = GWishartParams::new(3.0, SpdMatrix::identity(4)).unwrap();
        assert!(matches!(
            exact_graph_posterior(&Matrix::zeros(4, 4), 0, &prior4, &EdgePrior::Uniform),
            Err(Error::EnumerationTooLarge(4))
        ));
    }

    #[test]
    fn exact_posterior_two_nodes_closed_form() {
        // Odds edge : no edge = [I_edge(post) / 8π] : [I_empty(post) / 2π].
        let prior = GWishartParams::new(3.0, SpdMatrix::identity(2)).unwrap();
        let u = Matrix::from_row_slice(2, 2, &[5.0, 3.0, 3.0, 4.0]);
        let n = 6;
        let post = posterior_params(&prior, &u, n).unwrap();
        let pi = std::f64::consts::PI;
        let log_edge = log_ig_decomposable(&Graph::complete(2), &post).unwrap() - (8.0 * pi).ln();
        let log_empty = log_ig_decomposable(&Graph::empty(2), &post).unwrap() - (2.0 * pi).ln();
        let expected = 1.0 / (1.0 + (log_empty - log_edge).exp());
        let got = exact_graph_posterior(&u, n, &prior, &EdgePrior::Uniform).unwrap();
        let edge = got.iter().find(|(g, _)| g.n_edges() == 1).unwrap().1;
        assert!((edge - expected).abs() < 1e-12);
    }
}
