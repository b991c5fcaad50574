//! G-Wishart samplers and the deterministic machinery behind them.

pub mod completion;
pub mod direct;
pub mod gibbs;
pub mod normalizing;
pub mod wishart;

pub use completion::{
    gwishart_complete, gwishart_mode, ips_fixed_point, Completer, CompletionSettings, Engine,
};
pub use direct::{sample_gwishart, DirectDraw, GWishartSampler};
pub use gibbs::{block_gibbs_step, BlockGibbs};
pub use normalizing::{ln_multigamma, log_ig_decomposable};
pub use wishart::{sample_wishart, WishartDraw, WishartSampler};
