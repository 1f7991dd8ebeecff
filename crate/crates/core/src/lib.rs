//! Total variation distance at a passive adversary for covert communication
//! over AWGN channels at finite blocklength.
//!
//! The adversary compares `N(0, σ²I_n)` (silence) against `N(0, σ²(1+θ)I_n)`
//! (Gaussian codeword plus noise). This crate evaluates the distance between
//! those hypotheses exactly (incomplete gamma form), through divergence
//! bounds, through incomplete-gamma series expansions, and through two
//! independent oracles (radial quadrature, Monte Carlo likelihood-ratio
//! test). On top of that it derives covert power levels for a TVD budget
//! and normal-approximation throughput bounds.
//!
//! ```
//! use covert_tvd::{divergences::ChannelPoint, tvd};
//!
//! let point = ChannelPoint::new(2, 1.0, 1.0).unwrap();
//! let eval = tvd::tvd_exact(&point).unwrap();
//! assert!((eval.value - 0.25).abs() < 1e-12);
//! ```

pub mod asymptotics;
#[cfg(feature = "cli")]
pub mod cli;
pub mod covert_power;
pub mod divergences;
mod error;
pub mod gamma_expansions;
pub mod mc_oracle;
pub(crate) mod numeric;
pub mod special_fn;
pub mod throughput;
pub mod tvd;

pub use error::{Error, Result};
