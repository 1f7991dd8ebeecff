//! Exact TVD between the adversary's hypotheses and its two series
//! approximations.
//!
//! The optimal test compares `‖z‖²` against `R² = 2σ²f = 2σ₁²g`, which
//! gives `TVD = P(n/2, f) - P(n/2, g)` with `P` the regularized lower
//! incomplete gamma function.

use serde::Serialize;

use crate::divergences::ChannelPoint;
use crate::gamma_expansions::{
    lower_terms, optimal_terms, phi_transition, stirling_gamma_halfn, transition_coeffs, upper_terms,
};
use crate::numeric::{log1pmx, log_add_exp};
use crate::special_fn::{ln_reg_lower_gamma, ln_reg_upper_gamma, reg_lower_gamma};
use crate::{Error, Result};

/// Precision reported for the incomplete-gamma evaluation.
pub const EXACT_PRECISION: f64 = 1e-12;

/// Smallest blocklength accepted by [`tvd_series`].
pub const SERIES_MIN_N: u64 = 100;

/// Incomplete-gamma arguments `f = R²/(2σ²)` and `g = R²/(2σ₁²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FgPair {
    pub f: f64,
    pub g: f64,
}

impl FgPair {
    /// Relative offsets from `n/2`: `(f/(n/2) - 1, 1 - g/(n/2))`.
    pub fn offsets(&self, n: u64) -> (f64, f64) {
        let half = n as f64 / 2.0;
        (self.f / half - 1.0, 1.0 - self.g / half)
    }
}

/// `f = (n/2)(1 + 1/θ) ln(1+θ)`, `g = (n/2) ln(1+θ)/θ`, both `n/2` at `θ = 0`.
///
/// ```
/// use covert_tvd::{divergences::ChannelPoint, tvd::fg};
/// let p = fg(&ChannelPoint::new(1000, 1.0, 1.0).unwrap());
/// assert!((p.f - 1000.0 * 2f64.ln()).abs() < 1e-10);
/// assert!((p.g - 500.0 * 2f64.ln()).abs() < 1e-10);
/// ```
pub fn fg(point: &ChannelPoint) -> FgPair {
    let half = point.half_n();
    let t = point.theta;
    let ratio = if t == 0.0 { 1.0 } else { t.ln_1p() / t };
    let g = half * ratio;
    FgPair { f: g * (1.0 + t), g }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TvdMethod {
    ExactGamma,
    SeriesHighTau,
    SeriesLowTau,
    Quadrature,
    MonteCarlo,
}

impl TvdMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            TvdMethod::ExactGamma => "exact-gamma",
            TvdMethod::SeriesHighTau => "series-high-tau",
            TvdMethod::SeriesLowTau => "series-low-tau",
            TvdMethod::Quadrature => "quadrature",
            TvdMethod::MonteCarlo => "monte-carlo",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TvdEvaluation {
    pub value: f64,
    pub method: TvdMethod,
    pub terms_used: usize,
    pub err_estimate: f64,
}

/// Exact TVD through the regularized incomplete gamma function.
pub fn tvd_exact(point: &ChannelPoint) -> Result<TvdEvaluation> {
    let FgPair { f, g } = fg(point);
    let a = point.half_n();
    let value = if point.theta == 0.0 {
        0.0
    } else if point.n == 2 {
        // P(1, z) = 1 - e^{-z}
        ((-g).exp() - (-f).exp()).clamp(0.0, 1.0)
    } else {
        (reg_lower_gamma(a, f)? - reg_lower_gamma(a, g)?).clamp(0.0, 1.0)
    };
    Ok(TvdEvaluation {
        value,
        method: TvdMethod::ExactGamma,
        terms_used: 0,
        err_estimate: EXACT_PRECISION,
    })
}

/// `ln(1 - TVD) = ln[Q(n/2, f) + P(n/2, g)]`, accurate when the TVD is
/// within rounding of 1.
pub fn tvd_complement_ln(point: &ChannelPoint) -> Result<f64> {
    if point.theta == 0.0 {
        return Ok(0.0);
    }
    let FgPair { f, g } = fg(point);
    let a = point.half_n();
    Ok(log_add_exp(ln_reg_upper_gamma(a, f)?, ln_reg_lower_gamma(a, g)?).min(0.0))
}

/// Effective scaling exponent `τ = -ln θ / ln n`.
pub fn effective_tau(point: &ChannelPoint) -> f64 {
    -point.theta.ln() / (point.n as f64).ln()
}

/// `ln[e^{-z + n/2} (z/(n/2))^{n/2}]`, the normalized prefactor shared by
/// both incomplete-gamma tails in the low-τ series.
pub fn normalized_prefactor_ln(n: u64, z: f64) -> f64 {
    let half = n as f64 / 2.0;
    half * log1pmx(z / half - 1.0)
}

/// Difference of [`normalized_prefactor_ln`] at `f` and at `g`. The two
/// prefactors coincide, so this is zero up to rounding.
pub fn prefactor_identity_ln(point: &ChannelPoint) -> f64 {
    let FgPair { f, g } = fg(point);
    normalized_prefactor_ln(point.n, f) - normalized_prefactor_ln(point.n, g)
}

/// Series approximation of the TVD with truncation order `order`.
///
/// For `τ_eff >= ½` the transition-point expansion is used on both tails;
/// otherwise the two linear-argument expansions give `1 - TVD`.
/// `err_estimate` is the distance to [`tvd_exact`].
pub fn tvd_series(point: &ChannelPoint, order: usize) -> Result<TvdEvaluation> {
    if point.theta <= 0.0 {
        return Err(Error::domain("tvd_series", "theta must be positive"));
    }
    if point.n < SERIES_MIN_N {
        return Err(Error::domain(
            "tvd_series",
            format!("n = {} is below the minimum {SERIES_MIN_N}", point.n),
        ));
    }
    let exact = tvd_exact(point)?.value;
    let (value, method, terms_used) = if effective_tau(point) >= 0.5 {
        (series_high(point, order)?, TvdMethod::SeriesHighTau, order + 1)
    } else {
        let (v, used) = series_low(point, order)?;
        (v, TvdMethod::SeriesLowTau, used)
    };
    Ok(TvdEvaluation {
        value,
        method,
        terms_used,
        err_estimate: (value - exact).abs(),
    })
}

/// `ln[1/Γ(n/2)]` through Stirling, shared by both series branches.
fn ln_inv_gamma_halfn(n: u64) -> Result<f64> {
    Ok(-stirling_gamma_halfn(n)?)
}

fn series_high(point: &ChannelPoint, order: usize) -> Result<f64> {
    let FgPair { f, g } = fg(point);
    let a = point.half_n() - 1.0;
    let reach = a.powf(2.0 / 3.0);
    for z in [f, g] {
        if (z - a).abs() > reach {
            return Err(Error::Regime {
                routine: "tvd_series (transition expansion)",
                a,
                z,
                detail: "requires |z - a| <= a^(2/3)",
            });
        }
    }
    let c = transition_coeffs(a, order)?;
    let phi_g = phi_transition(a, g, order)?.values;
    let phi_f = phi_transition(a, f, order)?.values;
    let sum: f64 = (0..=order).map(|k| c[k] * (phi_g[k] - phi_f[k])).sum();
    let ln_pre = -a + (a + 1.0) * a.ln() + ln_inv_gamma_halfn(point.n)?;
    Ok(ln_pre.exp() * sum)
}

fn series_low(point: &ChannelPoint, order: usize) -> Result<(f64, usize)> {
    let FgPair { f, g } = fg(point);
    let a = point.half_n() - 1.0;
    if f <= a || g >= a {
        return Err(Error::Regime {
            routine: "tvd_series (linear-argument expansions)",
            a,
            z: if f <= a { f } else { g },
            detail: "requires g < n/2 - 1 < f",
        });
    }
    let upper = upper_terms(a, f, order)?;
    let lower = lower_terms(a, g, order)?;
    let used_upper = optimal_terms(&upper);
    let used_lower = optimal_terms(&lower);
    let sum_upper: f64 = upper[..used_upper].iter().sum();
    let sum_lower: f64 = lower[..used_lower].iter().sum();
    // e^{-z} z^{n/2} / Γ(n/2) split as the normalized prefactor times
    // e^{-n/2} (n/2)^{n/2} / Γ(n/2)
    let half = point.half_n();
    let ln_scale = -half + half * half.ln() + ln_inv_gamma_halfn(point.n)?;
    let pre_f = (normalized_prefactor_ln(point.n, f) + ln_scale).exp();
    let pre_g = (normalized_prefactor_ln(point.n, g) + ln_scale).exp();
    let complement = pre_f * sum_upper + pre_g * sum_lower;
    Ok((1.0 - complement, used_upper + used_lower))
}
