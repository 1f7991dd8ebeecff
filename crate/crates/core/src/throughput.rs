//! Normal-approximation throughput bounds for the AWGN channel under a
//! maximal power constraint, and the covert bounds obtained by plugging in
//! the covert power levels.
//!
//! All values are in bits. Unspecified `O(1)` constants are set to zero and
//! `O(log n)` residuals to `½ log₂ n`; [`ThroughputReport::note`] says so.

use std::f64::consts::{LOG2_E, PI, SQRT_2};
use std::sync::OnceLock;

use serde::Serialize;

use crate::covert_power::CovertBudget;
use crate::numeric::{gauss_hermite, golden_max};
use crate::special_fn::{q_inv, reg_lower_gamma, reg_upper_gamma};
use crate::{Error, Result};

/// Number of Gauss–Hermite nodes used for `T_μ`.
pub const HERMITE_ORDER: usize = 127;

/// Number of log-spaced `τ₀` candidates in [`achievability_full`].
pub const TAU0_GRID: usize = 50;

const RESIDUAL_NOTE: &str = "O(1) constants set to 0; O(log n) residual taken as 0.5*log2(n)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThroughputKind {
    AchievabilityNa,
    ConverseNa,
    CovertSuf,
    CovertNec,
    AchievabilityFull,
}

impl ThroughputKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ThroughputKind::AchievabilityNa => "achievability-na",
            ThroughputKind::ConverseNa => "converse-na",
            ThroughputKind::CovertSuf => "covert-suf",
            ThroughputKind::CovertNec => "covert-nec",
            ThroughputKind::AchievabilityFull => "achievability-full",
        }
    }
}

/// `log₂ M` split into its terms; `bits` is exactly their sum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThroughputReport {
    pub bits: f64,
    pub term_first: f64,
    pub term_second: f64,
    pub term_logn: f64,
    /// `log₂ τ₀ + log₂ Δ` and, for the full bound, its remaining constants.
    pub term_other: f64,
    pub eps: f64,
    pub kind: ThroughputKind,
    /// `ε - 2B_μ/√n`; the normal approximation needs this positive.
    pub berry_esseen_margin: Option<f64>,
    /// Maximizing `R` of the full achievability bound.
    pub r_star: Option<f64>,
    /// Selected `τ₀` of the full achievability bound.
    pub tau0: Option<f64>,
    pub note: &'static str,
}

impl ThroughputReport {
    fn new(kind: ThroughputKind, eps: f64, first: f64, second: f64, logn: f64, other: f64) -> Self {
        Self {
            bits: first + second + logn + other,
            term_first: first,
            term_second: second,
            term_logn: logn,
            term_other: other,
            eps,
            kind,
            berry_esseen_margin: None,
            r_star: None,
            tau0: None,
            note: RESIDUAL_NOTE,
        }
    }
}

fn check_n(routine: &'static str, n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::domain(routine, "blocklength n must be at least 1"));
    }
    Ok(())
}

fn check_open_unit(routine: &'static str, name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v < 1.0) {
        return Err(Error::domain(routine, format!("{name} = {v} must lie in (0, 1)")));
    }
    Ok(())
}

fn check_power(routine: &'static str, p: f64) -> Result<()> {
    if !p.is_finite() || p < 0.0 {
        return Err(Error::domain(
            routine,
            format!("power P = {p} must be nonnegative and finite"),
        ));
    }
    Ok(())
}

/// AWGN capacity `½ log₂(1+P)`.
pub fn capacity(p: f64) -> f64 {
    0.5 * p.ln_1p() * LOG2_E
}

/// AWGN dispersion `(log₂e)² P(P+2) / (2(1+P)²)`.
pub fn dispersion(p: f64) -> f64 {
    LOG2_E * LOG2_E * p * (p + 2.0) / (2.0 * (1.0 + p) * (1.0 + p))
}

/// `V̂_μ(P, R) = (log₂e / (2(1+P)))² (4R + 2P²)`.
pub fn dispersion_hat(p: f64, r: f64) -> f64 {
    let s = LOG2_E / (2.0 * (1.0 + p));
    s * s * (4.0 * r + 2.0 * p * p)
}

type Rule = (Vec<f64>, Vec<f64>);

fn hermite_rule() -> Result<&'static Rule> {
    static RULE: OnceLock<std::result::Result<Rule, Error>> = OnceLock::new();
    RULE.get_or_init(|| gauss_hermite(HERMITE_ORDER))
        .as_ref()
        .map_err(Clone::clone)
}

/// `T_μ(P, R) = E|(log₂e / (2(1+μP))) (μP + 2√R Z - μP Z²)|³`, `Z ~ N(0,1)`.
pub fn third_moment(p: f64, r: f64, mu: f64) -> Result<f64> {
    let (x, w) = hermite_rule()?;
    let mp = mu * p;
    let s = LOG2_E / (2.0 * (1.0 + mp));
    let sr = r.sqrt();
    let sum: f64 = x
        .iter()
        .zip(w)
        .map(|(&xi, &wi)| {
            let z = SQRT_2 * xi;
            let v = (s * (mp + 2.0 * sr * z - mp * z * z)).abs();
            wi * v * v * v
        })
        .sum();
    Ok(sum / PI.sqrt())
}

/// Berry–Esseen constant `B_μ = 6 T_μ / V̂_μ^{3/2}`.
pub fn berry_esseen_constant(p: f64, r: f64, mu: f64) -> Result<f64> {
    let v = dispersion_hat(p, r);
    if v == 0.0 {
        return Ok(0.0);
    }
    Ok(6.0 * third_moment(p, r, mu)? / v.powf(1.5))
}

/// Probability that an iid `N(0, μP)` vector lands in the shell
/// `μ²nP <= ‖x‖² <= nP`.
///
/// ```
/// let d = covert_tvd::throughput::truncation_mass(1000, 0.8).unwrap();
/// assert!(d > 0.99);
/// ```
pub fn truncation_mass(n: u64, mu: f64) -> Result<f64> {
    check_n("truncation_mass", n)?;
    check_open_unit("truncation_mass", "mu", mu)?;
    let a = n as f64 / 2.0;
    // 1 - P(‖x‖²/μP < nμ) - P(‖x‖²/μP > n/μ)
    let below = reg_lower_gamma(a, a * mu)?;
    let above = reg_upper_gamma(a, a / mu)?;
    Ok((1.0 - below - above).clamp(0.0, 1.0))
}

/// Converse normal approximation `nC - √(nV) Q⁻¹(ε) + ½ log₂ n`.
pub fn converse_na(n: u64, eps: f64, p: f64) -> Result<ThroughputReport> {
    check_n("converse_na", n)?;
    check_open_unit("converse_na", "eps", eps)?;
    check_power("converse_na", p)?;
    let nf = n as f64;
    Ok(ThroughputReport::new(
        ThroughputKind::ConverseNa,
        eps,
        nf * capacity(p),
        -(nf * dispersion(p)).sqrt() * q_inv(eps)?,
        0.5 * nf.log2(),
        0.0,
    ))
}

/// Achievability normal approximation with the truncated Gaussian codebook:
/// `nC_μ - √(nV_μ) Q⁻¹(ε) + ½ log₂ n + log₂ τ₀ + log₂ Δ`.
///
/// The Berry–Esseen condition `2B_μ/√n < ε` is reported in
/// `berry_esseen_margin` rather than enforced.
pub fn achievability_na(n: u64, eps: f64, p: f64, mu: f64, tau0: f64) -> Result<ThroughputReport> {
    check_n("achievability_na", n)?;
    check_open_unit("achievability_na", "eps", eps)?;
    check_power("achievability_na", p)?;
    check_open_unit("achievability_na", "mu", mu)?;
    if !(tau0 > 0.0 && tau0 < eps) {
        return Err(Error::domain(
            "achievability_na",
            format!("tau0 = {tau0} must lie in (0, eps)"),
        ));
    }
    let nf = n as f64;
    let mp = mu * p;
    let delta_mass = truncation_mass(n, mu)?;
    let mut report = ThroughputReport::new(
        ThroughputKind::AchievabilityNa,
        eps,
        nf * capacity(mp),
        -(nf * dispersion(mp)).sqrt() * q_inv(eps)?,
        0.5 * nf.log2(),
        tau0.log2() + delta_mass.log2(),
    );
    let b = berry_esseen_constant(p, mp, mu)?;
    report.berry_esseen_margin = Some(eps - 2.0 * b / nf.sqrt());
    Ok(report)
}

/// The `τ₀` candidates `ε·10^{-6(1 - i/50)}`, `i = 0..50`.
pub fn tau0_grid(eps: f64) -> Vec<f64> {
    (0..TAU0_GRID)
        .map(|i| eps * 10f64.powf(-6.0 * (1.0 - i as f64 / TAU0_GRID as f64)))
        .collect()
}

/// Terms of the full achievability bound at one `R` that do not involve
/// `τ₀`: `(second, other_without_tau0, margin)`; `None` when the
/// Berry–Esseen condition fails at this `R`.
fn full_terms(n: u64, eps: f64, p: f64, mu: f64, r: f64) -> Result<Option<(f64, f64, f64)>> {
    let nf = n as f64;
    let mp = mu * p;
    let v_hat = dispersion_hat(p, r);
    let b = berry_esseen_constant(p, r, mu)?;
    let margin = eps - 2.0 * b / nf.sqrt();
    if margin <= 0.0 || v_hat == 0.0 {
        return Ok(None);
    }
    let second = (nf * v_hat).sqrt() * q_inv(1.0 - margin)?;
    let drift = nf * (r - mp) * LOG2_E / (2.0 * (1.0 + mp));
    let penalty = (2.0 / (2.0 * PI * v_hat).sqrt() + 4.0 * b).log2();
    Ok(Some((second, drift - penalty, margin)))
}

/// Full achievability bound maximized over `R ∈ [μ²P, P]` (golden section)
/// and over the `τ₀` grid.
///
/// Fails with a regime error when `2B_μ/√n >= ε` for every `R`, since
/// `Q⁻¹(1 - ε + 2B_μ/√n)` is then undefined.
pub fn achievability_full(n: u64, eps: f64, p: f64, mu: f64) -> Result<ThroughputReport> {
    check_n("achievability_full", n)?;
    check_open_unit("achievability_full", "eps", eps)?;
    check_power("achievability_full", p)?;
    check_open_unit("achievability_full", "mu", mu)?;
    let regime = Error::Regime {
        routine: "achievability_full",
        a: n as f64 / 2.0,
        z: p,
        detail: "2B/sqrt(n) >= eps: blocklength too short for this error probability",
    };
    if p == 0.0 {
        return Err(regime);
    }
    let objective = |r: f64| -> Result<f64> {
        Ok(match full_terms(n, eps, p, mu, r)? {
            Some((second, other, _)) => second + other,
            None => f64::NEG_INFINITY,
        })
    };
    let (r_star, best) = golden_max(objective, mu * mu * p, p, 1e-10)?;
    if best == f64::NEG_INFINITY {
        return Err(regime);
    }
    let (second, other, margin) = full_terms(n, eps, p, mu, r_star)?.ok_or(regime)?;
    // τ₀ enters only through log₂ τ₀, so the supremum is the largest candidate
    let tau0 = tau0_grid(eps).into_iter().fold(0.0, f64::max);
    let nf = n as f64;
    let mut report = ThroughputReport::new(
        ThroughputKind::AchievabilityFull,
        eps,
        nf * capacity(mu * p),
        second,
        0.5 * nf.log2(),
        other + tau0.log2() + truncation_mass(n, mu)?.log2(),
    );
    report.berry_esseen_margin = Some(margin);
    report.r_star = Some(r_star);
    report.tau0 = Some(tau0);
    Ok(report)
}

/// `η = (1 - 2y + √(1-4y)) / (2y)`, i.e. `1 + θ` at the matching power.
fn eta_ln(y: f64, lambda: f64) -> f64 {
    (lambda * (1.0 + lambda) / (2.0 * y)).ln_1p()
}

/// Covert throughput bounds `(suf, nec)` for TVD budget `δ`.
///
/// `nec` takes its first-order term from `y` and its dispersion from `y₀`;
/// `suf` swaps the two.
pub fn covert_throughput_bounds(n: u64, eps: f64, delta: f64) -> Result<(ThroughputReport, ThroughputReport)> {
    check_n("covert_throughput_bounds", n)?;
    check_open_unit("covert_throughput_bounds", "eps", eps)?;
    let budget = CovertBudget::new(n, delta)?;
    let nf = n as f64;
    let qi = q_inv(eps)?;
    let ln_eta_y = eta_ln(budget.y, budget.lambda);
    let ln_eta_y0 = eta_ln(budget.y0, budget.lambda1);
    // √((n log₂²e / 2)(1 - η^{-2}))
    let spread = |ln_eta: f64| (nf * LOG2_E * LOG2_E / 2.0 * -(-2.0 * ln_eta).exp_m1()).sqrt();
    let logn = 0.5 * nf.log2();
    let nec = ThroughputReport::new(
        ThroughputKind::CovertNec,
        eps,
        nf * ln_eta_y * LOG2_E,
        -spread(ln_eta_y0) * qi,
        logn,
        0.0,
    );
    let suf = ThroughputReport::new(
        ThroughputKind::CovertSuf,
        eps,
        nf * ln_eta_y0 * LOG2_E,
        -spread(ln_eta_y) * qi,
        logn,
        0.0,
    );
    Ok((suf, nec))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn converse_examples() {
        let r = converse_na(2000, 0.5, 0.3).unwrap();
        assert!(r.term_second.abs() < 1e-12);
        assert!((r.bits - (2000.0 * capacity(0.3) + 0.5 * 2000f64.log2())).abs() < 1e-9);
        let z = converse_na(2000, 1e-3, 0.0).unwrap();
        assert!((z.bits - 0.5 * 2000f64.log2()).abs() < 1e-12);
        let v = converse_na(2000, 1e-3, 0.0224).unwrap();
        let c = 0.5 * 1.0224f64.log2();
        let disp = LOG2_E.powi(2) / 2.0 * (1.0 - 1.0 / 1.0224f64.powi(2));
        let expect = 2000.0 * c - (2000.0 * disp).sqrt() * q_inv(1e-3).unwrap() + 0.5 * 2000f64.log2();
        assert!((v.bits - expect).abs() < 1e-9);
        assert_eq!(v.bits, v.term_first + v.term_second + v.term_logn + v.term_other);
    }

    #[test]
    fn achievability_below_converse() {
        for n in [500, 1000, 2000, 5000] {
            for mu in [0.7, 0.8, 0.85] {
                let a = achievability_na(n, 1e-3, 0.0224, mu, 1e-4).unwrap();
                let c = converse_na(n, 1e-3, 0.0224).unwrap();
                assert!(a.bits <= c.bits, "n={n} mu={mu}");
                assert!(a.berry_esseen_margin.unwrap() < 0.0);
            }
        }
    }

    #[test]
    fn achievability_collapse_near_one() {
        let n = 1_000_000;
        let r = achievability_na(n, 0.5, 0.1, 0.999_999, 0.499_999).unwrap();
        let target = n as f64 * capacity(0.1) + 0.5 * (n as f64).log2() - 1.0;
        // Δ vanishes as μ → 1, so only the remaining terms collapse
        let without_delta = r.bits - truncation_mass(n, 0.999_999).unwrap().log2();
        assert!((without_delta - target).abs() < 0.1, "{without_delta} vs {target}");
    }

    #[test]
    fn dispersion_hat_reduces_to_dispersion() {
        for p in [0.01, 0.5, 3.0] {
            assert!((dispersion_hat(p, p) / dispersion(p) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn third_moment_limits() {
        assert_eq!(third_moment(0.0, 0.0, 0.8).unwrap(), 0.0);
        // small power: T ≈ (log₂e)³ R^{3/2} E|Z|³
        let p: f64 = 1e-6;
        let r = 0.8 * p;
        let expect = LOG2_E.powi(3) * r.powf(1.5) * 2.0 * (2.0 / PI).sqrt();
        assert!((third_moment(p, r, 0.8).unwrap() / expect - 1.0).abs() < 1e-3);
        let b = berry_esseen_constant(p, r, 0.8).unwrap();
        assert!((b - 12.0 * (2.0 / PI).sqrt()).abs() < 0.02, "{b}");
    }

    #[test]
    fn truncation_mass_examples() {
        assert!(truncation_mass(1000, 0.999_999).unwrap() < 1e-3);
        assert!(truncation_mass(1000, 1e-6).unwrap() > 1.0 - 1e-12);
        let d = truncation_mass(1000, 0.8).unwrap();
        let direct =
            crate::special_fn::chi2_cdf(1000, 1250.0).unwrap() - crate::special_fn::chi2_cdf(1000, 800.0).unwrap();
        assert!((d - direct).abs() < 1e-13);
        assert!(truncation_mass(4000, 0.8).unwrap() > d);
    }

    #[test]
    fn full_bound_needs_long_blocks() {
        assert!(matches!(
            achievability_full(2000, 1e-3, 0.0224, 0.8),
            Err(Error::Regime { .. })
        ));
        let r = achievability_full(100_000, 0.3, 1.0, 0.8).unwrap();
        let rs = r.r_star.unwrap();
        assert!((0.64..=1.0).contains(&rs));
        assert!(r.berry_esseen_margin.unwrap() > 0.0);
        assert!((r.bits - (r.term_first + r.term_second + r.term_logn + r.term_other)).abs() < 1e-9);
        assert!(r.tau0.unwrap() < 0.3);
    }

    #[test]
    fn tau0_grid_shape() {
        let g = tau0_grid(1e-3);
        assert_eq!(g.len(), 50);
        assert!((g[0] - 1e-9).abs() < 1e-21);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(*g.last().unwrap() < 1e-3);
    }

    #[test]
    fn covert_examples() {
        let (suf, nec) = covert_throughput_bounds(2000, 1e-3, 0.1).unwrap();
        assert!(suf.bits <= nec.bits);
        let (suf, nec) = covert_throughput_bounds(2000, 1e-3, 1e-12).unwrap();
        assert!(suf.term_first.abs() < 1e-3 && nec.term_first.abs() < 1e-3);
        let (suf, nec) = covert_throughput_bounds(2000, 0.5, 0.1).unwrap();
        assert!(suf.term_second.abs() < 1e-12 && nec.term_second.abs() < 1e-12);
        assert_eq!(nec.kind, ThroughputKind::CovertNec);
    }

    #[test]
    fn covert_first_term_scales_like_sqrt_n() {
        let mut scaled = Vec::new();
        for n in [1_000u64, 10_000, 100_000, 1_000_000] {
            let (_, nec) = covert_throughput_bounds(n, 1e-3, 0.1).unwrap();
            scaled.push(nec.term_first / (n as f64).sqrt());
        }
        assert!(
            scaled.windows(2).all(|w| (w[1] - w[0]).abs() < 0.01 * w[0]),
            "{scaled:?}"
        );
    }
}
