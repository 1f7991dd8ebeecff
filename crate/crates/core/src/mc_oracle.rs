//! Two oracles for the exact TVD that share no code path with the
//! incomplete-gamma evaluation: radial quadrature of the density
//! difference, and a seeded Monte Carlo run of the likelihood-ratio test.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::ChiSquared;
use serde::Serialize;

use crate::divergences::ChannelPoint;
use crate::numeric::integrate_gk15;
use crate::tvd::{TvdEvaluation, TvdMethod};
use crate::{Error, Result};

/// Absolute error target of [`tvd_quadrature`].
pub const QUADRATURE_TOL: f64 = 1e-10;

/// Fixed number of RNG shards; results do not depend on the thread count.
pub const SHARDS: u64 = 64;

/// Squared-radius threshold `R² = nσ²(1+θ) ln(1+θ)/θ` of the optimal test.
///
/// ```
/// use covert_tvd::{divergences::ChannelPoint, mc_oracle::lrt_threshold};
/// let r2 = lrt_threshold(&ChannelPoint::new(2, 1.0, 1.0).unwrap()).unwrap();
/// assert!((r2 - 4.0 * 2f64.ln()).abs() < 1e-15);
/// ```
pub fn lrt_threshold(point: &ChannelPoint) -> Result<f64> {
    if point.theta == 0.0 {
        return Err(Error::Degenerate);
    }
    let t = point.theta;
    Ok(point.n as f64 * point.sigma2 * (1.0 + t) * t.ln_1p() / t)
}

/// Empirical error probabilities of the threshold test on `‖z‖²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectionEstimate {
    /// False alarm rate, `P̂₀(‖z‖² > R²)`.
    pub alpha_hat: f64,
    /// Missed detection rate, `P̂₁(‖z‖² <= R²)`.
    pub beta_hat: f64,
    pub samples: u64,
    pub seed: u64,
    /// Standard error of `α̂ + β̂`.
    pub std_err: f64,
    pub threshold: f64,
}

impl DetectionEstimate {
    /// `1 - α̂ - β̂`.
    pub fn tvd_estimate(&self) -> f64 {
        1.0 - self.alpha_hat - self.beta_hat
    }

    pub fn to_evaluation(&self) -> TvdEvaluation {
        TvdEvaluation {
            value: self.tvd_estimate().clamp(0.0, 1.0),
            method: TvdMethod::MonteCarlo,
            terms_used: self.samples as usize,
            err_estimate: self.std_err,
        }
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

fn shard_rng(seed: u64, shard: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(shard)))
}

/// Counts `(false alarms, misses)` for one shard of `m` draws per hypothesis.
fn run_shard(chi: &ChiSquared<f64>, cut0: f64, cut1: f64, m: u64, seed: u64, shard: u64) -> (u64, u64) {
    let mut rng = shard_rng(seed, shard);
    let mut alarms = 0;
    let mut misses = 0;
    for _ in 0..m {
        // ‖z‖²/σ² under H₀ and ‖z‖²/σ₁² under H₁ are both χ²_n
        if rng.sample(chi) > cut0 {
            alarms += 1;
        }
        if rng.sample(chi) <= cut1 {
            misses += 1;
        }
    }
    (alarms, misses)
}

/// Monte Carlo estimate of `α` and `β` at the optimal threshold.
pub fn simulate_test(point: &ChannelPoint, m: u64, seed: u64) -> Result<DetectionEstimate> {
    let r2 = lrt_threshold(point)?;
    simulate_test_with_threshold(point, r2, m, seed)
}

/// Monte Carlo estimate of `α` and `β` for an arbitrary threshold `R²`.
///
/// Draws are split over [`SHARDS`] independently seeded streams and the
/// integer counts are summed, so the output depends only on the seed.
pub fn simulate_test_with_threshold(point: &ChannelPoint, r2: f64, m: u64, seed: u64) -> Result<DetectionEstimate> {
    if m == 0 {
        return Err(Error::domain("simulate_test", "sample count m must be positive"));
    }
    if !r2.is_finite() || r2 < 0.0 {
        return Err(Error::domain(
            "simulate_test",
            format!("threshold R^2 = {r2} must be nonnegative"),
        ));
    }
    let chi = ChiSquared::new(point.n as f64).map_err(|e| Error::domain("simulate_test", e.to_string()))?;
    let cut0 = r2 / point.sigma2;
    let cut1 = r2 / point.sigma1_sq();
    let share = |shard: u64| m / SHARDS + u64::from(shard < m % SHARDS);
    let counts = shard_counts(&chi, cut0, cut1, seed, &share);
    let (alarms, misses) = counts.iter().fold((0, 0), |acc, c| (acc.0 + c.0, acc.1 + c.1));
    let mf = m as f64;
    let alpha_hat = alarms as f64 / mf;
    let beta_hat = misses as f64 / mf;
    let var = alpha_hat * (1.0 - alpha_hat) + beta_hat * (1.0 - beta_hat);
    Ok(DetectionEstimate {
        alpha_hat,
        beta_hat,
        samples: m,
        seed,
        std_err: (var / mf).sqrt(),
        threshold: r2,
    })
}

#[cfg(feature = "parallel")]
fn shard_counts<S>(chi: &ChiSquared<f64>, cut0: f64, cut1: f64, seed: u64, share: &S) -> Vec<(u64, u64)>
where
    S: Fn(u64) -> u64 + Sync,
{
    use rayon::prelude::*;
    (0..SHARDS)
        .into_par_iter()
        .map(|s| run_shard(chi, cut0, cut1, share(s), seed, s))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn shard_counts<S>(chi: &ChiSquared<f64>, cut0: f64, cut1: f64, seed: u64, share: &S) -> Vec<(u64, u64)>
where
    S: Fn(u64) -> u64,
{
    (0..SHARDS)
        .map(|s| run_shard(chi, cut0, cut1, share(s), seed, s))
        .collect()
}

/// `ln Γ(n/2)` by the half-integer product, independent of the special
/// function module.
fn ln_gamma_half_integer(n: u64) -> f64 {
    let (mut x, mut acc) = if n.is_multiple_of(2) {
        (1.0, 0.0)
    } else {
        (0.5, 0.5 * std::f64::consts::PI.ln())
    };
    let target = n as f64 / 2.0;
    while x < target {
        acc += x.ln();
        x += 1.0;
    }
    acc
}

/// TVD as the integral over `r ∈ [0, R]` of the difference of the two
/// radial densities of `‖z‖`.
///
/// ```
/// use covert_tvd::{divergences::ChannelPoint, mc_oracle::tvd_quadrature};
/// let v = tvd_quadrature(&ChannelPoint::new(2, 1.0, 1.0).unwrap()).unwrap();
/// assert!((v.value - 0.25).abs() < 1e-10);
/// ```
pub fn tvd_quadrature(point: &ChannelPoint) -> Result<TvdEvaluation> {
    let mut eval = TvdEvaluation {
        value: 0.0,
        method: TvdMethod::Quadrature,
        terms_used: 0,
        err_estimate: QUADRATURE_TOL,
    };
    if point.theta == 0.0 {
        return Ok(eval);
    }
    let nf = point.n as f64;
    let half = nf / 2.0;
    let lg = ln_gamma_half_integer(point.n);
    let s0 = point.sigma2;
    let s1 = point.sigma1_sq();
    let ln_norm = |s: f64| std::f64::consts::LN_2 - half * (2.0 * s).ln() - lg;
    let (c0, c1) = (ln_norm(s0), ln_norm(s1));
    let density_gap = |r: f64| {
        if r <= 0.0 {
            // the radial density at 0 is 0 for n >= 2 and the constant prefactor for n = 1
            return if point.n == 1 { c0.exp() - c1.exp() } else { 0.0 };
        }
        let lr = (nf - 1.0) * r.ln();
        (c0 + lr - r * r / (2.0 * s0)).exp() - (c1 + lr - r * r / (2.0 * s1)).exp()
    };
    let radius = lrt_threshold(point)?.sqrt();
    let mut cuts = vec![0.0];
    for s in [s0, s1] {
        let mode = ((nf - 1.0) * s).sqrt();
        let width = s.sqrt();
        for c in [mode - 8.0 * width, mode, mode + 8.0 * width] {
            if c > 0.0 && c < radius {
                cuts.push(c);
            }
        }
    }
    cuts.push(radius);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let pieces = cuts.len() - 1;
    let mut total = 0.0;
    for w in cuts.windows(2) {
        total += integrate_gk15(&density_gap, w[0], w[1], QUADRATURE_TOL / pieces as f64, 100_000)?;
    }
    eval.value = total.clamp(0.0, 1.0);
    eval.terms_used = pieces;
    Ok(eval)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_fn::ln_gamma;
    use crate::tvd::{fg, tvd_exact};

    fn pt(n: u64, theta: f64) -> ChannelPoint {
        ChannelPoint::new(n, 1.0, theta).unwrap()
    }

    #[test]
    fn threshold_examples() {
        assert!(matches!(lrt_threshold(&pt(5, 0.0)), Err(Error::Degenerate)));
        let r2 = lrt_threshold(&pt(100, 1e-10)).unwrap();
        assert!((r2 / 100.0 - 1.0).abs() < 1e-9);
        let p = ChannelPoint::new(300, 2.5, 0.2).unwrap();
        let r2 = lrt_threshold(&p).unwrap();
        let pair = fg(&p);
        assert!((r2 / (2.0 * p.sigma2) / pair.f - 1.0).abs() < 1e-12);
        assert!((r2 / (2.0 * p.sigma1_sq()) / pair.g - 1.0).abs() < 1e-12);
    }

    #[test]
    fn half_integer_gamma() {
        for n in [1u64, 2, 3, 10, 501, 2000] {
            let a = ln_gamma_half_integer(n);
            let b = ln_gamma(n as f64 / 2.0).unwrap();
            assert!((a - b).abs() < 1e-11 * (1.0 + b.abs()), "n={n}");
        }
    }

    #[test]
    fn quadrature_examples() {
        assert_eq!(tvd_quadrature(&pt(10, 0.0)).unwrap().value, 0.0);
        assert!((tvd_quadrature(&pt(2, 1.0)).unwrap().value - 0.25).abs() < 1e-10);
        let p = pt(500, 500f64.powf(-0.5));
        let q = tvd_quadrature(&p).unwrap().value;
        assert!((q - tvd_exact(&p).unwrap().value).abs() < 1e-8);
        let p = ChannelPoint::new(1, 3.0, 0.7).unwrap();
        assert!((tvd_quadrature(&p).unwrap().value - tvd_exact(&p).unwrap().value).abs() < 1e-8);
    }

    #[test]
    fn simulation_is_deterministic() {
        let p = pt(50, 0.3);
        let a = simulate_test(&p, 20_000, 7).unwrap();
        let b = simulate_test(&p, 20_000, 7).unwrap();
        assert_eq!(a, b);
        let c = simulate_test(&p, 20_000, 8).unwrap();
        assert_ne!(a.alpha_hat, c.alpha_hat);
    }

    #[test]
    fn identical_hypotheses() {
        let p = pt(40, 0.0);
        let est = simulate_test_with_threshold(&p, 40.0, 20_000, 3).unwrap();
        assert!((est.alpha_hat + est.beta_hat - 1.0).abs() <= 3.0 * est.std_err.max(1e-12));
        assert!(matches!(simulate_test(&p, 100, 1), Err(Error::Degenerate)));
        assert!(simulate_test(&pt(40, 0.1), 0, 1).is_err());
    }

    #[test]
    fn uneven_sample_split() {
        let est = simulate_test(&pt(20, 0.5), 10_007, 11).unwrap();
        assert_eq!(est.samples, 10_007);
        let alarms = est.alpha_hat * 10_007.0;
        assert!((alarms - alarms.round()).abs() < 1e-6);
    }
}
