//! Divergences between the adversary's two hypotheses and the TVD bounds
//! built from them.
//!
//! Under `H₀` the adversary observes `N(0, σ² I_n)`, under `H₁`
//! `N(0, σ²(1+θ) I_n)`. Every quantity here depends on `σ²` only through
//! `θ`.

use serde::Serialize;

use crate::numeric::log1pmx;
use crate::{Error, Result};

/// One operating point: blocklength, noise variance and snr.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelPoint {
    pub n: u64,
    pub sigma2: f64,
    pub theta: f64,
}

impl ChannelPoint {
    pub fn new(n: u64, sigma2: f64, theta: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("ChannelPoint", "blocklength n must be at least 1"));
        }
        if !sigma2.is_finite() || sigma2 <= 0.0 {
            return Err(Error::domain(
                "ChannelPoint",
                format!("sigma2 = {sigma2} must be positive and finite"),
            ));
        }
        if !theta.is_finite() || theta < 0.0 {
            return Err(Error::domain(
                "ChannelPoint",
                format!("theta = {theta} must be nonnegative and finite"),
            ));
        }
        Ok(Self { n, sigma2, theta })
    }

    /// Point on the scaling law `θ = n^{-τ}`.
    pub fn from_tau(n: u64, sigma2: f64, tau: f64) -> Result<Self> {
        if !tau.is_finite() {
            return Err(Error::domain("ChannelPoint", format!("tau = {tau} must be finite")));
        }
        Self::new(n, sigma2, (n as f64).powf(-tau))
    }

    /// Variance under `H₁`.
    pub fn sigma1_sq(&self) -> f64 {
        self.sigma2 * (1.0 + self.theta)
    }

    /// Per-symbol transmit power `θσ²`.
    pub fn power(&self) -> f64 {
        self.theta * self.sigma2
    }

    pub(crate) fn half_n(&self) -> f64 {
        self.n as f64 / 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    Bits,
    Nats,
}

impl Units {
    fn scale(self) -> f64 {
        match self {
            Units::Bits => std::f64::consts::LOG2_E,
            Units::Nats => 1.0,
        }
    }
}

/// `(D(P₁‖P₀), D(P₀‖P₁))` in bits.
///
/// ```
/// use covert_tvd::divergences::{kl_divergences, ChannelPoint};
/// let (fwd, rev) = kl_divergences(&ChannelPoint::new(2, 1.0, 1.0).unwrap());
/// assert!((fwd - 0.442_695_040_888_963_4).abs() < 1e-12);
/// assert!(rev < fwd);
/// ```
pub fn kl_divergences(point: &ChannelPoint) -> (f64, f64) {
    kl_divergences_in(point, Units::Bits)
}

/// `(D(P₁‖P₀), D(P₀‖P₁))` in the requested units.
pub fn kl_divergences_in(point: &ChannelPoint, units: Units) -> (f64, f64) {
    let t = point.theta;
    let lm = log1pmx(t);
    // θ - ln(1+θ) and ln(1+θ) + 1/(1+θ) - 1, both free of cancellation near 0
    let fwd = -point.half_n() * lm;
    let rev = point.half_n() * (lm + t * t / (1.0 + t));
    (fwd * units.scale(), rev.max(0.0) * units.scale())
}

/// Squared Hellinger distance `1 - (4(1+θ)/(2+θ)²)^{n/4}`.
pub fn hellinger_sq(point: &ChannelPoint) -> f64 {
    let t = point.theta;
    // ln of the base: ln(1+θ) - 2 ln(1+θ/2)
    let ln_base = log1pmx(t) - 2.0 * log1pmx(0.5 * t);
    (-(point.n as f64 / 4.0 * ln_base).exp_m1()).clamp(0.0, 1.0)
}

/// Divergences and the TVD bounds derived from them.
///
/// `hellinger_sq` doubles as the lower bound on the TVD. KL values are in
/// bits; the bounds use natural-log KL internally.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundsReport {
    pub kl_fwd: f64,
    pub kl_rev: f64,
    pub hellinger_sq: f64,
    pub pinsker_upper: f64,
    pub sason_upper: f64,
    pub sqrt2h_upper: f64,
    pub kl_exp_upper: f64,
}

/// All divergence-based TVD bounds at one point.
///
/// ```
/// use covert_tvd::divergences::{tvd_bounds, ChannelPoint};
/// let b = tvd_bounds(&ChannelPoint::new(2, 1.0, 3.0).unwrap());
/// assert!((b.hellinger_sq - 0.2).abs() < 1e-15);
/// assert!((b.sason_upper - 0.6).abs() < 1e-15);
/// ```
pub fn tvd_bounds(point: &ChannelPoint) -> BoundsReport {
    let (kl_fwd, kl_rev) = kl_divergences(point);
    let (fwd_nats, _) = kl_divergences_in(point, Units::Nats);
    let h2 = hellinger_sq(point);
    BoundsReport {
        kl_fwd,
        kl_rev,
        hellinger_sq: h2,
        pinsker_upper: (fwd_nats / 2.0).sqrt(),
        sason_upper: (h2 * (2.0 - h2)).sqrt(),
        sqrt2h_upper: (2.0 * h2).sqrt(),
        kl_exp_upper: (-(-fwd_nats).exp_m1()).sqrt(),
    }
}

/// `((1-β)/ln(1/β)) · D(P₀‖P₁)` in nats.
///
/// `beta` defaults to the missed-detection probability of the optimal test,
/// `P(n/2, g)`. This is the β-parameterized expression as displayed; it is
/// a lower bound only under the conditions of its source inequality.
pub fn kl_beta_lower(point: &ChannelPoint, beta: Option<f64>) -> Result<f64> {
    let beta = match beta {
        Some(b) => b,
        None => {
            if point.theta == 0.0 {
                return Ok(0.0);
            }
            let g = point.half_n() * point.theta.ln_1p() / point.theta;
            crate::special_fn::reg_lower_gamma(point.half_n(), g)?
        }
    };
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::domain(
            "kl_beta_lower",
            format!("beta = {beta} must lie in (0, 1)"),
        ));
    }
    let (_, rev) = kl_divergences_in(point, Units::Nats);
    Ok((1.0 - beta) / (-beta.ln()) * rev)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(n: u64, theta: f64) -> ChannelPoint {
        ChannelPoint::new(n, 1.0, theta).unwrap()
    }

    #[test]
    fn channel_point_validation() {
        assert!(ChannelPoint::new(0, 1.0, 1.0).is_err());
        assert!(ChannelPoint::new(1, 0.0, 1.0).is_err());
        assert!(ChannelPoint::new(1, 1.0, -0.1).is_err());
        assert!(ChannelPoint::new(1, 1.0, f64::NAN).is_err());
        let p = ChannelPoint::from_tau(100, 2.0, 0.5).unwrap();
        assert!((p.theta - 0.1).abs() < 1e-15);
        assert!((p.power() - 0.2).abs() < 1e-15);
        assert!((p.sigma1_sq() - 2.2).abs() < 1e-15);
    }

    #[test]
    fn kl_examples() {
        assert_eq!(kl_divergences(&pt(1000, 0.0)), (0.0, 0.0));
        let (fwd, rev) = kl_divergences(&pt(2, 1.0));
        let l2e = std::f64::consts::LOG2_E;
        assert!((fwd - (1.0 - 2f64.ln()) * l2e).abs() < 1e-15);
        assert!((rev - (2f64.ln() - 0.5) * l2e).abs() < 1e-15);
        assert!((rev - 0.278_652_479_555_518_3).abs() < 1e-12);
        assert!(rev < fwd);
    }

    #[test]
    fn kl_rev_small_theta_scaling() {
        for &n in &[10u64, 1000, 100_000] {
            for &t in &[1e-2, 1e-3, 1e-5, 1e-8] {
                let (_, rev) = kl_divergences_in(&pt(n, t), Units::Nats);
                let ratio = rev / (n as f64 / 4.0 * t * t);
                assert!((0.9..=1.0).contains(&ratio), "n={n} t={t} ratio={ratio}");
            }
        }
    }

    #[test]
    fn hellinger_examples() {
        assert_eq!(hellinger_sq(&pt(100, 0.0)), 0.0);
        assert!((hellinger_sq(&pt(2, 3.0)) - 0.2).abs() < 1e-15);
        assert!(hellinger_sq(&pt(1_000_000, 0.5)) > 1.0 - 1e-12);
        // tiny θ stays accurate: H² ≈ nθ²/16
        let h = hellinger_sq(&pt(1000, 1e-6));
        assert!((h / (1000.0 * 1e-12 / 16.0) - 1.0).abs() < 1e-5);
    }

    #[test]
    fn bound_examples() {
        let zero = tvd_bounds(&pt(50, 0.0));
        assert_eq!(zero.pinsker_upper, 0.0);
        assert_eq!(zero.sason_upper, 0.0);
        assert_eq!(zero.kl_exp_upper, 0.0);
        assert_eq!(zero.sqrt2h_upper, 0.0);
        let b = tvd_bounds(&pt(1000, 0.05));
        assert!(b.sason_upper <= b.pinsker_upper);
        assert!(b.hellinger_sq <= b.sason_upper && b.sason_upper <= b.sqrt2h_upper);
    }

    #[test]
    fn beta_lower_defaults() {
        let p = pt(1000, 0.1);
        let v = kl_beta_lower(&p, None).unwrap();
        assert!(v.is_finite() && v >= 0.0);
        assert!(kl_beta_lower(&p, Some(1.0)).is_err());
        assert_eq!(kl_beta_lower(&pt(10, 0.0), None).unwrap(), 0.0);
    }
}
