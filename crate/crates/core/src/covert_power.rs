//! Covert power levels for a TVD budget `δ`.
//!
//! Inverting the Hellinger lower bound `H² <= TVD` gives the necessary
//! level `P_NEC`; inverting the Sason upper bound gives the sufficient
//! level `P_SUF`. The exact level lies between them and is found by
//! bisection on the exact TVD.

use serde::Serialize;

use crate::divergences::ChannelPoint;
use crate::numeric::bisect;
use crate::tvd::tvd_exact;
use crate::{Error, Result};

/// Relative tolerance on `θ` for [`p_exact`].
pub const EXACT_REL_TOL: f64 = 1e-10;

/// A TVD budget together with the intermediates of the closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CovertBudget {
    pub delta: f64,
    pub n: u64,
    /// `¼(1-δ)^{4/n}`
    pub y: f64,
    /// `¼(1-δ²)^{2/n}`
    pub y0: f64,
    /// `√(1-4y)`
    pub lambda: f64,
    /// `√(1-4y₀)`
    pub lambda1: f64,
}

impl CovertBudget {
    pub fn new(n: u64, delta: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("CovertBudget", "blocklength n must be at least 1"));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::domain(
                "CovertBudget",
                format!("delta = {delta} must lie in (0, 1)"),
            ));
        }
        let nf = n as f64;
        let ln_y4 = 4.0 / nf * (-delta).ln_1p();
        let ln_y04 = 2.0 / nf * (-delta * delta).ln_1p();
        Ok(Self {
            delta,
            n,
            y: 0.25 * ln_y4.exp(),
            y0: 0.25 * ln_y04.exp(),
            lambda: (-ln_y4.exp_m1()).sqrt(),
            lambda1: (-ln_y04.exp_m1()).sqrt(),
        })
    }

    /// snr at the necessary level, `(1-2y+λ)/(2y) - 1`.
    pub fn theta_nec(&self) -> f64 {
        theta_from(self.y, self.lambda)
    }

    /// snr at the sufficient level, same form with `y₀`.
    pub fn theta_suf(&self) -> f64 {
        theta_from(self.y0, self.lambda1)
    }
}

/// `(1 - 2y + λ)/(2y) - 1` rewritten as `λ(1+λ)/(2y)` using `1 - 4y = λ²`.
fn theta_from(y: f64, lambda: f64) -> f64 {
    lambda * (1.0 + lambda) / (2.0 * y)
}

/// `P_SUF <= P_exact <= P_NEC`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerInterval {
    pub p_suf: f64,
    pub p_exact: f64,
    pub p_nec: f64,
}

fn check_sigma2(routine: &'static str, sigma2: f64) -> Result<()> {
    if !sigma2.is_finite() || sigma2 <= 0.0 {
        return Err(Error::domain(
            routine,
            format!("sigma2 = {sigma2} must be positive and finite"),
        ));
    }
    Ok(())
}

/// Necessary power: the `θσ²` at which `H² = δ`.
///
/// ```
/// let p = covert_tvd::covert_power::p_nec(2000, 0.1, 1.0).unwrap();
/// assert!(p > 0.0 && p < 0.05);
/// ```
pub fn p_nec(n: u64, delta: f64, sigma2: f64) -> Result<f64> {
    check_sigma2("p_nec", sigma2)?;
    Ok(CovertBudget::new(n, delta)?.theta_nec() * sigma2)
}

/// Sufficient power: the `θσ²` at which the Sason bound equals `δ`.
pub fn p_suf(n: u64, delta: f64, sigma2: f64) -> Result<f64> {
    check_sigma2("p_suf", sigma2)?;
    Ok(CovertBudget::new(n, delta)?.theta_suf() * sigma2)
}

/// Exact covert power by bisection on `TVD(θ) = δ` between the closed forms.
///
/// ```
/// let iv = covert_tvd::covert_power::p_exact(2, 0.25, 1.0).unwrap();
/// assert!((iv.p_exact - 1.0).abs() < 1e-9);
/// ```
pub fn p_exact(n: u64, delta: f64, sigma2: f64) -> Result<PowerInterval> {
    check_sigma2("p_exact", sigma2)?;
    let budget = CovertBudget::new(n, delta)?;
    let lo = budget.theta_suf();
    let hi = budget.theta_nec();
    let gap = |theta: f64| -> Result<f64> {
        let point = ChannelPoint::new(n, 1.0, theta)?;
        Ok(tvd_exact(&point)?.value - delta)
    };
    let theta = bisect(gap, lo, hi, EXACT_REL_TOL).map_err(|e| match e {
        Error::Bracket(msg) => Error::Bracket(format!("exact TVD not sandwiched by P_SUF, P_NEC: {msg}")),
        other => other,
    })?;
    Ok(PowerInterval {
        p_suf: lo * sigma2,
        p_exact: theta * sigma2,
        p_nec: hi * sigma2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divergences::{hellinger_sq, tvd_bounds};

    #[test]
    fn budget_invariants() {
        let b = CovertBudget::new(2000, 0.1).unwrap();
        assert!(b.y > 0.0 && b.y <= 0.25 && b.y0 > 0.0 && b.y0 <= 0.25);
        assert!((b.lambda * b.lambda - (1.0 - 4.0 * b.y)).abs() < 1e-15);
        let tiny = CovertBudget::new(2000, 1e-12).unwrap();
        assert!((tiny.y - 0.25).abs() < 1e-14 && (tiny.y0 - 0.25).abs() < 1e-14);
        assert!(CovertBudget::new(10, 0.0).is_err());
        assert!(CovertBudget::new(10, 1.0).is_err());
        assert!(CovertBudget::new(0, 0.5).is_err());
    }

    #[test]
    fn closed_forms_match_naive_expression() {
        let b = CovertBudget::new(2000, 0.1).unwrap();
        let naive = (1.0 - 2.0 * b.y + (1.0 - 4.0 * b.y).sqrt()) / (2.0 * b.y) - 1.0;
        assert!((b.theta_nec() / naive - 1.0).abs() < 1e-9);
    }

    #[test]
    fn nec_inverts_hellinger() {
        let p = p_nec(2000, 0.1, 1.0).unwrap();
        let h2 = hellinger_sq(&ChannelPoint::new(2000, 1.0, p).unwrap());
        assert!((h2 - 0.1).abs() < 1e-12);
        let p = p_nec(2000, 0.1, 3.0).unwrap();
        assert!((hellinger_sq(&ChannelPoint::new(2000, 3.0, p / 3.0).unwrap()) - 0.1).abs() < 1e-12);
    }

    #[test]
    fn suf_inverts_sason() {
        for delta in [0.01, 0.1] {
            let p = p_suf(2000, delta, 1.0).unwrap();
            let s = tvd_bounds(&ChannelPoint::new(2000, 1.0, p).unwrap()).sason_upper;
            assert!((s - delta).abs() < 1e-12, "{delta}: {s}");
            assert!(p < p_nec(2000, delta, 1.0).unwrap());
        }
    }

    #[test]
    fn small_budget_limits() {
        let iv = p_exact(1000, 1e-9, 1.0).unwrap();
        assert!(iv.p_nec < 1e-3 && iv.p_suf < iv.p_nec);
        assert!(iv.p_exact < 1e-5);
        assert!(p_nec(1000, 1e-14, 1.0).unwrap() < 1e-7);
    }

    #[test]
    fn monotone_in_delta_and_n() {
        let mut prev = 0.0;
        for delta in [0.01, 0.05, 0.1, 0.3, 0.6] {
            let p = p_nec(2000, delta, 1.0).unwrap();
            assert!(p > prev);
            prev = p;
        }
        let mut prev = PowerInterval {
            p_suf: f64::INFINITY,
            p_exact: f64::INFINITY,
            p_nec: f64::INFINITY,
        };
        for n in [500, 1000, 2000, 5000] {
            let iv = p_exact(n, 0.1, 1.0).unwrap();
            assert!(iv.p_suf < prev.p_suf && iv.p_exact < prev.p_exact && iv.p_nec < prev.p_nec);
            prev = iv;
        }
    }

    #[test]
    fn two_dimensional_closed_form() {
        let iv = p_exact(2, 0.25, 1.0).unwrap();
        assert!((iv.p_exact - 1.0).abs() < 1e-9);
        assert!(iv.p_suf <= iv.p_exact && iv.p_exact <= iv.p_nec);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(p_nec(10, 0.1, 0.0), Err(Error::Domain { .. })));
        assert!(matches!(p_suf(10, 1.5, 1.0), Err(Error::Domain { .. })));
        assert!(matches!(p_exact(0, 0.1, 1.0), Err(Error::Domain { .. })));
    }
}
