//! Asymptotic expansions of the incomplete gamma function in three regimes
//! (below, above and around the transition point `z ≈ a`) and the Stirling
//! approximation of `Γ(n/2)`.
//!
//! All evaluators return the regularized quantity for shape `a + 1`, i.e.
//! `γ(a+1, z)/Γ(a+1)` or `Γ(a+1, z)/Γ(a+1)`, with the prefactor assembled in
//! log space.

use serde::Serialize;

use crate::special_fn::{erfc, ln_prefix};
use crate::{Error, Result};

/// Largest truncation order accepted by [`coeffs_c`].
pub const MAX_ORDER: usize = 60;

/// Truncation order used when callers have no preference.
pub const DEFAULT_ORDER: usize = 20;

/// Coefficients of the linear-argument expansions.
///
/// `c[k]` are the Taylor coefficients of `e^{at}(1-t)^a`; `c_star[k]` equals
/// `(-1)^k k! c[k]` but is produced by its own recurrence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionCoeffs {
    pub a: f64,
    pub c: Vec<f64>,
    pub c_star: Vec<f64>,
    pub order: usize,
}

/// Coefficients `c_0..c_K` and `c*_0..c*_K` for shape `a`.
///
/// ```
/// let co = covert_tvd::gamma_expansions::coeffs_c(10.0, 2).unwrap();
/// assert_eq!(co.c, vec![1.0, 0.0, -5.0]);
/// assert_eq!(co.c_star[2], -10.0);
/// ```
pub fn coeffs_c(a: f64, order: usize) -> Result<ExpansionCoeffs> {
    check_shape("coeffs_c", a)?;
    if order > MAX_ORDER {
        return Err(Error::Order { order, max: MAX_ORDER });
    }
    let mut c = vec![1.0, 0.0];
    let mut c_star = vec![1.0, 0.0];
    for k in 1..order {
        let kf = k as f64;
        c.push((kf * c[k] - a * c[k - 1]) / (kf + 1.0));
        c_star.push(-kf * (c_star[k] + a * c_star[k - 1]));
    }
    c.truncate(order + 1);
    c_star.truncate(order + 1);
    Ok(ExpansionCoeffs { a, c, c_star, order })
}

/// Coefficients of the transition-point expansion: `c_0 = 1`, `c_1 = c_2 = 0`,
/// `(k+1) c_{k+1} = a c_{k-2} - k c_k`.
pub fn transition_coeffs(a: f64, order: usize) -> Result<Vec<f64>> {
    check_shape("transition_coeffs", a)?;
    if order > MAX_ORDER {
        return Err(Error::Order { order, max: MAX_ORDER });
    }
    let mut c = vec![1.0, 0.0, 0.0];
    for k in 2..order {
        let kf = k as f64;
        c.push((a * c[k - 2] - kf * c[k]) / (kf + 1.0));
    }
    c.truncate(order + 1);
    Ok(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhiRegime {
    LinearArgument,
    Transition,
}

/// `Φ_0..Φ_K` for one `(a, z)`.
///
/// For the linear-argument regime `decay_ratio[k] = Φ_k (a-z)^{k+1} / k!`,
/// which tends to 1 as `a - z` grows. It is empty for the transition regime.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhiSequence {
    pub values: Vec<f64>,
    pub regime: PhiRegime,
    pub a: f64,
    pub z: f64,
    pub decay_ratio: Vec<f64>,
}

fn check_shape(routine: &'static str, a: f64) -> Result<()> {
    if !a.is_finite() || a <= 0.0 {
        return Err(Error::domain(
            routine,
            format!("shape a = {a} must be positive and finite"),
        ));
    }
    Ok(())
}

fn check_point(routine: &'static str, a: f64, z: f64) -> Result<()> {
    check_shape(routine, a)?;
    if !z.is_finite() || z <= 0.0 {
        return Err(Error::domain(
            routine,
            format!("argument z = {z} must be positive and finite"),
        ));
    }
    Ok(())
}

/// `Φ_k(d) = ∫₀¹ t^k e^{dt} dt` for `k = 0..=order`.
fn phi_linear_values(d: f64, order: usize) -> Vec<f64> {
    let ed = d.exp();
    let mut values = Vec::with_capacity(order + 1);
    values.push(d.exp_m1() / d);
    // forward recursion loses accuracy once k exceeds |d|
    let forward_top = order.min(d.abs().floor() as usize);
    for k in 1..=forward_top {
        let prev = values[k - 1];
        values.push((ed - k as f64 * prev) / d);
    }
    if forward_top == order {
        return values;
    }
    // backward from a start index high enough that the crude seed washes out
    let lo = forward_top + 1;
    let mut start = order;
    let mut damping = 1.0;
    while damping > 1e-20 {
        start += 1;
        damping *= d.abs() / start as f64;
    }
    let mut phi = ed / (start as f64 + 1.0);
    let mut tail = vec![0.0; order + 1 - lo];
    for k in (lo + 1..=start).rev() {
        phi = (ed - d * phi) / k as f64;
        if k - 1 <= order {
            tail[k - 1 - lo] = phi;
        }
    }
    values.extend(tail);
    values
}

/// `Φ_k(z - a)` for the linear-argument expansions.
///
/// ```
/// use covert_tvd::gamma_expansions::phi_linear;
/// let phi = phi_linear(2.0, 1.0, 0).unwrap();
/// assert!((phi.values[0] - (1.0 - (-1f64).exp())).abs() < 1e-15);
/// ```
pub fn phi_linear(a: f64, z: f64, order: usize) -> Result<PhiSequence> {
    check_point("phi_linear", a, z)?;
    if z == a {
        return Err(Error::Singular { a });
    }
    let d = z - a;
    if d > 700.0 {
        return Err(Error::domain("phi_linear", format!("z - a = {d} overflows e^(z-a)")));
    }
    let values = phi_linear_values(d, order);
    let x = -d;
    let mut ln_fact = 0.0;
    let decay_ratio = values
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            if k > 0 {
                ln_fact += (k as f64).ln();
            }
            let ln_scale = (k as f64 + 1.0) * x.abs().ln() - ln_fact;
            let sign = if x < 0.0 && k % 2 == 0 { -1.0 } else { 1.0 };
            sign * v * ln_scale.exp()
        })
        .collect();
    Ok(PhiSequence {
        values,
        regime: PhiRegime::LinearArgument,
        a,
        z,
        decay_ratio,
    })
}

/// `Φ_k(z - a)` from the explicit finite sum, for checking the recurrence.
///
/// With `x = a - z` this is `k!/x^{k+1} - e^{-x} Σ_j k!/((k-j)! x^{j+1})`.
/// When `|x| < k + 1` the two pieces nearly cancel, so the equivalent tail
/// form `e^{-x} Σ_{i≥0} x^i k!/(k+1+i)!` is used instead.
pub fn phi_linear_closed_form(a: f64, z: f64, order: usize) -> Result<Vec<f64>> {
    check_point("phi_linear_closed_form", a, z)?;
    if z == a {
        return Err(Error::Singular { a });
    }
    let x = a - z;
    let emx = (-x).exp();
    let mut out = Vec::with_capacity(order + 1);
    for k in 0..=order {
        let kf = k as f64;
        if x.abs() < kf + 1.0 {
            let mut term = 1.0 / (kf + 1.0);
            let mut sum = term;
            for i in 1..2000 {
                term *= x / (kf + 1.0 + i as f64);
                sum += term;
                if term.abs() < 1e-17 * sum.abs() {
                    break;
                }
            }
            out.push(emx * sum);
        } else {
            // Σ_j k!/((k-j)! x^{j+1}), built from j = 0 upward
            let mut term = 1.0 / x;
            let mut sum = term;
            for j in 1..=k {
                term *= (kf - j as f64 + 1.0) / x;
                sum += term;
            }
            // the j = k term is k!/x^{k+1}, the leading piece
            out.push(term - emx * sum);
        }
    }
    Ok(out)
}

/// `Φ_k(a, z)` for the transition-point expansion.
pub fn phi_transition(a: f64, z: f64, order: usize) -> Result<PhiSequence> {
    check_point("phi_transition", a, z)?;
    let d = z - a;
    let gauss = (-d * d / (2.0 * a)).exp();
    let mut values = Vec::with_capacity(order + 1);
    values.push((std::f64::consts::PI / (2.0 * a)).sqrt() * erfc(d / (2.0 * a).sqrt())?);
    if order >= 1 {
        values.push(gauss / a);
    }
    let ratio = d / a;
    for k in 2..=order {
        let kf = k as f64;
        let v = ((kf - 1.0) * values[k - 2] + ratio.powi(k as i32 - 1) * gauss) / a;
        values.push(v);
    }
    Ok(PhiSequence {
        values,
        regime: PhiRegime::Transition,
        a,
        z,
        decay_ratio: Vec::new(),
    })
}

/// A truncated series value and how many terms went into it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesEval {
    pub value: f64,
    pub terms_used: usize,
}

/// Number of leading terms kept under the optimal-truncation rule.
///
/// Odd orders are an order of magnitude below their even neighbours (and
/// `c_1 = 0`), so the smallest term is located among even orders and the
/// odd companion following it is kept.
pub(crate) fn optimal_terms(terms: &[f64]) -> usize {
    let mut best = 0;
    let mut k = 2;
    while k < terms.len() {
        if terms[k].abs() < terms[best].abs() {
            best = k;
        }
        k += 2;
    }
    (best + 2).min(terms.len())
}

/// Truncated case-1 expansion of `γ(a+1, z)/Γ(a+1)` for `z < a`.
///
/// ```
/// use covert_tvd::gamma_expansions::gamma_series_lower;
/// use covert_tvd::special_fn::reg_lower_gamma;
/// let a: f64 = 499.0;
/// let z = a - 6.0 * a.sqrt();
/// let s = gamma_series_lower(a, z, 20).unwrap();
/// let exact = reg_lower_gamma(a + 1.0, z).unwrap();
/// assert!((s.value / exact - 1.0).abs() < 1e-3);
/// ```
pub fn gamma_series_lower(a: f64, z: f64, order: usize) -> Result<SeriesEval> {
    check_shape("gamma_series_lower", a)?;
    if z == 0.0 {
        return Ok(SeriesEval {
            value: 0.0,
            terms_used: 0,
        });
    }
    check_point("gamma_series_lower", a, z)?;
    if z >= a {
        return Err(Error::Regime {
            routine: "gamma_series_lower",
            a,
            z,
            detail: "requires z < a",
        });
    }
    let terms = lower_terms(a, z, order)?;
    let used = optimal_terms(&terms);
    let sum: f64 = terms[..used].iter().sum();
    Ok(SeriesEval {
        value: ln_prefix(a + 1.0, z).exp() * sum,
        terms_used: used,
    })
}

/// The individual terms `c_k Φ_k(z - a)` of the case-1 sum.
pub(crate) fn lower_terms(a: f64, z: f64, order: usize) -> Result<Vec<f64>> {
    let co = coeffs_c(a, order)?;
    let phi = phi_linear(a, z, order)?;
    Ok(co.c.iter().zip(&phi.values).map(|(c, p)| c * p).collect())
}

/// The individual terms `c*_k / (z - a)^{k+1}` of the case-2 sum.
pub(crate) fn upper_terms(a: f64, z: f64, order: usize) -> Result<Vec<f64>> {
    let co = coeffs_c(a, order)?;
    let inv = 1.0 / (z - a);
    let mut scale = inv;
    Ok(co
        .c_star
        .iter()
        .map(|cs| {
            let t = cs * scale;
            scale *= inv;
            t
        })
        .collect())
}

/// Truncated case-2 expansion of `Γ(a+1, z)/Γ(a+1)` for `z > a`, stopped at
/// the smallest term when that comes before `order`.
pub fn gamma_series_upper(a: f64, z: f64, order: usize) -> Result<SeriesEval> {
    check_point("gamma_series_upper", a, z)?;
    if z <= a {
        return Err(Error::Regime {
            routine: "gamma_series_upper",
            a,
            z,
            detail: "requires z > a",
        });
    }
    let terms = upper_terms(a, z, order)?;
    let used = optimal_terms(&terms);
    let sum: f64 = terms[..used].iter().sum();
    Ok(SeriesEval {
        value: ln_prefix(a + 1.0, z).exp() * sum,
        terms_used: used,
    })
}

/// Truncated transition-point expansion of `Γ(a+1, z)/Γ(a+1)`, valid for
/// `|z - a| <= a^{2/3}`.
pub fn gamma_series_transition(a: f64, z: f64, order: usize) -> Result<SeriesEval> {
    check_point("gamma_series_transition", a, z)?;
    if (z - a).abs() > a.powf(2.0 / 3.0) {
        return Err(Error::Regime {
            routine: "gamma_series_transition",
            a,
            z,
            detail: "requires |z - a| <= a^(2/3)",
        });
    }
    let c = transition_coeffs(a, order)?;
    let phi = phi_transition(a, z, order)?;
    let sum: f64 = c.iter().zip(&phi.values).map(|(c, p)| c * p).sum();
    Ok(SeriesEval {
        value: ln_prefix(a + 1.0, a).exp() * sum,
        terms_used: order + 1,
    })
}

/// Stirling approximation of `ln Γ(n/2)`:
/// `-n/2 + (n/2) ln(n/2) + ½ ln(4π/n)`.
///
/// ```
/// use covert_tvd::gamma_expansions::stirling_gamma_halfn;
/// use covert_tvd::special_fn::ln_gamma;
/// let err = stirling_gamma_halfn(10_000).unwrap() - ln_gamma(5000.0).unwrap();
/// assert!(err.exp_m1().abs() < 1e-4);
/// ```
pub fn stirling_gamma_halfn(n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("stirling_gamma_halfn", "n must be positive"));
    }
    let half = n as f64 / 2.0;
    Ok(-half + half * half.ln() + 0.5 * (4.0 * std::f64::consts::PI / n as f64).ln())
}
