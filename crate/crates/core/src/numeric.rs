//! Small numerical building blocks shared across modules.

use crate::{Error, Result};

/// `ln(1 + x) - x`, accurate near zero where the naive form cancels.
pub(crate) fn log1pmx(x: f64) -> f64 {
    if x.abs() < 0.5 {
        // alternating tail of the log series, starting at -x²/2
        let mut power = x * x;
        let mut sum = 0.0;
        for k in 2..200 {
            let term = power / k as f64;
            let signed = if k % 2 == 0 { -term } else { term };
            sum += signed;
            if term.abs() <= 1e-17 * sum.abs() {
                break;
            }
            power *= x;
        }
        sum
    } else {
        x.ln_1p() - x
    }
}

/// `ln(e^x + e^y)` without overflow.
pub(crate) fn log_add_exp(x: f64, y: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        return y;
    }
    if y == f64::NEG_INFINITY {
        return x;
    }
    let (hi, lo) = if x > y { (x, y) } else { (y, x) };
    hi + (lo - hi).exp().ln_1p()
}

/// Bisection for a root of `f` on `[lo, hi]`; `f(lo)` and `f(hi)` must differ in sign.
///
/// Stops when the bracket width falls below `rel_tol * |midpoint|` (or an
/// absolute floor of `1e-300`).
pub(crate) fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, rel_tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Bracket(format!(
            "no sign change on [{lo:e}, {hi:e}]: f = ({f_lo:e}, {f_hi:e})"
        )));
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo) <= rel_tol * mid.abs() || (hi - lo) < 1e-300 {
            return Ok(mid);
        }
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Golden-section search for the maximizer of a unimodal `f` on `[lo, hi]`.
pub(crate) fn golden_max<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    if hi <= lo {
        let v = f(lo)?;
        return Ok((lo, v));
    }
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while (hi - lo) > tol * (1.0 + lo.abs().max(hi.abs())) {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1)?;
        }
    }
    // endpoints can win for monotone objectives
    let mut best = if f1 > f2 { (x1, f1) } else { (x2, f2) };
    for x in [lo, hi] {
        let v = f(x)?;
        if v > best.1 {
            best = (x, v);
        }
    }
    Ok(best)
}

/// Ordinary least squares `y ≈ slope·x + intercept`, returning `(slope, intercept, r²)`.
pub(crate) fn linear_fit(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::Fit(format!(
            "need at least two paired samples, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (&xi, &yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
        syy += (yi - my) * (yi - my);
    }
    if sxx == 0.0 {
        return Err(Error::Fit("abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| {
            let r = yi - (slope * xi + intercept);
            r * r
        })
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok((slope, intercept, r_squared))
}

/// Gauss–Hermite nodes and weights for the weight `e^{-x²}` on the real line.
pub(crate) fn gauss_hermite(order: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    const PI_M4: f64 = 0.751_125_544_464_942_5;
    let n = order;
    let nf = n as f64;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut z = 0.0;
    for i in 0..n.div_ceil(2) {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.855_75 * (2.0 * nf + 1.0).powf(-0.166_67),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut converged = false;
        let mut pp = 0.0;
        for _ in 0..100 {
            // orthonormal Hermite recurrence
            let mut p1 = PI_M4;
            let mut p2 = 0.0;
            for j in 1..=n {
                let jf = j as f64;
                let p3 = p2;
                p2 = p1;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let step = p1 / pp;
            z -= step;
            if step.abs() <= 1e-14 * (1.0 + z.abs()) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Accuracy {
                routine: "gauss_hermite",
                iterations: 100,
            });
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    Ok((x, w))
}

/// Adaptive Gauss–Kronrod (7/15) integration of `f` over `[a, b]`.
///
/// Intervals are bisected until each local error estimate is below its
/// share of `abs_tol`; more than `max_intervals` live intervals is an
/// accuracy error. Features much narrower than the interval must be placed
/// at split points by the caller.
pub(crate) fn integrate_gk15<F>(f: &F, a: f64, b: f64, abs_tol: f64, max_intervals: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    const XGK: [f64; 8] = [
        0.991_455_371_120_812_6,
        0.949_107_912_342_758_5,
        0.864_864_423_359_769_1,
        0.741_531_185_599_394_4,
        0.586_087_235_467_691_1,
        0.405_845_151_377_397_2,
        0.207_784_955_007_898_5,
        0.0,
    ];
    const WGK: [f64; 8] = [
        0.022_935_322_010_529_22,
        0.063_092_092_629_978_55,
        0.104_790_010_322_250_2,
        0.140_653_259_715_525_9,
        0.169_004_726_639_267_9,
        0.190_350_578_064_785_4,
        0.204_432_940_075_298_9,
        0.209_482_141_084_727_8,
    ];
    const WG: [f64; 4] = [
        0.129_484_966_168_869_7,
        0.279_705_391_489_276_7,
        0.381_830_050_505_118_9,
        0.417_959_183_673_469_4,
    ];
    let rule = |lo: f64, hi: f64| {
        let c = 0.5 * (lo + hi);
        let h = 0.5 * (hi - lo);
        let fc = f(c);
        let mut kronrod = WGK[7] * fc;
        let mut gauss = WG[3] * fc;
        for j in 0..7 {
            let dx = h * XGK[j];
            let pair = f(c - dx) + f(c + dx);
            kronrod += WGK[j] * pair;
            if j % 2 == 1 {
                gauss += WG[j / 2] * pair;
            }
        }
        (kronrod * h, ((kronrod - gauss) * h).abs())
    };
    if a == b {
        return Ok(0.0);
    }
    let width = b - a;
    let mut stack = vec![(a, b)];
    let mut total = 0.0;
    let mut live = 1usize;
    while let Some((lo, hi)) = stack.pop() {
        let (v, err) = rule(lo, hi);
        let share = abs_tol * ((hi - lo) / width).max(1e-3);
        if err <= share || (hi - lo) < 1e-12 * width {
            total += v;
            live -= 1;
            continue;
        }
        let mid = 0.5 * (lo + hi);
        stack.push((lo, mid));
        stack.push((mid, hi));
        live += 1;
        if live > max_intervals {
            return Err(Error::Accuracy {
                routine: "integrate_gk15",
                iterations: max_intervals,
            });
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log1pmx_matches_naive_away_from_zero() {
        for &x in &[-0.9, -0.6, 0.7, 3.0, 100.0] {
            assert!((log1pmx(x) - (x.ln_1p() - x)).abs() < 1e-14 * (1.0 + x.abs()));
        }
        // series branch against a long double-free expansion
        let x: f64 = 1e-3;
        let expect = -x * x / 2.0 + x * x * x / 3.0 - x.powi(4) / 4.0 + x.powi(5) / 5.0;
        assert!((log1pmx(x) - expect).abs() < 1e-18);
        assert_eq!(log1pmx(0.0), 0.0);
        assert_eq!(log1pmx(-1.0), f64::NEG_INFINITY);
    }

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect(|x| Ok(x * x - 2.0), 0.0, 2.0, 1e-14).unwrap();
        assert!((r - std::f64::consts::SQRT_2).abs() < 1e-13);
        assert!(matches!(
            bisect(|x| Ok(x * x + 1.0), 0.0, 2.0, 1e-10),
            Err(Error::Bracket(_))
        ));
    }

    #[test]
    fn golden_finds_parabola_peak() {
        let (x, v) = golden_max(|x| Ok(-(x - 0.3) * (x - 0.3) + 1.0), 0.0, 1.0, 1e-10).unwrap();
        assert!((x - 0.3).abs() < 1e-6);
        assert!((v - 1.0).abs() < 1e-12);
        // monotone objective ends at the boundary
        let (x, _) = golden_max(Ok, 0.0, 1.0, 1e-10).unwrap();
        assert_eq!(x, 1.0);
    }

    #[test]
    fn linear_fit_recovers_line() {
        let x: Vec<f64> = (0..10).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.5 * v - 1.0).collect();
        let (m, b, r2) = linear_fit(&x, &y).unwrap();
        assert!((m - 2.5).abs() < 1e-12 && (b + 1.0).abs() < 1e-12);
        assert!((r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gauss_hermite_moments() {
        let (x, w) = gauss_hermite(127).unwrap();
        let mean = |h: &dyn Fn(f64) -> f64| -> f64 {
            x.iter()
                .zip(&w)
                .map(|(xi, wi)| wi * h(std::f64::consts::SQRT_2 * xi))
                .sum::<f64>()
                / std::f64::consts::PI.sqrt()
        };
        assert!((mean(&|_| 1.0) - 1.0).abs() < 1e-13);
        assert!((mean(&|z| z * z) - 1.0).abs() < 1e-13);
        assert!((mean(&|z| z.powi(4)) - 3.0).abs() < 1e-12);
        assert!((mean(&|z| z.powi(6)) - 15.0).abs() < 1e-11);
        assert!(mean(&|z| z.powi(3)).abs() < 1e-13);
        let (x5, _) = gauss_hermite(5).unwrap();
        assert!((x5[0] - 2.020_182_870_456_086).abs() < 1e-13);
        assert_eq!(x5[2], 0.0);
    }

    #[test]
    fn gk15_integrates_smooth_and_peaked() {
        let v = integrate_gk15(&|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-12, 1000).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
        // narrow features must sit on an endpoint or the midpoint to be seen
        let v = integrate_gk15(&|x: f64| (-x * x * 1e4).exp(), -1.0, 1.0, 1e-13, 1000).unwrap();
        assert!((v - std::f64::consts::PI.sqrt() / 100.0).abs() < 1e-12);
        assert!(matches!(
            integrate_gk15(&|x: f64| 1.0 / x.abs().sqrt(), -1.0, 1.0, 1e-14, 4),
            Err(Error::Accuracy { .. })
        ));
    }

    #[test]
    fn log_add_exp_handles_extremes() {
        assert!((log_add_exp(0.0, 0.0) - 2f64.ln()).abs() < 1e-15);
        assert_eq!(log_add_exp(f64::NEG_INFINITY, -3.0), -3.0);
        assert!((log_add_exp(-1000.0, -1001.0) - (-1000.0 + (-1f64).exp().ln_1p())).abs() < 1e-12);
    }
}
