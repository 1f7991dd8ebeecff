//! TVD along scaling laws `θ = n^{-τ}` and log-log fits of its rate of
//! approach to 1 (`τ < ½`) or 0 (`τ > ½`).

use serde::Serialize;

use crate::divergences::{kl_divergences_in, ChannelPoint, Units};
use crate::numeric::linear_fit;
use crate::tvd::{tvd_complement_ln, tvd_exact};
use crate::{Error, Result};

/// Minimum number of points accepted by [`fit_rate`].
pub const MIN_FIT_POINTS: usize = 6;

/// `r²` threshold for calling a fit conclusive.
pub const CONCLUSIVE_R2: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GridKind {
    Log,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingPoint {
    pub n: u64,
    pub theta: f64,
    pub tvd: f64,
    /// `ln(1 - TVD)`, kept separately because `1 - TVD` underflows the
    /// direct difference long before it underflows a double.
    pub ln_complement: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingSeries {
    pub tau: f64,
    pub points: Vec<ScalingPoint>,
    pub grid_kind: GridKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitTransform {
    /// `ln(-ln(1 - TVD))` against `ln n`
    LogNegLogComplement,
    /// `ln TVD` against `ln n`
    LogLog,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub r_squared: f64,
    pub transform: FitTransform,
    pub conclusive: bool,
    /// Range the exponent is predicted to fall in (a single value when
    /// both ends coincide).
    pub expected_low: f64,
    pub expected_high: f64,
}

impl RateFit {
    /// Whether the exponent lies within `tol` of the predicted range.
    pub fn matches_prediction(&self, tol: f64) -> bool {
        self.exponent >= self.expected_low - tol && self.exponent <= self.expected_high + tol
    }
}

/// `points` integers log-spaced from `n_min` to `n_max`, rounded, deduplicated.
///
/// ```
/// let g = covert_tvd::asymptotics::log_grid(1000, 100_000, 12).unwrap();
/// assert_eq!(g[1], 1520);
/// assert_eq!(g.len(), 12);
/// ```
pub fn log_grid(n_min: u64, n_max: u64, points: usize) -> Result<Vec<u64>> {
    check_grid_bounds("log_grid", n_min, n_max, points)?;
    if points == 1 {
        return Ok(vec![n_min]);
    }
    let (lo, hi) = ((n_min as f64).log10(), (n_max as f64).log10());
    let mut grid: Vec<u64> = (0..points)
        .map(|i| 10f64.powf(lo + (hi - lo) * i as f64 / (points - 1) as f64).round() as u64)
        .collect();
    grid.dedup();
    Ok(grid)
}

/// `points` integers evenly spaced from `n_min` to `n_max`.
pub fn linear_grid(n_min: u64, n_max: u64, points: usize) -> Result<Vec<u64>> {
    check_grid_bounds("linear_grid", n_min, n_max, points)?;
    if points == 1 {
        return Ok(vec![n_min]);
    }
    let step = (n_max - n_min) as f64 / (points - 1) as f64;
    let mut grid: Vec<u64> = (0..points).map(|i| n_min + (step * i as f64).round() as u64).collect();
    grid.dedup();
    Ok(grid)
}

/// The default fitting grid: 12 log-spaced blocklengths in `[10³, 10⁵]`.
pub fn default_grid() -> Vec<u64> {
    log_grid(1000, 100_000, 12).expect("static grid bounds are valid")
}

fn check_grid_bounds(routine: &'static str, n_min: u64, n_max: u64, points: usize) -> Result<()> {
    if n_min == 0 || n_max < n_min || points == 0 {
        return Err(Error::domain(
            routine,
            format!("need 1 <= n_min <= n_max and points >= 1, got {n_min}, {n_max}, {points}"),
        ));
    }
    Ok(())
}

fn check_grid(routine: &'static str, grid: &[u64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::domain(routine, "blocklength grid is empty"));
    }
    if grid[0] == 0 || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain(
            routine,
            "blocklength grid must be positive and strictly increasing",
        ));
    }
    Ok(())
}

fn classify(grid: &[u64]) -> GridKind {
    if grid.len() < 3 {
        return GridKind::Linear;
    }
    let steps: Vec<i64> = grid.windows(2).map(|w| (w[1] - w[0]) as i64).collect();
    let even = steps.iter().all(|s| (s - steps[0]).abs() <= 1);
    if even {
        GridKind::Linear
    } else {
        GridKind::Log
    }
}

#[cfg(feature = "parallel")]
fn map_grid<T, F>(grid: &[u64], f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    use rayon::prelude::*;
    grid.par_iter().map(|&n| f(n)).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_grid<T, F>(grid: &[u64], f: F) -> Result<Vec<T>>
where
    F: Fn(u64) -> Result<T>,
{
    grid.iter().map(|&n| f(n)).collect()
}

/// Exact TVD at `θ = n^{-τ}` for every `n` in the grid, ordered by `n`.
pub fn sweep_tvd(tau: f64, grid: &[u64]) -> Result<ScalingSeries> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::domain("sweep_tvd", format!("tau = {tau} must lie in (0, 1)")));
    }
    check_grid("sweep_tvd", grid)?;
    let points = map_grid(grid, |n| {
        let point = ChannelPoint::from_tau(n, 1.0, tau)?;
        Ok(ScalingPoint {
            n,
            theta: point.theta,
            tvd: tvd_exact(&point)?.value,
            ln_complement: tvd_complement_ln(&point)?,
        })
    })?;
    Ok(ScalingSeries {
        tau,
        points,
        grid_kind: classify(grid),
    })
}

/// Predicted exponent range: `1 - 2τ` below ½, `[1 - 2τ, ½(1 - 2τ)]` above.
pub fn predicted_exponent(tau: f64) -> (f64, f64) {
    let base = 1.0 - 2.0 * tau;
    if tau < 0.5 {
        (base, base)
    } else {
        (base, 0.5 * base)
    }
}

/// Least-squares rate fit in the transform matching the side of `τ = ½`.
///
/// ```
/// use covert_tvd::asymptotics::{fit_rate, GridKind, ScalingPoint, ScalingSeries};
/// let points = [1000u64, 2000, 4000, 8000, 16000, 32000]
///     .iter()
///     .map(|&n| {
///         let ln_c = -0.25 * (n as f64).powf(0.4);
///         ScalingPoint { n, theta: 0.0, tvd: -ln_c.exp_m1(), ln_complement: ln_c }
///     })
///     .collect();
/// let series = ScalingSeries { tau: 0.3, points, grid_kind: GridKind::Log };
/// let fit = fit_rate(&series).unwrap();
/// assert!((fit.exponent - 0.4).abs() < 1e-12);
/// assert!((fit.prefactor - 0.25).abs() < 1e-12);
/// ```
pub fn fit_rate(series: &ScalingSeries) -> Result<RateFit> {
    let pts = &series.points;
    if pts.len() < MIN_FIT_POINTS {
        return Err(Error::Fit(format!(
            "need at least {MIN_FIT_POINTS} points, got {}",
            pts.len()
        )));
    }
    let tau = series.tau;
    if tau == 0.5 {
        return Err(Error::Fit("no rate to fit at tau = 0.5".into()));
    }
    let increasing = tau < 0.5;
    let monotone = pts.windows(2).all(|w| {
        if increasing {
            w[1].ln_complement <= w[0].ln_complement
        } else {
            w[1].tvd <= w[0].tvd
        }
    });
    if !monotone {
        return Err(Error::Fit(format!(
            "series is not monotone {} in n",
            if increasing { "increasing" } else { "decreasing" }
        )));
    }
    let x: Vec<f64> = pts.iter().map(|p| (p.n as f64).ln()).collect();
    let (y, transform): (Vec<f64>, _) = if increasing {
        (
            pts.iter().map(|p| (-p.ln_complement).ln()).collect(),
            FitTransform::LogNegLogComplement,
        )
    } else {
        (pts.iter().map(|p| p.tvd.ln()).collect(), FitTransform::LogLog)
    };
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Fit(
            "series contains TVD values at 0 or 1 in floating point".into(),
        ));
    }
    let (slope, intercept, r_squared) = linear_fit(&x, &y)?;
    let (expected_low, expected_high) = predicted_exponent(tau);
    Ok(RateFit {
        exponent: slope,
        prefactor: intercept.exp(),
        r_squared,
        transform,
        conclusive: r_squared >= CONCLUSIVE_R2,
        expected_low,
        expected_high,
    })
}

/// Spread `max - min` of the exact TVD at `θ = c n^{-½}` over the grid.
pub fn stationarity_check(grid: &[u64], c: f64) -> Result<f64> {
    check_grid("stationarity_check", grid)?;
    if !c.is_finite() || c <= 0.0 {
        return Err(Error::domain("stationarity_check", format!("c = {c} must be positive")));
    }
    let values = map_grid(grid, |n| {
        let point = ChannelPoint::new(n, 1.0, c / (n as f64).sqrt())?;
        Ok(tvd_exact(&point)?.value)
    })?;
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(max - min)
}

/// `D(P₀‖P₁)` in nats divided by its small-snr form `¼ n^{1-2τ}`.
pub fn kl_scaling_ratio(n: u64, tau: f64) -> Result<f64> {
    let point = ChannelPoint::from_tau(n, 1.0, tau)?;
    let (_, rev) = kl_divergences_in(&point, Units::Nats);
    Ok(rev / (0.25 * (n as f64).powf(1.0 - 2.0 * tau)))
}
