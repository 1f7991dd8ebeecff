//! Browser bindings for the covert TVD calculator.
//!
//! Every exported function returns a flat row-major `Float64Array`; the
//! column order is listed in its doc comment. The pure `*_rows` functions
//! do the work and are what the native tests exercise.

use covert_tvd::asymptotics::log_grid;
use covert_tvd::covert_power::p_exact;
use covert_tvd::divergences::{tvd_bounds, ChannelPoint};
use covert_tvd::throughput::covert_throughput_bounds;
use covert_tvd::tvd::{tvd_exact, tvd_series};
use covert_tvd::Result;
use wasm_bindgen::prelude::*;

/// Upper limit on grid points, keeps one call well under a frame budget.
pub const MAX_POINTS: usize = 400;

fn grid(n_min: u32, n_max: u32, points: u32) -> Result<Vec<u64>> {
    let points = (points as usize).clamp(2, MAX_POINTS);
    log_grid(u64::from(n_min), u64::from(n_max), points)
}

/// `[n, tvd, hellinger², sason, pinsker, series]` per row at `θ = n^{-τ}`.
///
/// `series` is NaN where the series evaluator does not apply.
pub fn tvd_rows(tau: f64, n_min: u32, n_max: u32, points: u32) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for n in grid(n_min, n_max, points)? {
        let p = ChannelPoint::from_tau(n, 1.0, tau)?;
        let b = tvd_bounds(&p);
        let series = tvd_series(&p, 20).map(|e| e.value).unwrap_or(f64::NAN);
        out.extend([
            n as f64,
            tvd_exact(&p)?.value,
            b.hellinger_sq,
            b.sason_upper,
            b.pinsker_upper,
            series,
        ]);
    }
    Ok(out)
}

/// `[n, p_suf, p_exact, p_nec]` per row for TVD budget `delta`, `σ² = 1`.
pub fn power_rows(delta: f64, n_min: u32, n_max: u32, points: u32) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for n in grid(n_min, n_max, points)? {
        let iv = p_exact(n, delta, 1.0)?;
        out.extend([n as f64, iv.p_suf, iv.p_exact, iv.p_nec]);
    }
    Ok(out)
}

/// `[n, suf_bits, nec_bits]` per row.
pub fn throughput_rows(eps: f64, delta: f64, n_min: u32, n_max: u32, points: u32) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for n in grid(n_min, n_max, points)? {
        let (suf, nec) = covert_throughput_bounds(n, eps, delta)?;
        out.extend([n as f64, suf.bits, nec.bits]);
    }
    Ok(out)
}

fn to_js(r: Result<Vec<f64>>) -> std::result::Result<Vec<f64>, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = tvdCurve)]
pub fn tvd_curve(tau: f64, n_min: u32, n_max: u32, points: u32) -> std::result::Result<Vec<f64>, JsError> {
    to_js(tvd_rows(tau, n_min, n_max, points))
}

#[wasm_bindgen(js_name = powerCurve)]
pub fn power_curve(delta: f64, n_min: u32, n_max: u32, points: u32) -> std::result::Result<Vec<f64>, JsError> {
    to_js(power_rows(delta, n_min, n_max, points))
}

#[wasm_bindgen(js_name = throughputCurve)]
pub fn throughput_curve(
    eps: f64,
    delta: f64,
    n_min: u32,
    n_max: u32,
    points: u32,
) -> std::result::Result<Vec<f64>, JsError> {
    to_js(throughput_rows(eps, delta, n_min, n_max, points))
}

/// Exact TVD at a single point.
#[wasm_bindgen(js_name = tvdAt)]
pub fn tvd_at(n: u32, theta: f64) -> std::result::Result<f64, JsError> {
    ChannelPoint::new(u64::from(n), 1.0, theta)
        .and_then(|p| tvd_exact(&p))
        .map(|e| e.value)
        .map_err(|e| JsError::new(&e.to_string()))
}
