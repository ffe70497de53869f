//! Browser bindings: three operations backing the demo page in `www/`.
//!
//! Every function returns a flat `[x0, y0, x1, y1, ...]` array.

use std::f64::consts::PI;

use wasm_bindgen::prelude::*;

use vecmag::field::{zeeman_splitting_for, PhysicalConstants};
use vecmag::pulse::{spectrum_scan, Pulse, DEFAULT_SEPARATION};
use vecmag::squeeze::{sensitivity_vs_mu, EchoReadout, SqueezeParams, Variant};
use vecmag::trace::linspace;

fn js(e: vecmag::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn check_points(points: usize) -> Result<(), JsError> {
    if (2..=20_000).contains(&points) {
        Ok(())
    } else {
        Err(JsError::new("points must lie in [2, 20000]"))
    }
}

fn interleave(xs: &[f64], ys: impl IntoIterator<Item = f64>) -> Vec<f64> {
    xs.iter().zip(ys).flat_map(|(&x, y)| [x, y]).collect()
}

/// Single Blackman π-pulse spectrum over ±1.5 ω_Z. `b_microtesla` sets ω_Z;
/// the pulse length keeps ω_Z·T_p = 100π. Detunings are returned in units
/// of ω_Z.
#[wasm_bindgen]
pub fn spectrum(theta: f64, b_microtesla: f64, points: usize) -> Result<Vec<f64>, JsError> {
    check_points(points)?;
    let wz = zeeman_splitting_for(b_microtesla * 1e-6, &PhysicalConstants::default()).map_err(js)?;
    if wz <= 0.0 {
        return Err(JsError::new("field must be > 0"));
    }
    let pulse = Pulse::blackman(PI, DEFAULT_SEPARATION / wz).map_err(js)?;
    let d = linspace(-1.5 * wz, 1.5 * wz, points);
    let tr = spectrum_scan(theta, wz, &pulse, &d).map_err(js)?;
    let xs: Vec<f64> = d.iter().map(|x| x / wz).collect();
    Ok(interleave(&xs, tr.ys()))
}

fn variant(name: &str) -> Result<Variant, JsError> {
    Variant::parse(name).map_err(js)
}

/// Echo-squeezed fringe: upper-state fraction versus phase on `[−span, span]`.
#[wasm_bindgen]
pub fn gesp_fringe(n: usize, mu: f64, variant_name: &str, span: f64, points: usize) -> Result<Vec<f64>, JsError> {
    check_points(points)?;
    if !(span > 0.0 && span.is_finite()) {
        return Err(JsError::new("span must be > 0"));
    }
    let r = EchoReadout::new(n, SqueezeParams::new(mu, variant(variant_name)?).map_err(js)?).map_err(js)?;
    let phis = linspace(-span, span, points);
    let ys: Vec<f64> = phis.iter().map(|&p| r.signal(p) / n as f64).collect();
    Ok(interleave(&phis, ys))
}

/// `1/Δφ` at the best operating phase for μ on `[mu_min, π/2]`.
#[wasm_bindgen]
pub fn sensitivity_curve(n: usize, variant_name: &str, mu_min: f64, points: usize) -> Result<Vec<f64>, JsError> {
    check_points(points)?;
    if !(mu_min.is_finite() && mu_min < PI / 2.0) {
        return Err(JsError::new("mu_min must be below pi/2"));
    }
    let mus = linspace(mu_min, PI / 2.0, points);
    let curve = sensitivity_vs_mu(n, &mus, variant(variant_name)?).map_err(js)?;
    Ok(interleave(&mus, curve.into_iter().map(|(_, d)| 1.0 / d)))
}

/// Version string of the simulator.
#[wasm_bindgen]
pub fn version() -> String {
    env!("CARGO_PKG_VERSION").to_string()
}
