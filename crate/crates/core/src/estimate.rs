//! Recovering `B` and `θ` from a spectrum, and planning the second,
//! better-aligned measurement.
//!
//! `θ` is only identifiable in `[0, π/2]`: heights depend on `|cos θ|` and
//! `|sin θ|`, so `θ` and `π − θ` (and any azimuth about the polarization
//! axis) give the same spectrum.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::field::{field_from_splitting, PhysicalConstants};
use crate::optimize::grid_then_golden;
use crate::ramsey::{central_peak_height, side_peak_height};
use crate::trace::SpectrumTrace;

pub const DEFAULT_MIN_HEIGHT: f64 = 1e-3;
/// Relative rms deviation of peak positions from a lattice `k·ω` above
/// which the spacing is flagged.
pub const SPACING_TOLERANCE: f64 = 1e-2;
/// Rms height misfit above which the `θ` fit is flagged.
pub const HEIGHT_TOLERANCE: f64 = 0.02;
/// Height noise assumed when the fit itself is perfect.
pub const HEIGHT_NOISE_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Peak {
    pub position: f64,
    pub height: f64,
}

/// Peaks sorted by position.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct PeakSet {
    peaks: Vec<Peak>,
}

impl PeakSet {
    pub fn new(mut peaks: Vec<Peak>) -> Result<Self> {
        for p in &peaks {
            if !p.position.is_finite() || !(0.0..=1.0).contains(&p.height) {
                return Err(domain(format!("invalid peak {p:?}")));
            }
        }
        peaks.sort_by(|a, b| a.position.total_cmp(&b.position));
        Ok(Self { peaks })
    }

    pub fn peaks(&self) -> &[Peak] {
        &self.peaks
    }

    pub fn len(&self) -> usize {
        self.peaks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.peaks.is_empty()
    }
}

/// Maxima of the regions above `min_height`, refined by a parabola through
/// the top three samples. Regions separated by one or two sub-threshold
/// samples (noise) are merged.
pub fn find_peaks(trace: &SpectrumTrace, min_height: f64) -> PeakSet {
    let pts = trace.points();
    let mut regions: Vec<(usize, usize)> = Vec::new();
    let mut i = 0;
    while i < pts.len() {
        if pts[i].1 > min_height {
            let start = i;
            while i < pts.len() && pts[i].1 > min_height {
                i += 1;
            }
            match regions.last_mut() {
                Some(last) if start - last.1 <= 3 => last.1 = i,
                _ => regions.push((start, i)),
            }
        } else {
            i += 1;
        }
    }
    let peaks = regions
        .into_iter()
        .map(|(a, b)| {
            let k = (a..b).max_by(|&x, &y| pts[x].1.total_cmp(&pts[y].1)).unwrap();
            refine(pts, k)
        })
        .collect();
    PeakSet::new(peaks).unwrap_or_default()
}

fn refine(pts: &[(f64, f64)], k: usize) -> Peak {
    let raw = Peak { position: pts[k].0, height: pts[k].1.clamp(0.0, 1.0) };
    if k == 0 || k + 1 >= pts.len() {
        return raw;
    }
    let ((x0, y0), (x1, y1), (x2, y2)) = (pts[k - 1], pts[k], pts[k + 1]);
    // vertex of the parabola through three (possibly uneven) points
    let d0 = (y1 - y0) / (x1 - x0);
    let d1 = (y2 - y1) / (x2 - x1);
    let a = (d1 - d0) / (x2 - x0);
    if !(a < 0.0) {
        return raw;
    }
    let b = d0 - a * (x0 + x1);
    let xv = (-b / (2.0 * a)).clamp(x0, x2);
    let yv = y1 + (xv - x1) * (d0 + a * (xv - x0));
    Peak { position: xv, height: yv.clamp(0.0, 1.0) }
}

/// Splitting fitted to peak positions `k·ω`, `k ∈ {−1, 0, 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SplittingFit {
    pub omega: f64,
    /// Rms of `x − kω`, relative to `ω`.
    pub residual: f64,
    pub flagged: bool,
}

/// Least-squares Zeeman splitting from the peak lattice. Peaks within a
/// quarter spacing of zero are the central (π) line; the rest are `±ω`.
/// With only the two side peaks, adjacent peaks are `2ω` apart.
pub fn fit_splitting(peaks: &PeakSet) -> Result<SplittingFit> {
    if peaks.len() < 2 {
        return Err(Error::Insufficient(format!("need at least 2 peaks to measure a splitting, found {}", peaks.len())));
    }
    let xs: Vec<f64> = peaks.peaks().iter().map(|p| p.position).collect();
    let span = xs.last().unwrap() - xs[0];
    let guess = xs
        .iter()
        .map(|x| x.abs())
        .filter(|&a| a > 0.125 * span)
        .fold(f64::INFINITY, f64::min);
    if !guess.is_finite() || guess <= 0.0 {
        return Err(Error::Insufficient("peaks do not resolve a splitting".into()));
    }
    let ks: Vec<f64> = xs.iter().map(|x| (x / guess).round()).collect();
    let skk: f64 = ks.iter().map(|k| k * k).sum();
    let omega = xs.iter().zip(&ks).map(|(x, k)| x * k).sum::<f64>() / skk;
    let rms = (xs.iter().zip(&ks).map(|(x, k)| (x - k * omega).powi(2)).sum::<f64>() / xs.len() as f64).sqrt();
    let bad_index = ks.iter().any(|k| k.abs() > 1.0);
    let residual = rms / omega;
    Ok(SplittingFit { omega, residual, flagged: residual > SPACING_TOLERANCE || bad_index })
}

/// `B̂` in tesla from the peak lattice.
pub fn estimate_b(peaks: &PeakSet, consts: &PhysicalConstants) -> Result<f64> {
    Ok(field_from_splitting(fit_splitting(peaks)?.omega, consts))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaFit {
    pub theta: f64,
    /// Rms misfit of the two heights.
    pub residual: f64,
    /// Half-width of the interval over which the squared misfit rises by
    /// `max(residual, floor)²`.
    pub uncertainty: f64,
    pub side_only: Option<f64>,
    pub central_only: Option<f64>,
    pub warning: Option<String>,
}

/// `θ = asin[(2/π) acos(1 − 2h)]`.
pub fn theta_from_side(h: f64) -> f64 {
    let x = (1.0 - 2.0 * h.clamp(0.0, 0.5)).acos() * 2.0 / PI;
    x.clamp(0.0, 1.0).asin()
}

/// `θ = acos[(2/π) asin √c]`.
pub fn theta_from_central(c: f64) -> f64 {
    let x = c.clamp(0.0, 1.0).sqrt().asin() * 2.0 / PI;
    x.clamp(0.0, 1.0).acos()
}

fn central(theta: f64) -> f64 {
    central_peak_height(theta).unwrap_or(f64::NAN)
}

fn side(theta: f64) -> f64 {
    side_peak_height(theta).unwrap_or(f64::NAN)
}

/// Fits `(central, side)` against `(sin²(π cos θ/2), h(θ))`. A missing
/// channel means "below threshold", i.e. zero.
pub fn fit_theta(central_height: Option<f64>, side_height: Option<f64>) -> Result<ThetaFit> {
    if central_height.is_none() && side_height.is_none() {
        return Err(Error::Insufficient("no peak heights to fit".into()));
    }
    let c = central_height.unwrap_or(0.0);
    let s = side_height.unwrap_or(0.0);
    if !(0.0..=1.0).contains(&c) || !(0.0..=1.0).contains(&s) {
        return Err(domain("peak heights must lie in [0, 1]"));
    }
    let cost = |t: f64| (central(t) - c).powi(2) + (side(t) - s).powi(2);
    let side_only = side_height.map(theta_from_side);
    let central_only = central_height.map(theta_from_central);
    let (mut theta, mut best) = grid_then_golden(cost, 0.0, FRAC_PI_2, 181, 1e-12);
    // the side-only inversion seeds a local check
    if let Some(t0) = side_only {
        let (t, f) = crate::optimize::golden_section(cost, (t0 - 0.05).max(0.0), (t0 + 0.05).min(FRAC_PI_2), 1e-12);
        if f < best {
            theta = t;
            best = f;
        }
    }
    let residual = (0.5 * best).sqrt();
    let sigma = residual.max(HEIGHT_NOISE_FLOOR);
    let level = best + sigma * sigma;
    let edge = |dir: f64| {
        let limit = if dir > 0.0 { FRAC_PI_2 - theta } else { theta };
        if cost(theta + dir * limit) <= level {
            return limit;
        }
        let (mut lo, mut hi) = (0.0, limit);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if cost(theta + dir * mid) <= level {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let uncertainty = edge(1.0).max(edge(-1.0));
    let warning = (residual > HEIGHT_TOLERANCE).then(|| {
        format!(
            "peak heights are mutually inconsistent (rms misfit {residual:.3}); central-only estimate {}, side-only estimate {}",
            fmt_opt(central_only),
            fmt_opt(side_only)
        )
    });
    Ok(ThetaFit { theta, residual, uncertainty, side_only, central_only, warning })
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or("n/a".into(), |v| format!("{v:.4} rad"))
}

/// `(central, mean side)` heights; the central line is the peak within a
/// quarter of the smallest nonzero `|position|` of zero.
pub fn classify_heights(peaks: &PeakSet) -> (Option<f64>, Option<f64>) {
    let ps = peaks.peaks();
    if ps.is_empty() {
        return (None, None);
    }
    let scale = ps.iter().map(|p| p.position.abs()).fold(0.0, f64::max);
    let tol = 0.25 * scale.max(f64::MIN_POSITIVE);
    let (mut centre, mut sides) = (None::<Peak>, Vec::new());
    for p in ps {
        if ps.len() == 1 || p.position.abs() < tol {
            if centre.map_or(true, |c| p.height > c.height) {
                centre = Some(*p);
            }
        } else {
            sides.push(p.height);
        }
    }
    let side = (!sides.is_empty()).then(|| sides.iter().sum::<f64>() / sides.len() as f64);
    (centre.map(|p| p.height), side)
}

pub fn estimate_theta(peaks: &PeakSet) -> Result<ThetaFit> {
    let (c, s) = classify_heights(peaks);
    fit_theta(c, s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldEstimate {
    pub b_hat: f64,
    pub theta_hat: f64,
    /// Rms height misfit of the `θ` fit.
    pub residual: f64,
    pub spacing_residual: f64,
    pub theta_uncertainty: f64,
    pub warnings: Vec<String>,
}

impl FieldEstimate {
    /// An estimate with the given values and no fit diagnostics.
    pub fn exact(b_hat: f64, theta_hat: f64) -> Self {
        Self { b_hat, theta_hat, residual: 0.0, spacing_residual: 0.0, theta_uncertainty: 0.0, warnings: Vec::new() }
    }
}

pub fn estimate_field(peaks: &PeakSet, consts: &PhysicalConstants) -> Result<FieldEstimate> {
    let split = fit_splitting(peaks)?;
    let th = estimate_theta(peaks)?;
    let mut warnings = Vec::new();
    if split.flagged {
        warnings.push(format!(
            "peak positions deviate from an equally spaced lattice (relative rms {:.3e})",
            split.residual
        ));
    }
    warnings.extend(th.warning);
    Ok(FieldEstimate {
        b_hat: field_from_splitting(split.omega, consts),
        theta_hat: th.theta,
        residual: th.residual,
        spacing_residual: split.residual,
        theta_uncertainty: th.uncertainty,
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecondPassPlan {
    /// New polarization, in the frame whose `z` axis was the first-pass
    /// polarization. The azimuth of the field is not observable, so the
    /// tilt is put in the `x–z` plane.
    pub direction: [f64; 3],
    pub area_scale: f64,
    pub repeat_step_one: bool,
    pub advisory: Option<String>,
}

pub fn plan_second_pass(est: &FieldEstimate) -> Result<SecondPassPlan> {
    let (t, r) = (est.theta_hat, est.theta_uncertainty);
    if !(0.0..=FRAC_PI_2).contains(&t) || !(r >= 0.0) || !est.b_hat.is_finite() || est.b_hat < 0.0 {
        return Err(domain("estimate out of range"));
    }
    let area_scale = if r >= FRAC_PI_2 { 2.0 } else { (1.0 / r.cos()).min(2.0) };
    let repeat = r > FRAC_PI_4;
    Ok(SecondPassPlan {
        direction: [t.sin(), 0.0, t.cos()],
        area_scale,
        repeat_step_one: repeat,
        advisory: repeat.then(|| {
            format!("theta uncertainty {r:.3} rad exceeds pi/4: repeat step one with a different polarization first")
        }),
    })
}
