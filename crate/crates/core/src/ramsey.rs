//! Ramsey fringes, projection noise, phase uncertainty and minimum field.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::field::{check_theta, PhysicalConstants};
use crate::optimize::grid_then_golden;
use crate::pulse::{evolve_pulse, FourLevelState, Pulse};
use crate::trace::FringeTrace;

/// Height of a σ side peak after a π-area pulse:
/// `h = (1 − cos(π sin θ / 2)) / 2`.
pub fn side_peak_height(theta: f64) -> Result<f64> {
    check_theta(theta)?;
    Ok(0.5 * (1.0 - (0.5 * PI * theta.sin()).cos()))
}

/// Height of the central (π) peak after a π-area pulse: `sin²(π cos θ / 2)`.
pub fn central_peak_height(theta: f64) -> Result<f64> {
    check_theta(theta)?;
    Ok((0.5 * PI * theta.cos()).sin().powi(2))
}

/// Expected atom count `S = N h (1 + cos φ) / 2`.
pub fn ramsey_signal(n: f64, h: f64, phi: f64) -> f64 {
    0.5 * n * h * (1.0 + phi.cos())
}

/// `∂S/∂φ = −N h sin φ / 2`.
pub fn ramsey_slope(n: f64, h: f64, phi: f64) -> f64 {
    -0.5 * n * h * phi.sin()
}

/// Projection noise, two ways.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProjectionNoise {
    /// `√[N (1 + h cos φ)(2 − h − h cos φ)] / 2`, the conventional closed
    /// form; it agrees with the binomial value at `h = 1`.
    pub literal: f64,
    /// `√[N p (1 − p)]` with `p = h (1 + cos φ) / 2`.
    pub binomial: f64,
}

impl ProjectionNoise {
    pub fn difference(&self) -> f64 {
        self.literal - self.binomial
    }
}

pub fn projection_noise(n: f64, h: f64, phi: f64) -> ProjectionNoise {
    let c = phi.cos();
    let literal = 0.5 * (n * (1.0 + h * c) * (2.0 - h - h * c)).max(0.0).sqrt();
    let p = 0.5 * h * (1.0 + c);
    let binomial = (n * p * (1.0 - p)).max(0.0).sqrt();
    ProjectionNoise { literal, binomial }
}

/// `Δφ = ΔS / |∂S/∂φ|` with the literal `ΔS`.
pub fn phase_uncertainty(n: f64, h: f64, phi: f64) -> Result<f64> {
    let slope = ramsey_slope(n, h, phi).abs();
    // sin φ at an exact multiple of π is ~1e-16, not zero; treat that as zero.
    if slope <= 1e-12 * 0.5 * n * h || h == 0.0 {
        return Err(Error::ZeroSlope(format!("Ramsey slope vanishes at phi = {phi}")));
    }
    Ok(projection_noise(n, h, phi).literal / slope)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimalPhase {
    pub phi_star: f64,
    pub dphi_star: f64,
    /// `Δφ(π/2)` for comparison.
    pub dphi_half_pi: f64,
    /// `(Δφ(π/2) − Δφ*) / Δφ(π/2)`.
    pub relative_gap: f64,
    /// `(Δφ(π/2) − Δφ*) · √N / h²`: O(1) if the gap scales as `h²/√N`.
    pub gap_over_h2_per_sqrt_n: f64,
}

/// Minimizes [`phase_uncertainty`] over `φ ∈ (0, π)`.
pub fn optimal_phase(n: f64, h: f64) -> Result<OptimalPhase> {
    if !(h > 0.0 && h <= 1.0) {
        return Err(domain(format!("side-peak height must lie in (0, 1], got {h}")));
    }
    if !(n >= 1.0) {
        return Err(domain(format!("atom number must be >= 1, got {n}")));
    }
    let eps = 1e-6;
    let f = |phi: f64| phase_uncertainty(n, h, phi).unwrap_or(f64::INFINITY);
    let (phi_star, dphi_star) = grid_then_golden(f, eps, PI - eps, 721, 1e-12);
    let dphi_half_pi = phase_uncertainty(n, h, FRAC_PI_2)?;
    let gap = dphi_half_pi - dphi_star;
    Ok(OptimalPhase {
        phi_star,
        dphi_star,
        dphi_half_pi,
        relative_gap: gap / dphi_half_pi,
        gap_over_h2_per_sqrt_n: gap * n.sqrt() / (h * h),
    })
}

/// Shot budget: one shot lasts `tau0`, the measurement `tau`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SensitivityBudget {
    tau0: f64,
    tau: f64,
}

impl SensitivityBudget {
    pub fn new(tau0: f64, tau: f64) -> Result<Self> {
        if !(tau0 > 0.0 && tau.is_finite() && tau >= tau0) {
            return Err(domain(format!("need tau >= tau0 > 0, got tau0 = {tau0}, tau = {tau}")));
        }
        Ok(Self { tau0, tau })
    }

    /// A single one-second shot.
    pub fn single_shot() -> Self {
        Self { tau0: 1.0, tau: 1.0 }
    }

    pub fn tau0(&self) -> f64 {
        self.tau0
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }
}

/// `ħ / (g_F μ_B T)`, tesla: the field producing one radian over `T`.
pub fn field_per_radian(t: f64, consts: &PhysicalConstants) -> f64 {
    consts.hbar / (consts.g_f * consts.mu_b * t)
}

/// Minimum measurable field, tesla:
/// `[ħ/(g_F μ_B T)]·√((2 − h)/N)·√(τ₀/τ)`, further divided by `√(N/2)`
/// when echo squeezing is used.
pub fn b_min(
    n: f64,
    h: f64,
    t: f64,
    budget: &SensitivityBudget,
    gesp: bool,
    consts: &PhysicalConstants,
) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(domain(format!("Ramsey time must be > 0, got {t}")));
    }
    if !(n >= 1.0) {
        return Err(domain(format!("atom number must be >= 1, got {n}")));
    }
    if !(0.0..=1.0).contains(&h) {
        return Err(domain(format!("side-peak height must lie in [0, 1], got {h}")));
    }
    let mut b = field_per_radian(t, consts) * ((2.0 - h) / n).sqrt() * (budget.tau0 / budget.tau).sqrt();
    if gesp {
        b /= (0.5 * n).sqrt();
    }
    Ok(b)
}

/// Two-pulse Ramsey sequence. Each pulse has half the area of `pulse`;
/// `t_free` is the dark time between the end of the first pulse and the
/// start of the second.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RamseyConfig {
    pub n_atoms: f64,
    pub t_free: f64,
    pub theta: f64,
    pub pulse: Pulse,
}

impl RamseyConfig {
    pub fn new(n_atoms: f64, t_free: f64, theta: f64, pulse: Pulse) -> Result<Self> {
        if !(n_atoms >= 1.0 && n_atoms.is_finite()) {
            return Err(domain(format!("atom number must be >= 1, got {n_atoms}")));
        }
        if !(t_free.is_finite() && t_free > 0.0) {
            return Err(domain(format!("Ramsey time must be > 0, got {t_free}")));
        }
        check_theta(theta)?;
        Ok(Self { n_atoms, t_free, theta, pulse })
    }

    /// Final four-level state for one detuning.
    pub fn final_state(&self, delta: f64, omega_z: f64) -> Result<FourLevelState> {
        let half = self.pulse.with_area(0.5 * self.pulse.area);
        let s = evolve_pulse(&FourLevelState::ground(), &half, self.theta, delta, omega_z)?;
        let s = s.free_evolve(delta, omega_z, self.t_free);
        evolve_pulse(&s, &half, self.theta, delta, omega_z)
    }
}

/// Expected number of F = 2 atoms after the Ramsey sequence, per detuning.
pub fn ramsey_scan(config: &RamseyConfig, omega_z: f64, detunings: &[f64]) -> Result<FringeTrace> {
    let vals = crate::par::map(detunings, |&d| config.final_state(d, omega_z).map(|s| s.upper_population()));
    let pts = detunings
        .iter()
        .zip(vals)
        .map(|(&d, p)| p.map(|p| (d, config.n_atoms * p.clamp(0.0, 1.0))))
        .collect::<Result<Vec<_>>>()?;
    FringeTrace::new(pts)
}
