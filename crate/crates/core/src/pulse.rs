//! Four-level microwave dynamics under shaped pulses.
//!
//! Levels, in order: |F=1, m=0⟩, |F=2, m=−1⟩, |F=2, m=0⟩, |F=2, m=+1⟩.
//! In the frame rotating at the microwave frequency (RWA) the ground level
//! sits at zero and |2, m⟩ at `−(δ_mw − m·ω_Z)`. The π leg couples with
//! weight `cos θ`, each σ leg with `sin θ / 2`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::field::check_theta;
use crate::ode::{Dopri5, Tolerances};
use crate::trace::SpectrumTrace;

/// Default separation of the three resonances in units of the pulse
/// bandwidth: `ω_Z · T_p`.
pub const DEFAULT_SEPARATION: f64 = 100.0 * PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Blackman,
    /// Constant amplitude; only used for comparison.
    Square,
}

/// Standard Blackman window on `[0, T_p]`; zero outside.
pub fn blackman_envelope(t: f64, tp: f64) -> f64 {
    if !(0.0..=tp).contains(&t) {
        return 0.0;
    }
    let x = 2.0 * PI * t / tp;
    // Clamp tiny negative rounding at the endpoints.
    (0.42 - 0.5 * x.cos() + 0.08 * (2.0 * x).cos()).max(0.0)
}

/// A microwave pulse, parametrized by area and duration. The peak Rabi
/// frequency is scaled so that `∫Ω(t)dt = area`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Pulse {
    pub shape: Shape,
    /// Rad.
    pub area: f64,
    /// `T_p`, seconds.
    pub duration: f64,
}

pub type BlackmanPulse = Pulse;

impl Pulse {
    pub fn blackman(area: f64, duration: f64) -> Result<Self> {
        Self::new(Shape::Blackman, area, duration)
    }

    pub fn square(area: f64, duration: f64) -> Result<Self> {
        Self::new(Shape::Square, area, duration)
    }

    pub fn new(shape: Shape, area: f64, duration: f64) -> Result<Self> {
        if !(area.is_finite() && area >= 0.0) {
            return Err(domain(format!("pulse area must be >= 0, got {area}")));
        }
        if !(duration.is_finite() && duration > 0.0) {
            return Err(domain(format!("pulse duration must be > 0, got {duration}")));
        }
        Ok(Self { shape, area, duration })
    }

    /// Same shape and duration with a different area.
    pub fn with_area(self, area: f64) -> Self {
        Self { area, ..self }
    }

    /// Effective Rabi frequency `area / T_p`.
    pub fn omega_eff(&self) -> f64 {
        self.area / self.duration
    }

    /// Time average of the envelope over `[0, T_p]`.
    fn mean_envelope(&self) -> f64 {
        match self.shape {
            Shape::Blackman => 0.42,
            Shape::Square => 1.0,
        }
    }

    pub fn peak_rabi(&self) -> f64 {
        self.area / (self.mean_envelope() * self.duration)
    }

    pub fn envelope(&self, t: f64) -> f64 {
        match self.shape {
            Shape::Blackman => blackman_envelope(t, self.duration),
            Shape::Square => {
                if (0.0..=self.duration).contains(&t) {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Instantaneous Rabi frequency, rad/s.
    pub fn rabi(&self, t: f64) -> f64 {
        self.peak_rabi() * self.envelope(t)
    }

    /// `∫Ω dt` by composite Simpson with `2·n` panels.
    pub fn integrated_area(&self, n: usize) -> f64 {
        let m = 2 * n.max(1);
        let h = self.duration / m as f64;
        let mut s = self.rabi(0.0) + self.rabi(self.duration);
        for i in 1..m {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * self.rabi(h * i as f64);
        }
        s * h / 3.0
    }
}

/// `(w_π, w_σ+, w_σ−) = (cos θ, sin θ/2, sin θ/2)`.
pub fn coupling_weights(theta: f64) -> Result<(f64, f64, f64)> {
    check_theta(theta)?;
    let s = 0.5 * theta.sin();
    Ok((theta.cos(), s, s))
}

/// Amplitudes over |1,0⟩, |2,−1⟩, |2,0⟩, |2,+1⟩.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FourLevelState {
    pub amps: [C64; 4],
}

impl FourLevelState {
    pub const GROUND: usize = 0;
    pub const MINUS: usize = 1;
    pub const ZERO: usize = 2;
    pub const PLUS: usize = 3;

    pub fn ground() -> Self {
        let z = C64::new(0.0, 0.0);
        Self { amps: [C64::new(1.0, 0.0), z, z, z] }
    }

    pub fn population(&self, level: usize) -> f64 {
        self.amps[level].norm_sqr()
    }

    /// Total F = 2 population, summed directly (not `1 − P_ground`) so that
    /// small off-resonant values keep their relative precision.
    pub fn upper_population(&self) -> f64 {
        self.amps[1..].iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Excited level magnetic number for index 1..=3.
    pub fn m_of(level: usize) -> f64 {
        level as f64 - 2.0
    }

    /// Free evolution for `t` seconds at microwave detuning `delta`:
    /// exact phases `exp(−i E_m t)` with `E_m = −(δ − m ω_Z)`.
    pub fn free_evolve(&self, delta: f64, omega_z: f64, t: f64) -> Self {
        let mut out = *self;
        for (k, a) in out.amps.iter_mut().enumerate().skip(1) {
            let e = -(delta - Self::m_of(k) * omega_z);
            *a *= C64::from_polar(1.0, -e * t);
        }
        out
    }
}

/// Tolerances used for every pulse integration.
pub fn pulse_tolerances() -> Tolerances {
    Tolerances { rtol: 1e-11, atol: 1e-13, ..Tolerances::default() }
}

/// Evolves `initial` through `pulse` at microwave detuning `delta`
/// (rad/s) for a field of Zeeman splitting `omega_z` at angle `theta`.
pub fn evolve_pulse(
    initial: &FourLevelState,
    pulse: &Pulse,
    theta: f64,
    delta: f64,
    omega_z: f64,
) -> Result<FourLevelState> {
    let (wp, wsp, wsm) = coupling_weights(theta)?;
    if !delta.is_finite() || !omega_z.is_finite() {
        return Err(domain("detuning and Zeeman splitting must be finite"));
    }
    let e = [0.0, -(delta + omega_z), -delta, -(delta - omega_z)];
    // Couplings from the ground level to |2,-1>, |2,0>, |2,+1>.
    let w = [wsm, wp, wsp];
    let pulse = *pulse;
    let rhs = move |t: f64, y: &[C64], dy: &mut [C64]| {
        let half = 0.5 * pulse.rabi(t);
        let g = y[0];
        let mut hg = C64::new(0.0, 0.0);
        for k in 0..3 {
            let c = w[k] * half;
            hg += y[k + 1] * c;
            // dy = -i H y
            let hk = y[k + 1] * e[k + 1] + g * c;
            dy[k + 1] = C64::new(hk.im, -hk.re);
        }
        dy[0] = C64::new(hg.im, -hg.re);
    };
    let mut y = initial.amps.to_vec();
    let mut ode = Dopri5::new(4, pulse_tolerances());
    ode.integrate(rhs, 0.0, pulse.duration, &mut y)?;
    Ok(FourLevelState { amps: [y[0], y[1], y[2], y[3]] })
}

/// F = 2 population after one pulse from the ground state, per detuning.
pub fn spectrum_scan(theta: f64, omega_z: f64, pulse: &Pulse, detunings: &[f64]) -> Result<SpectrumTrace> {
    check_theta(theta)?;
    let ground = FourLevelState::ground();
    let pops = crate::par::map(detunings, |&d| {
        evolve_pulse(&ground, pulse, theta, d, omega_z).map(|s| s.upper_population())
    });
    let pts = detunings
        .iter()
        .zip(pops)
        .map(|(&d, p)| p.map(|p| (d, p.clamp(0.0, 1.0))))
        .collect::<Result<Vec<_>>>()?;
    SpectrumTrace::new(pts)
}

/// Closed-form fraction moved along the preparation π leg when the
/// polarization makes angle `theta_prep` with the field:
/// `sin²(area · cos θ_prep / 2)`.
pub fn prepare_state_transfer(theta_prep: f64, pulse: &Pulse) -> f64 {
    (0.5 * pulse.area * theta_prep.cos()).sin().powi(2)
}

/// The same transfer, simulated with the four-level integrator on the
/// resonant π leg. `theta_prep` may be anything in `[0, π/2]`.
pub fn simulate_state_transfer(theta_prep: f64, pulse: &Pulse, omega_z: f64) -> Result<f64> {
    let s = evolve_pulse(&FourLevelState::ground(), pulse, theta_prep, 0.0, omega_z)?;
    Ok(s.population(FourLevelState::ZERO))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelope_shape() {
        assert!(blackman_envelope(0.0, 2.0).abs() < 1e-15);
        assert!(blackman_envelope(2.0, 2.0).abs() < 1e-15);
        assert!((blackman_envelope(1.0, 2.0) - 1.0).abs() < 1e-15);
        assert_eq!(blackman_envelope(-0.1, 2.0), 0.0);
        assert_eq!(blackman_envelope(2.1, 2.0), 0.0);
    }

    #[test]
    fn weights() {
        let (a, b, c) = coupling_weights(PI / 4.0).unwrap();
        assert!((a - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-8);
        assert!((b - 0.353_553_39).abs() < 1e-8);
        assert_eq!(b, c);
        assert!(coupling_weights(-0.1).is_err());
    }

    #[test]
    fn resonant_pi_pulse() {
        let tp = 1.0;
        let p = Pulse::blackman(PI, tp).unwrap();
        let s = evolve_pulse(&FourLevelState::ground(), &p, 0.0, 0.0, DEFAULT_SEPARATION / tp).unwrap();
        assert!(s.population(FourLevelState::ZERO) > 0.999);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn free_evolution_keeps_populations() {
        let mut s = FourLevelState::ground();
        s.amps = [C64::new(0.5, 0.0), C64::new(0.5, 0.0), C64::new(0.0, 0.5), C64::new(0.5, 0.0)];
        let t = s.free_evolve(3.0, 7.0, 0.4);
        for k in 0..4 {
            assert!((t.population(k) - s.population(k)).abs() < 1e-15);
        }
    }
}
