//! Physical constants, the unknown field, and Zeeman kinematics.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::error::{domain, Result};

/// Species constants. CODATA 2018 values; `g_f` is the F = 2 Landé factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalConstants {
    /// Reduced Planck constant, J·s.
    pub hbar: f64,
    /// Bohr magneton, J/T.
    pub mu_b: f64,
    pub g_f: f64,
}

impl PhysicalConstants {
    pub const CODATA: Self = Self {
        hbar: 1.054_571_817e-34,
        mu_b: 9.274_010_078_3e-24,
        g_f: 0.5,
    };

    /// Angular frequency per tesla, `g_F μ_B / ħ`.
    pub fn gyromagnetic_ratio(&self) -> f64 {
        self.g_f * self.mu_b / self.hbar
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA
    }
}

/// Field magnitude and its angle to the microwave polarization axis z′.
///
/// Only `θ ∈ [0, π/2]` is representable: peak heights depend on |cos θ| and
/// |sin θ| alone, so larger angles cannot be told apart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldConfig {
    b: f64,
    theta: f64,
}

impl FieldConfig {
    pub fn new(b: f64, theta: f64) -> Result<Self> {
        if !(b.is_finite() && b >= 0.0) {
            return Err(domain(format!("field magnitude must be finite and >= 0, got {b}")));
        }
        check_theta(theta)?;
        Ok(Self { b, theta })
    }

    /// Tesla.
    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

/// Rejects angles outside `[0, π/2]` (no wrapping).
pub fn check_theta(theta: f64) -> Result<()> {
    if theta.is_finite() && (0.0..=FRAC_PI_2).contains(&theta) {
        Ok(())
    } else {
        Err(domain(format!("theta must lie in [0, pi/2], got {theta}")))
    }
}

/// `ω_Z = g_F μ_B B / ħ` in rad/s.
pub fn zeeman_splitting(field: &FieldConfig, consts: &PhysicalConstants) -> f64 {
    consts.gyromagnetic_ratio() * field.b
}

/// `ω_Z` for a bare magnitude, rejecting negative fields.
pub fn zeeman_splitting_for(b: f64, consts: &PhysicalConstants) -> Result<f64> {
    FieldConfig::new(b, 0.0).map(|f| zeeman_splitting(&f, consts))
}

/// Phase accumulated over a free evolution time `t`: `ω_Z · T`.
pub fn ramsey_phase(field: &FieldConfig, t: f64, consts: &PhysicalConstants) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(domain(format!("evolution time must be > 0, got {t}")));
    }
    Ok(zeeman_splitting(field, consts) * t)
}

/// Field whose Zeeman splitting is `omega` (inverse of [`zeeman_splitting`]).
pub fn field_from_splitting(omega: f64, consts: &PhysicalConstants) -> f64 {
    omega / consts.gyromagnetic_ratio()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_microtesla() {
        let c = PhysicalConstants::CODATA;
        let w = zeeman_splitting(&FieldConfig::new(1e-6, 0.0).unwrap(), &c);
        // 0.5 * 9.2740100783e-24 * 1e-6 / 1.054571817e-34
        assert!((w - 4.397_05e4).abs() < 1.0, "{w}");
        let w2 = zeeman_splitting(&FieldConfig::new(2e-6, 0.0).unwrap(), &c);
        assert_eq!(w2, 2.0 * w);
        assert_eq!(zeeman_splitting(&FieldConfig::new(0.0, 0.0).unwrap(), &c), 0.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(FieldConfig::new(-1e-9, 0.0).is_err());
        assert!(FieldConfig::new(1e-6, -0.1).is_err());
        assert!(FieldConfig::new(1e-6, 1.6).is_err());
        assert!(FieldConfig::new(f64::NAN, 0.0).is_err());
        let f = FieldConfig::new(1e-6, 0.3).unwrap();
        assert!(ramsey_phase(&f, 0.0, &PhysicalConstants::CODATA).is_err());
    }
}
