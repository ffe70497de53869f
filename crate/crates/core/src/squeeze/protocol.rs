//! Composable pulse sequences on the Dicke manifold and the echo
//! squeezing protocols built from them.
//!
//! The echo sequences all share one frame:
//!
//! ```text
//! css(−z) → R_x(π/2) → twist(μ) → T → R_z(φ) → T⁻¹ → twist(−μ) → R → measure N_up
//! ```
//!
//! After the first pulse the mean spin points along +y. `T` is a π/2
//! rotation about an in-plane axis at azimuth `ϑ`, which turns the phase
//! generator `S_z` into `S_⊥ = sin ϑ·S_x − cos ϑ·S_y`: the phase is
//! imprinted perpendicular to the mean spin for `ϑ = −π/2` and along it for
//! `ϑ = 0`. (A bare `R_z(φ)` would commute with the twist and the echo
//! would cancel it exactly.) The two GESP variants are these two transfer
//! azimuths; [`calibrate_transfer_azimuth`] recovers them by maximizing
//! `1/Δφ` near `μ = π/2` for even and odd N.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::{check_atoms, Axis, DickeState, SpinSpace};
use crate::error::{domain, Error, Result};
use crate::optimize::{golden_section, grid_then_golden};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ProtocolStep {
    Rotate { axis: Axis, angle: f64 },
    Squeeze { mu: f64 },
    PhaseAccumulate { phi: f64 },
    MeasureUpperPopulation,
}

impl ProtocolStep {
    /// The step undoing this one; `None` for the measurement.
    pub fn inverse(&self) -> Option<Self> {
        match *self {
            Self::Rotate { axis, angle } => Some(Self::Rotate { axis, angle: -angle }),
            Self::Squeeze { mu } => Some(Self::Squeeze { mu: -mu }),
            Self::PhaseAccumulate { phi } => Some(Self::PhaseAccumulate { phi: -phi }),
            Self::MeasureUpperPopulation => None,
        }
    }

    fn apply(&self, s: &mut DickeState) {
        match *self {
            Self::Rotate { axis, angle } => s.rotate_in_place(axis, angle),
            Self::Squeeze { mu } => s.squeeze_in_place(mu),
            Self::PhaseAccumulate { phi } => s.rotate_in_place(Axis::Z, phi),
            Self::MeasureUpperPopulation => {}
        }
    }
}

/// Measured upper-state count, with its exact derivative in `φ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Readout {
    pub mean: f64,
    pub variance: f64,
    /// `d⟨N_up⟩/dφ`; zero when the sequence has no phase step.
    pub slope: f64,
}

impl Readout {
    pub fn std_dev(&self) -> f64 {
        self.variance.max(0.0).sqrt()
    }

    /// `σ / |slope|`, infinite when the slope vanishes.
    pub fn phase_uncertainty(&self) -> f64 {
        let s = self.slope.abs();
        if s == 0.0 {
            f64::INFINITY
        } else {
            self.std_dev() / s
        }
    }
}

/// A validated step sequence ending in exactly one measurement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Protocol {
    steps: Vec<ProtocolStep>,
}

impl Protocol {
    pub fn new(steps: Vec<ProtocolStep>) -> Result<Self> {
        let measures = steps.iter().filter(|s| matches!(s, ProtocolStep::MeasureUpperPopulation)).count();
        if measures != 1 || !matches!(steps.last(), Some(ProtocolStep::MeasureUpperPopulation)) {
            return Err(domain("a protocol needs exactly one measurement, as its final step"));
        }
        if steps.iter().filter(|s| matches!(s, ProtocolStep::PhaseAccumulate { .. })).count() > 1 {
            return Err(domain("at most one phase-accumulation step is supported"));
        }
        Ok(Self { steps })
    }

    pub fn steps(&self) -> &[ProtocolStep] {
        &self.steps
    }

    /// State just before the measurement.
    pub fn evolve(&self, initial: &DickeState) -> DickeState {
        let mut s = initial.clone();
        for step in &self.steps {
            step.apply(&mut s);
        }
        s
    }

    /// Runs the sequence; the slope is propagated exactly by carrying
    /// `dψ/dφ` through every step after the phase.
    pub fn run(&self, initial: &DickeState) -> Readout {
        let mut s = initial.clone();
        let mut ds: Option<DickeState> = None;
        for step in &self.steps {
            step.apply(&mut s);
            if let Some(d) = ds.as_mut() {
                step.apply(d);
            }
            if matches!(step, ProtocolStep::PhaseAccumulate { .. }) {
                ds = Some(times_minus_i_sz(&s));
            }
        }
        readout(&s, ds.as_ref())
    }

    /// Steps that undo this protocol (measurement excluded), in order.
    pub fn inverse_steps(&self) -> Vec<ProtocolStep> {
        self.steps.iter().rev().filter_map(ProtocolStep::inverse).collect()
    }
}

/// Applies each step in turn, without a terminal measurement.
pub fn apply_steps(initial: &DickeState, steps: &[ProtocolStep]) -> DickeState {
    let mut s = initial.clone();
    for step in steps {
        step.apply(&mut s);
    }
    s
}

fn times_minus_i_sz(s: &DickeState) -> DickeState {
    let mut d = s.clone();
    let half = 0.5 * s.n as f64;
    for (k, a) in d.amps.iter_mut().enumerate() {
        *a *= C64::new(0.0, -(k as f64 - half));
    }
    d
}

fn readout(s: &DickeState, ds: Option<&DickeState>) -> Readout {
    let (mean, variance) = s.upper_population();
    let slope = ds.map_or(0.0, |d| {
        2.0 * s
            .amps
            .iter()
            .zip(&d.amps)
            .enumerate()
            .map(|(k, (a, b))| k as f64 * (a.conj() * b).re)
            .sum::<f64>()
    });
    Readout { mean, variance, slope }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Conventional echo: phase perpendicular to the mean spin, readout of
    /// the amplified in-plane quadrature at mid-fringe.
    Cesp,
    /// Generalized echo, optimal for even N near `μ = π/2`.
    GespE,
    /// Generalized echo, optimal for odd N near `μ = π/2`.
    GespO,
}

impl Variant {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cesp" => Ok(Self::Cesp),
            "gesp-e" | "gespe" | "gesp_e" => Ok(Self::GespE),
            "gesp-o" | "gespo" | "gesp_o" => Ok(Self::GespO),
            _ => Err(domain(format!("unknown protocol variant '{s}' (expected cesp, gesp-e, gesp-o)"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Cesp => "cesp",
            Self::GespE => "gesp-e",
            Self::GespO => "gesp-o",
        }
    }

    /// Azimuth of the transfer rotation axis.
    pub fn transfer_azimuth(&self) -> f64 {
        match self {
            Self::GespE => GESP_E_AZIMUTH,
            Self::Cesp | Self::GespO => GESP_O_AZIMUTH,
        }
    }

    /// Where the fringe is read: the top for GESP, mid-fringe for CESP.
    pub fn reads_fringe_top(&self) -> bool {
        !matches!(self, Self::Cesp)
    }
}

/// Transfer azimuths found by [`calibrate_transfer_azimuth`] (mod π).
pub const GESP_E_AZIMUTH: f64 = 0.0;
pub const GESP_O_AZIMUTH: f64 = -FRAC_PI_2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SqueezeParams {
    pub mu: f64,
    pub variant: Variant,
}

impl SqueezeParams {
    pub fn new(mu: f64, variant: Variant) -> Result<Self> {
        if !mu.is_finite() {
            return Err(domain("squeezing strength must be finite"));
        }
        Ok(Self { mu, variant })
    }

    /// Whether μ lies in the range the echo presets are meant for.
    pub fn in_preset_range(&self) -> bool {
        (0.0..=FRAC_PI_2).contains(&self.mu)
    }
}

fn transfer(azimuth: f64, angle: f64) -> [ProtocolStep; 3] {
    use ProtocolStep::Rotate;
    [
        Rotate { axis: Axis::Z, angle: -azimuth },
        Rotate { axis: Axis::X, angle },
        Rotate { axis: Axis::Z, angle: azimuth },
    ]
}

/// Steps before the phase, starting from `css(−z)`.
fn pre_phase(mu: f64, azimuth: f64) -> Vec<ProtocolStep> {
    let mut v = vec![
        ProtocolStep::Rotate { axis: Axis::X, angle: FRAC_PI_2 },
        ProtocolStep::Squeeze { mu },
    ];
    v.extend(transfer(azimuth, FRAC_PI_2));
    v
}

/// Steps after the phase, including the measurement.
fn post_phase(mu: f64, azimuth: f64, variant: Variant) -> Vec<ProtocolStep> {
    let mut v: Vec<ProtocolStep> = transfer(azimuth, -FRAC_PI_2).into();
    v.push(ProtocolStep::Squeeze { mu: -mu });
    v.push(match variant {
        // mean spin (+y) onto +z: fringe top at φ = 0
        Variant::GespE | Variant::GespO => ProtocolStep::Rotate { axis: Axis::X, angle: FRAC_PI_2 },
        // amplified quadrature (x) onto z
        Variant::Cesp => ProtocolStep::Rotate { axis: Axis::Y, angle: -FRAC_PI_2 },
    });
    v.push(ProtocolStep::MeasureUpperPopulation);
    v
}

/// The full echo sequence for one phase.
pub fn echo_protocol(params: &SqueezeParams, phi: f64) -> Protocol {
    echo_protocol_with_azimuth(params, params.variant.transfer_azimuth(), phi)
}

fn echo_protocol_with_azimuth(params: &SqueezeParams, azimuth: f64, phi: f64) -> Protocol {
    let mut steps = pre_phase(params.mu, azimuth);
    steps.push(ProtocolStep::PhaseAccumulate { phi });
    steps.extend(post_phase(params.mu, azimuth, params.variant));
    Protocol::new(steps).expect("echo sequence is well formed")
}

/// Evaluates an echo protocol over many phases, sharing the phase-independent
/// first half.
#[derive(Debug, Clone)]
pub struct EchoReadout {
    n: usize,
    params: SqueezeParams,
    before_phase: DickeState,
    post: Vec<ProtocolStep>,
    _space: Arc<SpinSpace>,
}

impl EchoReadout {
    pub fn new(n: usize, params: SqueezeParams) -> Result<Self> {
        Self::with_azimuth(n, params, params.variant.transfer_azimuth())
    }

    fn with_azimuth(n: usize, params: SqueezeParams, azimuth: f64) -> Result<Self> {
        check_atoms(n)?;
        let space = SpinSpace::shared(n)?;
        let start = DickeState::css(n, [0.0, 0.0, -1.0])?;
        let before_phase = apply_steps(&start, &pre_phase(params.mu, azimuth));
        Ok(Self { n, params, before_phase, post: post_phase(params.mu, azimuth, params.variant), _space: space })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn params(&self) -> SqueezeParams {
        self.params
    }

    pub fn at(&self, phi: f64) -> Readout {
        let mut s = self.before_phase.rotate(Axis::Z, phi);
        let mut d = times_minus_i_sz(&s);
        for step in &self.post {
            step.apply(&mut s);
            step.apply(&mut d);
        }
        readout(&s, Some(&d))
    }

    /// Mean upper count for `φ`.
    pub fn signal(&self, phi: f64) -> f64 {
        self.at(phi).mean
    }

    /// Local fringe frequency at the operating point, relative to an
    /// unsqueezed Ramsey fringe `N(1 + cos φ)/2`.
    ///
    /// GESP variants are read at the fringe top: the curvature there,
    /// `S''(0) = −(N/2)·M²`, defines the local sinusoid
    /// `N/2·(1 + cos Mφ)`, whose steepest slope is `M·N/2`. CESP is read at
    /// mid-fringe and `M` is the slope there over `N/2`.
    pub fn phase_magnification(&self) -> Result<f64> {
        let half = 0.5 * self.n as f64;
        let m = if self.params.variant.reads_fringe_top() {
            let h = self.curvature_step();
            let s0 = self.signal(0.0);
            let curv = (self.signal(h) - 2.0 * s0 + self.signal(-h)) / (h * h);
            if !(curv < 0.0) {
                return Err(Error::ZeroSlope(format!(
                    "no fringe curvature at the operating point (mu = {}, {})",
                    self.params.mu,
                    self.params.variant.name()
                )));
            }
            (-curv / half).sqrt()
        } else {
            let h = 1e-4 / self.n as f64;
            ((self.signal(h) - self.signal(-h)) / (2.0 * h)).abs() / half
        };
        if m < 1e-9 {
            return Err(Error::ZeroSlope(format!("fringe slope vanishes at mu = {}", self.params.mu)));
        }
        Ok(m)
    }

    /// Finite-difference step well inside the central fringe.
    fn curvature_step(&self) -> f64 {
        let guess = (self.n as f64 * self.params.mu.sin().abs() / 2f64.sqrt()).max(1.0);
        1e-3 / guess
    }

    /// Population noise at the operating point relative to an unsqueezed
    /// state with the same signal, `σ / ((√N/2)·|sin Mφ|)` as `φ → 0` at the
    /// fringe top, or `σ(0)/(√N/2)` at mid-fringe.
    pub fn noise_amplification(&self) -> Result<f64> {
        let base = 0.5 * (self.n as f64).sqrt();
        if self.params.variant.reads_fringe_top() {
            let m = self.phase_magnification()?;
            let phi = 1e-4 / m;
            Ok(self.at(phi).std_dev() / (base * (m * phi).sin()))
        } else {
            Ok(self.at(0.0).std_dev() / base)
        }
    }

    /// Minimum of `σ/|dS/dφ|` over operating phases, with the phase.
    ///
    /// For GESP the minimum sits at the fringe top, approached as `φ → 0⁺`
    /// (both noise and slope vanish linearly); it is evaluated at a small
    /// positive phase after a bounded search.
    pub fn best_phase_uncertainty(&self) -> (f64, f64) {
        let f = |phi: f64| self.at(phi).phase_uncertainty();
        if !self.params.variant.reads_fringe_top() {
            // Mid-fringe readout; scan both sides of φ = 0.
            let w = PI / (self.n as f64);
            let (x, v) = grid_then_golden(f, -w, w, 81, 1e-9 * w);
            let v0 = f(0.0);
            return if v0 <= v { (0.0, v0) } else { (x, v) };
        }
        // log-spaced search over φ ∈ [1e-6, π]
        let g = |u: f64| f(u.exp());
        let (lo, hi) = (1e-6f64.ln(), PI.ln());
        let (u, v) = grid_then_golden(g, lo, hi, 241, 1e-6);
        (u.exp(), v)
    }
}

/// `⟨N_up⟩` after the echo sequence.
pub fn gesp_signal(n: usize, params: &SqueezeParams, phi: f64) -> Result<f64> {
    Ok(EchoReadout::new(n, *params)?.signal(phi))
}

pub fn phase_magnification(n: usize, params: &SqueezeParams) -> Result<f64> {
    EchoReadout::new(n, *params)?.phase_magnification()
}

pub fn noise_amplification(n: usize, params: &SqueezeParams) -> Result<f64> {
    EchoReadout::new(n, *params)?.noise_amplification()
}

/// `(μ, Δφ)` at the best operating phase for each μ. Δφ is infinite where
/// the protocol has no phase sensitivity.
pub fn sensitivity_vs_mu(n: usize, mu_grid: &[f64], variant: Variant) -> Result<Vec<(f64, f64)>> {
    check_atoms(n)?;
    SpinSpace::shared(n)?;
    let vals = crate::par::map(mu_grid, |&mu| {
        let params = SqueezeParams::new(mu, variant)?;
        Ok(EchoReadout::new(n, params)?.best_phase_uncertainty().1)
    });
    mu_grid.iter().zip(vals).map(|(&mu, v)| v.map(|v| (mu, v))).collect()
}

/// Squeezing strength used to calibrate the readout variants.
pub fn calibration_mu() -> f64 {
    FRAC_PI_2 * (1.0 - 1e-3)
}

/// Scans the transfer azimuth `ϑ ∈ [−π/2, π/2)` (the protocol is
/// π-periodic in ϑ) for the largest `1/Δφ` at `μ = π/2·(1 − 10⁻³)`.
/// Returns `(ϑ, Δφ)`.
pub fn calibrate_transfer_azimuth(n: usize) -> Result<(f64, f64)> {
    let mu = calibration_mu();
    let params = SqueezeParams::new(mu, Variant::GespE)?;
    let cost = |az: f64| {
        EchoReadout::with_azimuth(n, params, az)
            .map(|r| r.best_phase_uncertainty().1)
            .unwrap_or(f64::INFINITY)
    };
    let grid: Vec<f64> = (0..36).map(|i| -FRAC_PI_2 + PI * i as f64 / 36.0).collect();
    let costs = crate::par::map(&grid, |&a| cost(a));
    let (i, _) = costs
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |b, (i, &c)| if c < b.1 { (i, c) } else { b });
    let step = PI / 36.0;
    let (az, v) = golden_section(cost, grid[i] - step, grid[i] + step, 1e-6);
    // fold into [−π/2, π/2)
    let az = (az + FRAC_PI_2).rem_euclid(PI) - FRAC_PI_2;
    Ok((az, v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn protocol_validation() {
        use ProtocolStep::*;
        assert!(Protocol::new(vec![Squeeze { mu: 0.1 }]).is_err());
        assert!(Protocol::new(vec![MeasureUpperPopulation, Squeeze { mu: 0.1 }]).is_err());
        assert!(Protocol::new(vec![MeasureUpperPopulation, MeasureUpperPopulation]).is_err());
        assert!(Protocol::new(vec![Squeeze { mu: 0.1 }, MeasureUpperPopulation]).is_ok());
    }

    #[test]
    fn variant_names_round_trip() {
        for v in [Variant::Cesp, Variant::GespE, Variant::GespO] {
            assert_eq!(Variant::parse(v.name()).unwrap(), v);
        }
        assert!(Variant::parse("esp").is_err());
    }

    #[test]
    fn unsqueezed_gesp_o_is_ramsey() {
        let n = 20;
        let p = SqueezeParams::new(0.0, Variant::GespO).unwrap();
        for phi in [0.0, 0.3, 1.0, 2.5] {
            let s = gesp_signal(n, &p, phi).unwrap();
            assert!((s - 0.5 * n as f64 * (1.0 + f64::cos(phi))).abs() < 1e-8, "{phi}: {s}");
        }
    }

    #[test]
    fn exact_slope_matches_differences() {
        let r = EchoReadout::new(16, SqueezeParams::new(0.4, Variant::GespO).unwrap()).unwrap();
        let phi = 0.07;
        let h = 1e-6;
        let fd = (r.signal(phi + h) - r.signal(phi - h)) / (2.0 * h);
        assert!((r.at(phi).slope - fd).abs() < 1e-6 * fd.abs().max(1.0));
    }
}
