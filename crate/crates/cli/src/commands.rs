//! One function per subcommand. Each validates its arguments, runs the
//! model and returns an [`Output`]; nothing here touches the filesystem
//! except `estimate`, which reads its input.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde_json::{json, Value};

use vecmag::cavity::{self, CavityParams};
use vecmag::estimate::{estimate_field, find_peaks, plan_second_pass, DEFAULT_MIN_HEIGHT};
use vecmag::field::{check_theta, zeeman_splitting_for, PhysicalConstants};
use vecmag::pulse::{spectrum_scan, Pulse, Shape, DEFAULT_SEPARATION};
use vecmag::ramsey::{
    b_min, central_peak_height, field_per_radian, optimal_phase, phase_uncertainty, projection_noise, ramsey_scan,
    side_peak_height, RamseyConfig, SensitivityBudget,
};
use vecmag::squeeze::{sensitivity_vs_mu, EchoReadout, SqueezeParams, Variant, MAX_ATOMS};
use vecmag::trace::{linspace, SpectrumTrace};

use crate::output::Output;
use crate::{CliError, Command};

type Res<T> = Result<T, CliError>;

pub fn dispatch(cmd: &Command, seed: u64) -> Res<Output> {
    let out = match cmd {
        Command::Constants => constants(),
        Command::Spectrum(a) => spectrum(a, seed),
        Command::Ramsey(a) => ramsey(a),
        Command::Sensitivity(a) => sensitivity(a),
        Command::Gesp(a) => gesp(a),
        Command::SensitivityCurve(a) => sensitivity_curve(a),
        Command::Cavity(a) => cavity(a),
        Command::Estimate(a) => estimate(a),
        Command::Fig2(a) => fig2(a),
        Command::Fig3(a) => fig3(a),
        Command::Fig4(a) => fig4(a),
    }?;
    Ok(out.param("seed", seed))
}

fn domain(msg: impl Into<String>) -> CliError {
    CliError::Domain(msg.into())
}

fn positive(name: &str, x: f64) -> Res<f64> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(domain(format!("{name} must be finite and > 0, got {x}")))
    }
}

fn grid(lo: f64, hi: f64, points: usize) -> Res<Vec<f64>> {
    if points < 2 {
        return Err(domain(format!("need at least 2 grid points, got {points}")));
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(domain(format!("grid bounds must be finite with min < max, got [{lo}, {hi}]")));
    }
    Ok(linspace(lo, hi, points))
}

/// State-vector paths are capped; the analytic formulas are not.
fn check_state_vector_atoms(n: usize) -> Res<()> {
    if n == 0 {
        return Err(domain("atom number must be >= 1"));
    }
    if n > MAX_ATOMS {
        return Err(domain(format!(
            "N = {n} exceeds the state-vector simulation cap of {MAX_ATOMS} atoms; \
             for large N use the analytic sensitivity formulas instead: `vecmag sensitivity --atoms {n}`"
        )));
    }
    Ok(())
}

fn complex(z: C64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ShapeArg {
    Blackman,
    Square,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Cesp,
    GespE,
    GespO,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Cesp => Variant::Cesp,
            VariantArg::GespE => Variant::GespE,
            VariantArg::GespO => Variant::GespO,
        }
    }
}

// ---- constants ----

fn constants() -> Res<Output> {
    let c = PhysicalConstants::default();
    let gamma = c.gyromagnetic_ratio();
    Ok(Output::report(
        "constants",
        json!({
            "hbar_J_s": c.hbar,
            "mu_b_J_per_T": c.mu_b,
            "g_f": c.g_f,
            "gyromagnetic_ratio_rad_s_per_T": gamma,
            "gyromagnetic_ratio_Hz_per_T": gamma / (2.0 * PI),
            "field_per_radian_at_1s_T": field_per_radian(1.0, &c),
            "omega_z_at_1uT_rad_s": gamma * 1e-6,
            "default_pulse_separation": DEFAULT_SEPARATION,
        }),
    ))
}

// ---- spectrum ----

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct SpectrumArgs {
    /// Angle between field and microwave polarization, rad, in [0, π/2].
    #[arg(long, allow_hyphen_values = true, default_value_t = FRAC_PI_4)]
    pub theta: f64,
    /// Field magnitude, tesla.
    #[arg(long, allow_hyphen_values = true, default_value_t = 1e-6)]
    pub b: f64,
    /// Pulse area in units of π.
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
    pub area: f64,
    /// Pulse length, s. Default puts ω_Z·T_p = 100π.
    #[arg(long, allow_hyphen_values = true)]
    pub tp: Option<f64>,
    #[arg(long, value_enum, default_value_t = ShapeArg::Blackman)]
    pub shape: ShapeArg,
    /// Scan half-width in units of ω_Z (unless --min/--max are given).
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.5)]
    pub span: f64,
    /// Lowest detuning, rad/s.
    #[arg(long, allow_hyphen_values = true)]
    pub min: Option<f64>,
    /// Highest detuning, rad/s.
    #[arg(long, allow_hyphen_values = true)]
    pub max: Option<f64>,
    #[arg(long, default_value_t = 1501)]
    pub points: usize,
    /// Replace populations by binomial counts over this many atoms.
    #[arg(long)]
    pub atoms: Option<u64>,
}

struct SpectrumRun {
    omega_z: f64,
    pulse: Pulse,
    trace: SpectrumTrace,
}

fn default_tp(omega_z: f64) -> Res<f64> {
    if omega_z > 0.0 {
        Ok(DEFAULT_SEPARATION / omega_z)
    } else {
        Err(domain("B = 0: give --tp explicitly"))
    }
}

fn run_spectrum(theta: f64, b: f64, area_pi: f64, tp: Option<f64>, shape: Shape, detunings: &[f64]) -> Res<SpectrumRun> {
    check_theta(theta)?;
    let c = PhysicalConstants::default();
    let omega_z = zeeman_splitting_for(b, &c)?;
    let tp = match tp {
        Some(t) => positive("tp", t)?,
        None => default_tp(omega_z)?,
    };
    let pulse = Pulse::new(shape, PI * positive("area", area_pi)?, tp)?;
    let trace = spectrum_scan(theta, omega_z, &pulse, detunings)?;
    Ok(SpectrumRun { omega_z, pulse, trace })
}

fn spectrum_grid(omega_z: f64, span: f64, min: Option<f64>, max: Option<f64>, points: usize) -> Res<Vec<f64>> {
    let half = positive("span", span)? * omega_z;
    grid(min.unwrap_or(-half), max.unwrap_or(half), points)
}

fn spectrum(a: &SpectrumArgs, seed: u64) -> Res<Output> {
    let c = PhysicalConstants::default();
    let omega_z = zeeman_splitting_for(a.b, &c)?;
    let d = spectrum_grid(omega_z, a.span, a.min, a.max, a.points)?;
    let shape = match a.shape {
        ShapeArg::Blackman => Shape::Blackman,
        ShapeArg::Square => Shape::Square,
    };
    let run = run_spectrum(a.theta, a.b, a.area, a.tp, shape, &d)?;
    let mut rows: Vec<Vec<f64>> = run.trace.points().iter().map(|&(x, y)| vec![x, y]).collect();
    if let Some(n) = a.atoms {
        if n == 0 {
            return Err(domain("--atoms must be >= 1"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for r in &mut rows {
            let k = Binomial::new(n, r[1]).map_err(|e| domain(e.to_string()))?.sample(&mut rng);
            r[1] = k as f64 / n as f64;
        }
    }
    let mut out = Output::table("spectrum", &["detuning_rad_s", "population_F2"], rows)
        .param("theta_rad", a.theta)
        .param("b_T", a.b)
        .param("omega_z_rad_s", run.omega_z)
        .param("pulse_shape", format!("{:?}", shape).to_lowercase())
        .param("pulse_area_rad", run.pulse.area)
        .param("tp_s", run.pulse.duration)
        .param("detuning_min_rad_s", d[0])
        .param("detuning_max_rad_s", d[d.len() - 1])
        .param("points", a.points);
    if let Some(n) = a.atoms {
        out = out.param("atoms", n).note("populations are binomial draws divided by the atom number");
    }
    Ok(out)
}

// ---- ramsey ----

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct RamseyArgs {
    #[arg(long, allow_hyphen_values = true, default_value_t = FRAC_PI_4)]
    pub theta: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1e-6)]
    pub b: f64,
    /// Dark time between the two pulses, s.
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.1)]
    pub t_free: f64,
    /// Length of each half-area pulse, s. Default puts ω_Z·T_p = 100π.
    #[arg(long, allow_hyphen_values = true)]
    pub tp: Option<f64>,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1e4)]
    pub atoms: f64,
    /// Scan centre, rad/s. Default: the upper side transition at +ω_Z.
    #[arg(long, allow_hyphen_values = true)]
    pub center: Option<f64>,
    /// Fringe periods (2π/T) on each side of the centre.
    #[arg(long, allow_hyphen_values = true, default_value_t = 3.0)]
    pub periods: f64,
    #[arg(long, default_value_t = 601)]
    pub points: usize,
}

fn ramsey(a: &RamseyArgs) -> Res<Output> {
    let c = PhysicalConstants::default();
    let omega_z = zeeman_splitting_for(a.b, &c)?;
    let tp = match a.tp {
        Some(t) => positive("tp", t)?,
        None => default_tp(omega_z)?,
    };
    let cfg = RamseyConfig::new(a.atoms, a.t_free, a.theta, Pulse::blackman(PI, tp)?)?;
    let centre = a.center.unwrap_or(omega_z);
    let w = positive("periods", a.periods)? * 2.0 * PI / a.t_free;
    let d = grid(centre - w, centre + w, a.points)?;
    let tr = ramsey_scan(&cfg, omega_z, &d)?;
    let rows = tr.points().iter().map(|&(x, y)| vec![x, y]).collect();
    Ok(Output::table("ramsey", &["detuning_rad_s", "signal"], rows)
        .param("theta_rad", a.theta)
        .param("b_T", a.b)
        .param("omega_z_rad_s", omega_z)
        .param("t_free_s", a.t_free)
        .param("tp_s", tp)
        .param("pulse_area_rad", FRAC_PI_2)
        .param("atoms", a.atoms)
        .param("center_rad_s", centre)
        .param("periods", a.periods)
        .param("points", a.points)
        .note("signal is the expected number of atoms in F = 2"))
}

// ---- sensitivity ----

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct SensitivityArgs {
    /// Atom number; any positive value (closed-form, no simulation).
    #[arg(long, allow_hyphen_values = true, default_value_t = 1e8)]
    pub atoms: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = FRAC_PI_4)]
    pub theta: f64,
    /// Ramsey time, s.
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
    pub t: f64,
    /// Single-shot duration, s.
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
    pub tau0: f64,
    /// Total measurement time, s.
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
    pub tau: f64,
    /// Operating phase for the noise and Δφ entries, rad.
    #[arg(long, allow_hyphen_values = true, default_value_t = FRAC_PI_2)]
    pub phi: f64,
}

fn sensitivity(a: &SensitivityArgs) -> Res<Output> {
    let c = PhysicalConstants::default();
    check_theta(a.theta)?;
    let h = side_peak_height(a.theta)?;
    let budget = SensitivityBudget::new(a.tau0, a.tau)?;
    let noise = projection_noise(a.atoms, h, a.phi);
    let dphi = phase_uncertainty(a.atoms, h, a.phi).ok();
    let opt = optimal_phase(a.atoms, h)?;
    let plain = b_min(a.atoms, h, a.t, &budget, false, &c)?;
    let squeezed = b_min(a.atoms, h, a.t, &budget, true, &c)?;
    let report = json!({
        "h": h,
        "central_height": central_peak_height(a.theta)?,
        "projection_noise": { "literal": noise.literal, "binomial": noise.binomial, "difference": noise.difference() },
        "dphi": dphi,
        "optimal_phase": opt,
        "field_per_radian_T": field_per_radian(a.t, &c),
        "b_min_T": plain,
        "b_min_gesp_T": squeezed,
    });
    Ok(Output::report("sensitivity", report)
        .param("atoms", a.atoms)
        .param("theta_rad", a.theta)
        .param("t_s", a.t)
        .param("tau0_s", a.tau0)
        .param("tau_s", a.tau)
        .param("phi_rad", a.phi))
}

// ---- gesp ----

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct GespArgs {
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// Twisting strength μ = χt.
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.6)]
    pub mu: f64,
    #[arg(long, value_enum, default_value_t = VariantArg::GespO)]
    pub variant: VariantArg,
    #[arg(long, allow_hyphen_values = true, default_value_t = -PI)]
    pub phi_min: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = PI)]
    pub phi_max: f64,
    #[arg(long, default_value_t = 1201)]
    pub points: usize,
}

fn fringe(n: usize, mu: f64, variant: Variant, phis: &[f64]) -> Res<Vec<f64>> {
    check_state_vector_atoms(n)?;
    let r = EchoReadout::new(n, SqueezeParams::new(mu, variant)?)?;
    Ok(phis.iter().map(|&p| r.signal(p) / n as f64).collect())
}

fn gesp(a: &GespArgs) -> Res<Output> {
    let phis = grid(a.phi_min, a.phi_max, a.points)?;
    let variant: Variant = a.variant.into();
    let pops = fringe(a.n, a.mu, variant, &phis)?;
    let rows = phis.iter().zip(pops).map(|(&p, y)| vec![p, y]).collect();
    Ok(Output::table("gesp", &["phi_rad", "population"], rows)
        .param("n", a.n)
        .param("mu", a.mu)
        .param("variant", variant.name())
        .param("phi_min_rad", a.phi_min)
        .param("phi_max_rad", a.phi_max)
        .param("points", a.points)
        .note("population is the mean fraction of atoms read out in the upper state"))
}

// ---- sensitivity-curve ----

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct CurveArgs {
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = VariantArg::GespE)]
    pub variant: VariantArg,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.05)]
    pub mu_min: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = FRAC_PI_2)]
    pub mu_max: f64,
    #[arg(long, default_value_t = 60)]
    pub points: usize,
}

fn inverse_curve(n: usize, mus: &[f64], variant: Variant) -> Res<Vec<f64>> {
    check_state_vector_atoms(n)?;
    // an infinite Δφ (no phase sensitivity) plots as 0
    Ok(sensitivity_vs_mu(n, mus, variant)?.into_iter().map(|(_, d)| 1.0 / d).collect())
}

fn sensitivity_curve(a: &CurveArgs) -> Res<Output> {
    let mus = grid(a.mu_min, a.mu_max, a.points)?;
    let variant: Variant = a.variant.into();
    let inv = inverse_curve(a.n, &mus, variant)?;
    let rows = mus.iter().zip(inv).map(|(&m, v)| vec![m, v]).collect();
    Ok(Output::table("sensitivity-curve", &["mu_rad", "inverse_dphi"], rows)
        .param("n", a.n)
        .param("variant", variant.name())
        .param("mu_min", a.mu_min)
        .param("mu_max", a.mu_max)
        .param("points", a.points)
        .param("heisenberg_inverse_dphi", a.n as f64)
        .note("inverse_dphi is 1/Δφ at the best operating phase"))
}

// ---- cavity ----

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct CavityArgs {
    /// Probe–cavity detuning δ.
    #[arg(long, allow_hyphen_values = true, default_value_t = 3.0)]
    pub delta: f64,
    /// Total cavity linewidth κ.
    #[arg(long, allow_hyphen_values = true, default_value_t = 2.0)]
    pub kappa: f64,
    /// Input-coupler rate κ₀ ≤ κ.
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
    pub kappa0: f64,
    /// Drive amplitude |β|.
    #[arg(long, allow_hyphen_values = true, default_value_t = 10.0)]
    pub beta_abs: f64,
    /// Drive phase arg β, rad.
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub beta_arg: f64,
    /// Differential light shift per photon ε.
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.01)]
    pub epsilon: f64,
    /// Common light shift per photon δ₀.
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub delta0: f64,
    /// Fock truncation; default n̄ + 10√n̄ + 20.
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Ladder indices n′ to check.
    #[arg(long, value_delimiter = ',', default_value = "0,1,2")]
    pub ladder: Vec<usize>,
    /// Collective spin projection m used for the truncation-error check.
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
    pub m: f64,
}

fn cavity(a: &CavityArgs) -> Res<Output> {
    let beta = C64::from_polar(a.beta_abs, a.beta_arg);
    let p = CavityParams::new(a.delta, a.kappa, a.kappa0, beta, a.epsilon, a.delta0)?;
    let ss = cavity::steady_alpha(&p);
    let n_max = a.n_max.unwrap_or_else(|| cavity::default_n_max(&p));
    let (_, warning) = cavity::build_hamiltonian(&p, n_max);
    let residuals = a
        .ladder
        .iter()
        .map(|&k| {
            Ok(json!({
                "n_prime": k,
                "eigenvalue": complex(cavity::eigenladder_eigenvalue(&p, k)),
                "residual": cavity::eigenladder_residual(&p, n_max, k)?,
            }))
        })
        .collect::<Res<Vec<_>>>()?;
    let dm = 1e-2;
    let (chi_exact, rate_exact) = cavity::extract_chi_and_rate(|m| cavity::effective_hamiltonian_exact(&p, m), dm);
    let (chi_series, rate_series) = cavity::extract_chi_and_rate(|m| cavity::effective_hamiltonian_series(&p, m), dm);
    let scaling = |f: fn(&CavityParams, f64) -> C64| {
        let (g1, g2, ratio) = cavity::truncation_error_scaling(&p, a.m, f);
        json!({ "error_at_epsilon": g1, "error_at_half_epsilon": g2, "ratio": ratio })
    };
    let report = json!({
        "alpha": complex(ss.alpha),
        "alpha_tilde": complex(ss.alpha_tilde),
        "n_bar": ss.n_bar,
        "delta_prime": p.delta_prime(),
        "chi": cavity::chi(&p),
        "lindblad_rate": cavity::lindblad_rate(&p),
        "quality_ratio": cavity::quality_ratio(&p),
        "n_max": n_max,
        "truncation_warning": warning,
        "residuals": residuals,
        "maclaurin": {
            "exact": { "chi": chi_exact, "rate": rate_exact },
            "series": { "chi": chi_series, "rate": rate_series },
        },
        "truncation_error_scaling": {
            "exact": scaling(cavity::effective_hamiltonian_exact),
            "series": scaling(cavity::effective_hamiltonian_series),
        },
    });
    Ok(Output::report("cavity", report)
        .param("delta", a.delta)
        .param("kappa", a.kappa)
        .param("kappa0", a.kappa0)
        .param("beta_abs", a.beta_abs)
        .param("beta_arg_rad", a.beta_arg)
        .param("epsilon", a.epsilon)
        .param("delta0", a.delta0)
        .param("m", a.m)
        .note("units with hbar = 1; rates share the unit of delta"))
}

// ---- estimate ----

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Spectrum CSV as written by `vecmag spectrum`.
    #[arg(long)]
    pub input: PathBuf,
    /// Peak detection threshold on the population.
    #[arg(long, allow_hyphen_values = true, default_value_t = DEFAULT_MIN_HEIGHT)]
    pub min_height: f64,
}

/// Reads `detuning,population` rows, skipping `#` comments and a header.
pub fn parse_spectrum_csv(text: &str) -> Res<SpectrumTrace> {
    let mut pts = Vec::new();
    let mut header_seen = false;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: Option<Vec<f64>> = cells.iter().map(|c| c.parse().ok()).collect();
        match parsed {
            Some(v) if v.len() >= 2 => pts.push((v[0], v[1])),
            None if !header_seen && pts.is_empty() => header_seen = true,
            _ => return Err(domain(format!("line {}: expected two numeric columns, got '{line}'", i + 1))),
        }
    }
    if pts.is_empty() {
        return Err(domain("spectrum file has no data rows"));
    }
    Ok(SpectrumTrace::new(pts)?)
}

fn estimate(a: &EstimateArgs) -> Res<Output> {
    let text = std::fs::read_to_string(&a.input).map_err(CliError::Io)?;
    let trace = parse_spectrum_csv(&text)?;
    let c = PhysicalConstants::default();
    let peaks = find_peaks(&trace, a.min_height);
    let est = estimate_field(&peaks, &c)?;
    let plan = plan_second_pass(&est)?;
    let peaks: Vec<Value> =
        peaks.peaks().iter().map(|p| json!({ "position_rad_s": p.position, "height": p.height })).collect();
    Ok(Output::report("estimate", json!({ "estimate": est, "second_pass": plan, "peaks": peaks }))
        .param("input", a.input.display().to_string())
        .param("min_height", a.min_height)
        .param("samples", trace.len()))
}

// ---- figure presets ----

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct Fig2Args {
    /// Field angles, rad; repeat for several panels.
    #[arg(long, num_args = 1.., default_values_t = [0.0, FRAC_PI_4, FRAC_PI_2])]
    pub theta: Vec<f64>,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1e-6)]
    pub b: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.5)]
    pub span: f64,
    #[arg(long, default_value_t = 1501)]
    pub points: usize,
}

fn fig2(a: &Fig2Args) -> Res<Output> {
    let c = PhysicalConstants::default();
    let omega_z = zeeman_splitting_for(a.b, &c)?;
    let d = spectrum_grid(omega_z, a.span, None, None, a.points)?;
    let mut cols = vec!["detuning_rad_s".to_string()];
    let mut data = Vec::new();
    let mut tp = 0.0;
    for &theta in &a.theta {
        let run = run_spectrum(theta, a.b, 1.0, None, Shape::Blackman, &d)?;
        tp = run.pulse.duration;
        cols.push(format!("population_F2_theta_{theta:.6}"));
        data.push(run.trace.ys().collect::<Vec<_>>());
    }
    let rows = (0..d.len()).map(|i| std::iter::once(d[i]).chain(data.iter().map(|c| c[i])).collect()).collect();
    let cols: Vec<&str> = cols.iter().map(String::as_str).collect();
    let thetas: Vec<String> = a.theta.iter().map(|t| t.to_string()).collect();
    Ok(Output::table("fig2", &cols, rows)
        .param("theta_rad", thetas.join(" "))
        .param("b_T", a.b)
        .param("omega_z_rad_s", omega_z)
        .param("pulse_shape", "blackman")
        .param("pulse_area_rad", PI)
        .param("tp_s", tp)
        .param("span_omega_z", a.span)
        .param("points", a.points))
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct Fig3Args {
    #[arg(long, value_enum, default_value_t = VariantArg::GespO)]
    pub variant: VariantArg,
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.6)]
    pub mu: f64,
    /// Phase half-range, rad.
    #[arg(long, allow_hyphen_values = true, default_value_t = PI)]
    pub phi_span: f64,
    #[arg(long, default_value_t = 1201)]
    pub points: usize,
}

fn fig3(a: &Fig3Args) -> Res<Output> {
    let w = positive("phi-span", a.phi_span)?;
    let phis = grid(-w, w, a.points)?;
    let variant: Variant = a.variant.into();
    let plain = fringe(a.n, 0.0, Variant::GespO, &phis)?;
    let squeezed = fringe(a.n, a.mu, variant, &phis)?;
    let rows = phis.iter().enumerate().map(|(i, &p)| vec![p, plain[i], squeezed[i]]).collect();
    Ok(Output::table("fig3", &["phi_rad", "population_unsqueezed", "population"], rows)
        .param("n", a.n)
        .param("mu", a.mu)
        .param("variant", variant.name())
        .param("phi_span_rad", a.phi_span)
        .param("points", a.points)
        .param("expected_magnification", a.n as f64 * a.mu.sin() / 2f64.sqrt())
        .note("population_unsqueezed is the same echo at mu = 0 (plain Ramsey fringe)"))
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct Fig4Args {
    /// Atom numbers; repeat for several curves.
    #[arg(long, num_args = 1.., default_values_t = [100usize, 101])]
    pub n: Vec<usize>,
    #[arg(long, value_enum, default_value_t = VariantArg::GespE)]
    pub variant: VariantArg,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.05)]
    pub mu_min: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = FRAC_PI_2)]
    pub mu_max: f64,
    #[arg(long, default_value_t = 60)]
    pub points: usize,
}

fn fig4(a: &Fig4Args) -> Res<Output> {
    let mus = grid(a.mu_min, a.mu_max, a.points)?;
    let variant: Variant = a.variant.into();
    let mut cols = vec!["mu_rad".to_string()];
    let mut data = Vec::new();
    for &n in &a.n {
        cols.push(format!("inverse_dphi_n{n}"));
        data.push(inverse_curve(n, &mus, variant)?);
    }
    let rows = (0..mus.len()).map(|i| std::iter::once(mus[i]).chain(data.iter().map(|c| c[i])).collect()).collect();
    let cols: Vec<&str> = cols.iter().map(String::as_str).collect();
    let ns: Vec<String> = a.n.iter().map(|n| n.to_string()).collect();
    Ok(Output::table("fig4", &cols, rows)
        .param("n", ns.join(" "))
        .param("variant", variant.name())
        .param("mu_min", a.mu_min)
        .param("mu_max", a.mu_max)
        .param("points", a.points)
        .note("desk-scale atom numbers (e.g. 100 vs 101) stand in for the 1e8 vs 1e8+1 parity comparison")
        .note("inverse_dphi is 1/Δφ at the best operating phase; the Heisenberg limit is N"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_emitted_format() {
        let t = parse_spectrum_csv("# vecmag\n# a = 1\ndetuning_rad_s,population_F2\n-1,0.1\n0,0.5\n1,0.2\n").unwrap();
        assert_eq!(t.len(), 3);
        assert!(parse_spectrum_csv("x,y\n1,oops\n").is_err());
        assert!(parse_spectrum_csv("# only comments\n").is_err());
    }

    #[test]
    fn atom_cap_guidance() {
        let e = check_state_vector_atoms(100_000_000).unwrap_err();
        assert!(matches!(e, CliError::Domain(ref m) if m.contains("sensitivity")));
        assert!(check_state_vector_atoms(MAX_ATOMS).is_ok());
    }
}
