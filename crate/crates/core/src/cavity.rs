//! Driven lossy cavity: the non-Hermitian Hamiltonian, its coherent-state
//! eigenladder, and the atom-dressed effective Hamiltonian that sets the
//! twisting strength `χ`.
//!
//! Frame and conventions: `ħ = 1`, frequencies in rad/s,
//! `H = (−δ − iκ/2) a†a + i√κ₀ (a†β − aβ*) + i√κ₀ αβ*`
//! with steady amplitude `α = i√κ₀β / (δ + iκ/2)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::ode::{Dopri5, Tolerances};

const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CavityParams {
    /// Probe–cavity detuning `δ = ω − ω_c`.
    pub delta: f64,
    /// Total linewidth.
    pub kappa: f64,
    /// Input-coupler decay rate.
    pub kappa0: f64,
    /// Drive amplitude, √(photons/s).
    pub beta: C64,
    /// Differential light shift per photon.
    pub epsilon: f64,
    /// Common light shift per photon.
    pub delta0: f64,
}

impl CavityParams {
    pub fn new(delta: f64, kappa: f64, kappa0: f64, beta: C64, epsilon: f64, delta0: f64) -> Result<Self> {
        let all = [delta, kappa, kappa0, beta.re, beta.im, epsilon, delta0];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(domain("cavity parameters must be finite"));
        }
        if !(kappa0 > 0.0 && kappa >= kappa0) {
            return Err(domain(format!("need kappa >= kappa0 > 0, got kappa = {kappa}, kappa0 = {kappa0}")));
        }
        Ok(Self { delta, kappa, kappa0, beta, epsilon, delta0 })
    }

    /// `δ′ = δ − δ₀`.
    pub fn delta_prime(&self) -> f64 {
        self.delta - self.delta0
    }

    /// `√κ₀ β`.
    fn drive(&self) -> C64 {
        self.beta * self.kappa0.sqrt()
    }

    /// Every rate multiplied by `s`, drive by `√s` (a change of time unit).
    pub fn rescaled(&self, s: f64) -> Self {
        Self {
            delta: s * self.delta,
            kappa: s * self.kappa,
            kappa0: s * self.kappa0,
            beta: self.beta * s.sqrt(),
            epsilon: s * self.epsilon,
            delta0: s * self.delta0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SteadyState {
    pub alpha: C64,
    pub alpha_tilde: C64,
    pub n_bar: f64,
}

/// `α = i√κ₀β/(δ + iκ/2)`, `α̃ = i√κ₀β/(δ − iκ/2)`, `n̄ = |α|²`.
pub fn steady_alpha(p: &CavityParams) -> SteadyState {
    let k = p.drive();
    let alpha = I * k / C64::new(p.delta, 0.5 * p.kappa);
    let alpha_tilde = I * k / C64::new(p.delta, -0.5 * p.kappa);
    SteadyState { alpha, alpha_tilde, n_bar: alpha.norm_sqr() }
}

/// Truncation heuristic `⌈n̄ + 10√n̄ + 20⌉`.
pub fn default_n_max(p: &CavityParams) -> usize {
    let n = steady_alpha(p).n_bar;
    (n + 10.0 * n.sqrt() + 20.0).ceil() as usize
}

/// A dense operator on the Fock space truncated to `|0⟩ … |n_max − 1⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    pub matrix: DMatrix<C64>,
}

impl FockOperator {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn annihilation(dim: usize) -> Self {
        let mut m = DMatrix::zeros(dim, dim);
        for n in 1..dim {
            m[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
        }
        Self { matrix: m }
    }

    pub fn creation(dim: usize) -> Self {
        Self { matrix: Self::annihilation(dim).matrix.adjoint() }
    }

    pub fn number(dim: usize) -> Self {
        Self { matrix: DMatrix::from_fn(dim, dim, |i, j| if i == j { C64::new(i as f64, 0.0) } else { C64::new(0.0, 0.0) }) }
    }

    pub fn adjoint(&self) -> Self {
        Self { matrix: self.matrix.adjoint() }
    }

    pub fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        &self.matrix * v
    }

    /// `⟨v|O|v⟩ / ⟨v|v⟩`.
    pub fn expectation(&self, v: &DVector<C64>) -> C64 {
        v.dotc(&self.apply(v)) / v.norm_squared()
    }
}

/// Hamiltonian on `n_max` Fock levels, and a warning if the truncation is
/// below the heuristic (with the coherent-state weight that falls outside).
pub fn build_hamiltonian(p: &CavityParams, n_max: usize) -> (FockOperator, Option<String>) {
    let ss = steady_alpha(p);
    let a = FockOperator::annihilation(n_max).matrix;
    let ad = a.adjoint();
    let k = p.drive();
    let num = FockOperator::number(n_max).matrix;
    let eye = DMatrix::<C64>::identity(n_max, n_max);
    let h = num * C64::new(-p.delta, -0.5 * p.kappa) + (ad * k - a * k.conj()) * I + eye * (I * ss.alpha * k.conj());
    (FockOperator { matrix: h }, truncation_warning(p, n_max))
}

fn truncation_warning(p: &CavityParams, n_max: usize) -> Option<String> {
    let rec = default_n_max(p);
    (n_max < rec).then(|| {
        let tail = 1.0 - coherent_state(steady_alpha(p).alpha, n_max).norm_squared();
        format!("n_max = {n_max} is below the recommended {rec}; coherent-state weight outside the space ≈ {tail:.3e}")
    })
}

/// Truncated coherent state `e^{−|α|²/2} Σ αⁿ/√n! |n⟩`, not renormalized.
/// Coefficients are built in log space so large `|α|` does not overflow.
pub fn coherent_state(alpha: C64, dim: usize) -> DVector<C64> {
    let r = alpha.norm();
    let arg = alpha.arg();
    let mut v = DVector::zeros(dim);
    if r == 0.0 {
        if dim > 0 {
            v[0] = C64::new(1.0, 0.0);
        }
        return v;
    }
    let mut ln_mag = -0.5 * r * r;
    let lr = r.ln();
    for n in 0..dim {
        if n > 0 {
            ln_mag += lr - 0.5 * (n as f64).ln();
        }
        v[n] = C64::from_polar(ln_mag.exp(), arg * n as f64);
    }
    v
}

/// Neumaier-compensated `Σ|v_n|²`.
pub fn compensated_norm_sqr(v: &DVector<C64>) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for x in v.iter() {
        let y = x.norm_sqr();
        let t = sum + y;
        c += if sum.abs() >= y { (sum - t) + y } else { (y - t) + sum };
        sum = t;
    }
    sum + c
}

/// `|α, n′⟩ = (a† − α̃*)^{n′}|α⟩`, normalized.
pub fn eigenladder_state(p: &CavityParams, n_max: usize, n_prime: usize) -> Result<DVector<C64>> {
    let ss = steady_alpha(p);
    let mut v = coherent_state(ss.alpha, n_max);
    let shift = ss.alpha_tilde.conj();
    for _ in 0..n_prime {
        let mut w = DVector::zeros(n_max);
        for n in 0..n_max {
            let mut z = -shift * v[n];
            if n > 0 {
                z += v[n - 1] * (n as f64).sqrt();
            }
            w[n] = z;
        }
        // weight that a† would push past the top level
        let lost = v[n_max - 1].norm_sqr() * n_max as f64;
        let total = compensated_norm_sqr(&w);
        if !(total > 0.0) || lost > 1e-12 * total {
            return Err(Error::Truncation(format!(
                "|alpha, {n_prime}> does not fit in {n_max} Fock levels (n_bar = {:.3})",
                ss.n_bar
            )));
        }
        v = w;
    }
    let norm = compensated_norm_sqr(&v).sqrt();
    Ok(v / C64::new(norm, 0.0))
}

/// Ladder eigenvalue `n′(−δ − iκ/2)`.
pub fn eigenladder_eigenvalue(p: &CavityParams, n_prime: usize) -> C64 {
    C64::new(-p.delta, -0.5 * p.kappa) * n_prime as f64
}

/// `‖H|α,n′⟩ − n′(−δ − iκ/2)|α,n′⟩‖` for the normalized ladder state.
pub fn eigenladder_residual(p: &CavityParams, n_max: usize, n_prime: usize) -> Result<f64> {
    let v = eigenladder_state(p, n_max, n_prime)?;
    let (h, _) = build_hamiltonian(p, n_max);
    let r = h.apply(&v) - &v * eigenladder_eigenvalue(p, n_prime);
    Ok(r.norm() / v.norm())
}

/// `χ = δ′ ε² n̄ / (δ′² + κ²/4)`.
pub fn chi(p: &CavityParams) -> f64 {
    let d = p.delta_prime();
    d * p.epsilon * p.epsilon * steady_alpha(p).n_bar / (d * d + 0.25 * p.kappa * p.kappa)
}

/// Coefficient `χκ/δ′ = κ ε² n̄ / (δ′² + κ²/4)` of the dephasing term,
/// written without the division so `δ′ = 0` is regular.
pub fn lindblad_rate(p: &CavityParams) -> f64 {
    let d = p.delta_prime();
    p.kappa * p.epsilon * p.epsilon * steady_alpha(p).n_bar / (d * d + 0.25 * p.kappa * p.kappa)
}

/// `χ / (χκ/δ′) = δ′/κ`: twisting per unit dephasing.
pub fn quality_ratio(p: &CavityParams) -> f64 {
    p.delta_prime() / p.kappa
}

/// Dressed amplitude `α′(m) = i√κ₀β / (δ′ − εm + iκ/2)`.
pub fn dressed_alpha(p: &CavityParams, m: f64) -> C64 {
    I * p.drive() / C64::new(p.delta_prime() - p.epsilon * m, 0.5 * p.kappa)
}

/// Eigenvalue of the atom-dressed cavity Hamiltonian on the dressed
/// coherent state, `i√κ₀β*(α − α′(m))`, for `S_z = m`.
pub fn effective_hamiltonian_exact(p: &CavityParams, m: f64) -> C64 {
    let ss = steady_alpha(p);
    I * p.drive().conj() * (ss.alpha - dressed_alpha(p, m))
}

/// Cavity Hamiltonian with the atoms in `S_z = m`: the cavity detuning is
/// shifted by `δ₀ + εm`, the constant term keeps the undressed `α`.
pub fn dressed_hamiltonian(p: &CavityParams, m: f64, n_max: usize) -> FockOperator {
    let shifted = CavityParams { delta: p.delta_prime() - p.epsilon * m, ..*p };
    let (mut h, _) = build_hamiltonian(&shifted, n_max);
    let k = p.drive();
    let diff = I * (steady_alpha(p).alpha - steady_alpha(&shifted).alpha) * k.conj();
    for i in 0..n_max {
        h.matrix[(i, i)] += diff;
    }
    h
}

/// The two-part split `|α′|²(δ₀ + εm) − (|α′|² − |α|²)(δ + iκ/2)`.
///
/// Algebraically this equals `−conj(effective_hamiltonian_exact)`, not the
/// eigenvalue itself: with `D = δ + iκ/2`, `D′ = D − s`, `s = δ₀ + εm`, the
/// split reduces to `−κ₀|β|² s / (D* D′*)` while the eigenvalue is
/// `κ₀|β|² s / (D D′)`.
pub fn effective_hamiltonian_decomposition(p: &CavityParams, m: f64) -> C64 {
    let a2 = steady_alpha(p).n_bar;
    let ap2 = dressed_alpha(p, m).norm_sqr();
    C64::new(ap2 * (p.delta0 + p.epsilon * m), 0.0) - C64::new(p.delta, 0.5 * p.kappa) * (ap2 - a2)
}

/// Second-order truncation `|α|²εm + χm² − (i/2)(χκ/δ′)m²`.
pub fn effective_hamiltonian_quadratic(p: &CavityParams, m: f64) -> C64 {
    let lin = steady_alpha(p).n_bar * p.epsilon * m;
    C64::new(lin + chi(p) * m * m, -0.5 * lindblad_rate(p) * m * m)
}

/// Closed form of the power series whose first two terms are
/// [`effective_hamiltonian_quadratic`]:
/// `|α|²·D·Σ_{k≥1}(εm/D)^k = |α|² εm D / (D − εm)`, `D = δ′ + iκ/2`.
///
/// It differs from [`effective_hamiltonian_exact`] by `D ↔ D*` in the
/// prefactor (`κ₀|β|²/D = |α|² D*`), which is immaterial only for `κ → 0`.
pub fn effective_hamiltonian_series(p: &CavityParams, m: f64) -> C64 {
    let d = C64::new(p.delta_prime(), 0.5 * p.kappa);
    let x = C64::new(p.epsilon * m, 0.0);
    d * x / (d - x) * steady_alpha(p).n_bar
}

/// Linear, quadratic and cubic Maclaurin coefficients in `m` from
/// symmetric 3-point differences with step `dm`.
pub fn maclaurin_coefficients<F: Fn(f64) -> C64>(f: F, dm: f64) -> (C64, C64) {
    let (fp, f0, fm) = (f(dm), f(0.0), f(-dm));
    ((fp - fm) / (2.0 * dm), (fp - f0 * 2.0 + fm) / (2.0 * dm * dm))
}

/// `χ_eff − i·Γ/2` read off a complex energy function by finite differences:
/// returns `(χ_eff, Γ)`.
pub fn extract_chi_and_rate<F: Fn(f64) -> C64>(f: F, dm: f64) -> (f64, f64) {
    let (_, q) = maclaurin_coefficients(f, dm);
    (q.re, -2.0 * q.im)
}

/// `|f(m) − quadratic(m)|` for `ε` and `ε/2`, and their ratio; the ratio
/// is ≈ 8 when `f` agrees with the quadratic through second order.
pub fn truncation_error_scaling<F: Fn(&CavityParams, f64) -> C64>(p: &CavityParams, m: f64, f: F) -> (f64, f64, f64) {
    let half = CavityParams { epsilon: 0.5 * p.epsilon, ..*p };
    let g1 = (f(p, m) - effective_hamiltonian_quadratic(p, m)).norm();
    let g2 = (f(&half, m) - effective_hamiltonian_quadratic(&half, m)).norm();
    (g1, g2, g1 / g2)
}

/// `D(γ)ψ = exp(γa† − γ*a)ψ` on the truncated space, by integrating the
/// (anti-Hermitian) generator. Weight pushed past the top level is lost, so
/// size the space for the displaced state.
pub fn displace(psi: &[C64], gamma: C64) -> Result<Vec<C64>> {
    let n = psi.len();
    let mut y = psi.to_vec();
    if gamma == C64::new(0.0, 0.0) {
        return Ok(y);
    }
    let tol = Tolerances { rtol: 1e-12, atol: 1e-15, ..Tolerances::default() };
    Dopri5::new(n, tol).integrate(
        |_, v, dv| {
            for i in 0..n {
                let mut z = C64::new(0.0, 0.0);
                if i > 0 {
                    z += gamma * v[i - 1] * (i as f64).sqrt();
                }
                if i + 1 < n {
                    z -= gamma.conj() * v[i + 1] * ((i + 1) as f64).sqrt();
                }
                dv[i] = z;
            }
        },
        0.0,
        1.0,
        &mut y,
    )?;
    Ok(y)
}

/// State in a frame displaced by `γ`: lab state `D(γ)φ`.
#[derive(Debug, Clone, PartialEq)]
pub struct FramedState {
    pub gamma: C64,
    pub phi: Vec<C64>,
    pub t: f64,
}

/// Non-Hermitian no-jump evolution `ψ' = −iHψ`, renormalized after every
/// accepted step.
///
/// States are carried in a frame displaced by the classical amplitude
/// `γ(t) = α + (γ₀ − α)e^{i(δ + iκ/2)t}`. There the generator has no raising
/// part, `φ' = i(δ + iκ/2) b†b φ − κγ* b φ`, so a coherent input stays at
/// the frame vacuum and a Fock input stays in a finite subspace.
/// Integrating the lab-frame tridiagonal `H` directly is numerically
/// unusable beyond a few photons: it is far from normal and amplifies
/// round-off by many orders of magnitude.
pub struct CavityEvolution {
    params: CavityParams,
    n_max: usize,
    alpha: C64,
    /// `i(δ + iκ/2)`
    rate: C64,
    ode: Dopri5,
    pub warning: Option<String>,
}

impl CavityEvolution {
    pub fn new(p: &CavityParams, n_max: usize) -> Result<Self> {
        if n_max < 2 {
            return Err(domain("need at least two Fock levels"));
        }
        let tol = Tolerances { rtol: 1e-11, atol: 1e-14, ..Tolerances::default() };
        Ok(Self {
            params: *p,
            n_max,
            alpha: steady_alpha(p).alpha,
            rate: C64::new(-0.5 * p.kappa, p.delta),
            ode: Dopri5::new(n_max, tol),
            warning: truncation_warning(p, n_max),
        })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    fn check_len(&self, v: &[C64]) -> Result<()> {
        if v.len() != self.n_max {
            return Err(domain(format!("state has {} levels, expected {}", v.len(), self.n_max)));
        }
        Ok(())
    }

    /// Frames a lab-frame state around its own `⟨a⟩`.
    pub fn frame(&self, psi: &[C64], t: f64) -> Result<FramedState> {
        self.check_len(psi)?;
        let gamma = mean_lowering(psi);
        Ok(FramedState { gamma, phi: displace(psi, -gamma)?, t })
    }

    /// The ladder state `|α,n′⟩` in the steady frame (`γ = α`):
    /// `(b† + α* − α̃*)^{n′}|0⟩`, normalized.
    pub fn ladder_state(&self, n_prime: usize, t: f64) -> FramedState {
        let s = self.alpha.conj() - steady_alpha(&self.params).alpha_tilde.conj();
        let mut v = vec![C64::new(0.0, 0.0); self.n_max];
        v[0] = C64::new(1.0, 0.0);
        for _ in 0..n_prime {
            let mut w = vec![C64::new(0.0, 0.0); self.n_max];
            for i in 0..self.n_max {
                w[i] = s * v[i] + if i > 0 { v[i - 1] * (i as f64).sqrt() } else { C64::new(0.0, 0.0) };
            }
            v = w;
        }
        normalize(&mut v);
        FramedState { gamma: self.alpha, phi: v, t }
    }

    pub fn to_lab(&self, s: &FramedState) -> Result<Vec<C64>> {
        self.check_len(&s.phi)?;
        displace(&s.phi, s.gamma)
    }

    /// Classical amplitude after `dt`, `α + (γ − α)e^{i(δ + iκ/2)dt}`.
    pub fn classical(&self, gamma: C64, dt: f64) -> C64 {
        self.alpha + (gamma - self.alpha) * (self.rate * dt).exp()
    }

    /// Advances the state to `t1`, renormalizing.
    pub fn propagate(&mut self, s: &mut FramedState, t1: f64) -> Result<()> {
        self.check_len(&s.phi)?;
        let (alpha, rate, kappa, t0, g0) = (self.alpha, self.rate, self.params.kappa, s.t, s.gamma);
        normalize(&mut s.phi);
        self.ode.integrate_with(
            |t, y, dy| {
                let c = -kappa * (alpha + (g0 - alpha) * (rate * (t - t0)).exp()).conj();
                let n = y.len();
                for i in 0..n {
                    let mut z = rate * y[i] * i as f64;
                    if i + 1 < n {
                        z += c * y[i + 1] * ((i + 1) as f64).sqrt();
                    }
                    dy[i] = z;
                }
            },
            t0,
            t1,
            &mut s.phi,
            |_, y| {
                normalize(y);
                true
            },
        )?;
        s.gamma = self.classical(g0, t1 - t0);
        s.t = t1;
        Ok(())
    }

    /// Lab-frame `⟨a⟩ = γ + ⟨b⟩`.
    pub fn mean_amplitude(&self, s: &FramedState) -> C64 {
        s.gamma + mean_lowering(&s.phi)
    }

    /// `|⟨α|ψ⟩|²`: overlap of `φ` with the coherent state `α − γ`.
    pub fn steady_fidelity(&self, s: &FramedState) -> f64 {
        let c = coherent_state(self.alpha - s.gamma, self.n_max);
        let norm: f64 = s.phi.iter().map(|z| z.norm_sqr()).sum();
        c.iter().zip(&s.phi).map(|(a, b)| a.conj() * b).sum::<C64>().norm_sqr() / (norm * compensated_norm_sqr(&c))
    }

    /// `d⟨a⟩/dt` from the lab Hamiltonian and the current state,
    /// `i⟨H†a − aH⟩ − i⟨a⟩⟨H† − H⟩`, evaluated in the frame where
    /// `H → −(δ + iκ/2)(b†b + γb† + γ*b) + i√κ₀(βb† − β*b)` up to a constant.
    pub fn mean_field_derivative(&self, s: &FramedState) -> C64 {
        let phi = &s.phi;
        let n = phi.len();
        let d = C64::new(self.params.delta, 0.5 * self.params.kappa);
        let k = self.params.drive();
        let up = -d * s.gamma + I * k;
        let down = -d * s.gamma.conj() - I * k.conj();
        let hphi: Vec<C64> = (0..n)
            .map(|i| {
                let mut z = -d * phi[i] * i as f64;
                if i > 0 {
                    z += up * phi[i - 1] * (i as f64).sqrt();
                }
                if i + 1 < n {
                    z += down * phi[i + 1] * ((i + 1) as f64).sqrt();
                }
                z
            })
            .collect();
        let bphi = lower(phi);
        let bhphi = lower(&hphi);
        let norm: f64 = phi.iter().map(|z| z.norm_sqr()).sum();
        let dot = |x: &[C64], y: &[C64]| x.iter().zip(y).map(|(a, b)| a.conj() * b).sum::<C64>();
        let h_mean = dot(phi, &hphi) / norm;
        let b_mean = dot(phi, &bphi) / norm;
        let term = (dot(&hphi, &bphi) - dot(phi, &bhphi)) / norm;
        I * term - I * b_mean * (h_mean.conj() - h_mean)
    }

    /// `iδ⟨a⟩ − (κ/2)⟨a⟩ + √κ₀β`, the damped driven oscillator.
    pub fn heisenberg_rhs(&self, a_mean: C64) -> C64 {
        a_mean * self.rate + self.params.drive()
    }

    /// Least-squares coordinates on the first `k` ladder states; `s` must
    /// be in the steady frame.
    pub fn ladder_components(&self, s: &FramedState, k: usize) -> Result<Vec<C64>> {
        if (s.gamma - self.alpha).norm() > 1e-12 * (1.0 + self.alpha.norm()) {
            return Err(domain("ladder components need the steady frame"));
        }
        let basis: Vec<_> = (0..k).map(|j| self.ladder_state(j, s.t).phi).collect();
        let b = DMatrix::from_fn(self.n_max, k, |i, j| basis[j][i]);
        let gram = b.adjoint() * &b;
        let rhs = b.adjoint() * DVector::from_column_slice(&s.phi);
        let sol = gram
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Insufficient("ladder states are linearly dependent".into()))?;
        Ok(sol.iter().copied().collect())
    }
}

fn lower(v: &[C64]) -> Vec<C64> {
    let n = v.len();
    (0..n).map(|i| if i + 1 < n { v[i + 1] * ((i + 1) as f64).sqrt() } else { C64::new(0.0, 0.0) }).collect()
}

fn mean_lowering(v: &[C64]) -> C64 {
    let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    lower(v).iter().zip(v).map(|(a, b)| b.conj() * a).sum::<C64>() / norm
}

fn normalize(v: &mut [C64]) {
    let n: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        for z in v.iter_mut() {
            *z /= n;
        }
    }
}

/// `⟨a⟩` of a lab-frame state.
pub fn mean_amplitude(psi: &[C64]) -> C64 {
    mean_lowering(psi)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Relaxation {
    pub fidelity: f64,
    pub warning: Option<String>,
}

/// Evolves `initial` (lab-frame Fock amplitudes; their length sets the
/// truncation) for `t_final` and returns the fidelity with `|α⟩`.
pub fn relax_to_steady(p: &CavityParams, initial: &[C64], t_final: f64) -> Result<Relaxation> {
    if !(t_final >= 0.0) {
        return Err(domain("t_final must be >= 0"));
    }
    if initial.iter().all(|z| z.norm_sqr() == 0.0) {
        return Err(domain("initial state is zero"));
    }
    let mut evo = CavityEvolution::new(p, initial.len())?;
    let mut s = evo.frame(initial, 0.0)?;
    evo.propagate(&mut s, t_final)?;
    Ok(Relaxation { fidelity: evo.steady_fidelity(&s), warning: evo.warning.take() })
}

/// Decay rate of the `n′ = 1` ladder weight relative to `n′ = 0`, fitted
/// over `[0, t_final]` from an equal superposition of the two. Expected: `κ`.
pub fn fit_ladder_decay(p: &CavityParams, n_max: usize, t_final: f64, samples: usize) -> Result<f64> {
    if samples < 2 {
        return Err(domain("need at least two samples"));
    }
    let mut evo = CavityEvolution::new(p, n_max)?;
    let (v0, v1) = (evo.ladder_state(0, 0.0), evo.ladder_state(1, 0.0));
    let mut st = FramedState { phi: v0.phi.iter().zip(&v1.phi).map(|(a, b)| a + b).collect(), ..v0 };
    let mut ts = Vec::with_capacity(samples + 1);
    let mut ys = Vec::with_capacity(samples + 1);
    for i in 0..=samples {
        evo.propagate(&mut st, t_final * i as f64 / samples as f64)?;
        let c = evo.ladder_components(&st, 2)?;
        ts.push(st.t);
        ys.push((c[1].norm_sqr() / c[0].norm_sqr()).ln());
    }
    let nf = ts.len() as f64;
    let (mt, my) = (ts.iter().sum::<f64>() / nf, ys.iter().sum::<f64>() / nf);
    let sxy: f64 = ts.iter().zip(&ys).map(|(t, y)| (t - mt) * (y - my)).sum();
    let sxx: f64 = ts.iter().map(|t| (t - mt).powi(2)).sum();
    Ok(-sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> CavityParams {
        CavityParams::new(3.0, 2.0, 1.0, C64::new(10.0, 0.0), 0.01, 0.0).unwrap()
    }

    #[test]
    fn worked_example() {
        let p = params();
        assert!((steady_alpha(&p).n_bar - 10.0).abs() < 1e-12);
        assert!((chi(&p) - 3e-4).abs() < 1e-15);
    }

    #[test]
    fn validation() {
        assert!(CavityParams::new(0.0, 1.0, 2.0, C64::new(1.0, 0.0), 0.0, 0.0).is_err());
        assert!(CavityParams::new(0.0, 1.0, 0.0, C64::new(1.0, 0.0), 0.0, 0.0).is_err());
    }

    #[test]
    fn framed_ladder_state_matches_lab() {
        let p = CavityParams::new(0.7, 1.3, 0.9, C64::new(1.5, -0.4), 0.02, 0.1).unwrap();
        let n = 60;
        let evo = CavityEvolution::new(&p, n).unwrap();
        for k in 0..3 {
            let lab = evo.to_lab(&evo.ladder_state(k, 0.0)).unwrap();
            let direct = eigenladder_state(&p, n, k).unwrap();
            let ov: C64 = direct.iter().zip(&lab).map(|(a, b)| a.conj() * b).sum();
            assert!((ov.norm() - 1.0).abs() < 1e-10, "{k}: {ov}");
        }
    }

    #[test]
    fn ladder_relations() {
        let a = FockOperator::annihilation(6);
        let ad = FockOperator::creation(6);
        let comm = &a.matrix * &ad.matrix - &ad.matrix * &a.matrix;
        for n in 0..5 {
            assert!((comm[(n, n)] - C64::new(1.0, 0.0)).norm() < 1e-12);
        }
        assert_eq!(a.matrix[(2, 3)], C64::new(3f64.sqrt(), 0.0));
    }
}
