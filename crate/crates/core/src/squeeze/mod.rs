//! Collective spin of N two-level atoms restricted to the symmetric
//! (Dicke) manifold `J = N/2`, with one-axis twisting and echo protocols.
//!
//! Amplitude index `k = 0..=N` counts atoms in the upper state, so
//! `m = k − N/2` and `N_up = k`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

mod protocol;

pub use protocol::*;

/// Largest atom number simulated on the state vector.
pub const MAX_ATOMS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Per-N data reused by every rotation: the eigendecomposition of `J_x`.
#[derive(Debug)]
pub struct SpinSpace {
    n: usize,
    /// Columns are eigenvectors of `J_x`.
    vecs: DMatrix<f64>,
    vals: Vec<f64>,
}

impl SpinSpace {
    fn build(n: usize) -> Self {
        let dim = n + 1;
        let j = n as f64 / 2.0;
        let mut jx = DMatrix::<f64>::zeros(dim, dim);
        for k in 0..n {
            let m = k as f64 - j;
            let c = 0.5 * (j * (j + 1.0) - m * (m + 1.0)).sqrt();
            jx[(k + 1, k)] = c;
            jx[(k, k + 1)] = c;
        }
        let eig = SymmetricEigen::new(jx);
        // The spectrum is exactly {-j, ..., j}; snap away the rounding.
        let vals = eig.eigenvalues.iter().map(|&v| (v + j).round() - j).collect();
        Self { n, vecs: eig.eigenvectors, vals }
    }

    /// Shared, lazily built instance for `n` atoms.
    pub fn shared(n: usize) -> Result<Arc<Self>> {
        check_atoms(n)?;
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<SpinSpace>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(s) = cache.lock().expect("spin cache poisoned").get(&n) {
            return Ok(s.clone());
        }
        // Built outside the lock; a racing duplicate build is harmless.
        let built = Arc::new(Self::build(n));
        let mut guard = cache.lock().expect("spin cache poisoned");
        Ok(guard.entry(n).or_insert(built).clone())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `exp(−i·angle·J_x) ψ` in place.
    fn apply_x(&self, amps: &mut [C64], angle: f64) {
        let re = DVector::from_iterator(amps.len(), amps.iter().map(|a| a.re));
        let im = DVector::from_iterator(amps.len(), amps.iter().map(|a| a.im));
        let ur = self.vecs.tr_mul(&re);
        let ui = self.vecs.tr_mul(&im);
        let mut pr = DVector::zeros(amps.len());
        let mut pi = DVector::zeros(amps.len());
        for (i, &l) in self.vals.iter().enumerate() {
            let z = C64::new(ur[i], ui[i]) * C64::from_polar(1.0, -angle * l);
            pr[i] = z.re;
            pi[i] = z.im;
        }
        let vr = &self.vecs * pr;
        let vi = &self.vecs * pi;
        for (i, a) in amps.iter_mut().enumerate() {
            *a = C64::new(vr[i], vi[i]);
        }
    }
}

pub(crate) fn check_atoms(n: usize) -> Result<()> {
    if n == 0 {
        return Err(domain("atom number must be >= 1"));
    }
    if n > MAX_ATOMS {
        return Err(domain(format!(
            "N = {n} exceeds the state-vector cap of {MAX_ATOMS}; use the analytic sensitivity formulas instead"
        )));
    }
    Ok(())
}

/// A state of the symmetric manifold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DickeState {
    n: usize,
    amps: Vec<C64>,
}

/// First and second moments of the collective spin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moments {
    pub sx: f64,
    pub sy: f64,
    pub sz: f64,
    pub var_x: f64,
    pub var_y: f64,
    pub var_z: f64,
}

impl DickeState {
    pub fn from_amplitudes(n: usize, amps: Vec<C64>) -> Result<Self> {
        check_atoms(n)?;
        if amps.len() != n + 1 {
            return Err(domain(format!("expected {} amplitudes, got {}", n + 1, amps.len())));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if !(norm.is_finite() && (norm - 1.0).abs() < 1e-9) {
            return Err(domain(format!("amplitudes are not normalized (norm² = {norm})")));
        }
        Ok(Self { n, amps })
    }

    /// `|J, m⟩` with `m = k − N/2`.
    pub fn basis(n: usize, k: usize) -> Result<Self> {
        check_atoms(n)?;
        if k > n {
            return Err(domain(format!("index {k} out of range for N = {n}")));
        }
        let mut amps = vec![C64::new(0.0, 0.0); n + 1];
        amps[k] = C64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    /// Coherent spin state pointing along `direction` (normalized here).
    pub fn css(n: usize, direction: [f64; 3]) -> Result<Self> {
        check_atoms(n)?;
        let r = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(r.is_finite() && r > 0.0) {
            return Err(domain("coherent state direction must be a nonzero finite vector"));
        }
        let [x, y, z] = direction.map(|v| v / r);
        let polar = z.clamp(-1.0, 1.0).acos();
        let azimuth = y.atan2(x);
        let (cu, sd) = ((0.5 * polar).cos(), (0.5 * polar).sin());
        // Product of cos(θ/2)|↑⟩ + e^{iφ} sin(θ/2)|↓⟩; k atoms up.
        let ln_fact = ln_factorials(n);
        let mut amps = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let down = n - k;
            let mag = if (k > 0 && cu == 0.0) || (down > 0 && sd == 0.0) {
                0.0
            } else {
                let ln_binom = ln_fact[n] - ln_fact[k] - ln_fact[down];
                let lc = if k > 0 { k as f64 * cu.ln() } else { 0.0 };
                let ls = if down > 0 { down as f64 * sd.ln() } else { 0.0 };
                (0.5 * ln_binom + lc + ls).exp()
            };
            amps.push(C64::from_polar(mag, azimuth * down as f64));
        }
        Ok(Self { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    /// `m` for amplitude index `k`.
    pub fn m(&self, k: usize) -> f64 {
        k as f64 - 0.5 * self.n as f64
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n);
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum::<C64>().norm_sqr()
    }

    /// `exp(−i·angle·S_axis)`.
    pub fn rotate(&self, axis: Axis, angle: f64) -> Self {
        let mut out = self.clone();
        out.rotate_in_place(axis, angle);
        out
    }

    pub fn rotate_in_place(&mut self, axis: Axis, angle: f64) {
        match axis {
            Axis::Z => self.phase_z(angle),
            Axis::X => self.space().apply_x(&mut self.amps, angle),
            Axis::Y => {
                // exp(−i a J_y) = R_z(π/2) exp(−i a J_x) R_z(−π/2)
                self.phase_z(-std::f64::consts::FRAC_PI_2);
                self.space().apply_x(&mut self.amps, angle);
                self.phase_z(std::f64::consts::FRAC_PI_2);
            }
        }
    }

    /// One-axis twist `exp(−i μ S_z²)`.
    pub fn squeeze(&self, mu: f64) -> Self {
        let mut out = self.clone();
        out.squeeze_in_place(mu);
        out
    }

    pub fn squeeze_in_place(&mut self, mu: f64) {
        let half = 0.5 * self.n as f64;
        for (k, a) in self.amps.iter_mut().enumerate() {
            let m = k as f64 - half;
            *a *= C64::from_polar(1.0, -mu * m * m);
        }
    }

    fn phase_z(&mut self, angle: f64) {
        let half = 0.5 * self.n as f64;
        for (k, a) in self.amps.iter_mut().enumerate() {
            *a *= C64::from_polar(1.0, -angle * (k as f64 - half));
        }
    }

    fn space(&self) -> Arc<SpinSpace> {
        SpinSpace::shared(self.n).expect("atom number validated at construction")
    }

    /// `⟨S_+⟩` and `⟨S_+²⟩`.
    fn raising(&self) -> (C64, C64) {
        let j = 0.5 * self.n as f64;
        let lad = |k: usize| {
            let m = k as f64 - j;
            (j * (j + 1.0) - m * (m + 1.0)).max(0.0).sqrt()
        };
        let mut s1 = C64::new(0.0, 0.0);
        let mut s2 = C64::new(0.0, 0.0);
        for k in 0..self.n {
            s1 += self.amps[k + 1].conj() * self.amps[k] * lad(k);
            if k + 2 <= self.n {
                s2 += self.amps[k + 2].conj() * self.amps[k] * (lad(k) * lad(k + 1));
            }
        }
        (s1, s2)
    }

    pub fn moments(&self) -> Moments {
        let j = 0.5 * self.n as f64;
        let (mut sz, mut sz2) = (0.0, 0.0);
        for (k, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            let m = k as f64 - j;
            sz += p * m;
            sz2 += p * m * m;
        }
        let (sp, sp2) = self.raising();
        // S_x² + S_y² = J(J+1) − S_z²;  S_x² − S_y² = (S_+² + S_−²)/2.
        let perp = j * (j + 1.0) - sz2;
        let sx2 = 0.5 * (perp + sp2.re);
        let sy2 = 0.5 * (perp - sp2.re);
        let (sx, sy) = (sp.re, sp.im);
        let var_z = centered_variance(self, sz);
        Moments {
            sx,
            sy,
            sz,
            var_x: (sx2 - sx * sx).max(0.0),
            var_y: (sy2 - sy * sy).max(0.0),
            var_z,
        }
    }

    /// Mean and variance of the upper-state count `N_up = S_z + N/2`.
    pub fn upper_population(&self) -> (f64, f64) {
        let mean: f64 = self.amps.iter().enumerate().map(|(k, a)| k as f64 * a.norm_sqr()).sum();
        let var = self
            .amps
            .iter()
            .enumerate()
            .map(|(k, a)| (k as f64 - mean).powi(2) * a.norm_sqr())
            .sum();
        (mean, var)
    }

    /// `⟨(−1)^{N_up}⟩`.
    pub fn parity(&self) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(k, a)| if k % 2 == 0 { a.norm_sqr() } else { -a.norm_sqr() })
            .sum()
    }
}

fn centered_variance(s: &DickeState, mean: f64) -> f64 {
    let j = 0.5 * s.n as f64;
    s.amps.iter().enumerate().map(|(k, a)| (k as f64 - j - mean).powi(2) * a.norm_sqr()).sum()
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}
