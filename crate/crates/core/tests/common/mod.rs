//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64 as C64;
use vecmag::squeeze::ProtocolStep;
use vecmag::squeeze::Axis;

/// N distinguishable spin-1/2 atoms, bit i set = atom i up.
pub struct ProductState {
    pub n: usize,
    pub amps: Vec<C64>,
}

impl ProductState {
    pub fn all_down(n: usize) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
        amps[0] = C64::new(1.0, 0.0);
        Self { n, amps }
    }

    /// `exp(−i angle σ_axis / 2)` on every atom.
    pub fn rotate(&mut self, axis: Axis, angle: f64) {
        let (c, s) = ((0.5 * angle).cos(), (0.5 * angle).sin());
        let ms = C64::new(0.0, -s);
        // 2x2 matrix in (down, up) order
        let u: [[C64; 2]; 2] = match axis {
            Axis::X => [[C64::new(c, 0.0), ms], [ms, C64::new(c, 0.0)]],
            // σ_y in (down, up) is [[0, i], [−i, 0]]
            Axis::Y => [[C64::new(c, 0.0), C64::new(s, 0.0)], [C64::new(-s, 0.0), C64::new(c, 0.0)]],
            Axis::Z => [[C64::from_polar(1.0, 0.5 * angle), C64::new(0.0, 0.0)], [C64::new(0.0, 0.0), C64::from_polar(1.0, -0.5 * angle)]],
        };
        for q in 0..self.n {
            let bit = 1usize << q;
            for i in 0..self.amps.len() {
                if i & bit == 0 {
                    let (d, up) = (self.amps[i], self.amps[i | bit]);
                    self.amps[i] = u[0][0] * d + u[0][1] * up;
                    self.amps[i | bit] = u[1][0] * d + u[1][1] * up;
                }
            }
        }
    }

    pub fn twist(&mut self, mu: f64) {
        let half = 0.5 * self.n as f64;
        for (i, a) in self.amps.iter_mut().enumerate() {
            let m = i.count_ones() as f64 - half;
            *a *= C64::from_polar(1.0, -mu * m * m);
        }
    }

    pub fn apply(&mut self, step: &ProtocolStep) {
        match *step {
            ProtocolStep::Rotate { axis, angle } => self.rotate(axis, angle),
            ProtocolStep::Squeeze { mu } => self.twist(mu),
            ProtocolStep::PhaseAccumulate { phi } => self.rotate(Axis::Z, phi),
            ProtocolStep::MeasureUpperPopulation => {}
        }
    }

    /// Amplitudes on the symmetric Dicke states, indexed by the up count.
    pub fn symmetrized(&self) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.n + 1];
        for (i, a) in self.amps.iter().enumerate() {
            out[i.count_ones() as usize] += *a;
        }
        for (k, v) in out.iter_mut().enumerate() {
            *v /= binom(self.n, k).sqrt();
        }
        out
    }

    /// Mean and variance of the up count.
    pub fn upper_population(&self) -> (f64, f64) {
        let (mut m1, mut m2) = (0.0, 0.0);
        for (i, a) in self.amps.iter().enumerate() {
            let k = i.count_ones() as f64;
            m1 += k * a.norm_sqr();
            m2 += k * k * a.norm_sqr();
        }
        (m1, m2 - m1 * m1)
    }

    /// `⟨S_x⟩, ⟨S_y⟩, ⟨S_z⟩` from single-atom expectation values.
    pub fn mean_spin(&self) -> [f64; 3] {
        let (mut sx, mut sy, mut sz) = (0.0, 0.0, 0.0);
        for q in 0..self.n {
            let bit = 1usize << q;
            for i in 0..self.amps.len() {
                let a = self.amps[i];
                sz += if i & bit != 0 { 0.5 } else { -0.5 } * a.norm_sqr();
                if i & bit == 0 {
                    // ⟨σ_+⟩ = ⟨up|·|down⟩ coherence
                    let c = self.amps[i | bit].conj() * a;
                    sx += c.re;
                    sy += c.im;
                }
            }
        }
        [sx, sy, sz]
    }
}

pub fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
