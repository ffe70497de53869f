//! Adaptive Dormand–Prince 5(4) integrator for complex state vectors.
//!
//! Small and dependency-free; the systems here are at most a few hundred
//! components, so allocation per step is avoided by keeping stage buffers
//! in the integrator.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    /// Smallest step before giving up, relative to the span.
    pub min_step_frac: f64,
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12, min_step_frac: 1e-14, max_steps: 5_000_000 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// 5th-order weights minus embedded 4th-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

pub struct Dopri5 {
    tol: Tolerances,
    k: [Vec<C64>; 7],
    tmp: Vec<C64>,
    y_new: Vec<C64>,
    /// Last accepted step, reused as the first guess for the next call.
    h_last: Option<f64>,
}

impl Dopri5 {
    pub fn new(dim: usize, tol: Tolerances) -> Self {
        let z = || vec![C64::new(0.0, 0.0); dim];
        Self {
            tol,
            k: [z(), z(), z(), z(), z(), z(), z()],
            tmp: z(),
            y_new: z(),
            h_last: None,
        }
    }

    /// Integrates `y' = f(t, y)` from `t0` to `t1` in place.
    pub fn integrate<F>(&mut self, f: F, t0: f64, t1: f64, y: &mut [C64]) -> Result<Stats>
    where
        F: FnMut(f64, &[C64], &mut [C64]),
    {
        self.integrate_with(f, t0, t1, y, |_, _| false)
    }

    /// As [`integrate`](Self::integrate), calling `after_step(t, y)` after
    /// every accepted step. The hook may modify `y`, and must return `true`
    /// when it does.
    pub fn integrate_with<F, G>(
        &mut self,
        mut f: F,
        t0: f64,
        t1: f64,
        y: &mut [C64],
        mut after_step: G,
    ) -> Result<Stats>
    where
        F: FnMut(f64, &[C64], &mut [C64]),
        G: FnMut(f64, &mut [C64]) -> bool,
    {
        let n = y.len();
        assert_eq!(n, self.tmp.len(), "state dimension mismatch");
        let mut stats = Stats::default();
        let span = t1 - t0;
        if span == 0.0 {
            return Ok(stats);
        }
        let dir = span.signum();
        let h_min = span.abs() * self.tol.min_step_frac;

        f(t0, y, &mut self.k[0]);
        stats.evaluations += 1;
        let mut h = match self.h_last {
            Some(h) => h.min(span.abs()),
            None => self.initial_step(&mut f, t0, y, span.abs(), &mut stats),
        };
        let mut t = t0;

        loop {
            let remaining = (t1 - t) * dir;
            if remaining <= span.abs() * 1e-15 {
                break;
            }
            let last = h >= remaining;
            if last {
                h = remaining;
            }
            let hs = h * dir;

            for s in 1..7 {
                for i in 0..n {
                    let mut acc = y[i];
                    for (j, a) in A[s][..s].iter().enumerate() {
                        if *a != 0.0 {
                            acc += self.k[j][i] * (hs * a);
                        }
                    }
                    self.tmp[i] = acc;
                }
                if s == 6 {
                    self.y_new.copy_from_slice(&self.tmp);
                }
                f(t + C[s] * hs, &self.tmp, &mut self.k[s]);
                stats.evaluations += 1;
            }

            let mut err_sq = 0.0;
            for i in 0..n {
                let mut e = C64::new(0.0, 0.0);
                for (s, es) in E.iter().enumerate() {
                    if *es != 0.0 {
                        e += self.k[s][i] * es;
                    }
                }
                let scale = self.tol.atol + self.tol.rtol * y[i].norm().max(self.y_new[i].norm());
                let r = (e * hs).norm() / scale;
                err_sq += r * r;
            }
            let err = (err_sq / n as f64).sqrt();

            if err <= 1.0 {
                t = if last { t1 } else { t + hs };
                y.copy_from_slice(&self.y_new);
                stats.accepted += 1;
                if after_step(t, y) {
                    f(t, y, &mut self.k[0]);
                    stats.evaluations += 1;
                } else {
                    let (first, rest) = self.k.split_at_mut(1);
                    first[0].copy_from_slice(&rest[5]);
                }
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                if !last {
                    self.h_last = Some(h);
                }
                h *= fac;
                if last {
                    break;
                }
            } else {
                stats.rejected += 1;
                h *= (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
            }

            if h < h_min || stats.accepted + stats.rejected > self.tol.max_steps {
                return Err(Error::Integration { t, h, steps: stats.accepted });
            }
        }
        Ok(stats)
    }

    /// Hairer's starting-step heuristic.
    fn initial_step<F>(&mut self, f: &mut F, t0: f64, y: &[C64], span: f64, stats: &mut Stats) -> f64
    where
        F: FnMut(f64, &[C64], &mut [C64]),
    {
        let n = y.len() as f64;
        let sc = |v: C64| self.tol.atol + self.tol.rtol * v.norm();
        let d0 = (y.iter().map(|v| (v.norm() / sc(*v)).powi(2)).sum::<f64>() / n).sqrt();
        let d1 = (y
            .iter()
            .zip(&self.k[0])
            .map(|(v, k)| (k.norm() / sc(*v)).powi(2))
            .sum::<f64>()
            / n)
            .sqrt();
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 * span } else { 0.01 * d0 / d1 };
        let h0 = h0.min(span);
        for i in 0..y.len() {
            self.tmp[i] = y[i] + self.k[0][i] * h0;
        }
        f(t0 + h0, &self.tmp, &mut self.k[1]);
        stats.evaluations += 1;
        let d2 = (y
            .iter()
            .enumerate()
            .map(|(i, v)| ((self.k[1][i] - self.k[0][i]).norm() / sc(*v)).powi(2))
            .sum::<f64>()
            / n)
            .sqrt()
            / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6 * span)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(span)
    }
}
