//! One-dimensional minimization helpers.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for a minimum of a unimodal `f` on `[a, b]`.
/// Returns `(x_min, f(x_min))`.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, xtol: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > xtol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    [(c, fc), (d, fd), (x, fx)]
        .into_iter()
        .fold((x, fx), |best, cur| if cur.1 < best.1 { cur } else { best })
}

/// Scans `n` evenly spaced points on `[a, b]`, then refines around the best
/// one with golden-section search. Robust against mild multimodality.
pub fn grid_then_golden<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, n: usize, xtol: f64) -> (f64, f64) {
    assert!(n >= 3 && b > a);
    let step = (b - a) / (n - 1) as f64;
    let (mut best_i, mut best_f) = (0, f64::INFINITY);
    for i in 0..n {
        let v = f(a + step * i as f64);
        if v < best_f {
            best_f = v;
            best_i = i;
        }
    }
    let lo = a + step * best_i.saturating_sub(1) as f64;
    let hi = (a + step * (best_i + 1) as f64).min(b);
    let (x, fx) = golden_section(&mut f, lo, hi, xtol);
    if fx <= best_f {
        (x, fx)
    } else {
        (a + step * best_i as f64, best_f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn parabola() {
        let (x, fx) = golden_section(|x| (x - 0.3).powi(2), -2.0, 5.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-9);
        assert!(fx < 1e-18);
    }

    #[test]
    fn picks_global_basin() {
        let f = |x: f64| (3.0 * x).cos() + 0.1 * x;
        let (x, _) = grid_then_golden(f, 0.0, 6.0, 61, 1e-10);
        // Stationary where sin(3x) = 1/30; the linear tilt favours the first basin.
        let expect = (PI - (1.0f64 / 30.0).asin()) / 3.0;
        assert!((x - expect).abs() < 1e-8, "{x}");
    }
}
