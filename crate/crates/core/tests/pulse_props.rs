use std::f64::consts::{FRAC_PI_2, PI};

use proptest::prelude::*;
use vecmag::pulse::*;
use vecmag::ramsey::{central_peak_height, side_peak_height};
use vecmag::trace::linspace;

const TP: f64 = 1.0;

fn wz(sep: f64) -> f64 {
    sep / TP
}

#[test]
fn area_quadrature() {
    for &area in &[0.1, FRAC_PI_2, PI, 7.0] {
        for shape in [Shape::Blackman, Shape::Square] {
            let p = Pulse::new(shape, area, 2.3).unwrap();
            assert!((p.integrated_area(20_000) - area).abs() < 1e-9 * area, "{shape:?} {area}");
        }
    }
}

#[test]
fn resonant_two_level_limit() {
    // θ = 0 couples only the π leg: P = sin²(A/2) with A the integrated area.
    for &area in &[0.3, FRAC_PI_2, PI, 2.5, 2.0 * PI - 0.1] {
        let p = Pulse::blackman(area, TP).unwrap();
        let s = evolve_pulse(&FourLevelState::ground(), &p, 0.0, 0.0, wz(DEFAULT_SEPARATION)).unwrap();
        let expect = (0.5 * p.integrated_area(20_000)).sin().powi(2);
        assert!((s.population(FourLevelState::ZERO) - expect).abs() < 1e-4);
    }
}

fn leak(shape: Shape, sep: f64) -> f64 {
    let p = Pulse::new(shape, PI, TP).unwrap();
    let w = wz(sep);
    let mut worst = 0.0f64;
    // each single-peak resonance; the other two excited levels are the leak
    for (delta, theta, target) in [(0.0, 0.0, FourLevelState::ZERO), (w, FRAC_PI_2, FourLevelState::PLUS), (-w, FRAC_PI_2, FourLevelState::MINUS)] {
        let s = evolve_pulse(&FourLevelState::ground(), &p, theta, delta, w).unwrap();
        for lvl in [FourLevelState::MINUS, FourLevelState::ZERO, FourLevelState::PLUS] {
            if lvl != target {
                worst = worst.max(s.population(lvl));
            }
        }
    }
    worst
}

#[test]
fn blackman_suppresses_off_resonant_legs() {
    let b = leak(Shape::Blackman, 40.0 * PI);
    let s = leak(Shape::Square, 40.0 * PI);
    assert!(b < 1e-3, "{b}");
    assert!(s > 1e3 * b, "square {s} vs blackman {b}");
}

#[test]
fn spectrum_is_symmetric() {
    let p = Pulse::blackman(PI, TP).unwrap();
    let w = wz(DEFAULT_SEPARATION);
    let d = linspace(0.0, 1.3 * w, 61);
    let neg: Vec<f64> = d.iter().rev().map(|x| -x).collect();
    for &theta in &[0.2, 0.9, 1.4] {
        let a = spectrum_scan(theta, w, &p, &d).unwrap();
        let b = spectrum_scan(theta, w, &p, &neg).unwrap();
        for (x, y) in a.ys().zip(b.ys().collect::<Vec<_>>().into_iter().rev()) {
            assert!((x - y).abs() < 1e-6);
        }
    }
}

#[test]
fn peak_heights_follow_pulse_area_algebra() {
    let p = Pulse::blackman(PI, TP).unwrap();
    let w = wz(DEFAULT_SEPARATION);
    for theta in linspace(0.0, FRAC_PI_2, 9) {
        let tr = spectrum_scan(theta, w, &p, &[-w, 0.0, w]).unwrap();
        let y: Vec<f64> = tr.ys().collect();
        let c = central_peak_height(theta).unwrap();
        let h = side_peak_height(theta).unwrap();
        assert!((y[1] - c).abs() < 0.005, "central {theta}");
        assert!((y[0] - h).abs() < 0.005 && (y[2] - h).abs() < 0.005, "side {theta}");
    }
}

#[test]
fn state_transfer_examples() {
    let p = Pulse::blackman(PI, TP).unwrap();
    assert!((prepare_state_transfer(0.0, &p) - 1.0).abs() < 1e-15);
    assert!(prepare_state_transfer(FRAC_PI_2, &p) < 1e-30);
    assert!((prepare_state_transfer(PI / 3.0, &p) - 0.5).abs() < 1e-15);
    for &t in &[0.0, 0.4, PI / 3.0] {
        let sim = simulate_state_transfer(t, &p, wz(DEFAULT_SEPARATION)).unwrap();
        assert!((sim - prepare_state_transfer(t, &p)).abs() < 1e-4);
    }
}

#[test]
fn rejects_bad_pulses() {
    assert!(Pulse::blackman(-1.0, 1.0).is_err());
    assert!(Pulse::blackman(PI, 0.0).is_err());
    assert!(coupling_weights(2.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn norm_is_conserved(theta in 0.0..FRAC_PI_2, delta in -400.0..400.0f64, area in 0.1..7.0f64, sq in any::<bool>()) {
        let shape = if sq { Shape::Square } else { Shape::Blackman };
        let p = Pulse::new(shape, area, TP).unwrap();
        let s = evolve_pulse(&FourLevelState::ground(), &p, theta, delta, wz(DEFAULT_SEPARATION)).unwrap();
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-9);
    }
}
