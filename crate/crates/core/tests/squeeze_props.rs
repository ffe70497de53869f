mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use common::ProductState;
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use vecmag::squeeze::*;


fn all_variants() -> [Variant; 3] {
    [Variant::GespE, Variant::GespO, Variant::Cesp]
}

#[test]
fn echo_protocols_match_product_space() {
    for n in [1, 2, 3, 5, 8, 11, 12] {
        for variant in all_variants() {
            for &(mu, phi) in &[(0.0, 0.3), (0.37, 0.05), (1.1, -0.7), (FRAC_PI_2, 0.02)] {
                let p = SqueezeParams::new(mu, variant).unwrap();
                let proto = echo_protocol(&p, phi);
                let initial = DickeState::css(n, [0.0, 0.0, -1.0]).unwrap();
                let dicke = proto.evolve(&initial);
                let mut brute = ProductState::all_down(n);
                for s in proto.steps() {
                    brute.apply(s);
                }
                let sym = brute.symmetrized();
                for (k, (a, b)) in dicke.amplitudes().iter().zip(&sym).enumerate() {
                    assert!((a - b).norm() < 1e-8, "N={n} {variant:?} mu={mu} k={k}: {a} vs {b}");
                }
                let (m_d, v_d) = dicke.upper_population();
                let (m_b, v_b) = brute.upper_population();
                assert!((m_d - m_b).abs() < 1e-8 && (v_d - v_b).abs() < 1e-8);
                let mom = dicke.moments();
                let s = brute.mean_spin();
                assert!((mom.sx - s[0]).abs() < 1e-8 && (mom.sy - s[1]).abs() < 1e-8 && (mom.sz - s[2]).abs() < 1e-8);
            }
        }
    }
}

#[test]
fn zero_twist_is_a_plain_fringe() {
    // Without twisting, the perpendicular transfer gives a Ramsey fringe;
    // the parallel one (GESP-E) rotates the CSS about itself and is flat.
    for n in [10, 37] {
        let flat = EchoReadout::new(n, SqueezeParams::new(0.0, Variant::GespE).unwrap()).unwrap();
        assert!((flat.signal(0.9) - n as f64).abs() < 1e-8);
        let p = SqueezeParams::new(0.0, Variant::GespO).unwrap();
        let e = EchoReadout::new(n, p).unwrap();
        for &phi in &[0.0f64, 0.4, 1.3, 2.9] {
            let expect = 0.5 * n as f64 * (1.0 + phi.cos());
            assert!((e.signal(phi) - expect).abs() < 1e-8, "N={n} phi={phi}");
        }
    }
}

#[test]
fn exact_slope_matches_local_sinusoid() {
    let p = SqueezeParams::new(0.6, Variant::GespE).unwrap();
    let e = EchoReadout::new(100, p).unwrap();
    let m = e.phase_magnification().unwrap();
    let phi = 0.3 / m;
    let h = 0.05 / m;
    let fd = (e.signal(phi + h) - e.signal(phi - h)) / (2.0 * h);
    let slope = e.at(phi).slope;
    assert!((slope - fd).abs() < 0.01 * slope.abs(), "{slope} vs {fd}");
    // Fit a + b cos(kφ) through four samples at the fringe top:
    // c₃ + c₁ − c₂ − c₀ = 2 cos(kδ)(c₂ − c₁).
    let d = 0.1 / m;
    let c: Vec<f64> = (0..4).map(|i| e.signal(i as f64 * d)).collect();
    let r = (c[3] + c[1] - c[2] - c[0]) / (2.0 * (c[2] - c[1]));
    let k = r.acos() / d;
    let a = (c[2] + c[0] - 2.0 * r * c[1]) / (2.0 * (1.0 - r));
    let b = c[0] - a;
    let x = 1.5 * d;
    let fitted = -b * k * (k * x).sin();
    let exact = e.at(x).slope;
    assert!((fitted - exact).abs() < 0.01 * exact.abs(), "{fitted} vs {exact}");
}

#[test]
fn parity_differs_between_even_and_odd() {
    // Twisting by π/2 exactly, read out along x (where the cat lives).
    let parity_x = |n: usize| {
        let s = DickeState::css(n, [1.0, 0.0, 0.0]).unwrap().squeeze(FRAC_PI_2);
        s.rotate(Axis::Y, -FRAC_PI_2).parity()
    };
    for (even, odd) in [(10, 11), (100, 101)] {
        let (pe, po) = (parity_x(even), parity_x(odd));
        assert!((pe - po).abs() > 0.1, "N={even}: {pe}, N={odd}: {po}");
    }
}

#[test]
fn gesp_scaling_laws() {
    let mut ms = Vec::new();
    let mut amps = Vec::new();
    for n in [100usize, 200, 400] {
        let p = SqueezeParams::new(0.6, Variant::GespE).unwrap();
        ms.push(phase_magnification(n, &p).unwrap() / n as f64);
        amps.push(noise_amplification(n, &p).unwrap() / (n as f64).sqrt());
    }
    for w in ms.windows(2).chain(amps.windows(2)) {
        assert!((w[0] / w[1] - 1.0).abs() < 0.05, "{ms:?} {amps:?}");
    }
}

#[test]
fn cesp_is_a_small_twist_protocol() {
    let n = 100;
    let m = |mu: f64| phase_magnification(n, &SqueezeParams::new(mu, Variant::Cesp).unwrap()).unwrap();
    assert!(m(0.01) < m(0.03) && m(0.03) < m(0.1));
    let a = noise_amplification(n, &SqueezeParams::new(0.05, Variant::Cesp).unwrap()).unwrap();
    assert!((a - 1.0).abs() < 1e-3, "{a}");
}

#[test]
fn calibration_finds_the_parity_azimuths() {
    for (n, az) in [(10, GESP_E_AZIMUTH), (11, GESP_O_AZIMUTH)] {
        let (found, _) = calibrate_transfer_azimuth(n).unwrap();
        let d = (found - az).rem_euclid(PI);
        assert!(d.min(PI - d) < 1e-3, "N={n}: {found}");
    }
}

#[test]
fn atom_cap_is_enforced() {
    assert!(DickeState::css(5000, [0.0, 0.0, 1.0]).is_err());
}

fn step_strategy() -> impl Strategy<Value = ProtocolStep> {
    prop_oneof![
        (0..3usize, -7.0..7.0f64).prop_map(|(a, angle)| ProtocolStep::Rotate { axis: [Axis::X, Axis::Y, Axis::Z][a], angle }),
        (-3.0..3.0f64).prop_map(|mu| ProtocolStep::Squeeze { mu }),
        (-3.0..3.0f64).prop_map(|phi| ProtocolStep::PhaseAccumulate { phi }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn steps_preserve_norm_and_invert(n in 1usize..40, steps in prop::collection::vec(step_strategy(), 1..8), dir in prop::array::uniform3(-1.0..1.0f64)) {
        prop_assume!(dir.iter().map(|v| v * v).sum::<f64>() > 1e-3);
        let s0 = DickeState::css(n, dir).unwrap();
        let s1 = apply_steps(&s0, &steps);
        prop_assert!((s1.norm_sqr() - 1.0).abs() < 1e-9);
        let inv: Vec<_> = steps.iter().rev().filter_map(|s| s.inverse()).collect();
        let s2 = apply_steps(&s1, &inv);
        prop_assert!(s2.fidelity(&s0) > 1.0 - 1e-8);
    }

    #[test]
    fn readout_obeys_uncertainty_relation(n in 2usize..30, ax in prop::array::uniform3(-1.0..1.0f64), mu in -2.0..2.0f64) {
        prop_assume!(ax.iter().map(|v| v * v).sum::<f64>() > 1e-3);
        let s = DickeState::css(n, ax).unwrap().squeeze(mu);
        let m = s.moments();
        // Robertson: Var(Sx)·Var(Sy) ≥ ⟨Sz⟩²/4, and cyclic
        prop_assert!(m.var_x * m.var_y + 1e-9 >= 0.25 * m.sz * m.sz);
        prop_assert!(m.var_y * m.var_z + 1e-9 >= 0.25 * m.sx * m.sx);
        prop_assert!(m.var_z * m.var_x + 1e-9 >= 0.25 * m.sy * m.sy);
    }
}

#[test]
fn css_moments() {
    let s = DickeState::css(20, [1.0, 1.0, 0.0]).unwrap();
    let m = s.moments();
    let r = 10.0 / 2f64.sqrt();
    assert!((m.sx - r).abs() < 1e-10 && (m.sy - r).abs() < 1e-10 && m.sz.abs() < 1e-10);
    assert!((m.var_z - 5.0).abs() < 1e-10);
    let _ = C64::new(0.0, 0.0);
}
