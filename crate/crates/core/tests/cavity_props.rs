use num_complex::Complex64 as C64;
use proptest::prelude::*;
use vecmag::cavity::*;

fn with_nbar(nbar: f64) -> CavityParams {
    // |α|² = κ₀|β|²/(δ² + κ²/4) with δ = 3, κ = 2, κ₀ = 1
    CavityParams::new(3.0, 2.0, 1.0, C64::new((nbar * 10.0).sqrt(), 0.0), 1e-3, 0.0).unwrap()
}

#[test]
fn eigenladder_residuals() {
    for nbar in [0.5, 5.0, 20.0, 50.0] {
        let p = with_nbar(nbar);
        let n = default_n_max(&p);
        assert!(eigenladder_residual(&p, n, 0).unwrap() < 1e-8);
        for k in 1..=2 {
            assert!(eigenladder_residual(&p, n, k).unwrap() < 1e-6, "nbar={nbar} n'={k}");
        }
    }
}

#[test]
fn residual_falls_with_truncation() {
    let p = with_nbar(10.0);
    let r: Vec<f64> = [20, 26, 32].iter().map(|&n| eigenladder_residual(&p, n, 0).unwrap()).collect();
    assert!(r[0] > r[1] && r[1] > r[2], "{r:?}");
}

#[test]
fn oversized_ladder_is_a_truncation_error() {
    let p = with_nbar(50.0);
    assert!(matches!(eigenladder_residual(&p, 60, 2), Err(vecmag::Error::Truncation(_))));
    let (_, warn) = build_hamiltonian(&p, 60);
    assert!(warn.is_some());
}

#[test]
fn ladder_component_decays_at_kappa() {
    for nbar in [1.0, 50.0] {
        let p = with_nbar(nbar);
        let rate = fit_ladder_decay(&p, default_n_max(&p), 3.0 / p.kappa, 20).unwrap();
        assert!((rate - p.kappa).abs() < 0.02 * p.kappa, "{rate}");
    }
}

#[test]
fn relaxes_to_the_coherent_state() {
    let p = with_nbar(20.0);
    let n = default_n_max(&p);
    for start in [0usize, 3] {
        let mut psi = vec![C64::new(0.0, 0.0); n];
        psi[start] = C64::new(1.0, 0.0);
        let r = relax_to_steady(&p, &psi, 20.0 / p.kappa).unwrap();
        assert!(r.fidelity > 0.999, "start {start}: {}", r.fidelity);
    }
    // vacuum stays coherent: |⟨α|γ(t)⟩|² = exp(−|α|² e^{−κt})
    let mut vac = vec![C64::new(0.0, 0.0); n];
    vac[0] = C64::new(1.0, 0.0);
    let r = relax_to_steady(&p, &vac, 1.0).unwrap();
    assert!((r.fidelity - (-20.0 * (-2.0f64).exp()).exp()).abs() < 1e-10);
}

#[test]
fn mean_field_obeys_the_damped_oscillator() {
    let p = CavityParams::new(1.7, 0.8, 0.5, C64::new(2.0, 1.0), 1e-3, 0.2).unwrap();
    let n = 80;
    let mut evo = CavityEvolution::new(&p, n).unwrap();
    // a coherent state offset from its frame, so the frame state really moves
    let phi: Vec<C64> = coherent_state(C64::new(1.5, -2.0), n).iter().copied().collect();
    let mut s = FramedState { gamma: C64::new(0.0, 0.0), phi, t: 0.0 };
    let dt = 1e-4;
    for i in 1..=8 {
        let t = 0.5 * i as f64;
        evo.propagate(&mut s, t).unwrap();
        let a = evo.mean_amplitude(&s);
        let rhs = evo.heisenberg_rhs(a);
        let exact = evo.mean_field_derivative(&s);
        assert!((exact - rhs).norm() < 1e-6 * rhs.norm().max(1.0), "t={t}");
        let mut fwd = s.clone();
        evo.propagate(&mut fwd, t + dt).unwrap();
        let mut back = s.clone();
        evo.propagate(&mut back, t - dt).unwrap();
        let fd = (evo.mean_amplitude(&fwd) - evo.mean_amplitude(&back)) / (2.0 * dt);
        assert!((fd - rhs).norm() < 1e-6 * rhs.norm().max(1.0), "t={t}: {fd} vs {rhs}");
    }
}

#[test]
fn literal_eigenvalue_solves_the_dressed_cavity() {
    let p = CavityParams::new(3.0, 2.0, 1.0, C64::new(4.0, 0.5), 0.05, 0.3).unwrap();
    let n = 120;
    for m in [-3.0, -1.0, 0.0, 2.0] {
        let h = dressed_hamiltonian(&p, m, n);
        let v = coherent_state(dressed_alpha(&p, m), n);
        let lam = effective_hamiltonian_exact(&p, m);
        let r = (h.apply(&v) - &v * lam).norm() / v.norm();
        assert!(r < 1e-9, "m={m}: {r}");
    }
}

#[test]
fn worked_example_and_zero_detuning() {
    let p = CavityParams::new(3.0, 2.0, 1.0, C64::new(10.0, 0.0), 0.01, 0.0).unwrap();
    assert!((chi(&p) - 3e-4).abs() < 1e-15);
    assert!(effective_hamiltonian_exact(&p, 0.0).norm() < 1e-15);
    let z = CavityParams { delta: 0.4, delta0: 0.4, ..p };
    assert_eq!(chi(&z), 0.0);
    assert!(lindblad_rate(&z).is_finite() && lindblad_rate(&z) > 0.0);
}

#[test]
fn series_form_carries_chi_and_rate() {
    let p = CavityParams::new(3.0, 2.0, 1.0, C64::new(10.0, 0.0), 1e-4, 0.1).unwrap();
    let (c, g) = extract_chi_and_rate(|m| effective_hamiltonian_series(&p, m), 1.0);
    assert!((c - chi(&p)).abs() < 1e-6 * chi(&p).abs());
    assert!((g - lindblad_rate(&p)).abs() < 1e-6 * lindblad_rate(&p));
    let big = CavityParams { epsilon: 1e-3, ..p };
    let (_, _, ratio) = truncation_error_scaling(&big, 1.0, effective_hamiltonian_series);
    assert!((7.0..=9.0).contains(&ratio), "{ratio}");
}

#[test]
fn exact_quadratic_coefficient_is_kappa0_beta2_eps2_over_d_cubed() {
    // The eigenvalue's own expansion: κ₀|β|² Σ (εm)^k / D^{k+1}, D = δ′ + iκ/2.
    let p = CavityParams::new(3.0, 2.0, 1.0, C64::new(10.0, 0.0), 1e-4, 0.0).unwrap();
    let (_, q) = maclaurin_coefficients(|m| effective_hamiltonian_exact(&p, m), 1.0);
    let d = C64::new(p.delta_prime(), 0.5 * p.kappa);
    let expect = C64::new(p.kappa0 * p.beta.norm_sqr() * p.epsilon * p.epsilon, 0.0) / (d * d * d);
    assert!((q - expect).norm() < 1e-6 * expect.norm());
    // agrees with χ only when κ ≪ δ′
    let narrow = CavityParams { kappa: 2e-4, kappa0: 1e-4, ..p };
    let (c, _) = extract_chi_and_rate(|m| effective_hamiltonian_exact(&narrow, m), 1.0);
    assert!((c - chi(&narrow)).abs() < 1e-6 * chi(&narrow));
}

#[test]
fn first_split_term_alone_gives_twice_chi() {
    let p = CavityParams::new(3.0, 2.0, 1.0, C64::new(10.0, 0.0), 1e-4, 0.0).unwrap();
    let first = |m: f64| C64::new(dressed_alpha(&p, m).norm_sqr() * (p.delta0 + p.epsilon * m), 0.0);
    let (c, _) = extract_chi_and_rate(first, 1.0);
    assert!((c / chi(&p) - 2.0).abs() < 1e-5, "{}", c / chi(&p));
}

#[test]
fn rescaling_time_units_changes_nothing_dimensionless() {
    let p = CavityParams::new(1.3, 0.7, 0.4, C64::new(3.0, -1.0), 0.02, 0.1).unwrap();
    for s in [1e-3, 0.5, 7.0, 1e4] {
        let q = p.rescaled(s);
        assert!((steady_alpha(&q).n_bar / steady_alpha(&p).n_bar - 1.0).abs() < 1e-12);
        assert!((chi(&q) / (s * chi(&p)) - 1.0).abs() < 1e-12);
        assert!((lindblad_rate(&q) / (s * lindblad_rate(&p)) - 1.0).abs() < 1e-12);
        assert!((quality_ratio(&q) - quality_ratio(&p)).abs() < 1e-12);
        let n = default_n_max(&p);
        assert_eq!(n, default_n_max(&q));
        let r = eigenladder_residual(&q, n, 1).unwrap() / s;
        assert!((r - eigenladder_residual(&p, n, 1).unwrap()).abs() < 1e-9);
    }
}

#[test]
fn invalid_parameters() {
    assert!(CavityParams::new(1.0, 1.0, 2.0, C64::new(1.0, 0.0), 0.0, 0.0).is_err());
    assert!(CavityParams::new(f64::NAN, 1.0, 1.0, C64::new(1.0, 0.0), 0.0, 0.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn split_is_minus_conjugate_of_eigenvalue(
        delta in -5.0..5.0f64, kappa0 in 0.1..2.0f64, extra in 0.0..2.0f64,
        br in -5.0..5.0f64, bi in -5.0..5.0f64, eps in -0.2..0.2f64, d0 in -1.0..1.0f64, m in -10.0..10.0f64,
    ) {
        let p = CavityParams::new(delta, kappa0 + extra, kappa0, C64::new(br, bi), eps, d0).unwrap();
        let e = effective_hamiltonian_exact(&p, m);
        let s = effective_hamiltonian_decomposition(&p, m);
        prop_assert!((s + e.conj()).norm() <= 1e-9 * (1.0 + e.norm()));
    }
}
