use plyap_core::estimators::{asymptotic_estimate, finite_time_p_lyapunov, DistanceSeries, EstimateMode};
use plyap_core::geometry::hilbert_distance;
use plyap_core::quantum::split_operator::{split_operator_autocorrelation, SplitOperator};
use plyap_core::quantum::*;

#[test]
fn split_operator_agrees_with_exact_dynamics() {
    for (sys, omega) in [
        (QuadraticSystem::oscillator(2.0).unwrap(), 2.0),
        (QuadraticSystem::barrier(2.0).unwrap(), 2.0),
        (QuadraticSystem::barrier(5.0).unwrap(), 5.0),
    ] {
        let g = GaussianState::centered(1.0).unwrap();
        let dt = 0.01 / omega;
        let series = split_operator_autocorrelation(&sys, &g, dt, 300).unwrap();
        for (t, v) in series {
            let exact = gaussian_autocorrelation(&sys, &g, t).unwrap();
            assert!(((v - exact) / exact).abs() < 1e-3, "{sys:?} t={t}: {v} vs {exact}");
        }
    }
}

#[test]
fn matched_width_anchor() {
    for omega in [2.0, 5.0] {
        let sys = QuadraticSystem::barrier(omega).unwrap();
        let g = GaussianState::centered(omega).unwrap();
        let dt = 0.002 / omega;
        for (t, v) in split_operator_autocorrelation(&sys, &g, dt, 1500).unwrap() {
            assert!((v - (omega * t).cosh().powf(-0.5)).abs() < 1e-6);
        }
    }
}

#[test]
fn unscaled_barrier_form_disagrees_off_matched_width() {
    // The unscaled cross term lacks a factor 1/4; exact dynamics and the grid
    // propagator agree with each other and not with it.
    let sys = QuadraticSystem::barrier(2.0).unwrap();
    let g = GaussianState::centered(1.0).unwrap();
    let series = split_operator_autocorrelation(&sys, &g, 0.005, 300).unwrap();
    let (t, grid) = *series.last().unwrap();
    let exact = gaussian_autocorrelation(&sys, &g, t).unwrap();
    let unscaled = barrier_overlap_unscaled(1.0, 2.0, t).unwrap();
    assert!(((grid - exact) / exact).abs() < 1e-4);
    assert!(((unscaled - exact) / exact).abs() > 0.1);
    let c = 0.5 * (2.0 - 0.5);
    let wt = 2.0 * t;
    let corrected = (wt.cosh().powi(2) + c * c * wt.sinh().powi(2)).powf(-0.25);
    assert!(((corrected - exact) / exact).abs() < 1e-12);
}

fn log_series(sys: &QuadraticSystem, g: &GaussianState, t_end: f64, dt: f64) -> DistanceSeries {
    let n = (t_end / dt).round() as usize;
    let times: Vec<f64> = (0..=n).map(|k| k as f64 * dt).collect();
    let lv = times.iter().map(|t| log_gaussian_autocorrelation(sys, g, *t).unwrap()).collect();
    DistanceSeries::from_log_overlaps(times, lv, 1e-12).unwrap()
}

#[test]
fn barrier_exponent_is_half_omega() {
    for omega in [2.0, 5.0] {
        let sys = QuadraticSystem::barrier(omega).unwrap();
        let g = GaussianState::centered(1.0).unwrap();
        let div = log_series(&sys, &g, 20.0 / omega, 0.01 / omega).divergence().unwrap();
        let est = asymptotic_estimate(&div, EstimateMode::Regression, None, 1).unwrap();
        assert!((est.asymptotic_value / (omega / 2.0) - 1.0).abs() < 0.02, "{omega}: {}", est.asymptotic_value);
    }
}

#[test]
fn oscillator_exponent_vanishes() {
    let omega = 2.0;
    let sys = QuadraticSystem::oscillator(omega).unwrap();
    let g = GaussianState::centered(omega / 2.0).unwrap();
    let div = log_series(&sys, &g, 100.0 / omega, 0.005).divergence().unwrap();
    let curve = finite_time_p_lyapunov(&div, 1).unwrap();
    let (t, last) = *curve.last().unwrap();
    assert!((t - 50.0).abs() < 0.01);
    assert!(last.abs() < 0.05);
}

#[test]
fn unitary_steps_preserve_hilbert_distance() {
    let n = 1800;
    let op = BakerOperator::new(n).unwrap();
    let mut a = bvs_coherent_state(n, 0.003, 0.003, 1e-4).unwrap();
    let mut b = bvs_coherent_state(n, 0.25, 0.6, 1e-4).unwrap();
    let d0 = hilbert_distance(&a, &b).unwrap();
    for _ in 0..20 {
        a = op.step(&a).unwrap();
        b = op.step(&b).unwrap();
    }
    assert!((hilbert_distance(&a, &b).unwrap() - d0).abs() < 1e-10);

    let sys = QuadraticSystem::barrier(2.0).unwrap();
    let basis = plyap_core::geometry::Basis::grid_1d(1024, -20.0, 20.0);
    let prop = SplitOperator::new(&sys, basis, 0.005).unwrap();
    let g1 = GaussianState { q0: -1.0, p0: 0.5, omega0: 1.0 }.sample(&sys, basis).unwrap();
    let g2 = GaussianState { q0: 1.0, p0: 0.0, omega0: 2.0 }.sample(&sys, basis).unwrap();
    let d0 = hilbert_distance(&g1, &g2).unwrap();
    let (mut x, mut y) = (g1.amplitudes().to_vec(), g2.amplitudes().to_vec());
    for _ in 0..100 {
        prop.step(&mut x);
        prop.step(&mut y);
    }
    let x = plyap_core::geometry::ProjectiveState::new(x, basis).unwrap();
    let y = plyap_core::geometry::ProjectiveState::new(y, basis).unwrap();
    assert!((hilbert_distance(&x, &y).unwrap() - d0).abs() < 1e-10 * d0.max(1.0));
}

#[test]
fn dense_baker_is_unitary_at_small_sizes() {
    for n in [2, 8, 128] {
        assert!(unitarity_defect(&bvs_baker(n).unwrap()) < 1e-10);
    }
}
