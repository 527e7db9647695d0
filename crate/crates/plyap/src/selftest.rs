//! Fast in-process versions of the property suites, for `plyap selftest`.

use std::f64::consts::PI;

use num_complex::Complex64;
use plyap_core::classical::{evolve_linear_analytic, transfer_step, Geometry, GridDensity, MapDescriptor};
use plyap_core::estimators::{asymptotic_estimate, trajectory_lyapunov, EstimateMode};
use plyap_core::geometry::{fubini_study_distance, hilbert_distance, Basis, PhasePoint, ProjectiveState};
use plyap_core::quantum::split_operator::split_operator_autocorrelation;
use plyap_core::quantum::{
    bvs_baker, gaussian_autocorrelation, unitarity_defect, BakerOperator, GaussianState, QuadraticSystem,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn random_state(rng: &mut ChaCha8Rng, basis: Basis) -> ProjectiveState {
    loop {
        let amps: Vec<Complex64> = (0..basis.len())
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        if let Ok(s) = ProjectiveState::new(amps, basis) {
            return s;
        }
    }
}

fn metric_axioms(rng: &mut ChaCha8Rng) -> Check {
    let bases =
        [Basis::discrete(5), Basis::grid_1d(6, -1.0, 2.0), Basis::Grid2d { rows: 2, cols: 3, dx: 0.5, dy: 0.25 }];
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for basis in bases {
        for _ in 0..1000 {
            let (a, b, c) = (random_state(rng, basis), random_state(rng, basis), random_state(rng, basis));
            let ab = fubini_study_distance(&a, &b).unwrap();
            let ba = fubini_study_distance(&b, &a).unwrap();
            let bc = fubini_study_distance(&b, &c).unwrap();
            let ac = fubini_study_distance(&a, &c).unwrap();
            worst = worst.max(ac - ab - bc);
            ok &= ab == ba && (0.0..=PI).contains(&ab);
            let z = Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let scaled = fubini_study_distance(&a.scaled(z).unwrap(), &b).unwrap();
            ok &= (scaled - ab).abs() <= 1e-12;
        }
    }
    Check { name: "metric axioms", passed: ok && worst <= 1e-10, detail: format!("max triangle excess {worst:.2e}") }
}

fn bvs_unitarity(rng: &mut ChaCha8Rng) -> Check {
    let n = 128;
    let defect = unitarity_defect(&bvs_baker(n).unwrap());
    let op = BakerOperator::new(n).unwrap();
    let a = random_state(rng, Basis::discrete(n));
    let b = random_state(rng, Basis::discrete(n));
    let before = hilbert_distance(&a, &b).unwrap();
    let after = hilbert_distance(&op.step(&a).unwrap(), &op.step(&b).unwrap()).unwrap();
    let drift = (before - after).abs();
    Check {
        name: "baker unitarity",
        passed: defect < 1e-10 && drift < 1e-10,
        detail: format!("defect {defect:.2e}, distance drift {drift:.2e}"),
    }
}

fn mass_conservation(rng: &mut ChaCha8Rng) -> Check {
    let mut worst: f64 = 0.0;
    for (map, geometry) in [
        (MapDescriptor::RAdic { r: 3 }, Geometry::unit_interval(999)),
        (MapDescriptor::Baker, Geometry::UnitSquare { cells: 64 }),
    ] {
        let values = (0..geometry.len()).map(|_| rng.random_range(0.0..1.0)).collect();
        let mut rho = GridDensity::new(values, geometry).unwrap().normalized();
        for _ in 0..8 {
            rho = transfer_step(&rho, &map).unwrap();
            worst = worst.max((rho.mass() - 1.0).abs());
        }
    }
    Check { name: "mass conservation", passed: worst < 1e-14, detail: format!("max drift {worst:.2e}") }
}

fn linear_exponents() -> Check {
    let mut worst: f64 = 0.0;
    for r in [2.0f64, 3.0, 5.0] {
        let series = evolve_linear_analytic(r, 30, 1e-12).unwrap().divergence().unwrap();
        let est = asymptotic_estimate(&series, EstimateMode::Regression, Some((10.0, 30.0)), 1).unwrap();
        worst = worst.max((est.asymptotic_value / (r.ln() / 2.0) - 1.0).abs());
    }
    Check { name: "linear map exponents", passed: worst < 0.01, detail: format!("max relative error {worst:.2e}") }
}

fn oracle_agreement() -> Check {
    let sys = QuadraticSystem::barrier(2.0).unwrap();
    let g = GaussianState::centered(1.0).unwrap();
    let worst = split_operator_autocorrelation(&sys, &g, 0.005, 300)
        .unwrap()
        .into_iter()
        .map(|(t, v)| {
            let exact = gaussian_autocorrelation(&sys, &g, t).unwrap();
            ((v - exact) / exact).abs()
        })
        .fold(0.0, f64::max);
    Check { name: "split-operator oracle", passed: worst < 1e-3, detail: format!("max relative error {worst:.2e}") }
}

fn trajectory_paths(rng: &mut ChaCha8Rng) -> Check {
    let mut worst: f64 = 0.0;
    for map in [MapDescriptor::Baker, MapDescriptor::Rotation { c: 0.3 }, MapDescriptor::RAdic { r: 2 }] {
        for _ in 0..5 {
            let x0 = PhasePoint((0..map.dim()).map(|_| rng.random_range(0.0..1.0)).collect());
            let e = trajectory_lyapunov(&map, &x0, 1e-9, 100, 1).unwrap();
            worst = worst.max((e.direct - e.via_divergence).abs());
        }
    }
    Check { name: "trajectory paths agree", passed: worst < 1e-6, detail: format!("max gap {worst:.2e}") }
}

/// Runs every check with a fixed seed.
pub fn selftest(seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    vec![
        metric_axioms(&mut rng),
        bvs_unitarity(&mut rng),
        mass_conservation(&mut rng),
        linear_exponents(),
        oracle_agreement(),
        trajectory_paths(&mut rng),
    ]
}
