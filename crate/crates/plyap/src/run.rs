//! Wires each system to the estimator pipeline.

use std::fs::File;

use plyap_core::classical::{
    corner_cell_density, evolve_linear_analytic, koopman_step, linear_grid_series, sqrt_embed, square_density,
    transfer_step, uniform_limit_overlap, MapDescriptor,
};
use plyap_core::estimators::{
    asymptotic_estimate, classify, detect_saturation, finite_time_p_lyapunov, ingest_overlap_series, Classification,
    DistanceSeries, DivergenceSeries, ExponentEstimate, OverlapSeries,
};
use plyap_core::geometry::log_overlap;
use plyap_core::quantum::{
    bvs_coherent_state, log_gaussian_autocorrelation, BakerOperator, GaussianState, QuadraticSystem,
};
use plyap_core::Error as CoreError;

use crate::config::{ExperimentConfig, LinearEvolution, SystemSpec};
use crate::error::{Result, RunError};

/// Everything one experiment produces.
#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub distances: DistanceSeries,
    pub divergences: DivergenceSeries,
    pub finite_time: Vec<(f64, f64)>,
    pub estimate: Option<ExponentEstimate>,
    /// Why `estimate` is absent, when it is.
    pub estimate_note: Option<String>,
    pub classification: Classification,
    pub saturation_time: Option<f64>,
    /// Distance the series is expected to settle at, when known in advance.
    pub plateau: Option<f64>,
    pub wall_time: f64,
}

/// How saturation is located for a system.
enum Plateau {
    /// Distance grows without bound; no plateau search.
    None,
    /// Plateau known in closed form.
    Known(f64),
    /// Plateau read off the tail of the series.
    Detect,
}

fn times(steps: usize, dt: f64) -> Vec<f64> {
    (0..=steps).map(|k| k as f64 * dt).collect()
}

fn density_path(
    rho0: plyap_core::classical::GridDensity,
    map: MapDescriptor,
    steps: usize,
    theta: f64,
) -> plyap_core::Result<(DistanceSeries, f64)> {
    let psi0 = sqrt_embed(&rho0);
    let plateau = 2.0 * uniform_limit_overlap(&rho0).acos();
    let mut rho = rho0;
    let mut lv = vec![0.0];
    for _ in 0..steps {
        rho = transfer_step(&rho, &map)?;
        lv.push(log_overlap(&psi0, &sqrt_embed(&rho))?);
    }
    Ok((DistanceSeries::from_log_overlaps(times(steps, 1.0), lv, theta)?, plateau))
}

fn build_series(cfg: &ExperimentConfig) -> plyap_core::Result<(DistanceSeries, Plateau)> {
    let theta = cfg.estimator.theta;
    let steps = cfg.steps;
    match cfg.system {
        SystemSpec::Linear { r, b, evolution, cells } => {
            let series = match evolution {
                LinearEvolution::Analytic => evolve_linear_analytic(r, steps, theta)?,
                LinearEvolution::Grid => linear_grid_series(b, r as u32, cells, steps, theta)?,
            };
            Ok((series, Plateau::None))
        }
        SystemSpec::RAdic { r, init_width, grid } => {
            let rho0 = square_density(init_width, grid, 1.0)?;
            let (series, plateau) = density_path(rho0, MapDescriptor::RAdic { r }, steps, theta)?;
            Ok((series, Plateau::Known(plateau)))
        }
        SystemSpec::BakerClassical { m } => {
            let (series, plateau) = density_path(corner_cell_density(m)?, MapDescriptor::Baker, steps, theta)?;
            Ok((series, Plateau::Known(plateau)))
        }
        SystemSpec::BakerKoopman { m } => {
            let rho0 = corner_cell_density(m)?;
            let plateau = 2.0 * uniform_limit_overlap(&rho0).acos();
            let psi0 = sqrt_embed(&rho0);
            let mut psi = psi0.clone();
            let mut lv = vec![0.0];
            for _ in 0..steps {
                psi = koopman_step(&psi, &MapDescriptor::Baker)?;
                lv.push(log_overlap(&psi0, &psi)?);
            }
            let series = DistanceSeries::from_log_overlaps(times(steps, 1.0), lv, theta)?;
            Ok((series, Plateau::Known(plateau)))
        }
        SystemSpec::Oscillator { omega, omega0 } | SystemSpec::Barrier { omega, omega0 } => {
            let sys = if matches!(cfg.system, SystemSpec::Oscillator { .. }) {
                QuadraticSystem::oscillator(omega)?
            } else {
                QuadraticSystem::barrier(omega)?
            };
            let g = GaussianState::centered(omega0)?;
            let ts = times(steps, cfg.dt);
            let lv =
                ts.iter().map(|t| log_gaussian_autocorrelation(&sys, &g, *t)).collect::<plyap_core::Result<_>>()?;
            Ok((DistanceSeries::from_log_overlaps(ts, lv, theta)?, Plateau::None))
        }
        SystemSpec::BvsBaker { n, q0, p0, alpha } => {
            let psi0 = bvs_coherent_state(n, q0, p0, alpha)?;
            let op = BakerOperator::new(n)?;
            let mut amps = psi0.amplitudes().to_vec();
            let mut lv = vec![0.0];
            for _ in 0..steps {
                op.apply(&mut amps)?;
                let psi = plyap_core::geometry::ProjectiveState::new(amps.clone(), *psi0.basis())?;
                lv.push(log_overlap(&psi0, &psi)?);
            }
            Ok((DistanceSeries::from_log_overlaps(times(steps, 1.0), lv, theta)?, Plateau::Detect))
        }
        SystemSpec::OverlapFile { ref path, convention } => {
            let file = File::open(path)
                .map_err(|e| CoreError::Data { row: 0, reason: format!("cannot open {}: {e}", path.display()) })?;
            let raw = OverlapSeries::from_csv(file, convention)?;
            let (series, _) = ingest_overlap_series(&raw, theta)?;
            Ok((series, Plateau::Detect))
        }
    }
}

/// Runs one experiment end to end. Writes nothing.
pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let started = std::time::Instant::now();
    let fail = |e: CoreError| RunError::from_core(cfg.source.clone(), e);
    let (mut distances, plateau) = build_series(cfg).map_err(fail)?;

    let (saturation_time, plateau) = match plateau {
        Plateau::None => (None, None),
        Plateau::Known(p) => (detect_saturation(&distances, Some(p)), Some(p)),
        Plateau::Detect => (detect_saturation(&distances, None), None),
    };
    if let Some(tb) = saturation_time {
        distances.mark_saturated_from(tb);
    }
    let divergences = distances.divergence().map_err(fail)?;

    let est = &cfg.estimator;
    let finite_time = finite_time_p_lyapunov(&divergences, est.delta_index).unwrap_or_default();
    let outcome = asymptotic_estimate(&divergences, est.mode, est.window, est.delta_index);
    let classification = classify(&outcome, est.stability_tolerance).map_err(fail)?;
    let (estimate, estimate_note) = match outcome {
        Ok(e) => (Some(e), None),
        Err(e) => (None, Some(e.to_string())),
    };
    log::info!("{}: {:?}", cfg.id, classification);
    Ok(ExperimentResult {
        config: cfg.clone(),
        distances,
        divergences,
        finite_time,
        estimate,
        estimate_note,
        classification,
        saturation_time,
        plateau,
        wall_time: started.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::Path;

    fn cfg(text: &str) -> ExperimentConfig {
        ExperimentConfig::from_json(text, "test.json", Path::new(".")).unwrap()
    }

    #[test]
    fn linear_map_estimate() {
        let res = run(&cfg(r#"{"id": "lin", "system": "linear", "r": 2}"#)).unwrap();
        let lambda = res.estimate.unwrap().asymptotic_value;
        assert!((lambda / (2f64.ln() / 2.0) - 1.0).abs() < 0.01);
        assert!(matches!(res.classification, Classification::Unstable { .. }));
    }

    #[test]
    fn oscillator_is_stable() {
        let res = run(&cfg(r#"{"id": "osc", "system": "oscillator", "omega": 2}"#)).unwrap();
        assert_eq!(res.classification, Classification::Stable);
    }

    #[test]
    fn r_adic_saturates() {
        let res = run(&cfg(r#"{"id": "ra", "system": "r_adic", "r": 2}"#)).unwrap();
        assert_eq!(res.saturation_time, Some(9.0));
        assert!(res.distances.saturated()[9..].iter().all(|s| *s));
    }

    #[test]
    fn missing_overlap_file_is_a_data_error() {
        let err = run(&cfg(r#"{"id": "x", "system": "overlap_file", "path": "/nonexistent/o.csv"}"#)).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }
}
