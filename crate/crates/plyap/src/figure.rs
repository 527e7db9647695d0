//! Preset experiment bundles behind `plyap figure`.

use std::f64::consts::LN_2;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::config::{ExperimentConfig, SystemSpec};
use crate::error::{Result, RunError};
use crate::output::write_result;
use crate::plot::{Curve, LinePlot, Reference};
use crate::run::{run, ExperimentResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    Fig1a,
    Fig1b,
    Fig2a,
}

impl FromStr for FigureId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "fig1a" => Ok(FigureId::Fig1a),
            "fig1b" => Ok(FigureId::Fig1b),
            "fig2a" => Ok(FigureId::Fig2a),
            other => Err(format!("unknown figure '{other}' (expected fig1a, fig1b or fig2a)")),
        }
    }
}

impl FigureId {
    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig1a => "fig1a",
            FigureId::Fig1b => "fig1b",
            FigureId::Fig2a => "fig2a",
        }
    }

    /// Preset configs, written out in full so every default is visible.
    pub fn presets(self) -> Vec<&'static str> {
        match self {
            FigureId::Fig1a => vec![
                r#"{"id": "linear_r2", "system": "linear", "r": 2, "steps": 30, "theta": 1e-12, "window": [10, 30]}"#,
                r#"{"id": "linear_r3", "system": "linear", "r": 3, "steps": 30, "theta": 1e-12, "window": [10, 30]}"#,
                r#"{"id": "linear_r5", "system": "linear", "r": 5, "steps": 30, "theta": 1e-12, "window": [10, 30]}"#,
                r#"{"id": "linear_r2_grid", "system": "linear", "r": 2, "b": 0.25, "evolution": "grid", "cells": 16, "steps": 10, "theta": 1e-12}"#,
            ],
            FigureId::Fig1b => vec![
                r#"{"id": "oscillator_w2", "system": "oscillator", "omega": 2, "omega0": 1, "dt": 0.005, "steps": 10200, "theta": 1e-12}"#,
                r#"{"id": "barrier_w2", "system": "barrier", "omega": 2, "omega0": 1, "dt": 0.005, "steps": 2000, "theta": 1e-12}"#,
                r#"{"id": "barrier_w5", "system": "barrier", "omega": 5, "omega0": 1, "dt": 0.005, "steps": 800, "theta": 1e-12}"#,
            ],
            FigureId::Fig2a => vec![
                r#"{"id": "bvs_n1800", "system": "bvs_baker", "n": 1800, "q0": 0.003, "p0": 0.003, "alpha": 1e-4, "steps": 20, "theta": 0.05}"#,
            ],
        }
    }

    pub fn configs(self, out: &Path) -> Vec<ExperimentConfig> {
        let dir = out.join(self.name());
        self.presets()
            .into_iter()
            .map(|text| {
                let mut cfg = ExperimentConfig::from_json(text, &format!("preset {}", self.name()), Path::new("."))
                    .expect("presets are valid");
                cfg.output_dir = dir.join(&cfg.id);
                cfg
            })
            .collect()
    }

    fn plot(self, results: &[ExperimentResult]) -> LinePlot {
        let (title, references, y_range) = match self {
            FigureId::Fig1a => (
                "Linear map: finite-time exponent",
                [2.0f64, 3.0, 5.0].iter().map(|r| Reference { label: format!("ln({r})/2"), y: r.ln() / 2.0 }).collect(),
                None,
            ),
            FigureId::Fig1b => (
                "Oscillator and parabolic barrier",
                vec![
                    Reference { label: "0".into(), y: 0.0 },
                    Reference { label: "1".into(), y: 1.0 },
                    Reference { label: "2.5".into(), y: 2.5 },
                ],
                Some((-0.5, 3.0)),
            ),
            FigureId::Fig2a => (
                "Quantum baker map, N = 1800",
                vec![Reference { label: "ln(2)/2".into(), y: LN_2 / 2.0 }],
                Some((-1.0, 1.5)),
            ),
        };
        LinePlot {
            title: title.into(),
            x_label: "t".into(),
            y_label: "finite-time exponent".into(),
            curves: results
                .iter()
                .map(|r| Curve { label: curve_label(&r.config), points: r.finite_time.clone() })
                .collect(),
            references,
            y_range,
        }
    }
}

fn curve_label(cfg: &ExperimentConfig) -> String {
    match cfg.system {
        SystemSpec::Linear { r, evolution, .. } => match evolution {
            crate::config::LinearEvolution::Analytic => format!("r = {r}"),
            crate::config::LinearEvolution::Grid => format!("r = {r} (grid)"),
        },
        SystemSpec::Oscillator { omega, .. } => format!("oscillator w = {omega}"),
        SystemSpec::Barrier { omega, .. } => format!("barrier w = {omega}"),
        SystemSpec::BvsBaker { n, .. } => format!("baker N = {n}"),
        _ => cfg.id.clone(),
    }
}

/// Runs and writes every experiment of a figure, then its SVG. Returns the
/// results in preset order.
pub fn figure(id: FigureId, out: &Path) -> Result<(Vec<ExperimentResult>, PathBuf)> {
    let configs = id.configs(out);
    let results: Vec<ExperimentResult> = configs
        .par_iter()
        .map(|cfg| {
            let res = run(cfg)?;
            write_result(&res, &cfg.output_dir)?;
            Ok(res)
        })
        .collect::<Result<_>>()?;
    let svg_path = out.join(id.name()).join(format!("{}.svg", id.name()));
    std::fs::write(&svg_path, id.plot(&results).to_svg())
        .map_err(|source| RunError::Io { path: svg_path.clone(), source })?;
    Ok((results, svg_path))
}
