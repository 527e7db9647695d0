//! Flat JSON experiment configs.
//!
//! Every key lives at the top level; `system` selects which of the
//! system-specific keys are read. Unset keys take documented defaults and the
//! resolved config (defaults filled in) is what gets hashed and echoed.

use std::path::{Path, PathBuf};

use plyap_core::estimators::{Convention, EstimateMode, DEFAULT_SATURATION_THRESHOLD, DEFAULT_STABILITY_TOLERANCE};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Result, RunError};

/// Threshold for systems whose distance never plateaus.
pub const UNBOUNDED_THETA: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    Linear,
    RAdic,
    BakerClassical,
    BakerKoopman,
    Oscillator,
    Barrier,
    BvsBaker,
    OverlapFile,
}

impl SystemKind {
    fn bounded(self) -> bool {
        !matches!(self, SystemKind::Linear | SystemKind::Oscillator | SystemKind::Barrier)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinearEvolution {
    Analytic,
    Grid,
}

/// Config as written by the user. All keys optional except `id` and `system`.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    id: Option<String>,
    system: Option<SystemKind>,
    r: Option<f64>,
    b: Option<f64>,
    evolution: Option<LinearEvolution>,
    cells: Option<usize>,
    init_width: Option<f64>,
    grid: Option<usize>,
    m: Option<u32>,
    omega: Option<f64>,
    omega0: Option<f64>,
    n: Option<usize>,
    q0: Option<f64>,
    p0: Option<f64>,
    alpha: Option<f64>,
    path: Option<PathBuf>,
    convention: Option<Convention>,
    steps: Option<usize>,
    dt: Option<f64>,
    mode: Option<EstimateMode>,
    theta: Option<f64>,
    delta_index: Option<usize>,
    window: Option<(f64, f64)>,
    stability_tolerance: Option<f64>,
    output_dir: Option<PathBuf>,
    seed: Option<u64>,
}

/// System parameters after defaults.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "system", rename_all = "snake_case")]
pub enum SystemSpec {
    Linear { r: f64, b: f64, evolution: LinearEvolution, cells: usize },
    RAdic { r: u32, init_width: f64, grid: usize },
    BakerClassical { m: u32 },
    BakerKoopman { m: u32 },
    Oscillator { omega: f64, omega0: f64 },
    Barrier { omega: f64, omega0: f64 },
    BvsBaker { n: usize, q0: f64, p0: f64, alpha: f64 },
    OverlapFile { path: PathBuf, convention: Convention },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimatorSettings {
    pub mode: EstimateMode,
    pub theta: f64,
    pub delta_index: usize,
    pub window: Option<(f64, f64)>,
    pub stability_tolerance: f64,
}

/// Fully resolved experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub id: String,
    #[serde(flatten)]
    pub system: SystemSpec,
    pub steps: usize,
    pub dt: f64,
    #[serde(flatten)]
    pub estimator: EstimatorSettings,
    pub seed: u64,
    #[serde(skip)]
    pub output_dir: PathBuf,
    /// Where the config came from, for error messages.
    #[serde(skip)]
    pub source: String,
}

fn is_filesystem_safe(id: &str) -> bool {
    !id.is_empty()
        && id.len() <= 128
        && !id.starts_with('.')
        && id.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
}

struct Check<'a> {
    source: &'a str,
}

impl Check<'_> {
    fn fail<T>(&self, field: &str, reason: impl Into<String>) -> Result<T> {
        Err(RunError::config(self.source, field, reason))
    }

    fn require<T>(&self, value: Option<T>, field: &str) -> Result<T> {
        match value {
            Some(v) => Ok(v),
            None => self.fail(field, "missing required key"),
        }
    }

    fn positive(&self, value: f64, field: &str) -> Result<f64> {
        if value > 0.0 && value.is_finite() {
            Ok(value)
        } else {
            self.fail(field, format!("must be a positive finite number, got {value}"))
        }
    }

    fn unit(&self, value: f64, field: &str) -> Result<f64> {
        if (0.0..1.0).contains(&value) {
            Ok(value)
        } else {
            self.fail(field, format!("must lie in [0, 1), got {value}"))
        }
    }
}

/// Keys each system reads, beyond the shared ones.
fn allowed_keys(kind: SystemKind) -> &'static [&'static str] {
    match kind {
        SystemKind::Linear => &["r", "b", "evolution", "cells"],
        SystemKind::RAdic => &["r", "init_width", "grid"],
        SystemKind::BakerClassical | SystemKind::BakerKoopman => &["m"],
        SystemKind::Oscillator | SystemKind::Barrier => &["omega", "omega0", "dt"],
        SystemKind::BvsBaker => &["n", "q0", "p0", "alpha"],
        SystemKind::OverlapFile => &["path", "convention"],
    }
}

const SHARED_KEYS: &[&str] =
    &["id", "system", "steps", "mode", "theta", "delta_index", "window", "stability_tolerance", "output_dir", "seed"];

impl ExperimentConfig {
    /// Parses and validates a config document. `source` names it in errors;
    /// relative data paths resolve against `base_dir`.
    pub fn from_json(text: &str, source: &str, base_dir: &Path) -> Result<Self> {
        let check = Check { source };
        let value: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| RunError::config(source, "<document>", format!("invalid JSON: {e}")))?;
        let object = match value.as_object() {
            Some(o) => o,
            None => return check.fail("<document>", "config must be a JSON object"),
        };
        let raw: RawConfig = serde_path_to_error::deserialize(&value).map_err(|e| {
            let field = e.path().to_string();
            let field = if field == "." { "<document>".to_string() } else { field };
            RunError::config(source, field, e.into_inner().to_string())
        })?;

        let id = check.require(raw.id.clone(), "id")?;
        if !is_filesystem_safe(&id) {
            return check.fail("id", format!("'{id}' is not filesystem-safe (use letters, digits, '-', '_', '.')"));
        }
        let kind = check.require(raw.system, "system")?;
        for key in object.keys() {
            if !SHARED_KEYS.contains(&key.as_str()) && !allowed_keys(kind).contains(&key.as_str()) {
                return check.fail(
                    key,
                    format!("not used by system '{}'", serde_json::to_value(kind).unwrap().as_str().unwrap()),
                );
            }
        }

        let system = resolve_system(&check, &raw, kind, base_dir)?;
        let (default_steps, default_dt) = default_duration(&system);
        let steps = raw.steps.unwrap_or(default_steps);
        if steps == 0 && !matches!(system, SystemSpec::OverlapFile { .. }) {
            return check.fail("steps", "must be at least 1");
        }
        let dt = check.positive(raw.dt.unwrap_or(default_dt), "dt")?;
        if let SystemSpec::Oscillator { omega, .. } | SystemSpec::Barrier { omega, .. } = system {
            if dt * omega > 0.5 {
                return check.fail("dt", format!("dt * omega = {} is too coarse to resolve the dynamics", dt * omega));
            }
        }

        let default_theta = if kind.bounded() { DEFAULT_SATURATION_THRESHOLD } else { UNBOUNDED_THETA };
        let theta = raw.theta.unwrap_or(default_theta);
        if !(theta > 0.0 && theta < std::f64::consts::FRAC_PI_2) {
            return check.fail("theta", format!("must lie in (0, pi/2), got {theta}"));
        }
        let delta_index = raw.delta_index.unwrap_or(1);
        if delta_index == 0 {
            return check.fail("delta_index", "must be at least 1");
        }
        if let Some((t1, t2)) = raw.window {
            if !(t1.is_finite() && t2.is_finite() && t1 < t2) {
                return check.fail("window", format!("needs t1 < t2, got [{t1}, {t2}]"));
            }
        }
        let stability_tolerance = raw.stability_tolerance.unwrap_or(DEFAULT_STABILITY_TOLERANCE);
        if !(stability_tolerance >= 0.0) {
            return check.fail("stability_tolerance", "must be >= 0");
        }
        let output_dir = raw.output_dir.clone().unwrap_or_else(|| PathBuf::from("out").join(&id));

        Ok(ExperimentConfig {
            id,
            system,
            steps,
            dt,
            estimator: EstimatorSettings {
                mode: raw.mode.unwrap_or_default(),
                theta,
                delta_index,
                window: raw.window,
                stability_tolerance,
            },
            seed: raw.seed.unwrap_or(0),
            output_dir,
            source: source.to_string(),
        })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| RunError::config(path.display().to_string(), "<document>", format!("cannot read: {e}")))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_json(&text, &path.display().to_string(), base)
    }

    /// Resolved config as canonical JSON (sorted keys, no output location).
    pub fn canonical_json(&self) -> String {
        // serde_json maps are ordered by key, so this is canonical
        let value = serde_json::to_value(self).expect("config serializes");
        serde_json::to_string(&value).expect("value serializes")
    }

    /// SHA-256 of [`Self::canonical_json`], hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }
}

fn resolve_system(check: &Check, raw: &RawConfig, kind: SystemKind, base_dir: &Path) -> Result<SystemSpec> {
    Ok(match kind {
        SystemKind::Linear => {
            let r = check.require(raw.r, "r")?;
            if !(r > 1.0 && r.is_finite()) {
                return check.fail("r", format!("linear map needs r > 1, got {r}"));
            }
            let b = check.positive(raw.b.unwrap_or(0.25), "b")?;
            if b > 1.0 {
                return check.fail("b", "square width must be at most 1");
            }
            let evolution = raw.evolution.unwrap_or(LinearEvolution::Analytic);
            if evolution == LinearEvolution::Grid && r.fract() != 0.0 {
                return check.fail("r", "grid evolution needs an integer r");
            }
            SystemSpec::Linear { r, b, evolution, cells: raw.cells.unwrap_or(16) }
        }
        SystemKind::RAdic => {
            let r = check.require(raw.r, "r")?;
            if !(r >= 2.0 && r.fract() == 0.0 && r <= 64.0) {
                return check.fail("r", format!("r-adic map needs an integer 2 <= r <= 64, got {r}"));
            }
            let grid = raw.grid.unwrap_or(1 << 16);
            if grid == 0 {
                return check.fail("grid", "must be positive");
            }
            let init_width = check.positive(raw.init_width.unwrap_or(1.0 / 1024.0), "init_width")?;
            if init_width > 1.0 || init_width * (grid as f64) < 1.0 - 1e-9 {
                return check.fail("init_width", "must cover at least one cell and at most the unit interval");
            }
            SystemSpec::RAdic { r: r as u32, init_width, grid }
        }
        SystemKind::BakerClassical | SystemKind::BakerKoopman => {
            let m = raw.m.unwrap_or(10);
            if !(1..=12).contains(&m) {
                return check.fail("m", format!("grid exponent must lie in 1..=12, got {m}"));
            }
            if kind == SystemKind::BakerClassical {
                SystemSpec::BakerClassical { m }
            } else {
                SystemSpec::BakerKoopman { m }
            }
        }
        SystemKind::Oscillator | SystemKind::Barrier => {
            let omega = check.positive(check.require(raw.omega, "omega")?, "omega")?;
            let default_omega0 = if kind == SystemKind::Oscillator { omega / 2.0 } else { 1.0 };
            let omega0 = check.positive(raw.omega0.unwrap_or(default_omega0), "omega0")?;
            if kind == SystemKind::Oscillator {
                SystemSpec::Oscillator { omega, omega0 }
            } else {
                SystemSpec::Barrier { omega, omega0 }
            }
        }
        SystemKind::BvsBaker => {
            let n = raw.n.unwrap_or(1800);
            if n < 2 || !n.is_multiple_of(2) {
                return check.fail("n", format!("dimension must be even and >= 2, got {n}"));
            }
            let q0 = check.unit(raw.q0.unwrap_or(0.003), "q0")?;
            let p0 = check.unit(raw.p0.unwrap_or(0.003), "p0")?;
            let alpha = check.positive(raw.alpha.unwrap_or(1e-4), "alpha")?;
            SystemSpec::BvsBaker { n, q0, p0, alpha }
        }
        SystemKind::OverlapFile => {
            let path = check.require(raw.path.clone(), "path")?;
            let path = if path.is_relative() { base_dir.join(path) } else { path };
            SystemSpec::OverlapFile { path, convention: raw.convention.unwrap_or_default() }
        }
    })
}

/// Default `(steps, dt)` per system.
fn default_duration(system: &SystemSpec) -> (usize, f64) {
    match *system {
        SystemSpec::Linear { .. } => (40, 1.0),
        SystemSpec::RAdic { .. } => (16, 1.0),
        SystemSpec::BakerClassical { m } | SystemSpec::BakerKoopman { m } => (m as usize + 6, 1.0),
        SystemSpec::Oscillator { omega, .. } => ((100.0 / omega / 0.005).round() as usize, 0.005),
        SystemSpec::Barrier { omega, .. } => ((20.0 / omega / 0.005).round() as usize, 0.005),
        SystemSpec::BvsBaker { .. } => (20, 1.0),
        SystemSpec::OverlapFile { .. } => (0, 1.0),
    }
}
