//! Result files. CSVs carry a `# config_hash=` first line and print every
//! float with 17 significant digits so reruns are byte-identical.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::json;

use crate::error::{Result, RunError};
use crate::run::ExperimentResult;

pub const SUMMARY_SCHEMA_ID: &str = "https://plyap.invalid/schema/summary-v1.json";

/// The published summary.json schema.
pub const SUMMARY_SCHEMA: &str = include_str!("../schema/summary.schema.json");

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn header(hash: &str, columns: &str) -> String {
    format!("# config_hash={hash}\n{columns}\n")
}

pub fn distance_csv(res: &ExperimentResult, hash: &str) -> String {
    let d = &res.distances;
    let mut out = header(hash, "t,distance,log_overlap,saturated");
    for i in 0..d.len() {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            float(d.times()[i]),
            float(d.values()[i]),
            float(d.log_overlaps()[i]),
            u8::from(d.saturated()[i])
        );
    }
    out
}

pub fn divergence_csv(res: &ExperimentResult, hash: &str) -> String {
    let l = &res.divergences;
    let mut out = header(hash, "t,log_divergence,saturated");
    for i in 0..l.len() {
        let _ = writeln!(out, "{},{},{}", float(l.times()[i]), float(l.log_values()[i]), u8::from(l.saturated()[i]));
    }
    out
}

pub fn lambda_csv(res: &ExperimentResult, hash: &str) -> String {
    let mut out = header(hash, "t,lambda_t");
    for (t, v) in &res.finite_time {
        let _ = writeln!(out, "{},{}", float(*t), float(*v));
    }
    out
}

/// Seconds since the epoch for the provenance stamp; `SOURCE_DATE_EPOCH` wins.
fn timestamp() -> String {
    let secs = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.parse::<i64>().ok())
        .unwrap_or_else(|| time::OffsetDateTime::now_utc().unix_timestamp());
    time::OffsetDateTime::from_unix_timestamp(secs)
        .unwrap_or(time::OffsetDateTime::UNIX_EPOCH)
        .format(&time::format_description::well_known::Rfc3339)
        .expect("rfc3339 formats any valid date")
}

pub fn summary(res: &ExperimentResult, hash: &str) -> serde_json::Value {
    let cfg = &res.config;
    let saturated = res.distances.saturated().iter().filter(|s| **s).count();
    json!({
        "$schema": SUMMARY_SCHEMA_ID,
        "config_hash": hash,
        "id": cfg.id,
        "classification": res.classification,
        "estimate": res.estimate.as_ref().map(|e| json!({
            "asymptotic_value": e.asymptotic_value,
            "fit_window": [e.fit_window.0, e.fit_window.1],
            "method": e.method,
            "residual": e.residual,
            "points_used": e.points_used,
            "growth_detected": e.growth_detected,
        })),
        "estimate_note": res.estimate_note,
        "saturation_time": res.saturation_time,
        "plateau_distance": res.plateau,
        "series": {
            "points": res.distances.len(),
            "saturated_points": saturated,
            "finite_time_points": res.finite_time.len(),
        },
        "provenance": {
            "config": serde_json::to_value(cfg).expect("config serializes"),
            "package": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "generated_at": timestamp(),
            "wall_time_seconds": res.wall_time,
        },
    })
}

fn write(path: PathBuf, contents: &str) -> Result<()> {
    std::fs::write(&path, contents).map_err(|source| RunError::Io { path, source })
}

/// Writes the four result files into `dir`.
pub fn write_result(res: &ExperimentResult, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|source| RunError::Io { path: dir.to_path_buf(), source })?;
    let hash = res.config.hash();
    write(dir.join("distance.csv"), &distance_csv(res, &hash))?;
    write(dir.join("divergence.csv"), &divergence_csv(res, &hash))?;
    write(dir.join("lambda_t.csv"), &lambda_csv(res, &hash))?;
    let text = serde_json::to_string_pretty(&summary(res, &hash)).expect("summary serializes");
    write(dir.join("summary.json"), &(text + "\n"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentConfig;

    #[test]
    fn csv_layout() {
        let cfg = ExperimentConfig::from_json(
            r#"{"id": "lin", "system": "linear", "r": 2, "steps": 5}"#,
            "t",
            Path::new("."),
        )
        .unwrap();
        let res = crate::run::run(&cfg).unwrap();
        let text = distance_csv(&res, "abc");
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# config_hash=abc"));
        assert_eq!(lines.next(), Some("t,distance,log_overlap,saturated"));
        assert_eq!(lines.next(), Some("0.0000000000000000e0,0.0000000000000000e0,0.0000000000000000e0,0"));
        assert_eq!(lines.count(), 5);
    }
}
