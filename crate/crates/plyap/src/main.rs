use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use plyap::config::ExperimentConfig;
use plyap::figure::{figure, FigureId};
use plyap::output::write_result;
use plyap::{run, RunError};
use plyap_core::estimators::{Classification, Convention, EstimateMode};

#[derive(Parser)]
#[command(name = "plyap", version, about = "Projective Lyapunov exponents from configs, presets and overlap data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment described by a JSON config
    Run { config: PathBuf },
    /// Regenerate a figure's data and plot
    Figure {
        id: FigureId,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Estimate exponents from a `t,overlap` CSV
    Ingest {
        csv: PathBuf,
        #[arg(long, value_parser = parse_convention)]
        convention: Convention,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Saturation threshold in radians
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long, value_parser = parse_mode)]
        mode: Option<EstimateMode>,
        #[arg(long)]
        delta_index: Option<usize>,
        /// Fit window as `t1,t2`
        #[arg(long, value_parser = parse_window)]
        window: Option<(f64, f64)>,
    },
    /// Run the built-in property checks
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn parse_convention(s: &str) -> Result<Convention, String> {
    s.parse().map_err(|e: plyap_core::Error| e.to_string())
}

fn parse_mode(s: &str) -> Result<EstimateMode, String> {
    s.parse().map_err(|e: plyap_core::Error| e.to_string())
}

fn parse_window(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected t1,t2")?;
    let a = a.trim().parse::<f64>().map_err(|e| e.to_string())?;
    let b = b.trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok((a, b))
}

fn report(res: &plyap::ExperimentResult) {
    let class = match res.classification {
        Classification::Stable => "stable".to_string(),
        Classification::Unstable { lambda } => format!("unstable, lambda = {lambda:.6}"),
        Classification::Saturated { saturation_time: Some(t) } => format!("saturated at t = {t}"),
        Classification::Saturated { saturation_time: None } => "saturated".to_string(),
    };
    println!("{}: {class} -> {}", res.config.id, res.config.output_dir.display());
}

fn ingest_config(
    csv: &Path,
    convention: Convention,
    out: &Path,
    cli: IngestOptions,
) -> Result<ExperimentConfig, RunError> {
    let stem = csv.file_stem().and_then(|s| s.to_str()).unwrap_or("overlap");
    let id: String =
        stem.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect();
    let mut doc = serde_json::json!({
        "id": id,
        "system": "overlap_file",
        "path": csv,
        "convention": convention,
        "output_dir": out.join(&id),
    });
    let obj = doc.as_object_mut().expect("object literal");
    if let Some(t) = cli.theta {
        obj.insert("theta".into(), t.into());
    }
    if let Some(m) = cli.mode {
        obj.insert("mode".into(), serde_json::to_value(m).expect("mode serializes"));
    }
    if let Some(d) = cli.delta_index {
        obj.insert("delta_index".into(), d.into());
    }
    if let Some((a, b)) = cli.window {
        obj.insert("window".into(), serde_json::json!([a, b]));
    }
    ExperimentConfig::from_json(&doc.to_string(), &csv.display().to_string(), Path::new("."))
}

struct IngestOptions {
    theta: Option<f64>,
    mode: Option<EstimateMode>,
    delta_index: Option<usize>,
    window: Option<(f64, f64)>,
}

fn execute(command: Command) -> Result<bool, RunError> {
    match command {
        Command::Run { config } => {
            let cfg = ExperimentConfig::from_file(&config)?;
            let res = run(&cfg)?;
            write_result(&res, &cfg.output_dir)?;
            report(&res);
        }
        Command::Figure { id, out } => {
            let (results, svg) = figure(id, &out)?;
            for res in &results {
                report(res);
            }
            println!("plot: {}", svg.display());
        }
        Command::Ingest { csv, convention, out, theta, mode, delta_index, window } => {
            if !csv.is_file() {
                return Err(RunError::Data { path: csv.display().to_string(), reason: "file not found".into() });
            }
            let cfg = ingest_config(&csv, convention, &out, IngestOptions { theta, mode, delta_index, window })?;
            let res = run(&cfg)?;
            write_result(&res, &cfg.output_dir)?;
            report(&res);
        }
        Command::Selftest { seed } => {
            let checks = plyap::selftest::selftest(seed);
            let mut all = true;
            for c in &checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
                all &= c.passed;
            }
            return Ok(all);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    plyap::configure_threads();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(4),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
