//! Finite-time and asymptotic P-Lyapunov exponents.
//!
//! A path of states is reduced to a [`DistanceSeries`] against a fixed
//! reference ray, then to a [`DivergenceSeries`] of `ln Lambda(t)`. The
//! exponent compares neighbouring points of the same path (the perturbed state
//! at `t` is the path itself at `t + dt`):
//!
//! ```text
//! lambda_P(t) = (1/t) [ ln|Lambda(t + dt) - Lambda(t)| - ln|Lambda(dt) - Lambda(0)| ]
//! ```
//!
//! All differences are formed from `ln Lambda` with [`log_abs_diff_exp`], so
//! divergences spanning hundreds of orders of magnitude never overflow.

use std::f64::consts::{LN_2, PI};
use std::io::Read;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::classical::MapDescriptor;
use crate::error::{Error, Result};
use crate::geometry::{
    bounded_euclidean_distance, classical_divergence, euclidean_phase_distance, fubini_study_distance, log_overlap,
    log_projective_divergence, PhasePoint, ProjectiveState,
};
use crate::numeric::{linear_fit, log_abs_diff_exp};

/// Default saturation threshold `theta` in radians.
pub const DEFAULT_SATURATION_THRESHOLD: f64 = 0.05;

/// Minimum number of points in a regression window.
pub const MIN_WINDOW_POINTS: usize = 4;

/// Growth of `ln|dLambda|` over its initial value that opens the automatic window.
pub const AUTO_WINDOW_GROWTH: f64 = 1.0;

/// Default tolerance below which a fitted exponent counts as stable.
pub const DEFAULT_STABILITY_TOLERANCE: f64 = 5e-3;

fn check_times(times: &[f64]) -> Result<()> {
    for (i, w) in times.windows(2).enumerate() {
        if !(w[1] > w[0]) {
            return Err(Error::Data {
                row: i + 1,
                reason: format!("times must be strictly increasing ({} then {})", w[0], w[1]),
            });
        }
    }
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::Domain("times must be finite".into()));
    }
    Ok(())
}

fn check_threshold(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta < PI / 2.0) {
        return Err(Error::Domain(format!("saturation threshold must lie in (0, pi/2), got {theta}")));
    }
    Ok(())
}

/// `d_P = 2 arccos v` from `ln v`, keeping precision at both ends.
fn distance_from_log_overlap(lv: f64) -> f64 {
    if lv >= -LN_2 {
        4.0 * (0.5 * -lv.exp_m1()).sqrt().asin() + 0.0 // +0.0 turns -0 into 0
    } else {
        PI - 2.0 * lv.exp().asin()
    }
}

/// Distances `d_P(t)` of a path from a fixed reference ray.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceSeries {
    times: Vec<f64>,
    values: Vec<f64>,
    log_overlaps: Vec<f64>,
    saturated: Vec<bool>,
    threshold: f64,
}

impl DistanceSeries {
    /// Builds a series from `ln v(t)`, `v` being the overlap magnitude.
    pub fn from_log_overlaps(times: Vec<f64>, log_overlaps: Vec<f64>, theta: f64) -> Result<Self> {
        if times.len() != log_overlaps.len() {
            return Err(Error::DimensionMismatch(times.len(), log_overlaps.len()));
        }
        if let Some(row) = log_overlaps.iter().position(|lv| lv.is_nan() || *lv > 1e-12) {
            return Err(Error::Data { row, reason: "log overlap must be <= 0".into() });
        }
        let log_overlaps: Vec<f64> = log_overlaps.into_iter().map(|lv| lv.min(0.0)).collect();
        let values = log_overlaps.iter().map(|&lv| distance_from_log_overlap(lv)).collect();
        Self::assemble(times, values, log_overlaps, theta)
    }

    fn assemble(times: Vec<f64>, values: Vec<f64>, log_overlaps: Vec<f64>, theta: f64) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::InsufficientData("empty series".into()));
        }
        check_times(&times)?;
        check_threshold(theta)?;
        // pi - d_P = 2 arcsin v < theta  <=>  v < sin(theta / 2)
        let cut = (0.5 * theta).sin().ln();
        let saturated = log_overlaps.iter().map(|&lv| lv < cut).collect();
        Ok(DistanceSeries { times, values, log_overlaps, saturated, threshold: theta })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn log_overlaps(&self) -> &[f64] {
        &self.log_overlaps
    }

    pub fn saturated(&self) -> &[bool] {
        &self.saturated
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Flags every point at or after `t_b` as saturated.
    pub fn mark_saturated_from(&mut self, t_b: f64) {
        for (t, s) in self.times.iter().zip(self.saturated.iter_mut()) {
            if *t >= t_b {
                *s = true;
            }
        }
    }

    /// `ln Lambda` at every point, carrying the saturation flags along.
    pub fn divergence(&self) -> Result<DivergenceSeries> {
        let log_values = self
            .values
            .iter()
            .zip(&self.log_overlaps)
            .map(|(&d, &lv)| {
                if lv < -LN_2 {
                    log_projective_divergence(lv)
                } else if d == 0.0 {
                    Ok(f64::NEG_INFINITY)
                } else {
                    Ok(d.ln() - (PI - d).ln())
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DivergenceSeries { times: self.times.clone(), log_values, saturated: self.saturated.clone() })
    }
}

/// `ln Lambda(t)` with saturation flags.
///
/// `-inf` marks `Lambda = 0`, i.e. a state on the reference ray.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceSeries {
    times: Vec<f64>,
    log_values: Vec<f64>,
    saturated: Vec<bool>,
}

impl DivergenceSeries {
    pub fn new(times: Vec<f64>, log_values: Vec<f64>, saturated: Vec<bool>) -> Result<Self> {
        if times.len() != log_values.len() || times.len() != saturated.len() {
            return Err(Error::DimensionMismatch(times.len(), log_values.len()));
        }
        check_times(&times)?;
        Ok(DivergenceSeries { times, log_values, saturated })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn log_values(&self) -> &[f64] {
        &self.log_values
    }

    pub fn saturated(&self) -> &[bool] {
        &self.saturated
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// True when every point sits on the reference ray.
    pub fn is_degenerate(&self) -> bool {
        self.log_values.iter().all(|v| *v == f64::NEG_INFINITY)
    }

    /// Time of the first saturated point, if any.
    pub fn first_saturated_time(&self) -> Option<f64> {
        self.saturated.iter().position(|s| *s).map(|i| self.times[i])
    }

    /// Copy with every log value shifted by `ln c` (Lambda scaled by `c`).
    pub fn scaled(&self, c: f64) -> Self {
        let shift = c.ln();
        DivergenceSeries {
            times: self.times.clone(),
            log_values: self.log_values.iter().map(|v| v + shift).collect(),
            saturated: self.saturated.clone(),
        }
    }

    /// `ln|Lambda(t_i + dt) - Lambda(t_i)|` for every unsaturated stencil.
    fn log_increments(&self, delta_index: usize) -> Vec<(usize, f64)> {
        let n = self.len();
        (0..n.saturating_sub(delta_index))
            .filter(|&i| !self.saturated[i] && !self.saturated[i + delta_index])
            .map(|i| (i, log_abs_diff_exp(self.log_values[i + delta_index], self.log_values[i])))
            .collect()
    }
}

/// Element-wise distances and divergences of `path` against `reference`.
pub fn divergence_series(
    path: &[ProjectiveState],
    times: &[f64],
    reference: &ProjectiveState,
    theta: f64,
) -> Result<(DistanceSeries, DivergenceSeries)> {
    if path.is_empty() {
        return Err(Error::InsufficientData("empty path".into()));
    }
    if path.len() != times.len() {
        return Err(Error::DimensionMismatch(path.len(), times.len()));
    }
    let mut values = Vec::with_capacity(path.len());
    let mut log_overlaps = Vec::with_capacity(path.len());
    for state in path {
        log_overlaps.push(log_overlap(reference, state)?);
        values.push(fubini_study_distance(reference, state)?);
    }
    let distances = DistanceSeries::assemble(times.to_vec(), values, log_overlaps, theta)?;
    let divergences = distances.divergence()?;
    Ok((distances, divergences))
}

/// Finite-time exponent curve `(t, lambda_P(t))` with the single-path
/// perturbation `delta_index` grid steps ahead.
///
/// Points whose stencil touches a saturated entry, and points where the
/// increment vanishes exactly, are omitted.
pub fn finite_time_p_lyapunov(series: &DivergenceSeries, delta_index: usize) -> Result<Vec<(f64, f64)>> {
    if delta_index == 0 {
        return Err(Error::Domain("delta_index must be positive".into()));
    }
    let n = series.len();
    if n < delta_index + 2 {
        return Err(Error::InsufficientData(format!("need at least {} points, got {n}", delta_index + 2)));
    }
    let sat = series.saturated();
    if sat[0] || sat[delta_index] {
        return Err(Error::AllSaturated { saturation_time: series.first_saturated_time() });
    }
    let lv = series.log_values();
    let t0 = series.times()[0];
    let denominator = log_abs_diff_exp(lv[delta_index], lv[0]);
    if denominator == f64::NEG_INFINITY {
        return Err(Error::DegeneratePath("Lambda(dt) equals Lambda(0)".into()));
    }
    let curve: Vec<(f64, f64)> = series
        .log_increments(delta_index)
        .into_iter()
        .filter(|&(i, inc)| i > 0 && inc.is_finite())
        .map(|(i, inc)| {
            let t = series.times()[i] - t0;
            (t, (inc - denominator) / t)
        })
        .collect();
    if curve.len() < 2 {
        return Err(Error::InsufficientData(format!("{} usable points", curve.len())));
    }
    Ok(curve)
}

/// How the asymptotic value is extracted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EstimateMode {
    /// Mean of the last quartile of the finite-time curve.
    Pointwise,
    /// Least-squares slope of `ln|dLambda|` against time.
    #[default]
    Regression,
}

impl FromStr for EstimateMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pointwise" => Ok(EstimateMode::Pointwise),
            "regression" => Ok(EstimateMode::Regression),
            other => Err(Error::Domain(format!("unknown estimate mode `{other}`"))),
        }
    }
}

/// Result of [`asymptotic_estimate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentEstimate {
    pub finite_time_curve: Vec<(f64, f64)>,
    pub asymptotic_value: f64,
    pub fit_window: (f64, f64),
    pub method: EstimateMode,
    pub saturation_time: Option<f64>,
    pub residual: f64,
    pub points_used: usize,
    /// Whether `ln|dLambda|` ever rose [`AUTO_WINDOW_GROWTH`] above its start.
    pub growth_detected: bool,
}

/// Windowed asymptotic exponent from a divergence series.
///
/// Without an explicit window the regression starts where `ln|dLambda|` first
/// exceeds its initial value by [`AUTO_WINDOW_GROWTH`] and runs to the last
/// unsaturated stencil; the start is pulled back if needed so the window keeps
/// [`MIN_WINDOW_POINTS`] points. When no growth occurs the whole series is fit.
pub fn asymptotic_estimate(
    series: &DivergenceSeries,
    mode: EstimateMode,
    window: Option<(f64, f64)>,
    delta_index: usize,
) -> Result<ExponentEstimate> {
    if delta_index == 0 {
        return Err(Error::Domain("delta_index must be positive".into()));
    }
    let saturation_time = series.first_saturated_time();
    let increments = series.log_increments(delta_index);
    if increments.is_empty() {
        return Err(Error::AllSaturated { saturation_time });
    }
    if series.is_degenerate() || increments.iter().all(|(_, v)| *v == f64::NEG_INFINITY) {
        return Err(Error::DegeneratePath("Lambda is constant along the path".into()));
    }
    let finite_time_curve = finite_time_p_lyapunov(series, delta_index)?;
    let times = series.times();

    let points: Vec<(f64, f64)> =
        increments.iter().filter(|(_, v)| v.is_finite()).map(|&(i, v)| (times[i], v)).collect();
    let initial = points[0].1;
    let growth_detected = points.iter().any(|(_, v)| *v > initial + AUTO_WINDOW_GROWTH);

    let selected: Vec<(f64, f64)> = match window {
        Some((t1, t2)) => {
            if !(t1 <= t2) {
                return Err(Error::Domain(format!("window ({t1}, {t2}) is empty")));
            }
            let sel: Vec<_> = points.iter().copied().filter(|(t, _)| *t >= t1 && *t <= t2).collect();
            if sel.len() < MIN_WINDOW_POINTS {
                return Err(Error::InsufficientData(format!(
                    "window ({t1}, {t2}) holds {} unsaturated points, need {MIN_WINDOW_POINTS}",
                    sel.len()
                )));
            }
            sel
        }
        None => {
            if points.len() < MIN_WINDOW_POINTS {
                return Err(Error::InsufficientData(format!(
                    "{} unsaturated points, need {MIN_WINDOW_POINTS}",
                    points.len()
                )));
            }
            let start = points
                .iter()
                .position(|(_, v)| *v > initial + AUTO_WINDOW_GROWTH)
                .unwrap_or(0)
                .min(points.len() - MIN_WINDOW_POINTS);
            points[start..].to_vec()
        }
    };
    let fit_window = (selected[0].0, selected[selected.len() - 1].0);

    let (asymptotic_value, residual, points_used) = match mode {
        EstimateMode::Regression => {
            let xs: Vec<f64> = selected.iter().map(|p| p.0).collect();
            let ys: Vec<f64> = selected.iter().map(|p| p.1).collect();
            let (_, slope, rms) = linear_fit(&xs, &ys);
            (slope, rms, selected.len())
        }
        EstimateMode::Pointwise => {
            let t0 = times[0];
            let curve: Vec<f64> = finite_time_curve
                .iter()
                .filter(|(t, _)| *t + t0 >= fit_window.0 && *t + t0 <= fit_window.1)
                .map(|p| p.1)
                .collect();
            if curve.is_empty() {
                return Err(Error::InsufficientData("no finite-time points in window".into()));
            }
            let tail = &curve[curve.len() - curve.len().div_ceil(4)..];
            let mean = tail.iter().sum::<f64>() / tail.len() as f64;
            let rms = (tail.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / tail.len() as f64).sqrt();
            (mean, rms, tail.len())
        }
    };
    if !asymptotic_value.is_finite() {
        return Err(Error::NumericalOverflow("non-finite exponent".into()));
    }
    Ok(ExponentEstimate {
        finite_time_curve,
        asymptotic_value,
        fit_window,
        method: mode,
        saturation_time,
        residual,
        points_used,
        growth_detected,
    })
}

/// Stability verdict for a path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum Classification {
    Stable,
    Unstable { lambda: f64 },
    Saturated { saturation_time: Option<f64> },
}

/// Classifies an estimator outcome. Stationary paths and paths without growth
/// are stable; an all-saturated series maps to [`Classification::Saturated`].
pub fn classify(outcome: &Result<ExponentEstimate>, stability_tolerance: f64) -> Result<Classification> {
    match outcome {
        Ok(est) if !est.growth_detected || est.asymptotic_value <= stability_tolerance => Ok(Classification::Stable),
        Ok(est) => Ok(Classification::Unstable { lambda: est.asymptotic_value }),
        Err(Error::DegeneratePath(_)) => Ok(Classification::Stable),
        Err(Error::AllSaturated { saturation_time }) => {
            Ok(Classification::Saturated { saturation_time: *saturation_time })
        }
        Err(e) => Err(e.clone()),
    }
}

/// First time after which `d_P` stays within the series threshold of its
/// terminal plateau (or of `plateau_value`).
///
/// Without an explicit plateau the terminal value is the median of the last
/// quarter and the holding stretch must cover at least `max(3, n/8)` points.
/// A series that is flat from its first point has no onset and yields `None`.
pub fn detect_saturation(series: &DistanceSeries, plateau_value: Option<f64>) -> Option<f64> {
    let d = series.values();
    let n = d.len();
    let theta = series.threshold();
    let (plateau, min_hold) = match plateau_value {
        Some(p) => (p, 3),
        None => {
            if n < 4 {
                return None;
            }
            let mut tail = d[n - n.div_ceil(4)..].to_vec();
            tail.sort_by(f64::total_cmp);
            (tail[tail.len() / 2], 3.max(n.div_ceil(8)))
        }
    };
    let start = d.iter().rposition(|v| (v - plateau).abs() > theta).map_or(0, |i| i + 1);
    if start == 0 || start >= n || n - start < min_hold {
        return None;
    }
    Some(series.times()[start])
}

/// Declared meaning of an overlap column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// Values are `|<a, b>|`.
    #[default]
    Amplitude,
    /// Values are `|<a, b>|^2`.
    Probability,
}

impl FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "amplitude" => Ok(Convention::Amplitude),
            "probability" => Ok(Convention::Probability),
            other => Err(Error::Domain(format!("unknown overlap convention `{other}`"))),
        }
    }
}

/// Externally measured overlaps `O(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapSeries {
    times: Vec<f64>,
    overlaps: Vec<f64>,
    convention: Convention,
}

impl OverlapSeries {
    /// Validates ranges; error rows are zero-based indices into the data.
    pub fn new(times: Vec<f64>, overlaps: Vec<f64>, convention: Convention) -> Result<Self> {
        if times.len() != overlaps.len() {
            return Err(Error::DimensionMismatch(times.len(), overlaps.len()));
        }
        if let Some(row) = overlaps.iter().position(|o| !(0.0..=1.0).contains(o)) {
            return Err(Error::Data { row, reason: format!("overlap {} outside [0, 1]", overlaps[row]) });
        }
        check_times(&times)?;
        Ok(OverlapSeries { times, overlaps, convention })
    }

    /// Reads a `t,overlap` CSV. Error rows are 1-based file line numbers.
    pub fn from_csv<R: Read>(reader: R, convention: Convention) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let header = rdr.headers().map_err(|e| Error::Data { row: 1, reason: e.to_string() })?.clone();
        if header.len() != 2 || &header[0] != "t" || &header[1] != "overlap" {
            return Err(Error::Data {
                row: 1,
                reason: format!("expected header `t,overlap`, got `{}`", header.iter().collect::<Vec<_>>().join(",")),
            });
        }
        let mut times = Vec::new();
        let mut overlaps = Vec::new();
        for (i, record) in rdr.records().enumerate() {
            let line = i + 2;
            let record = record.map_err(|e| Error::Data { row: line, reason: e.to_string() })?;
            let parse = |k: usize| -> Result<f64> {
                record
                    .get(k)
                    .ok_or_else(|| Error::Data { row: line, reason: "missing column".into() })?
                    .parse::<f64>()
                    .map_err(|e| Error::Data { row: line, reason: e.to_string() })
            };
            times.push(parse(0)?);
            overlaps.push(parse(1)?);
        }
        if times.is_empty() {
            return Err(Error::InsufficientData("no data rows".into()));
        }
        Self::new(times, overlaps, convention).map_err(|e| match e {
            Error::Data { row, reason } => Error::Data { row: row + 2, reason },
            other => other,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn overlaps(&self) -> &[f64] {
        &self.overlaps
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    /// `ln v(t)` with `v` the amplitude overlap.
    pub fn log_amplitudes(&self) -> Vec<f64> {
        let factor = match self.convention {
            Convention::Amplitude => 1.0,
            Convention::Probability => 0.5,
        };
        self.overlaps.iter().map(|o| factor * o.ln()).collect()
    }
}

/// `d_P = 2 arccos v` with `v = O` (amplitude) or `v = sqrt(O)` (probability),
/// followed by the divergence series.
pub fn ingest_overlap_series(raw: &OverlapSeries, theta: f64) -> Result<(DistanceSeries, DivergenceSeries)> {
    let distances = DistanceSeries::from_log_overlaps(raw.times.clone(), raw.log_amplitudes(), theta)?;
    let divergences = distances.divergence()?;
    Ok((distances, divergences))
}

/// Two-trajectory exponent, computed directly and through the bounded metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryExponent {
    /// `(1/t) sum ln(d_after / d_before)` over renormalization segments.
    pub direct: f64,
    /// Same, with distances passed through the bounded metric and its divergence.
    pub via_divergence: f64,
}

/// Classical Lyapunov exponent of `map` along the orbit of `x0`.
///
/// The companion point starts `eps * max(1, |x|)` away along the first axis and
/// is pulled back to that separation every `renormalize_every` steps. Periodic
/// coordinates use the minimal-image difference.
pub fn trajectory_lyapunov(
    map: &MapDescriptor,
    x0: &PhasePoint,
    eps: f64,
    steps: usize,
    renormalize_every: usize,
) -> Result<TrajectoryExponent> {
    map.validate()?;
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Domain(format!("eps must be positive, got {eps}")));
    }
    if steps == 0 || renormalize_every == 0 {
        return Err(Error::Domain("steps and renormalize_every must be positive".into()));
    }
    if x0.dim() != map.dim() {
        return Err(Error::DimensionMismatch(x0.dim(), map.dim()));
    }
    let separation = |x: &PhasePoint, y: &PhasePoint| -> Result<f64> {
        let wrapped: Vec<f64> =
            x.0.iter()
                .zip(&y.0)
                .map(|(a, b)| {
                    let diff = b - a;
                    if map.is_periodic() {
                        diff - diff.round()
                    } else {
                        diff
                    }
                })
                .collect();
        euclidean_phase_distance(&PhasePoint(vec![0.0; wrapped.len()]), &PhasePoint(wrapped))
    };
    let offset = |x: &PhasePoint| -> (PhasePoint, f64) {
        let norm = x.0.iter().map(|c| c * c).sum::<f64>().sqrt();
        let delta = eps * norm.max(1.0);
        let mut y = x.0.clone();
        y[0] += delta;
        (PhasePoint(y), delta)
    };

    let mut x = x0.clone();
    let (mut y, mut d_start) = offset(&x);
    let mut log_direct = 0.0;
    let mut log_bounded = 0.0;
    for step in 1..=steps {
        x = map.apply(&x)?;
        y = map.apply(&y)?;
        if x.0.iter().chain(&y.0).any(|c| !c.is_finite()) {
            return Err(Error::NumericalOverflow(format!("trajectory left f64 range at step {step}")));
        }
        if step % renormalize_every == 0 || step == steps {
            let d_end = separation(&x, &y)?;
            log_direct += (d_end / d_start).ln();
            let before = classical_divergence(bounded_euclidean_distance(d_start)?)?;
            let after = classical_divergence(bounded_euclidean_distance(d_end)?)?;
            log_bounded += (after / before).ln();
            (y, d_start) = offset(&x);
        }
    }
    Ok(TrajectoryExponent { direct: log_direct / steps as f64, via_divergence: log_bounded / steps as f64 })
}
