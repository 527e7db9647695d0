//! Ray-space states and the distance/divergence primitives built on them.
//!
//! A [`ProjectiveState`] stores an amplitude vector together with the basis it
//! is expressed in. Only the ray matters: every distance normalizes internally,
//! so states with different normalization (or global phase) can be mixed freely.
//!
//! The Fubini-Study distance between rays is `d_P = 2 arccos |<a, b>| / (|a| |b|)`
//! and lies in `[0, pi]`. Its divergence function `Lambda = d / (pi - d)` is
//! unbounded; estimators consume `ln Lambda` through
//! [`log_projective_divergence`], which stays finite long after the overlap
//! itself has underflowed.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cell layout behind a state's amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Basis {
    /// `cells` uniform cells over `[lo, hi)`.
    Grid1d { cells: usize, lo: f64, hi: f64 },
    /// `rows x cols` cells of size `dx x dy`, stored row-major (row = y index).
    Grid2d { rows: usize, cols: usize, dx: f64, dy: f64 },
    /// Plain orthonormal basis of dimension `n`.
    Discrete { n: usize },
}

impl Basis {
    pub fn grid_1d(cells: usize, lo: f64, hi: f64) -> Self {
        Basis::Grid1d { cells, lo, hi }
    }

    pub fn discrete(n: usize) -> Self {
        Basis::Discrete { n }
    }

    /// Number of amplitudes a state on this basis carries.
    pub fn len(&self) -> usize {
        match *self {
            Basis::Grid1d { cells, .. } => cells,
            Basis::Grid2d { rows, cols, .. } => rows * cols,
            Basis::Discrete { n } => n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Per-cell integration weight (midpoint quadrature).
    pub fn weight(&self) -> f64 {
        match *self {
            Basis::Grid1d { cells, lo, hi } => (hi - lo) / cells as f64,
            Basis::Grid2d { dx, dy, .. } => dx * dy,
            Basis::Discrete { .. } => 1.0,
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Basis::Grid1d { cells, lo, hi } => write!(f, "grid-1d({cells} cells on [{lo}, {hi}))"),
            Basis::Grid2d { rows, cols, dx, dy } => {
                write!(f, "grid-2d({rows}x{cols}, cell {dx}x{dy})")
            }
            Basis::Discrete { n } => write!(f, "discrete({n})"),
        }
    }
}

/// Representative of a ray in (real or complex) projective space.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveState {
    amplitudes: Vec<Complex64>,
    basis: Basis,
}

impl ProjectiveState {
    /// Builds a state, checking that the amplitude count matches the basis and
    /// that the weighted squared norm is positive and finite.
    pub fn new(amplitudes: Vec<Complex64>, basis: Basis) -> Result<Self> {
        if amplitudes.len() != basis.len() {
            return Err(Error::DimensionMismatch(amplitudes.len(), basis.len()));
        }
        let state = ProjectiveState { amplitudes, basis };
        let norm_sqr = state.norm_sqr();
        if !(norm_sqr.is_finite() && norm_sqr > 0.0) {
            return Err(Error::InvalidState(format!("squared norm must be positive and finite, got {norm_sqr}")));
        }
        Ok(state)
    }

    /// Real-valued state (zero imaginary parts).
    pub fn from_real(values: &[f64], basis: Basis) -> Result<Self> {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect(), basis)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    /// Weighted squared norm `sum_i w |a_i|^2`.
    pub fn norm_sqr(&self) -> f64 {
        self.basis.weight() * self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Same ray, amplitudes multiplied by `c`.
    pub fn scaled(&self, c: Complex64) -> Result<Self> {
        Self::new(self.amplitudes.iter().map(|a| a * c).collect(), self.basis)
    }

    /// Representative with unit weighted norm.
    pub fn normalized(&self) -> Self {
        let inv = 1.0 / self.norm();
        ProjectiveState { amplitudes: self.amplitudes.iter().map(|a| a * inv).collect(), basis: self.basis }
    }

    /// Weighted inner product `<self, other>` (antilinear in `self`).
    pub fn inner(&self, other: &ProjectiveState) -> Result<Complex64> {
        check_basis(self, other)?;
        let sum: Complex64 = self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum();
        Ok(sum * self.basis.weight())
    }
}

fn check_basis(a: &ProjectiveState, b: &ProjectiveState) -> Result<()> {
    if a.basis != b.basis {
        return Err(Error::BasisMismatch { left: a.basis.to_string(), right: b.basis.to_string() });
    }
    Ok(())
}

/// Point in classical phase space.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint(pub Vec<f64>);

impl PhasePoint {
    pub fn new(coordinates: Vec<f64>) -> Result<Self> {
        if coordinates.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidState("phase point has non-finite entries".into()));
        }
        Ok(PhasePoint(coordinates))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// `|<a, b>| / (|a| |b|)`, clamped to `[0, 1]`.
pub fn overlap_magnitude(a: &ProjectiveState, b: &ProjectiveState) -> Result<f64> {
    let inner = a.inner(b)?;
    Ok((inner.norm() / (a.norm() * b.norm())).clamp(0.0, 1.0))
}

/// Natural log of [`overlap_magnitude`], formed from logs of the pieces so that
/// overlaps far below the smallest normal double remain representable.
pub fn log_overlap(a: &ProjectiveState, b: &ProjectiveState) -> Result<f64> {
    let inner = a.inner(b)?;
    let value = inner.norm().ln() - 0.5 * a.norm_sqr().ln() - 0.5 * b.norm_sqr().ln();
    Ok(value.min(0.0))
}

/// Half the Fubini-Study distance, i.e. the angle between the two rays.
///
/// Near-parallel rays use the chord between phase-aligned unit representatives,
/// which keeps full relative precision where `arccos` near 1 does not.
fn ray_angle(a: &ProjectiveState, b: &ProjectiveState) -> Result<f64> {
    let inner = a.inner(b)?;
    let (na, nb) = (a.norm(), b.norm());
    let v = (inner.norm() / (na * nb)).clamp(0.0, 1.0);
    if v < 0.5 {
        return Ok(v.acos());
    }
    // split the alignment phase between both sides so swapping a and b
    // only negates each term and the result is exactly symmetric
    let half = (inner.conj() / inner.norm()).sqrt();
    let w = a.basis.weight();
    let chord_sqr: f64 = a
        .amplitudes
        .iter()
        .zip(&b.amplitudes)
        .map(|(x, y)| (half.conj() * x / na - half * y / nb).norm_sqr())
        .sum::<f64>()
        * w;
    Ok(2.0 * (0.5 * chord_sqr.sqrt()).min(1.0).asin())
}

/// Geodesic distance between rays, `2 arccos |<a/|a|, b/|b|>|`, in `[0, pi]`.
pub fn fubini_study_distance(a: &ProjectiveState, b: &ProjectiveState) -> Result<f64> {
    Ok((2.0 * ray_angle(a, b)?).clamp(0.0, PI))
}

/// `pi d / (1 + d)`: maps an unbounded distance into `[0, pi)` preserving zero.
///
/// Beyond `d ~ 2^53` the quotient rounds to `pi`; the result is held at the
/// largest float below `pi` instead.
pub fn bounded_euclidean_distance(d: f64) -> Result<f64> {
    if !(d.is_finite() && d >= 0.0) {
        return Err(Error::Domain(format!("distance must be finite and >= 0, got {d}")));
    }
    Ok((PI * d / (1.0 + d)).min(PI.next_down()))
}

fn divergence(d: f64) -> Result<f64> {
    if d.is_nan() || d < 0.0 {
        return Err(Error::Domain(format!("bounded distance must be >= 0, got {d}")));
    }
    if d >= PI {
        return Err(Error::Saturated { value: d });
    }
    Ok(d / (PI - d))
}

/// Classical divergence function `d_b / (pi - d_b)` of a bounded distance.
pub fn classical_divergence(bounded: f64) -> Result<f64> {
    divergence(bounded)
}

/// Divergence function `d_P / (pi - d_P)` of a Fubini-Study distance.
pub fn projective_divergence(distance: f64) -> Result<f64> {
    divergence(distance)
}

/// `ln Lambda` as a function of `ln v`, where `v` is the overlap magnitude.
///
/// Uses `d_P = 2 arccos v` and `pi - d_P = 2 arcsin v`, so
/// `ln Lambda = ln arccos v - ln arcsin v`; the small-`v` branch never forms
/// `v` below the underflow threshold. Returns `-inf` for `v = 1` and `+inf`
/// for `v = 0`.
pub fn log_projective_divergence(log_overlap: f64) -> Result<f64> {
    if log_overlap.is_nan() || log_overlap > 1e-12 {
        return Err(Error::Domain(format!("log overlap must be <= 0, got {log_overlap}")));
    }
    let lv = log_overlap.min(0.0);
    if lv == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    if lv == f64::NEG_INFINITY {
        return Ok(f64::INFINITY);
    }
    if lv >= -std::f64::consts::LN_2 {
        // v >= 1/2: arccos v = 2 arcsin sqrt((1 - v)/2) with 1 - v = -expm1(lv).
        let one_minus_v = -lv.exp_m1() + 0.0;
        let acos = 2.0 * (0.5 * one_minus_v).sqrt().asin();
        let asin = lv.exp().asin();
        return Ok(acos.ln() - asin.ln());
    }
    // v < 1/2: ln arcsin v = ln v + ln(arcsin(v)/v).
    let v = lv.exp();
    let ratio = if v < 1e-4 {
        let v2 = v * v;
        1.0 + v2 / 6.0 + 3.0 * v2 * v2 / 40.0
    } else {
        v.asin() / v
    };
    let asin = v * ratio;
    Ok((FRAC_PI_2 - asin).ln() - lv - ratio.ln())
}

/// `ln Lambda` for the pair of states, combining the precise small-angle
/// distance with the log-domain branch for nearly orthogonal rays.
pub fn log_divergence_between(a: &ProjectiveState, b: &ProjectiveState) -> Result<f64> {
    let lv = log_overlap(a, b)?;
    if lv < -std::f64::consts::LN_2 {
        return log_projective_divergence(lv);
    }
    let d = fubini_study_distance(a, b)?;
    if d == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(d.ln() - (PI - d).ln())
}

/// Euclidean norm of `x - y`.
pub fn euclidean_phase_distance(x: &PhasePoint, y: &PhasePoint) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch(x.dim(), y.dim()));
    }
    Ok(x.0.iter().zip(&y.0).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
}

/// Weighted 2-norm of the raw amplitude difference, with no ray normalization.
pub fn hilbert_distance(a: &ProjectiveState, b: &ProjectiveState) -> Result<f64> {
    check_basis(a, b)?;
    let sum: f64 = a.amplitudes.iter().zip(&b.amplitudes).map(|(x, y)| (x - y).norm_sqr()).sum();
    Ok((sum * a.basis.weight()).sqrt())
}
