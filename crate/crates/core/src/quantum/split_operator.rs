//! Symmetric split-operator propagation on a uniform 1D grid.
//!
//! `exp(-iH dt) ~ exp(-iV dt/2) F^-1 exp(-i hbar k^2 dt / 2m) F exp(-iV dt/2)`.
//! Used as an independent numerical check on the closed-form Gaussian dynamics.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::gaussian::{evolved_width, position_width, GaussianState, QuadraticSystem};
use crate::error::{Error, Result};
use crate::geometry::{Basis, ProjectiveState};

/// Largest admissible `dt * omega`.
pub const MAX_STEP_PHASE: f64 = 0.01;

/// Probability allowed in the outer 10% of the grid before the run is rejected.
pub const MAX_EDGE_MASS: f64 = 1e-8;

/// Reusable propagator for one grid, system and step.
pub struct SplitOperator {
    cells: usize,
    potential_half: Vec<Complex64>,
    kinetic: Vec<Complex64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    basis: Basis,
}

impl SplitOperator {
    pub fn new(sys: &QuadraticSystem, basis: Basis, dt: f64) -> Result<Self> {
        sys.validate()?;
        if !(dt > 0.0) || dt * sys.omega > MAX_STEP_PHASE * (1.0 + 1e-12) {
            return Err(Error::Domain(format!(
                "split-operator step needs 0 < dt * omega <= {MAX_STEP_PHASE}, got {}",
                dt * sys.omega
            )));
        }
        let Basis::Grid1d { cells, lo, hi } = basis else {
            return Err(Error::GeometryMismatch(format!("split-operator needs a 1D grid, got {basis}")));
        };
        let w = (hi - lo) / cells as f64;
        let potential_half = (0..cells)
            .map(|j| {
                let x = lo + (j as f64 + 0.5) * w;
                Complex64::from_polar(1.0, -sys.potential_at(x) * dt / (2.0 * sys.hbar))
            })
            .collect();
        let dk = 2.0 * PI / (cells as f64 * w);
        let kinetic = (0..cells)
            .map(|m| {
                let idx = if m < cells / 2 { m as f64 } else { m as f64 - cells as f64 };
                let k = idx * dk;
                Complex64::from_polar(1.0, -sys.hbar * k * k * dt / (2.0 * sys.mass))
            })
            .collect();
        let mut planner = FftPlanner::new();
        Ok(SplitOperator {
            cells,
            potential_half,
            kinetic,
            forward: planner.plan_fft_forward(cells),
            inverse: planner.plan_fft_inverse(cells),
            basis,
        })
    }

    /// Advances `amps` by one step in place.
    pub fn step(&self, amps: &mut [Complex64]) {
        let scale = 1.0 / self.cells as f64;
        for (a, v) in amps.iter_mut().zip(&self.potential_half) {
            *a *= v;
        }
        self.forward.process(amps);
        for (a, k) in amps.iter_mut().zip(&self.kinetic) {
            *a *= k * scale;
        }
        self.inverse.process(amps);
        for (a, v) in amps.iter_mut().zip(&self.potential_half) {
            *a *= v;
        }
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }
}

/// Fraction of probability in the outer 10% of the grid (5% per side).
pub fn edge_mass(psi: &ProjectiveState) -> f64 {
    let amps = psi.amplitudes();
    let n = amps.len();
    let margin = (n / 20).max(1);
    let total: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    let edge: f64 = amps[..margin].iter().chain(&amps[n - margin..]).map(|a| a.norm_sqr()).sum();
    edge / total
}

fn check_edges(psi: &ProjectiveState) -> Result<()> {
    let mass = edge_mass(psi);
    if mass > MAX_EDGE_MASS {
        return Err(Error::DomainOverflow { mass });
    }
    Ok(())
}

/// Propagates `psi` for `steps` steps of size `dt`.
pub fn split_operator_propagate(
    psi: &ProjectiveState,
    sys: &QuadraticSystem,
    dt: f64,
    steps: usize,
) -> Result<ProjectiveState> {
    let prop = SplitOperator::new(sys, *psi.basis(), dt)?;
    let mut amps = psi.amplitudes().to_vec();
    for _ in 0..steps {
        prop.step(&mut amps);
    }
    let out = ProjectiveState::new(amps, *psi.basis())?;
    check_edges(&out)?;
    Ok(out)
}

/// Grid sized from the analytic spreading of a centered packet up to `t_final`.
///
/// Half-width covers eight position widths at the widest point of the run;
/// spacing resolves the largest local wavenumber over that window.
pub fn auto_grid(sys: &QuadraticSystem, g: &GaussianState, t_final: f64) -> Result<Basis> {
    let samples = 200;
    let mut max_width: f64 = 0.0;
    let mut max_chirp: f64 = 0.0;
    let mut max_re: f64 = 0.0;
    for k in 0..=samples {
        let t = t_final * k as f64 / samples as f64;
        max_width = max_width.max(position_width(sys, g, t)?);
        let a = evolved_width(sys, g, t)?;
        max_chirp = max_chirp.max(a.im.abs());
        max_re = max_re.max(a.re.abs());
    }
    let half = 8.0 * max_width + g.q0.abs();
    let kmax = sys.mass / sys.hbar * (max_chirp * half + 8.0 * max_re.sqrt()) + (g.p0 / sys.hbar).abs();
    let needed = (2.0 * half * kmax / PI).ceil().max(64.0) as usize;
    let cells = needed.next_power_of_two();
    Ok(Basis::Grid1d { cells, lo: -half, hi: half })
}

/// `|<psi(0)|psi(t_k)>|` at `t_k = k * dt`, `k = 0..=steps`, by split-operator
/// propagation on an auto-sized grid.
pub fn split_operator_autocorrelation(
    sys: &QuadraticSystem,
    g: &GaussianState,
    dt: f64,
    steps: usize,
) -> Result<Vec<(f64, f64)>> {
    let basis = auto_grid(sys, g, dt * steps as f64)?;
    let psi0 = g.sample(sys, basis)?.normalized();
    let prop = SplitOperator::new(sys, basis, dt)?;
    let mut amps = psi0.amplitudes().to_vec();
    let w = basis.weight();
    let mut out = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        if k > 0 {
            prop.step(&mut amps);
        }
        let inner: Complex64 = psi0.amplitudes().iter().zip(&amps).map(|(a, b)| a.conj() * b).sum();
        out.push((k as f64 * dt, inner.norm() * w));
    }
    check_edges(&ProjectiveState::new(amps, basis)?)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::gaussian::gaussian_autocorrelation;

    #[test]
    fn rejects_large_steps() {
        let sys = QuadraticSystem::barrier(2.0).unwrap();
        let basis = Basis::grid_1d(64, -5.0, 5.0);
        assert!(matches!(SplitOperator::new(&sys, basis, 0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn norm_is_preserved() {
        let sys = QuadraticSystem::oscillator(2.0).unwrap();
        let g = GaussianState { q0: 0.5, p0: 1.0, omega0: 1.0 };
        let basis = Basis::grid_1d(512, -12.0, 12.0);
        let psi = g.sample(&sys, basis).unwrap();
        let out = split_operator_propagate(&psi, &sys, 0.005, 1000).unwrap();
        assert!((out.norm() / psi.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn ground_state_stays_put() {
        let sys = QuadraticSystem::oscillator(2.0).unwrap();
        let g = GaussianState::centered(2.0).unwrap();
        let series = split_operator_autocorrelation(&sys, &g, 0.005, 400).unwrap();
        assert!(series.iter().all(|(_, v)| (v - 1.0).abs() < 1e-6));
    }

    #[test]
    fn small_grid_overflows() {
        let sys = QuadraticSystem::barrier(2.0).unwrap();
        let g = GaussianState::centered(1.0).unwrap();
        let psi = g.sample(&sys, Basis::grid_1d(256, -4.0, 4.0)).unwrap();
        assert!(matches!(split_operator_propagate(&psi, &sys, 0.005, 300), Err(Error::DomainOverflow { .. })));
    }

    #[test]
    fn barrier_matches_closed_form() {
        let sys = QuadraticSystem::barrier(2.0).unwrap();
        let g = GaussianState::centered(1.0).unwrap();
        let series = split_operator_autocorrelation(&sys, &g, 0.005, 300).unwrap();
        for (t, v) in series.iter().step_by(10) {
            let exact = gaussian_autocorrelation(&sys, &g, *t).unwrap();
            assert!(((v - exact) / exact).abs() < 1e-3, "t={t}: {v} vs {exact}");
        }
    }
}
