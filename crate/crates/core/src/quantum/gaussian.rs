//! Gaussian wavepackets under the harmonic oscillator and the parabolic barrier.
//!
//! A centered packet `psi ~ exp(-m a x^2 / 2 hbar)` stays Gaussian under any
//! quadratic Hamiltonian. Writing `a = -i v' / v`, the complex amplitude `v`
//! obeys the classical equation of motion `v'' = -k w^2 v` with `v(0) = 1`,
//! `v'(0) = i w0`, so `a(t)` is the Moebius image of `a(0) = w0` under the
//! classical flow matrix. The autocorrelation is then
//! `<psi(0)|psi(t)> = sqrt(2 w0 / ((w0 + a) v))`.

use std::f64::consts::LN_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{Basis, ProjectiveState};

/// Sign of the quadratic potential `V(x) = k m w^2 x^2 / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Potential {
    /// `k = +1`
    Oscillator,
    /// `k = -1`
    Barrier,
}

/// `H = p^2 / 2m + k m w^2 x^2 / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticSystem {
    pub mass: f64,
    pub omega: f64,
    pub potential: Potential,
    pub hbar: f64,
}

impl QuadraticSystem {
    /// Natural units, `m = hbar = 1`.
    pub fn new(potential: Potential, omega: f64) -> Result<Self> {
        let sys = QuadraticSystem { mass: 1.0, omega, potential, hbar: 1.0 };
        sys.validate()?;
        Ok(sys)
    }

    pub fn oscillator(omega: f64) -> Result<Self> {
        Self::new(Potential::Oscillator, omega)
    }

    pub fn barrier(omega: f64) -> Result<Self> {
        Self::new(Potential::Barrier, omega)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(Error::Domain(format!("omega must be positive, got {}", self.omega)));
        }
        if !(self.mass > 0.0 && self.hbar > 0.0) {
            return Err(Error::Domain("mass and hbar must be positive".into()));
        }
        Ok(())
    }

    pub fn sign(&self) -> f64 {
        match self.potential {
            Potential::Oscillator => 1.0,
            Potential::Barrier => -1.0,
        }
    }

    pub fn potential_at(&self, x: f64) -> f64 {
        0.5 * self.sign() * self.mass * self.omega * self.omega * x * x
    }

    /// Flow matrix for `(x, dx/dt)` over time `t`, as `(ln s, M / s)` with the
    /// scale `s` pulled out so the barrier's growth never overflows.
    pub fn scaled_flow(&self, t: f64) -> (f64, [[f64; 2]; 2]) {
        let w = self.omega;
        let wt = w * t;
        match self.potential {
            Potential::Oscillator => {
                let (s, c) = wt.sin_cos();
                (0.0, [[c, s / w], [-w * s, c]])
            }
            Potential::Barrier if wt.abs() < 1.0 => {
                let (s, c) = (wt.sinh(), wt.cosh());
                (0.0, [[c, s / w], [w * s, c]])
            }
            Potential::Barrier => {
                // cosh = (e^wt / 2)(1 + e^-2wt), sinh = (e^wt / 2)(1 - e^-2wt)
                let e = (-2.0 * wt.abs()).exp();
                let (c, s) = (1.0 + e, (1.0 - e) * wt.signum());
                (wt.abs() - LN_2, [[c, s / w], [w * s, c]])
            }
        }
    }
}

/// Initial packet `exp(-m w0 (x - q0)^2 / 2 hbar + i p0 x / hbar)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianState {
    pub q0: f64,
    pub p0: f64,
    pub omega0: f64,
}

impl GaussianState {
    pub fn centered(omega0: f64) -> Result<Self> {
        let g = GaussianState { q0: 0.0, p0: 0.0, omega0 };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega0 > 0.0 && self.omega0.is_finite()) {
            return Err(Error::Domain(format!("omega0 must be positive, got {}", self.omega0)));
        }
        Ok(())
    }

    /// Samples the packet at the cell midpoints of a 1D grid.
    pub fn sample(&self, sys: &QuadraticSystem, basis: Basis) -> Result<ProjectiveState> {
        let Basis::Grid1d { cells, lo, hi } = basis else {
            return Err(Error::GeometryMismatch(format!("gaussian needs a 1D grid, got {basis}")));
        };
        let w = (hi - lo) / cells as f64;
        let amps = (0..cells)
            .map(|j| {
                let x = lo + (j as f64 + 0.5) * w;
                let re = -sys.mass * self.omega0 * (x - self.q0).powi(2) / (2.0 * sys.hbar);
                Complex64::new(re, self.p0 * x / sys.hbar).exp()
            })
            .collect();
        ProjectiveState::new(amps, basis)
    }
}

/// Barrier overlap with an unscaled cross term, `(cosh^2 wt + (w/w0 - w0/w)^2 sinh^2 wt)^(-1/4)`.
/// Matches [`gaussian_autocorrelation`] only at `w0 = w`; kept as a reference form.
pub fn barrier_overlap_unscaled(omega0: f64, omega: f64, t: f64) -> Result<f64> {
    Ok(log_barrier_overlap_unscaled(omega0, omega, t)?.exp())
}

/// Natural log of [`barrier_overlap_unscaled`], finite for any `t`.
pub fn log_barrier_overlap_unscaled(omega0: f64, omega: f64, t: f64) -> Result<f64> {
    if !(omega0 > 0.0 && omega > 0.0) || !(t >= 0.0) {
        return Err(Error::Domain(format!("need omega0, omega > 0 and t >= 0 (got {omega0}, {omega}, {t})")));
    }
    let c2 = (omega / omega0 - omega0 / omega).powi(2);
    let wt = omega * t;
    if wt < 1.0 {
        return Ok(-0.25 * (wt.cosh().powi(2) + c2 * wt.sinh().powi(2)).ln());
    }
    let e = (-2.0 * wt).exp();
    let inner = 0.25 * ((1.0 + e).powi(2) + c2 * (1.0 - e).powi(2));
    Ok(-0.25 * (2.0 * wt + inner.ln()))
}

fn check_centered(g: &GaussianState) -> Result<()> {
    g.validate()?;
    if g.q0 != 0.0 || g.p0 != 0.0 {
        return Err(Error::Domain("closed-form autocorrelation needs a centered packet (q0 = p0 = 0)".into()));
    }
    Ok(())
}

/// Complex width `a(t)` of the evolved centered packet.
pub fn evolved_width(sys: &QuadraticSystem, g: &GaussianState, t: f64) -> Result<Complex64> {
    sys.validate()?;
    g.validate()?;
    let (_, m) = sys.scaled_flow(t);
    let (q, p) = flow_amplitude(&m, g.omega0);
    Ok(-Complex64::i() * p / q)
}

fn flow_amplitude(m: &[[f64; 2]; 2], omega0: f64) -> (Complex64, Complex64) {
    let start = Complex64::new(0.0, omega0);
    let q = m[0][0] + m[0][1] * start;
    let p = m[1][0] + m[1][1] * start;
    (q, p)
}

/// `|<psi(0)|psi(t)>|` for a centered Gaussian under `sys`.
pub fn gaussian_autocorrelation(sys: &QuadraticSystem, g: &GaussianState, t: f64) -> Result<f64> {
    Ok(log_gaussian_autocorrelation(sys, g, t)?.exp())
}

/// Natural log of [`gaussian_autocorrelation`].
pub fn log_gaussian_autocorrelation(sys: &QuadraticSystem, g: &GaussianState, t: f64) -> Result<f64> {
    sys.validate()?;
    check_centered(g)?;
    let (log_scale, m) = sys.scaled_flow(t);
    let (q, p) = flow_amplitude(&m, g.omega0);
    let a = -Complex64::i() * p / q;
    let denom = (a + g.omega0) * q;
    Ok(0.5 * ((2.0 * g.omega0).ln() - log_scale - denom.norm().ln()))
}

/// Position spread `sqrt(<x^2>)` of the evolved centered packet.
pub fn position_width(sys: &QuadraticSystem, g: &GaussianState, t: f64) -> Result<f64> {
    sys.validate()?;
    g.validate()?;
    let (log_scale, m) = sys.scaled_flow(t);
    let (q, _) = flow_amplitude(&m, g.omega0);
    Ok(log_scale.exp() * q.norm() * (sys.hbar / (2.0 * sys.mass * g.omega0)).sqrt())
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn starts_at_one() {
        assert_eq!(barrier_overlap_unscaled(1.0, 2.0, 0.0).unwrap(), 1.0);
        for sys in [QuadraticSystem::oscillator(2.0).unwrap(), QuadraticSystem::barrier(2.0).unwrap()] {
            let g = GaussianState::centered(0.7).unwrap();
            assert_relative_eq!(gaussian_autocorrelation(&sys, &g, 0.0).unwrap(), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn ground_state_is_stationary() {
        let sys = QuadraticSystem::oscillator(2.0).unwrap();
        let g = GaussianState::centered(2.0).unwrap();
        for k in 0..50 {
            let t = 0.37 * k as f64;
            assert_relative_eq!(gaussian_autocorrelation(&sys, &g, t).unwrap(), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn matched_width_reduces_to_cosh() {
        for (w, t) in [(2.0_f64, 0.3), (2.0, 5.0), (5.0, 1.7)] {
            let expected = (w * t).cosh().powf(-0.5);
            assert_relative_eq!(barrier_overlap_unscaled(w, w, t).unwrap(), expected, max_relative = 1e-12);
            let sys = QuadraticSystem::barrier(w).unwrap();
            let g = GaussianState::centered(w).unwrap();
            assert_relative_eq!(gaussian_autocorrelation(&sys, &g, t).unwrap(), expected, max_relative = 1e-12);
        }
    }

    #[test]
    fn frozen_values() {
        // 40-digit evaluations of the two closed forms at w = 2, w0 = 1
        assert_relative_eq!(
            barrier_overlap_unscaled(1.0, 2.0, 5.0).unwrap(),
            0.007_096_950_044_607_345_6,
            max_relative = 1e-12
        );
        let sys = QuadraticSystem::barrier(2.0).unwrap();
        let g = GaussianState::centered(1.0).unwrap();
        assert_relative_eq!(
            gaussian_autocorrelation(&sys, &g, 5.0).unwrap(),
            0.008_522_903_705_783_235_7,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            gaussian_autocorrelation(&sys, &g, 1.0).unwrap(),
            0.464_110_636_549_134_117_6,
            max_relative = 1e-12
        );
        let osc = QuadraticSystem::oscillator(2.0).unwrap();
        assert_relative_eq!(
            gaussian_autocorrelation(&osc, &g, 0.3).unwrap(),
            0.959_600_642_053_085_107_0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn oscillator_period() {
        let sys = QuadraticSystem::oscillator(2.0).unwrap();
        let g = GaussianState::centered(1.0).unwrap();
        let period = std::f64::consts::PI / 2.0;
        for k in 1..20 {
            let t = 0.13 * k as f64;
            let a = gaussian_autocorrelation(&sys, &g, t).unwrap();
            let b = gaussian_autocorrelation(&sys, &g, t + period).unwrap();
            assert_relative_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn barrier_decay_rate() {
        // |overlap| ~ C e^{-w t / 2}
        let sys = QuadraticSystem::barrier(2.0).unwrap();
        let g = GaussianState::centered(1.0).unwrap();
        let l1 = log_gaussian_autocorrelation(&sys, &g, 400.0).unwrap();
        let l2 = log_gaussian_autocorrelation(&sys, &g, 401.0).unwrap();
        assert_relative_eq!(l2 - l1, -1.0, epsilon = 1e-10);
        let lp = log_barrier_overlap_unscaled(1.0, 2.0, 400.0).unwrap();
        assert!(lp.is_finite());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(GaussianState::centered(0.0).is_err());
        assert!(QuadraticSystem::barrier(-1.0).is_err());
        let sys = QuadraticSystem::barrier(1.0).unwrap();
        let off = GaussianState { q0: 0.5, p0: 0.0, omega0: 1.0 };
        assert!(matches!(gaussian_autocorrelation(&sys, &off, 1.0), Err(Error::Domain(_))));
        assert!(barrier_overlap_unscaled(1.0, 1.0, -1.0).is_err());
    }
}
