//! Quantized baker's map on an `N`-dimensional Hilbert space.
//!
//! `G_N[k, j] = N^-1/2 exp(-2 pi i (k + 1/2)(j + 1/2) / N)` is the
//! antiperiodic Fourier transform and `B = G_N^-1 diag(G_{N/2}, G_{N/2})`.

use std::f64::consts::PI;
use std::sync::Arc;

use ndarray::{s, Array2};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::geometry::{Basis, ProjectiveState};

fn check_even(n: usize) -> Result<()> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::Domain(format!("baker quantization needs an even dimension >= 2, got {n}")));
    }
    Ok(())
}

/// Dense `G_N`.
pub fn bvs_transform(n: usize) -> Result<Array2<Complex64>> {
    if n == 0 {
        return Err(Error::Domain("dimension must be positive".into()));
    }
    let norm = (n as f64).sqrt().recip();
    Ok(Array2::from_shape_fn((n, n), |(k, j)| {
        // reduce the phase index mod 2N before scaling to keep it exact
        let m = ((2 * k + 1) * (2 * j + 1)) % (4 * n);
        Complex64::from_polar(norm, -PI * m as f64 / (2.0 * n as f64))
    }))
}

/// Dense baker propagator.
pub fn bvs_baker(n: usize) -> Result<Array2<Complex64>> {
    check_even(n)?;
    let h = n / 2;
    let g_inv = bvs_transform(n)?.t().mapv(|z| z.conj());
    let g_half = bvs_transform(h)?;
    let mut b = Array2::zeros((n, n));
    b.slice_mut(s![.., ..h]).assign(&g_inv.slice(s![.., ..h]).dot(&g_half));
    b.slice_mut(s![.., h..]).assign(&g_inv.slice(s![.., h..]).dot(&g_half));
    Ok(b)
}

/// Largest entry of `|U^dagger U - I|`.
pub fn unitarity_defect(u: &Array2<Complex64>) -> f64 {
    let prod = u.t().mapv(|z| z.conj()).dot(u);
    prod.indexed_iter()
        .map(|((i, j), z)| {
            let target = if i == j { 1.0 } else { 0.0 };
            (z - target).norm()
        })
        .fold(0.0, f64::max)
}

struct Transform {
    n: usize,
    pre: Vec<Complex64>,
    post: Vec<Complex64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Transform {
    fn new(n: usize, planner: &mut FftPlanner<f64>) -> Self {
        let nf = n as f64;
        let pre = (0..n).map(|j| Complex64::from_polar(1.0, -PI * j as f64 / nf)).collect();
        let norm = nf.sqrt().recip();
        let post = (0..n).map(|k| Complex64::from_polar(norm, -PI * k as f64 / nf - PI / (2.0 * nf))).collect();
        Transform { n, pre, post, forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n) }
    }

    fn apply(&self, v: &mut [Complex64]) {
        for (a, p) in v.iter_mut().zip(&self.pre) {
            *a *= p;
        }
        self.forward.process(v);
        for (a, p) in v.iter_mut().zip(&self.post) {
            *a *= p;
        }
    }

    fn apply_adjoint(&self, v: &mut [Complex64]) {
        debug_assert_eq!(v.len(), self.n);
        for (a, p) in v.iter_mut().zip(&self.post) {
            *a *= p.conj();
        }
        self.inverse.process(v);
        for (a, p) in v.iter_mut().zip(&self.pre) {
            *a *= p.conj();
        }
    }
}

/// FFT-based baker propagator, `O(N log N)` per step.
pub struct BakerOperator {
    full: Transform,
    half: Transform,
}

impl BakerOperator {
    pub fn new(n: usize) -> Result<Self> {
        check_even(n)?;
        let mut planner = FftPlanner::new();
        Ok(BakerOperator { full: Transform::new(n, &mut planner), half: Transform::new(n / 2, &mut planner) })
    }

    pub fn dim(&self) -> usize {
        self.full.n
    }

    /// `v <- B v`.
    pub fn apply(&self, v: &mut [Complex64]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch(v.len(), self.dim()));
        }
        let (lo, hi) = v.split_at_mut(self.half.n);
        self.half.apply(lo);
        self.half.apply(hi);
        self.full.apply_adjoint(v);
        Ok(())
    }

    /// `v <- B^dagger v`.
    pub fn apply_adjoint(&self, v: &mut [Complex64]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch(v.len(), self.dim()));
        }
        self.full.apply(v);
        let (lo, hi) = v.split_at_mut(self.half.n);
        self.half.apply_adjoint(lo);
        self.half.apply_adjoint(hi);
        Ok(())
    }

    pub fn step(&self, psi: &ProjectiveState) -> Result<ProjectiveState> {
        let mut amps = psi.amplitudes().to_vec();
        self.apply(&mut amps)?;
        ProjectiveState::new(amps, *psi.basis())
    }
}

/// Position-localized packet `exp(-(q0 - q_j)^2 / 2 alpha + i p0 q_j / alpha)`
/// at `q_j = (j + 1/2) / N`.
pub fn bvs_coherent_state(n: usize, q0: f64, p0: f64, alpha: f64) -> Result<ProjectiveState> {
    if n == 0 {
        return Err(Error::Domain("dimension must be positive".into()));
    }
    if !(0.0..1.0).contains(&q0) || !(0.0..1.0).contains(&p0) {
        return Err(Error::Domain(format!("packet center must lie in [0,1)^2, got ({q0}, {p0})")));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
    }
    let amps = (0..n)
        .map(|j| {
            let q = (j as f64 + 0.5) / n as f64;
            Complex64::new(-(q0 - q).powi(2) / (2.0 * alpha), p0 * q / alpha).exp()
        })
        .collect();
    ProjectiveState::new(amps, Basis::discrete(n))
}
