//! Piecewise-constant classical densities and their exact evolution.
//!
//! Densities live on uniform grids and are evolved with the Frobenius-Perron
//! operator of the built-in piecewise-affine maps. For these maps the preimage
//! of a grid cell intersects the grid in whole cells or exact rational
//! fractions of cells, so each output cell is the exact preimage average and
//! total mass is preserved up to rounding.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::DistanceSeries;
use crate::geometry::{log_overlap, Basis, PhasePoint, ProjectiveState};
use crate::numeric::neumaier_sum;

/// One of the built-in classical maps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapDescriptor {
    /// `x -> r x` on the real line, `r > 1`.
    Linear { r: f64 },
    /// `x -> r x mod 1`, integer `r >= 2`.
    RAdic { r: u32 },
    /// `(x, y) -> (2x - [2x], (y + [2x]) / 2)` on the unit square.
    Baker,
    /// `x -> x + c mod 1`, `c in [0, 1)`.
    Rotation { c: f64 },
}

impl MapDescriptor {
    pub fn validate(&self) -> Result<()> {
        match *self {
            MapDescriptor::Linear { r } if !(r > 1.0 && r.is_finite()) => {
                Err(Error::Domain(format!("linear map needs r > 1, got {r}")))
            }
            MapDescriptor::RAdic { r } if r < 2 => {
                Err(Error::Domain(format!("r-adic map needs integer r >= 2, got {r}")))
            }
            MapDescriptor::Rotation { c } if !(0.0..1.0).contains(&c) => {
                Err(Error::Domain(format!("rotation needs c in [0, 1), got {c}")))
            }
            _ => Ok(()),
        }
    }

    /// Phase-space dimension.
    pub fn dim(&self) -> usize {
        match self {
            MapDescriptor::Baker => 2,
            _ => 1,
        }
    }

    /// Whether coordinates are taken mod 1.
    pub fn is_periodic(&self) -> bool {
        !matches!(self, MapDescriptor::Linear { .. })
    }

    /// Image of a single phase point.
    pub fn apply(&self, x: &PhasePoint) -> Result<PhasePoint> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch(x.dim(), self.dim()));
        }
        let p = &x.0;
        let out = match *self {
            MapDescriptor::Linear { r } => vec![r * p[0]],
            MapDescriptor::RAdic { r } => vec![(r as f64 * p[0]).rem_euclid(1.0)],
            MapDescriptor::Rotation { c } => vec![(p[0] + c).rem_euclid(1.0)],
            MapDescriptor::Baker => {
                let fold = (2.0 * p[0]).floor();
                vec![2.0 * p[0] - fold, (p[1] + fold) / 2.0]
            }
        };
        Ok(PhasePoint(out))
    }
}

/// Grid carrying a [`GridDensity`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Geometry {
    /// `cells` uniform cells over `[lo, hi)`.
    Interval { lo: f64, hi: f64, cells: usize },
    /// `cells x cells` grid on the unit square, row-major with row = y index.
    UnitSquare { cells: usize },
}

impl Geometry {
    pub fn unit_interval(cells: usize) -> Self {
        Geometry::Interval { lo: 0.0, hi: 1.0, cells }
    }

    pub fn len(&self) -> usize {
        match *self {
            Geometry::Interval { cells, .. } => cells,
            Geometry::UnitSquare { cells } => cells * cells,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cell measure.
    pub fn cell_measure(&self) -> f64 {
        self.basis().weight()
    }

    pub fn basis(&self) -> Basis {
        match *self {
            Geometry::Interval { lo, hi, cells } => Basis::Grid1d { cells, lo, hi },
            Geometry::UnitSquare { cells } => {
                let w = 1.0 / cells as f64;
                Basis::Grid2d { rows: cells, cols: cells, dx: w, dy: w }
            }
        }
    }

    fn is_unit_interval(&self) -> bool {
        matches!(*self, Geometry::Interval { lo, hi, .. } if lo == 0.0 && hi == 1.0)
    }
}

/// Non-negative piecewise-constant probability density.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDensity {
    values: Vec<f64>,
    geometry: Geometry,
    mass: f64,
}

impl GridDensity {
    pub fn new(values: Vec<f64>, geometry: Geometry) -> Result<Self> {
        if values.len() != geometry.len() {
            return Err(Error::DimensionMismatch(values.len(), geometry.len()));
        }
        if let Some(i) = values.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidState(format!("density value {} at cell {i}", values[i])));
        }
        let mass = neumaier_sum(values.iter().copied()) * geometry.cell_measure();
        if !(mass > 0.0) {
            return Err(Error::InvalidState("density has zero mass".into()));
        }
        Ok(GridDensity { values, geometry, mass })
    }

    pub fn uniform(geometry: Geometry) -> Self {
        let total = match geometry {
            Geometry::Interval { lo, hi, .. } => hi - lo,
            Geometry::UnitSquare { .. } => 1.0,
        };
        GridDensity::new(vec![1.0 / total; geometry.len()], geometry).expect("uniform density is valid")
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    /// Total integral, computed with compensated summation.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Same density scaled to unit mass.
    pub fn normalized(&self) -> Self {
        let inv = 1.0 / self.mass;
        GridDensity::new(self.values.iter().map(|v| v * inv).collect(), self.geometry)
            .expect("scaling preserves validity")
    }

    /// Splits each 1D cell into `factor` equal cells carrying the same value.
    pub fn refine(&self, factor: usize) -> Result<Self> {
        match self.geometry {
            Geometry::Interval { lo, hi, cells } => {
                let values = self.values.iter().flat_map(|v| std::iter::repeat_n(*v, factor)).collect();
                GridDensity::new(values, Geometry::Interval { lo, hi, cells: cells * factor })
            }
            Geometry::UnitSquare { .. } => Err(Error::GeometryMismatch("refine supports 1D grids only".into())),
        }
    }

    /// Extends a 1D grid to the right with zero cells up to `cells` total.
    pub fn zero_pad(&self, cells: usize) -> Result<Self> {
        match self.geometry {
            Geometry::Interval { lo, hi, cells: n } if cells >= n => {
                let w = (hi - lo) / n as f64;
                let mut values = self.values.clone();
                values.resize(cells, 0.0);
                GridDensity::new(values, Geometry::Interval { lo, hi: lo + w * cells as f64, cells })
            }
            _ => Err(Error::GeometryMismatch("zero_pad needs a 1D grid and a larger cell count".into())),
        }
    }

    /// `cell_index,value` lines with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("cell_index,value\n");
        for (i, v) in self.values.iter().enumerate() {
            let _ = writeln!(out, "{i},{v:.16e}");
        }
        out
    }

    /// Plain JSON array of cell values.
    pub fn to_json(&self) -> String {
        let body: Vec<String> = self.values.iter().map(|v| format!("{v:.16e}")).collect();
        format!("[{}]", body.join(","))
    }
}

/// Normalized indicator of `[0, b)` on `cells` cells over `[0, x_hi)`.
///
/// `b` is snapped to the nearest whole number of cells (at least one).
pub fn square_density(b: f64, cells: usize, x_hi: f64) -> Result<GridDensity> {
    if !(b > 0.0 && b <= x_hi) || cells == 0 {
        return Err(Error::Domain(format!("square width must lie in (0, {x_hi}], got {b}")));
    }
    let w = x_hi / cells as f64;
    let exact = b / w;
    let k = (exact.round() as usize).clamp(1, cells);
    if (exact - k as f64).abs() > 1e-9 * exact.max(1.0) {
        log::warn!("square width {b} is not a whole number of cells; snapped to {}", k as f64 * w);
    }
    let height = 1.0 / (k as f64 * w);
    let mut values = vec![0.0; cells];
    values[..k].fill(height);
    GridDensity::new(values, Geometry::Interval { lo: 0.0, hi: x_hi, cells })
}

/// Normalized indicator of the bottom-left cell of a `2^m x 2^m` unit-square grid.
pub fn corner_cell_density(m: u32) -> Result<GridDensity> {
    let cells = 1usize << m;
    let mut values = vec![0.0; cells * cells];
    values[0] = (cells * cells) as f64;
    GridDensity::new(values, Geometry::UnitSquare { cells })
}

/// Real Hilbert-space embedding `psi = sqrt(rho)` on the matching grid basis.
pub fn sqrt_embed(rho: &GridDensity) -> ProjectiveState {
    let amplitudes = rho.values.iter().map(|v| Complex64::new(v.sqrt(), 0.0)).collect();
    ProjectiveState::new(amplitudes, rho.geometry.basis()).expect("density has positive mass")
}

/// Overlap of `sqrt(rho)` with the uniform density on the same domain, i.e.
/// the plateau overlap reached once a mixing map has spread `rho` uniformly.
pub fn uniform_limit_overlap(rho: &GridDensity) -> f64 {
    let uniform = GridDensity::uniform(rho.geometry);
    log_overlap(&sqrt_embed(rho), &sqrt_embed(&uniform)).expect("same basis").exp()
}

/// Closed-form distances `d_P(k) = 2 arccos(r^(-k/2))`, `k = 0..=n`, of the
/// linear map's square density from its initial state. The square width drops
/// out of the result.
pub fn evolve_linear_analytic(r: f64, n: usize, theta: f64) -> Result<DistanceSeries> {
    MapDescriptor::Linear { r }.validate()?;
    let times: Vec<f64> = (0..=n).map(|k| k as f64).collect();
    let log_overlaps = times.iter().map(|k| -0.5 * k * r.ln()).collect();
    DistanceSeries::from_log_overlaps(times, log_overlaps, theta)
}

/// Largest common grid [`linear_grid_series`] will build.
const MAX_COMMON_CELLS: usize = 1 << 24;

/// Distances of the linear map's square density, evolved on an expanding grid.
///
/// The reference stays on the original window `[0, 1)` and is zero-padded;
/// the evolved density, whose cells have grown by `r^k`, is refined onto the
/// reference cell width. Both are exact piecewise-constant representations.
pub fn linear_grid_series(b: f64, r: u32, cells: usize, steps: usize, theta: f64) -> Result<DistanceSeries> {
    let map = MapDescriptor::Linear { r: r as f64 };
    map.validate()?;
    let reference = square_density(b, cells, 1.0)?;
    let mut rho = reference.clone();
    let mut times = Vec::with_capacity(steps + 1);
    let mut log_overlaps = Vec::with_capacity(steps + 1);
    let mut factor = 1usize;
    for k in 0..=steps {
        if k > 0 {
            rho = transfer_step(&rho, &map)?;
            factor = factor
                .checked_mul(r as usize)
                .filter(|f| f * cells <= MAX_COMMON_CELLS)
                .ok_or_else(|| Error::GeometryMismatch(format!("common grid too large at step {k}")))?;
        }
        let common = factor * cells;
        let padded = reference.zero_pad(common)?;
        let evolved = rho.refine(factor)?;
        let evolved =
            GridDensity::new(evolved.values, Geometry::Interval { lo: 0.0, hi: factor as f64, cells: common })?;
        times.push(k as f64);
        log_overlaps.push(log_overlap(&sqrt_embed(&padded), &sqrt_embed(&evolved))?);
    }
    DistanceSeries::from_log_overlaps(times, log_overlaps, theta)
}

/// Exact Frobenius-Perron image of a piecewise-constant density.
///
/// * linear: the domain itself expands, `[lo, hi) -> [r lo, r hi)`, values / r;
/// * r-adic and rotation: unit interval, any cell count;
/// * baker: unit square with an even cell count.
pub fn transfer_step(rho: &GridDensity, map: &MapDescriptor) -> Result<GridDensity> {
    map.validate()?;
    let values = &rho.values;
    match (*map, rho.geometry) {
        (MapDescriptor::Linear { r }, Geometry::Interval { lo, hi, cells }) => GridDensity::new(
            values.iter().map(|v| v / r).collect(),
            Geometry::Interval { lo: r * lo, hi: r * hi, cells },
        ),
        (MapDescriptor::RAdic { r }, geometry @ Geometry::Interval { cells, .. }) if geometry.is_unit_interval() => {
            let r = r as usize;
            let inv = 1.0 / r as f64;
            // preimage of cell i: r slivers [(i + kN)/r, (i + kN + 1)/r) in cell units,
            // each a 1/r fraction of cell (i + kN) / r
            let out = (0..cells).map(|i| inv * (0..r).map(|k| values[(i + k * cells) / r]).sum::<f64>()).collect();
            GridDensity::new(out, geometry)
        }
        (MapDescriptor::Rotation { c }, geometry @ Geometry::Interval { cells, .. }) if geometry.is_unit_interval() => {
            let shift = -c * cells as f64;
            let q = shift.floor();
            let frac = shift - q;
            let q = q as i64;
            let n = cells as i64;
            let out = (0..n)
                .map(|i| {
                    let m = (i + q).rem_euclid(n) as usize;
                    let m1 = (i + q + 1).rem_euclid(n) as usize;
                    (1.0 - frac) * values[m] + frac * values[m1]
                })
                .collect();
            GridDensity::new(out, geometry)
        }
        (MapDescriptor::Baker, geometry @ Geometry::UnitSquare { cells }) if cells % 2 == 0 => {
            GridDensity::new(baker_pullback(values, cells, |a, b| 0.5 * (a + b)), geometry)
        }
        (map, geometry) => Err(Error::GeometryMismatch(format!("{map:?} cannot act on {geometry:?}"))),
    }
}

/// Exact preimage average for the baker map on an `n x n` grid, row-major.
///
/// Output cell `(ix, iy)` with `iy < n/2` pulls back to half of column
/// `ix / 2` across rows `2 iy, 2 iy + 1`; the upper half pulls back from the
/// right half of the square.
fn baker_pullback<T: Copy>(values: &[T], n: usize, average: impl Fn(T, T) -> T) -> Vec<T> {
    let half = n / 2;
    let mut out = Vec::with_capacity(n * n);
    for iy in 0..n {
        let (src_row, src_col_offset) = if iy < half { (2 * iy, 0) } else { (2 * iy - n, n) };
        for ix in 0..n {
            let sx = (ix + src_col_offset) / 2;
            out.push(average(values[src_row * n + sx], values[(src_row + 1) * n + sx]));
        }
    }
    out
}

/// Koopman propagation `psi'(x, y) = psi(Phi^-1(x, y))` of complex amplitudes
/// under the baker map, with the same cell bookkeeping as [`transfer_step`].
///
/// Norm is preserved exactly when the field is constant on each pair of
/// preimage cells and to grid accuracy for smooth fields.
pub fn koopman_step(psi: &ProjectiveState, map: &MapDescriptor) -> Result<ProjectiveState> {
    if !matches!(map, MapDescriptor::Baker) {
        return Err(Error::UnsupportedMap(format!("koopman propagation is defined for the baker map, not {map:?}")));
    }
    let n = match *psi.basis() {
        Basis::Grid2d { rows, cols, dx, dy }
            if rows == cols && rows % 2 == 0 && dx == 1.0 / rows as f64 && dy == dx =>
        {
            rows
        }
        other => return Err(Error::GeometryMismatch(format!("baker needs an even unit-square grid, got {other}"))),
    };
    let out = baker_pullback(psi.amplitudes(), n, |a, b| (a + b) * 0.5);
    ProjectiveState::new(out, *psi.basis())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::overlap_magnitude;
    use approx::assert_relative_eq;

    #[test]
    fn square_density_cases() {
        let full = square_density(1.0, 8, 1.0).unwrap();
        assert!(full.values().iter().all(|v| (*v - 1.0).abs() < 1e-15));

        let one = square_density(1.0 / 8.0, 8, 1.0).unwrap();
        assert_eq!(one.values()[0], 8.0);
        assert!(one.values()[1..].iter().all(|v| *v == 0.0));

        let q = square_density(0.25, 16, 1.0).unwrap();
        assert_eq!(&q.values()[..4], &[4.0; 4]);
        assert!(q.values()[4..].iter().all(|v| *v == 0.0));
        assert_relative_eq!(q.mass(), 1.0);
    }

    #[test]
    fn sqrt_embed_overlaps() {
        let u = GridDensity::uniform(Geometry::unit_interval(32));
        let psi = sqrt_embed(&u);
        assert_relative_eq!(overlap_magnitude(&psi, &psi).unwrap(), 1.0, epsilon = 1e-15);

        let mut left = vec![0.0; 32];
        left[..16].fill(2.0);
        let mut right = vec![0.0; 32];
        right[16..].fill(2.0);
        let a = sqrt_embed(&GridDensity::new(left, Geometry::unit_interval(32)).unwrap());
        let b = sqrt_embed(&GridDensity::new(right, Geometry::unit_interval(32)).unwrap());
        assert_eq!(overlap_magnitude(&a, &b).unwrap(), 0.0);

        // widths b and r b on the same grid: overlap r^-1/2
        let narrow = sqrt_embed(&square_density(0.125, 64, 1.0).unwrap());
        let wide = sqrt_embed(&square_density(0.25, 64, 1.0).unwrap());
        assert_relative_eq!(overlap_magnitude(&narrow, &wide).unwrap(), 0.5f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn analytic_linear_values() {
        let d = evolve_linear_analytic(2.0, 2, 1e-12).unwrap();
        assert_eq!(d.values()[0], 0.0);
        assert_relative_eq!(d.values()[2], 2.0 * std::f64::consts::PI / 3.0, epsilon = 1e-15);
        // pi - d_P = 2 arcsin(5^-10) = 2.048e-7 (1 + 5.5e-15...)
        let d = evolve_linear_analytic(5.0, 20, 1e-12).unwrap();
        let gap = std::f64::consts::PI - d.values()[20];
        assert_relative_eq!(gap, 2.048e-7, max_relative = 1e-8);
    }

    #[test]
    fn radic_half_indicator_becomes_uniform() {
        let mut v = vec![0.0; 16];
        v[..8].fill(2.0);
        let rho = GridDensity::new(v, Geometry::unit_interval(16)).unwrap();
        let next = transfer_step(&rho, &MapDescriptor::RAdic { r: 2 }).unwrap();
        assert!(next.values().iter().all(|x| (*x - 1.0).abs() < 1e-15), "{:?}", next.values());
    }

    #[test]
    fn uniform_is_fixed_point() {
        let u = GridDensity::uniform(Geometry::unit_interval(27));
        for r in [2, 3, 5] {
            let next = transfer_step(&u, &MapDescriptor::RAdic { r }).unwrap();
            assert!(next.values().iter().all(|x| (*x - 1.0).abs() < 1e-15));
        }
        let sq = GridDensity::uniform(Geometry::UnitSquare { cells: 16 });
        let next = transfer_step(&sq, &MapDescriptor::Baker).unwrap();
        assert!(next.values().iter().all(|x| (*x - 1.0).abs() < 1e-15));
    }

    #[test]
    fn rotation_shifts_density() {
        let rho = square_density(0.25, 8, 1.0).unwrap();
        let next = transfer_step(&rho, &MapDescriptor::Rotation { c: 0.125 }).unwrap();
        assert_eq!(next.values(), &[0.0, 4.0, 4.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let half = transfer_step(&rho, &MapDescriptor::Rotation { c: 0.0625 }).unwrap();
        assert_eq!(half.values(), &[2.0, 4.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn linear_expands_domain() {
        let rho = square_density(0.5, 4, 1.0).unwrap();
        let next = transfer_step(&rho, &MapDescriptor::Linear { r: 3.0 }).unwrap();
        assert_eq!(*next.geometry(), Geometry::Interval { lo: 0.0, hi: 3.0, cells: 4 });
        assert_relative_eq!(next.mass(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn mismatched_geometry_rejected() {
        let sq = GridDensity::uniform(Geometry::UnitSquare { cells: 4 });
        assert!(matches!(transfer_step(&sq, &MapDescriptor::RAdic { r: 2 }), Err(Error::GeometryMismatch(_))));
        let odd = GridDensity::uniform(Geometry::UnitSquare { cells: 5 });
        assert!(matches!(transfer_step(&odd, &MapDescriptor::Baker), Err(Error::GeometryMismatch(_))));
        let line = GridDensity::uniform(Geometry::Interval { lo: 0.0, hi: 2.0, cells: 4 });
        assert!(matches!(transfer_step(&line, &MapDescriptor::RAdic { r: 2 }), Err(Error::GeometryMismatch(_))));
    }

    #[test]
    fn koopman_rejects_other_maps() {
        let psi = sqrt_embed(&GridDensity::uniform(Geometry::UnitSquare { cells: 4 }));
        assert!(matches!(koopman_step(&psi, &MapDescriptor::RAdic { r: 2 }), Err(Error::UnsupportedMap(_))));
        let line = sqrt_embed(&GridDensity::uniform(Geometry::unit_interval(4)));
        assert!(matches!(koopman_step(&line, &MapDescriptor::Baker), Err(Error::GeometryMismatch(_))));
    }

    #[test]
    fn koopman_constant_field_unchanged() {
        let c = Complex64::new(0.3, -0.7);
        let basis = Geometry::UnitSquare { cells: 8 }.basis();
        let psi = ProjectiveState::new(vec![c; 64], basis).unwrap();
        let next = koopman_step(&psi, &MapDescriptor::Baker).unwrap();
        assert_eq!(next, psi);
    }

    #[test]
    fn uniform_limit_of_localized_indicator() {
        // indicator of width 2^-10: integral of sqrt(rho) is 2^-5
        let rho = square_density(1.0 / 1024.0, 1 << 16, 1.0).unwrap();
        assert_relative_eq!(uniform_limit_overlap(&rho), 1.0 / 32.0, epsilon = 1e-14);
    }

    #[test]
    fn exports() {
        let rho = square_density(0.5, 2, 1.0).unwrap();
        assert_eq!(rho.to_csv(), "cell_index,value\n0,2.0000000000000000e0\n1,0.0000000000000000e0\n");
        assert_eq!(rho.to_json(), "[2.0000000000000000e0,0.0000000000000000e0]");
    }

    #[test]
    fn map_validation() {
        assert!(MapDescriptor::Linear { r: 1.0 }.validate().is_err());
        assert!(MapDescriptor::RAdic { r: 1 }.validate().is_err());
        assert!(MapDescriptor::Rotation { c: 1.0 }.validate().is_err());
        assert!(MapDescriptor::Baker.validate().is_ok());
    }
}
