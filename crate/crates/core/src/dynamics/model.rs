use serde::{Deserialize, Serialize};

use super::grid::GridSpec;
use crate::circuits::PiecewiseLinearFn;
use crate::error::{invalid, Result};

/// `V(x) = γ (x - x0)² + ΔG`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarmonicSurface {
    pub force_constant: f64,
    pub center: f64,
    pub energy_shift: f64,
}

impl HarmonicSurface {
    pub fn potential(&self, x: f64) -> f64 {
        let d = x - self.center;
        self.force_constant * d * d + self.energy_shift
    }

    /// Angular frequency for a particle of the given mass, `sqrt(2γ/m)`.
    pub fn frequency(&self, mass: f64) -> f64 {
        (2.0 * self.force_constant / mass).sqrt()
    }
}

/// Reference coupling `μ exp(-b (x - x_c)²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianCoupling {
    pub amplitude: f64,
    pub exponent: f64,
    pub center: f64,
}

impl GaussianCoupling {
    pub fn value(&self, x: f64) -> f64 {
        let d = x - self.center;
        self.amplitude * (-self.exponent * d * d).exp()
    }

    /// Width of the area-preserving box, `sqrt(π/b)`.
    pub fn equivalent_width(&self) -> f64 {
        (std::f64::consts::PI / self.exponent).sqrt()
    }
}

/// Shape of the coupling used by the circuit. Every piecewise shape keeps
/// the area of the reference Gaussian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingShape {
    /// The Gaussian itself; only usable by grid propagators.
    GaussianReferenceExactOnly,
    /// `μ` everywhere (one piece).
    Constant,
    /// Height `μ`, width `sqrt(π/b)` around the center (three pieces).
    Step,
    /// Triangle of height `μ` and half-width `sqrt(π/b)` (four pieces).
    Peak,
}

impl CouplingShape {
    pub fn tag(&self) -> &'static str {
        match self {
            CouplingShape::GaussianReferenceExactOnly => "gaussian_reference_exact_only",
            CouplingShape::Constant => "constant",
            CouplingShape::Step => "step",
            CouplingShape::Peak => "peak",
        }
    }

    pub fn pieces(&self) -> Option<usize> {
        match self {
            CouplingShape::GaussianReferenceExactOnly => None,
            CouplingShape::Constant => Some(1),
            CouplingShape::Step => Some(3),
            CouplingShape::Peak => Some(4),
        }
    }
}

/// Where the coupling is centered.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingCenter {
    /// Crossing point of the two diabatic curves, recomputed per offset.
    Crossing,
    Fixed(f64),
}

/// Which coupling function a grid propagator should use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingChoice {
    Reference,
    Piecewise,
}

/// Grid-independent description of the two-surface model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub mass: f64,
    pub surfaces: [HarmonicSurface; 2],
    pub coupling_amplitude: f64,
    pub coupling_exponent: f64,
    pub coupling_center: CouplingCenter,
    pub coupling_shape: CouplingShape,
}

pub const PRODUCTION_MASS: f64 = 1818.18;
pub const PRODUCTION_FORCE_CONSTANT: f64 = 0.015;
pub const PRODUCTION_COUPLING: f64 = 0.01;
pub const PRODUCTION_COUPLING_EXPONENT: f64 = 5.0;
/// Half distance between the two well centers.
pub const WELL_HALF_SEPARATION: f64 = 1.5;

impl ModelParams {
    /// Production Marcus model on the `[0, 20)` box: wells at 8.5 and 11.5,
    /// step coupling at the curve crossing.
    pub fn production(offset: f64) -> Self {
        let mid = 10.0;
        ModelParams {
            mass: PRODUCTION_MASS,
            surfaces: [
                HarmonicSurface {
                    force_constant: PRODUCTION_FORCE_CONSTANT,
                    center: mid - WELL_HALF_SEPARATION,
                    energy_shift: 0.0,
                },
                HarmonicSurface {
                    force_constant: PRODUCTION_FORCE_CONSTANT,
                    center: mid + WELL_HALF_SEPARATION,
                    energy_shift: offset,
                },
            ],
            coupling_amplitude: PRODUCTION_COUPLING,
            coupling_exponent: PRODUCTION_COUPLING_EXPONENT,
            coupling_center: CouplingCenter::Crossing,
            coupling_shape: CouplingShape::Step,
        }
    }

    /// Parameter-study model: same wells, zero offset, coupling fixed at
    /// the middle of a box of the given length.
    pub fn preliminary(box_length: f64) -> Self {
        let mid = box_length / 2.0;
        let mut m = ModelParams::production(0.0);
        m.surfaces[0].center = mid - WELL_HALF_SEPARATION;
        m.surfaces[1].center = mid + WELL_HALF_SEPARATION;
        m.coupling_center = CouplingCenter::Fixed(mid);
        m
    }

    pub fn with_shape(mut self, shape: CouplingShape) -> Self {
        self.coupling_shape = shape;
        self
    }

    /// `ΔG_1 - ΔG_0`.
    pub fn offset(&self) -> f64 {
        self.surfaces[1].energy_shift - self.surfaces[0].energy_shift
    }

    pub fn with_offset(mut self, offset: f64) -> Self {
        self.surfaces[1].energy_shift = self.surfaces[0].energy_shift + offset;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass.is_finite() && self.mass > 0.0) {
            return Err(invalid("mass must be positive"));
        }
        for s in &self.surfaces {
            if ![s.force_constant, s.center, s.energy_shift]
                .iter()
                .all(|v| v.is_finite())
            {
                return Err(invalid("surface parameters must be finite"));
            }
        }
        if !self.coupling_amplitude.is_finite() {
            return Err(invalid("coupling amplitude must be finite"));
        }
        if !(self.coupling_exponent.is_finite() && self.coupling_exponent > 0.0) {
            return Err(invalid("coupling exponent must be positive"));
        }
        Ok(())
    }

    /// Point where `V_0 = V_1`; for unequal curvatures the root closest to
    /// the midpoint of the two centers.
    pub fn crossing_point(&self) -> Option<f64> {
        let [s0, s1] = self.surfaces;
        // (γ0-γ1) x² - 2(γ0 a - γ1 b) x + (γ0 a² - γ1 b² + e0 - e1) = 0
        let qa = s0.force_constant - s1.force_constant;
        let qb = -2.0 * (s0.force_constant * s0.center - s1.force_constant * s1.center);
        let qc = s0.force_constant * s0.center * s0.center
            - s1.force_constant * s1.center * s1.center
            + s0.energy_shift
            - s1.energy_shift;
        if qa.abs() < 1e-15 {
            return (qb != 0.0).then(|| -qc / qb);
        }
        let disc = qb * qb - 4.0 * qa * qc;
        if disc < 0.0 {
            return None;
        }
        let mid = 0.5 * (s0.center + s1.center);
        let r1 = (-qb + disc.sqrt()) / (2.0 * qa);
        let r2 = (-qb - disc.sqrt()) / (2.0 * qa);
        Some(if (r1 - mid).abs() <= (r2 - mid).abs() {
            r1
        } else {
            r2
        })
    }

    pub fn coupling_center_value(&self) -> Result<f64> {
        match self.coupling_center {
            CouplingCenter::Fixed(x) => Ok(x),
            CouplingCenter::Crossing => self
                .crossing_point()
                .ok_or_else(|| invalid("diabatic curves do not cross")),
        }
    }

    pub fn reference_coupling(&self) -> Result<GaussianCoupling> {
        Ok(GaussianCoupling {
            amplitude: self.coupling_amplitude,
            exponent: self.coupling_exponent,
            center: self.coupling_center_value()?,
        })
    }

    /// Reorganization energy `V_0(x0_1) - V_0(x0_0)` for the stored wells.
    pub fn reorganization_energy(&self) -> f64 {
        let [s0, s1] = self.surfaces;
        let d = s1.center - s0.center;
        s0.force_constant * d * d
    }

    pub fn build(&self, grid: &GridSpec) -> Result<DiabaticModel> {
        self.validate()?;
        grid.validate()?;
        let reference = self.reference_coupling()?;
        let piecewise = piecewise_coupling(self.coupling_shape, &reference, grid)?;
        Ok(DiabaticModel {
            params: self.clone(),
            grid: *grid,
            reference,
            piecewise,
        })
    }
}

/// Area-preserving piecewise approximant of the reference coupling on a
/// grid; breakpoints are rounded to the nearest grid index.
pub fn piecewise_coupling(
    shape: CouplingShape,
    reference: &GaussianCoupling,
    grid: &GridSpec,
) -> Result<Option<PiecewiseLinearFn>> {
    let mu = reference.amplitude;
    let w = reference.equivalent_width();
    let xc = reference.center;
    let last = grid.points() as u64 - 1;
    let f = match shape {
        CouplingShape::GaussianReferenceExactOnly => return Ok(None),
        CouplingShape::Constant => PiecewiseLinearFn::constant(mu),
        CouplingShape::Step => {
            let [lo, hi] = distinct_indices(
                [
                    grid.nearest_index(xc - w / 2.0),
                    grid.nearest_index(xc + w / 2.0),
                ],
                last,
            )?;
            PiecewiseLinearFn::new(vec![lo, hi], vec![0.0; 3], vec![0.0, mu, 0.0])?
        }
        CouplingShape::Peak => {
            let [b0, b1, b2] = distinct_indices(
                [
                    grid.nearest_index(xc - w),
                    grid.nearest_index(xc),
                    grid.nearest_index(xc + w),
                ],
                last,
            )?;
            let rise = mu / (b1 - b0) as f64;
            let fall = mu / (b2 - b1) as f64;
            PiecewiseLinearFn::new(
                vec![b0, b1, b2],
                vec![0.0, rise, -fall, 0.0],
                vec![0.0, -rise * b0 as f64, fall * b2 as f64, 0.0],
            )?
        }
    };
    Ok(Some(f))
}

/// Pushes coincident rounded breakpoints apart so they stay strictly
/// increasing inside `[0, last]`.
fn distinct_indices<const K: usize>(mut idx: [u64; K], last: u64) -> Result<[u64; K]> {
    if (K as u64) > last + 1 {
        return Err(invalid("grid too coarse for the coupling shape"));
    }
    for i in 1..K {
        if idx[i] <= idx[i - 1] {
            idx[i] = idx[i - 1] + 1;
        }
    }
    let overflow = idx[K - 1].saturating_sub(last);
    if overflow > 0 {
        for v in idx.iter_mut() {
            *v -= overflow;
        }
        for i in (0..K - 1).rev() {
            if idx[i] >= idx[i + 1] {
                idx[i] = idx[i + 1] - 1;
            }
        }
    }
    Ok(idx)
}

/// A [`ModelParams`] realized on a specific grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DiabaticModel {
    pub params: ModelParams,
    pub grid: GridSpec,
    pub reference: GaussianCoupling,
    /// `None` for the reference-only shape.
    pub piecewise: Option<PiecewiseLinearFn>,
}

impl DiabaticModel {
    pub fn mass(&self) -> f64 {
        self.params.mass
    }

    pub fn surface(&self, i: usize) -> &HarmonicSurface {
        &self.params.surfaces[i]
    }

    pub fn offset(&self) -> f64 {
        self.params.offset()
    }

    pub fn potential_on_grid(&self, surface: usize) -> Vec<f64> {
        let s = self.params.surfaces[surface];
        (0..self.grid.points())
            .map(|j| s.potential(self.grid.x(j)))
            .collect()
    }

    /// The choice implied by the configured shape.
    pub fn default_coupling_choice(&self) -> CouplingChoice {
        if self.piecewise.is_some() {
            CouplingChoice::Piecewise
        } else {
            CouplingChoice::Reference
        }
    }

    pub fn coupling_on_grid(&self, choice: CouplingChoice) -> Result<Vec<f64>> {
        let n = self.grid.points();
        match choice {
            CouplingChoice::Reference => Ok((0..n)
                .map(|j| self.reference.value(self.grid.x(j)))
                .collect()),
            CouplingChoice::Piecewise => {
                let f = self.piecewise.as_ref().ok_or_else(|| {
                    invalid("model has no piecewise coupling (reference-only shape)")
                })?;
                Ok((0..n as u64).map(|j| f.eval(j)).collect())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crossing_moves_with_offset() {
        let m = ModelParams::production(0.0);
        assert!((m.crossing_point().unwrap() - 10.0).abs() < 1e-12);
        let lam = m.reorganization_energy();
        assert!((lam - 0.135).abs() < 1e-15);
        let at_lambda = ModelParams::production(lam);
        // activationless: crossing at the bottom of the initial well
        assert!((at_lambda.crossing_point().unwrap() - 11.5).abs() < 1e-9);
    }

    #[test]
    fn crossing_for_unequal_curvatures() {
        let mut m = ModelParams::production(0.02);
        m.surfaces[1].force_constant = 0.02;
        let x = m.crossing_point().unwrap();
        let [s0, s1] = m.surfaces;
        assert!((s0.potential(x) - s1.potential(x)).abs() < 1e-12);
    }

    #[test]
    fn step_width_preserves_area() {
        let m = ModelParams::production(0.135);
        let grid = GridSpec::new(8, 20.0).unwrap();
        let model = m.build(&grid).unwrap();
        let f = model.piecewise.as_ref().unwrap();
        assert_eq!(f.pieces(), 3);
        let area: f64 = (0..256).map(|j| f.eval(j)).sum::<f64>() * grid.dx();
        let w = (std::f64::consts::PI / 5.0f64).sqrt();
        assert!((w - 0.7927).abs() < 1e-4);
        assert!((area - 0.01 * w).abs() < 0.01 * grid.dx());
    }

    #[test]
    fn peak_is_a_triangle() {
        let m = ModelParams::production(0.135).with_shape(CouplingShape::Peak);
        let grid = GridSpec::new(9, 20.0).unwrap();
        let model = m.build(&grid).unwrap();
        let f = model.piecewise.as_ref().unwrap();
        let bp = f.breakpoints();
        assert_eq!(bp.len(), 3);
        assert!(f.eval(bp[0]).abs() < 1e-15);
        assert!((f.eval(bp[1]) - 0.01).abs() < 1e-15);
        assert!(f.eval(bp[2]).abs() < 1e-15);
        assert_eq!(f.eval(0), 0.0);
    }

    #[test]
    fn coarse_grid_keeps_breakpoints_distinct() {
        let m = ModelParams::production(0.0);
        let grid = GridSpec::new(2, 20.0).unwrap();
        let f = m.build(&grid).unwrap().piecewise.unwrap();
        assert!(f.breakpoints()[0] < f.breakpoints()[1]);
        assert!(distinct_indices([3, 3, 3], 3).unwrap() == [1, 2, 3]);
    }

    #[test]
    fn reference_only_shape_has_no_piecewise() {
        let m = ModelParams::production(0.0).with_shape(CouplingShape::GaussianReferenceExactOnly);
        let model = m.build(&GridSpec::new(6, 20.0).unwrap()).unwrap();
        assert!(model.coupling_on_grid(CouplingChoice::Piecewise).is_err());
        assert_eq!(model.default_coupling_choice(), CouplingChoice::Reference);
    }
}
