use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::model::{CouplingChoice, DiabaticModel};
use super::record::{Propagator, RecordEntry, RunMetadata, RunRecord};
use super::trotter::{TrotterConfig, NORM_TOLERANCE};
use crate::error::{invalid, Error, Result};

/// Lie–Trotter step applied directly to the `2𝒩` grid wavefunction with
/// FFTs. Same factor ordering as the circuit (K, V, then C), so it
/// reproduces the circuit step up to rounding.
pub struct SplitOperator {
    points: usize,
    kinetic: Vec<Complex64>,
    potential: [Vec<Complex64>; 2],
    cos: Vec<f64>,
    sin: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
}

impl SplitOperator {
    pub fn new(model: &DiabaticModel, coupling: CouplingChoice, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(invalid(format!("time step must be positive, got {dt}")));
        }
        let grid = &model.grid;
        let n = grid.points();
        let kinetic = (0..n)
            .map(|k| {
                let p = grid.signed_frequency(k) as f64 * grid.dp();
                Complex64::from_polar(1.0 / n as f64, -dt * p * p / (2.0 * model.mass()))
            })
            .collect();
        let phases = |s: usize| -> Vec<Complex64> {
            model
                .potential_on_grid(s)
                .into_iter()
                .map(|v| Complex64::from_polar(1.0, -dt * v))
                .collect()
        };
        let f = model.coupling_on_grid(coupling)?;
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Ok(SplitOperator {
            points: n,
            kinetic,
            potential: [phases(0), phases(1)],
            cos: f.iter().map(|&v| (dt * v).cos()).collect(),
            sin: f.iter().map(|&v| (dt * v).sin()).collect(),
            forward,
            inverse,
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        })
    }

    pub fn step(&mut self, psi: &mut [Complex64]) {
        let n = self.points;
        for half in psi.chunks_exact_mut(n) {
            self.forward.process_with_scratch(half, &mut self.scratch);
            for (a, k) in half.iter_mut().zip(&self.kinetic) {
                *a *= k;
            }
            self.inverse.process_with_scratch(half, &mut self.scratch);
        }
        for (s, half) in psi.chunks_exact_mut(n).enumerate() {
            for (a, v) in half.iter_mut().zip(&self.potential[s]) {
                *a *= v;
            }
        }
        let (lo, hi) = psi.split_at_mut(n);
        let mi = Complex64::new(0.0, -1.0);
        for j in 0..n {
            let (a, b) = (lo[j], hi[j]);
            lo[j] = a * self.cos[j] + mi * self.sin[j] * b;
            hi[j] = b * self.cos[j] + mi * self.sin[j] * a;
        }
    }

    pub fn trajectory(
        &mut self,
        psi0: &[Complex64],
        n_steps: usize,
        dt: f64,
    ) -> Result<Vec<RecordEntry>> {
        if psi0.len() != 2 * self.points {
            return Err(invalid(format!(
                "wavefunction has {} entries, expected {}",
                psi0.len(),
                2 * self.points
            )));
        }
        let mut psi = psi0.to_vec();
        let mut out = Vec::with_capacity(n_steps + 1);
        for s in 0..=n_steps {
            if s > 0 {
                self.step(&mut psi);
            }
            let p0: f64 = psi[..self.points].iter().map(|a| a.norm_sqr()).sum();
            let norm = p0 + psi[self.points..].iter().map(|a| a.norm_sqr()).sum::<f64>();
            let drift = (norm - 1.0).abs();
            if drift > NORM_TOLERANCE {
                return Err(Error::NormDrift {
                    step: s,
                    drift,
                    tolerance: NORM_TOLERANCE,
                });
            }
            out.push(RecordEntry {
                t: s as f64 * dt,
                p0: p0.clamp(0.0, 1.0),
                norm,
            });
        }
        Ok(out)
    }
}

/// Split-operator trajectory of a grid wavefunction as a [`RunRecord`].
pub fn split_operator_run(
    model: &DiabaticModel,
    coupling: CouplingChoice,
    psi0: &[Complex64],
    cfg: &TrotterConfig,
) -> Result<RunRecord> {
    cfg.validate()?;
    let mut op = SplitOperator::new(model, coupling, cfg.dt)?;
    Ok(RunRecord {
        entries: op.trajectory(psi0, cfg.n_steps, cfg.dt)?,
        metadata: Some(RunMetadata::new(
            model,
            Propagator::SplitOperator,
            coupling,
            *cfg,
        )),
    })
}
