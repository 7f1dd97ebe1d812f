use serde::{Deserialize, Serialize};

use super::model::{CouplingChoice, DiabaticModel};
use super::record::{Propagator, RecordEntry, RunMetadata, RunRecord};
use crate::circuits::{
    build_cqft, build_cqft_inverse, build_piecewise_rx, build_quadratic_phase, QuadraticPhaseSpec,
    RegisterLayout,
};
use crate::error::{invalid, Error, Result};
use crate::statevec::{Control, Gate, StateVector};

/// Allowed deviation of `⟨Ψ|Ψ⟩` from one before a run is aborted.
pub const NORM_TOLERANCE: f64 = 1e-6;

/// First-order product formula: each step applies K, then V, then C.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrotterConfig {
    pub dt: f64,
    pub n_steps: usize,
}

impl TrotterConfig {
    /// `dt = 10`, `T = 2000`.
    pub fn production() -> Self {
        TrotterConfig {
            dt: 10.0,
            n_steps: 200,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(invalid(format!(
                "time step must be positive, got {}",
                self.dt
            )));
        }
        Ok(())
    }

    pub fn total_time(&self) -> f64 {
        self.dt * self.n_steps as f64
    }

    /// Same total time with the step divided by `factor`.
    pub fn refined(&self, factor: usize) -> Self {
        TrotterConfig {
            dt: self.dt / factor as f64,
            n_steps: self.n_steps * factor,
        }
    }
}

/// The three blocks of one Trotter step.
#[derive(Debug, Clone, PartialEq)]
pub struct TrotterBlocks {
    pub kinetic: Vec<Gate>,
    pub potential: Vec<Gate>,
    pub coupling: Vec<Gate>,
}

impl TrotterBlocks {
    pub fn into_step(self) -> Vec<Gate> {
        let mut g = self.kinetic;
        g.extend(self.potential);
        g.extend(self.coupling);
        g
    }

    pub fn gate_count(&self) -> usize {
        self.kinetic.len() + self.potential.len() + self.coupling.len()
    }
}

pub fn build_trotter_blocks(
    model: &DiabaticModel,
    layout: &RegisterLayout,
    dt: f64,
) -> Result<TrotterBlocks> {
    let grid = &model.grid;
    let coupling = model.piecewise.as_ref().ok_or_else(|| {
        Error::Build(
            "the reference Gaussian coupling has no circuit; pick a piecewise shape".into(),
        )
    })?;
    if layout.num_position_qubits() != grid.num_qubits {
        return Err(Error::Build(format!(
            "layout has {} position qubits, grid needs {}",
            layout.num_position_qubits(),
            grid.num_qubits
        )));
    }
    layout.validate(coupling.pieces())?;
    let pos = &layout.position;

    let mut kinetic = build_cqft(pos);
    let k_spec = QuadraticPhaseSpec {
        gamma: 1.0 / (2.0 * model.mass()),
        x0: -grid.p_center(),
        alpha: 0.0,
        tau: dt,
        delta: grid.dp(),
    };
    kinetic.extend(build_quadratic_phase(&k_spec, pos, None));
    kinetic.extend(build_cqft_inverse(pos));

    let mut potential = Vec::new();
    for (s, control) in [
        Control::off(layout.surface_ancilla),
        Control::on(layout.surface_ancilla),
    ]
    .into_iter()
    .enumerate()
    {
        let surf = model.surface(s);
        let spec = QuadraticPhaseSpec {
            gamma: surf.force_constant,
            x0: -surf.center,
            alpha: surf.energy_shift,
            tau: dt,
            delta: grid.dx(),
        };
        potential.extend(build_quadratic_phase(&spec, pos, Some(control)));
    }

    let coupling = build_piecewise_rx(coupling, dt, layout)?;
    Ok(TrotterBlocks {
        kinetic,
        potential,
        coupling,
    })
}

/// Gate list for one step `exp(-iC dt) exp(-iV dt) exp(-iK dt)`.
pub fn build_trotter_step(
    model: &DiabaticModel,
    layout: &RegisterLayout,
    dt: f64,
) -> Result<Vec<Gate>> {
    Ok(build_trotter_blocks(model, layout, dt)?.into_step())
}

/// Population of surface 0, `(⟨Z_anc⟩ + 1)/2` for a normalized state. Summed
/// directly over the ancilla-clear amplitudes so an empty surface gives
/// exactly zero.
pub fn surface_zero_population(state: &StateVector, ancilla: usize) -> Result<f64> {
    Ok(state.marginal_probabilities(&[ancilla])?[0])
}

/// Applies `step` repeatedly, recording `(t, P0, ⟨Ψ|Ψ⟩)` before the first
/// step and after each one.
pub fn run_steps(
    state: &mut StateVector,
    step: &[Gate],
    ancilla: usize,
    cfg: &TrotterConfig,
) -> Result<Vec<RecordEntry>> {
    cfg.validate()?;
    for g in step {
        g.validate(state.num_qubits())?;
    }
    let mut entries = Vec::with_capacity(cfg.n_steps + 1);
    let record = |state: &StateVector, s: usize| -> Result<RecordEntry> {
        let norm = state.norm_sqr();
        let drift = (norm - 1.0).abs();
        if drift > NORM_TOLERANCE {
            return Err(Error::NormDrift {
                step: s,
                drift,
                tolerance: NORM_TOLERANCE,
            });
        }
        Ok(RecordEntry {
            t: s as f64 * cfg.dt,
            p0: surface_zero_population(state, ancilla)?.clamp(0.0, 1.0),
            norm,
        })
    };
    entries.push(record(state, 0)?);
    for s in 1..=cfg.n_steps {
        for g in step {
            state.apply_unchecked(g);
        }
        entries.push(record(state, s)?);
    }
    Ok(entries)
}

/// Trotterized circuit evolution. `state` is left at the final time.
pub fn evolve(
    state: &mut StateVector,
    model: &DiabaticModel,
    layout: &RegisterLayout,
    cfg: &TrotterConfig,
) -> Result<RunRecord> {
    let step = build_trotter_step(model, layout, cfg.dt)?;
    log::debug!(
        "circuit evolution: {} gates per step, {} steps, {} qubits",
        step.len(),
        cfg.n_steps,
        state.num_qubits()
    );
    let entries = run_steps(state, &step, layout.surface_ancilla, cfg)?;
    Ok(RunRecord {
        entries,
        metadata: Some(RunMetadata::new(
            model,
            Propagator::Circuit,
            CouplingChoice::Piecewise,
            *cfg,
        )),
    })
}

impl RunMetadata {
    pub fn new(
        model: &DiabaticModel,
        propagator: Propagator,
        coupling: CouplingChoice,
        trotter: TrotterConfig,
    ) -> Self {
        RunMetadata {
            propagator,
            offset: model.offset(),
            reorganization_energy: model.params.reorganization_energy(),
            coupling_shape: model.params.coupling_shape,
            coupling,
            grid: model.grid,
            trotter,
            model: model.params.clone(),
            packet: None,
            initial_surface: None,
        }
    }
}
