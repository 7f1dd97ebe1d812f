//! Two-surface wavepacket dynamics: model, initial states, the Trotterized
//! circuit, grid reference propagators and offset sweeps.

mod exact;
mod grid;
mod model;
mod packet;
mod record;
mod split;
mod trotter;

pub use exact::{exact_propagator, exact_run, grid_hamiltonian, ExactPropagator, MAX_EXACT_POINTS};
pub use grid::{fourier_diagonal_matrix, kinetic_matrix, GridSpec};
pub use model::{
    piecewise_coupling, CouplingCenter, CouplingChoice, CouplingShape, DiabaticModel,
    GaussianCoupling, HarmonicSurface, ModelParams, PRODUCTION_COUPLING,
    PRODUCTION_COUPLING_EXPONENT, PRODUCTION_FORCE_CONSTANT, PRODUCTION_MASS, WELL_HALF_SEPARATION,
};
pub use packet::{
    embed_grid_wavefunction, extract_grid_wavefunction, load_gaussian, GaussianPacket,
    LEAK_THRESHOLD,
};
pub use record::{Propagator, RecordEntry, RunMetadata, RunRecord, CSV_HEADER};
pub use split::{split_operator_run, SplitOperator};
pub use trotter::{
    build_trotter_blocks, build_trotter_step, evolve, run_steps, surface_zero_population,
    TrotterBlocks, TrotterConfig, NORM_TOLERANCE,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuits::RegisterLayout;
use crate::error::{invalid, Result};

/// Everything one trajectory needs apart from the offset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSpec {
    pub model: ModelParams,
    pub grid: GridSpec,
    pub packet: GaussianPacket,
    pub initial_surface: usize,
    pub trotter: TrotterConfig,
    pub propagator: Propagator,
}

impl SimulationSpec {
    /// Production run at the given offset, circuit propagator.
    pub fn production(offset: f64) -> Self {
        SimulationSpec {
            model: ModelParams::production(offset),
            grid: GridSpec {
                num_qubits: 8,
                length: 20.0,
            },
            packet: GaussianPacket::production(),
            initial_surface: 1,
            trotter: TrotterConfig::production(),
            propagator: Propagator::Circuit,
        }
    }

    /// Parameter-study run (zero offset, packet at `L/2 + 4` moving left).
    pub fn preliminary() -> Self {
        SimulationSpec {
            model: ModelParams::preliminary(20.0),
            packet: GaussianPacket::preliminary(),
            ..SimulationSpec::production(0.0)
        }
    }

    pub fn with_propagator(mut self, p: Propagator) -> Self {
        self.propagator = p;
        self
    }

    pub fn with_shape(mut self, shape: CouplingShape) -> Self {
        self.model.coupling_shape = shape;
        self
    }

    pub fn with_grid_qubits(mut self, n: usize) -> Self {
        self.grid.num_qubits = n;
        self
    }

    /// Coupling implied by the shape: the Gaussian for the reference-only
    /// shape, the piecewise approximant otherwise.
    pub fn coupling_choice(&self) -> CouplingChoice {
        match self.model.coupling_shape {
            CouplingShape::GaussianReferenceExactOnly => CouplingChoice::Reference,
            _ => CouplingChoice::Piecewise,
        }
    }

    pub fn run(&self) -> Result<RunRecord> {
        let model = self.model.build(&self.grid)?;
        let coupling = self.coupling_choice();
        let mut record = match self.propagator {
            Propagator::Circuit => {
                let pieces = model
                    .piecewise
                    .as_ref()
                    .map(|f| f.pieces())
                    .ok_or_else(|| {
                        invalid("the circuit propagator needs a piecewise coupling shape")
                    })?;
                let layout = RegisterLayout::contiguous(self.grid.num_qubits, pieces);
                let mut state =
                    load_gaussian(&self.grid, &self.packet, self.initial_surface, &layout)?;
                evolve(&mut state, &model, &layout, &self.trotter)?
            }
            Propagator::Exact => {
                let psi = self
                    .packet
                    .grid_wavefunction(&self.grid, self.initial_surface)?;
                exact_run(&model, coupling, &psi, &self.trotter)?
            }
            Propagator::SplitOperator => {
                let psi = self
                    .packet
                    .grid_wavefunction(&self.grid, self.initial_surface)?;
                split_operator_run(&model, coupling, &psi, &self.trotter)?
            }
        };
        if let Some(meta) = record.metadata.as_mut() {
            meta.packet = Some(self.packet);
            meta.initial_surface = Some(self.initial_surface);
        }
        Ok(record)
    }
}

/// Independent runs in parallel; output order follows input.
pub fn run_all(specs: &[SimulationSpec]) -> Result<Vec<RunRecord>> {
    specs.par_iter().map(SimulationSpec::run).collect()
}

/// One run per offset, with `ΔG_1 - ΔG_0` set per entry.
pub fn sweep_offsets(offsets: &[f64], spec: &SimulationSpec) -> Result<Vec<RunRecord>> {
    if offsets.is_empty() {
        return Err(invalid("offset list is empty"));
    }
    let specs: Vec<SimulationSpec> = offsets
        .iter()
        .map(|&off| {
            let mut s = spec.clone();
            s.model = s.model.with_offset(off);
            s
        })
        .collect();
    run_all(&specs)
}

/// `count` evenly spaced offsets from 0 to `2λ`.
pub fn volcano_offsets(model: &ModelParams, count: usize) -> Vec<f64> {
    let top = 2.0 * model.reorganization_energy();
    match count {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..count)
            .map(|i| top * i as f64 / (count - 1) as f64)
            .collect(),
    }
}
