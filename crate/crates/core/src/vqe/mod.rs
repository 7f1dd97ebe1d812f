//! Variational preparation of the initial Gaussian on a 3-qubit grid.

mod noise;
mod spsa;

pub use noise::{sample_noisy_counts, NoiseSpec};
pub use spsa::{spsa_minimize, SpsaConfig, SpsaResult};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuits::build_qft;
use crate::dynamics::GridSpec;
use crate::error::{invalid, Result};
use crate::statevec::{Gate, MeasurementCounts, StateVector};

pub const NUM_QUBITS: usize = 3;
pub const NUM_PARAMS: usize = 9;
/// `|100⟩`, the grid point at `x = 2`.
pub const INITIAL_STATE: usize = 4;
/// Optimized angles reported for the hardware run.
pub const REFERENCE_ANGLES: [f64; NUM_PARAMS] = [
    -0.3383, -1.5502, 2.3662, -0.6743, -0.5438, -2.0766, -1.3717, 0.3663, -0.8286,
];

/// Angles of the three RY layers, layer by layer, qubit 0 first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct AnsatzParams(Vec<f64>);

impl AnsatzParams {
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        if theta.len() != NUM_PARAMS {
            return Err(invalid(format!(
                "ansatz takes {NUM_PARAMS} angles, got {}",
                theta.len()
            )));
        }
        Ok(AnsatzParams(theta))
    }

    pub fn zeros() -> Self {
        AnsatzParams(vec![0.0; NUM_PARAMS])
    }

    pub fn reference() -> Self {
        AnsatzParams(REFERENCE_ANGLES.to_vec())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for AnsatzParams {
    type Error = crate::error::Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        AnsatzParams::new(v)
    }
}

impl From<AnsatzParams> for Vec<f64> {
    fn from(p: AnsatzParams) -> Vec<f64> {
        p.0
    }
}

/// RY layer, CNOT(0→1) CNOT(1→2), RY layer, CNOTs, RY layer.
pub fn ansatz_gates(theta: &[f64]) -> Result<Vec<Gate>> {
    if theta.len() != NUM_PARAMS {
        return Err(invalid(format!(
            "ansatz takes {NUM_PARAMS} angles, got {}",
            theta.len()
        )));
    }
    let mut gates = Vec::with_capacity(13);
    for (layer, chunk) in theta.chunks(NUM_QUBITS).enumerate() {
        if layer > 0 {
            gates.push(Gate::cnot(0, 1));
            gates.push(Gate::cnot(1, 2));
        }
        for (q, &t) in chunk.iter().enumerate() {
            gates.push(Gate::ry(q, t));
        }
    }
    Ok(gates)
}

pub fn ansatz_state(theta: &AnsatzParams, initial: usize) -> Result<StateVector> {
    let mut st = StateVector::new_basis_state(NUM_QUBITS, initial)?;
    st.apply_all(&ansatz_gates(theta.as_slice())?)?;
    Ok(st)
}

/// Ground state of `p²/2m + mω²(x - x0)²/2` on a small grid, read out in
/// position and (after a QFT) momentum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrepProblem {
    pub grid: GridSpec,
    pub mass: f64,
    pub omega: f64,
    pub center: f64,
    pub p0: f64,
}

impl Default for PrepProblem {
    fn default() -> Self {
        PrepProblem {
            grid: GridSpec {
                num_qubits: NUM_QUBITS,
                length: 4.0,
            },
            mass: 1.0,
            omega: 1.0,
            center: 2.0,
            p0: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyEstimate {
    pub potential: f64,
    pub kinetic: f64,
}

impl EnergyEstimate {
    pub fn total(&self) -> f64 {
        self.potential + self.kinetic
    }
}

impl PrepProblem {
    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(invalid("mass must be positive"));
        }
        if !(self.omega.is_finite() && self.center.is_finite() && self.p0.is_finite()) {
            return Err(invalid("oscillator parameters must be finite"));
        }
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.grid.num_qubits
    }

    pub fn register(&self) -> Vec<usize> {
        (0..self.num_qubits()).collect()
    }

    /// `(mω²/2)(jΔx - x0)²` per position outcome.
    pub fn potential_diagonal(&self) -> Vec<f64> {
        (0..self.grid.points())
            .map(|j| {
                let d = self.grid.x(j) - self.center;
                0.5 * self.mass * self.omega * self.omega * d * d
            })
            .collect()
    }

    /// `(jΔp - p_c - p0)²/2m` per outcome of the QFT-rotated register.
    pub fn kinetic_diagonal(&self) -> Vec<f64> {
        (0..self.grid.points())
            .map(|j| {
                let p = self.grid.p(j) - self.p0;
                p * p / (2.0 * self.mass)
            })
            .collect()
    }

    /// Rotation into the momentum readout basis.
    pub fn momentum_basis_change(&self) -> Vec<Gate> {
        build_qft(&self.register())
    }

    /// Grid Hamiltonian whose expectation the two estimators measure.
    pub fn hamiltonian(&self) -> DMatrix<Complex64> {
        let n = self.grid.points();
        let w = 2.0 * std::f64::consts::PI / n as f64;
        let kin = self.kinetic_diagonal();
        let pot = self.potential_diagonal();
        DMatrix::from_fn(n, n, |a, b| {
            let mut h: Complex64 = (0..n)
                .map(|k| Complex64::from_polar(kin[k] / n as f64, w * (k * (b + n - a) % n) as f64))
                .sum();
            if a == b {
                h += pot[a];
            }
            h
        })
    }

    /// Lowest eigenvalue and eigenvector of [`Self::hamiltonian`].
    pub fn ground_state(&self) -> Result<(f64, StateVector)> {
        self.validate()?;
        let eig = self.hamiltonian().symmetric_eigen();
        let (i, &e0) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty spectrum");
        let v: Vec<Complex64> = eig.eigenvectors.column(i).iter().copied().collect();
        Ok((e0, StateVector::from_amplitudes(v)?))
    }

    pub fn energy_from_distributions(&self, position: &[f64], momentum: &[f64]) -> EnergyEstimate {
        let dot = |p: &[f64], d: Vec<f64>| p.iter().zip(d).map(|(a, b)| a * b).sum::<f64>();
        EnergyEstimate {
            potential: dot(position, self.potential_diagonal()),
            kinetic: dot(momentum, self.kinetic_diagonal()),
        }
    }

    pub fn energy_from_counts(
        &self,
        position: &MeasurementCounts,
        momentum: &MeasurementCounts,
    ) -> EnergyEstimate {
        self.energy_from_distributions(&position.frequencies(), &momentum.frequencies())
    }

    fn momentum_state(&self, state: &StateVector) -> Result<StateVector> {
        let mut m = state.clone();
        m.apply_all(&self.momentum_basis_change())?;
        Ok(m)
    }
}

/// Infinite-shot limit of the estimators.
pub fn exact_energy(state: &StateVector, problem: &PrepProblem) -> Result<EnergyEstimate> {
    check_register(state, problem)?;
    let mom = problem.momentum_state(state)?;
    Ok(problem.energy_from_distributions(&state.probabilities(), &mom.probabilities()))
}

/// Shot-based energy from independent position and momentum measurements.
pub fn estimate_energy(
    state: &StateVector,
    problem: &PrepProblem,
    shots: u64,
    rng_seed: u64,
) -> Result<EnergyEstimate> {
    estimate_energy_with(
        state,
        problem,
        shots,
        &mut ChaCha8Rng::seed_from_u64(rng_seed),
    )
}

pub fn estimate_energy_with<R: Rng + ?Sized>(
    state: &StateVector,
    problem: &PrepProblem,
    shots: u64,
    rng: &mut R,
) -> Result<EnergyEstimate> {
    check_register(state, problem)?;
    let pos = state.sample_counts_with(shots, rng)?;
    let mom = problem
        .momentum_state(state)?
        .sample_counts_with(shots, rng)?;
    Ok(problem.energy_from_counts(&pos, &mom))
}

fn check_register(state: &StateVector, problem: &PrepProblem) -> Result<()> {
    if state.num_qubits() != problem.num_qubits() {
        return Err(invalid(format!(
            "state has {} qubits, problem grid has {}",
            state.num_qubits(),
            problem.num_qubits()
        )));
    }
    Ok(())
}

/// Sampled energy of the ansatz at `theta`, run through the noise model.
pub fn sampled_ansatz_energy<R: Rng + ?Sized>(
    problem: &PrepProblem,
    theta: &[f64],
    initial: usize,
    shots: u64,
    noise: &NoiseSpec,
    rng: &mut R,
) -> Result<f64> {
    let start = StateVector::new_basis_state(problem.num_qubits(), initial)?;
    let mut gates = ansatz_gates(theta)?;
    let pos = sample_noisy_counts(&start, &gates, noise, shots, rng)?;
    gates.extend(problem.momentum_basis_change());
    let mom = sample_noisy_counts(&start, &gates, noise, shots, rng)?;
    Ok(problem.energy_from_counts(&pos, &mom).total())
}

/// One VQE run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VqeOutcome {
    pub seed: u64,
    pub theta: AnsatzParams,
    /// Exact energy of the final angles.
    pub energy: f64,
    pub ground_energy: f64,
    pub fidelity: f64,
    pub spsa: SpsaResult,
}

impl VqeOutcome {
    /// Final energy within `tolerance` (relative) of the ground energy.
    pub fn converged(&self, tolerance: f64) -> bool {
        self.energy < self.ground_energy + tolerance * self.ground_energy.abs()
    }
}

/// SPSA from all-zero angles on the sampled energy.
pub fn vqe_minimize(
    problem: &PrepProblem,
    cfg: &SpsaConfig,
    noise: Option<&NoiseSpec>,
    shots: u64,
) -> Result<VqeOutcome> {
    problem.validate()?;
    if problem.num_qubits() != NUM_QUBITS {
        return Err(invalid("the ansatz is defined for a 3-qubit grid"));
    }
    let quiet = NoiseSpec::default();
    let noise = noise.unwrap_or(&quiet);
    noise.validate(NUM_QUBITS)?;
    let mut failure = None;
    let result = spsa_minimize(
        |theta, rng| match sampled_ansatz_energy(problem, theta, INITIAL_STATE, shots, noise, rng) {
            Ok(e) => e,
            Err(err) => {
                failure.get_or_insert(err);
                f64::NAN
            }
        },
        &[0.0; NUM_PARAMS],
        cfg,
    )?;
    if let Some(err) = failure {
        return Err(err);
    }
    let theta = AnsatzParams::new(result.theta.clone())?;
    let state = ansatz_state(&theta, INITIAL_STATE)?;
    let (e0, ground) = problem.ground_state()?;
    Ok(VqeOutcome {
        seed: cfg.seed,
        energy: exact_energy(&state, problem)?.total(),
        ground_energy: e0,
        fidelity: state.fidelity(&ground),
        theta,
        spsa: result,
    })
}

/// Independent runs for several seeds, in parallel.
pub fn vqe_seeds(
    problem: &PrepProblem,
    cfg: &SpsaConfig,
    seeds: &[u64],
    noise: Option<&NoiseSpec>,
    shots: u64,
) -> Result<Vec<VqeOutcome>> {
    use rayon::prelude::*;
    seeds
        .par_iter()
        .map(|&seed| {
            let cfg = SpsaConfig {
                seed,
                ..cfg.clone()
            };
            vqe_minimize(problem, &cfg, noise, shots)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_angles_follow_the_cnot_chain() {
        let st = ansatz_state(&AnsatzParams::zeros(), INITIAL_STATE).unwrap();
        // |100⟩ has only qubit 2 set, which controls nothing
        assert!((st.amplitudes()[4].re - 1.0).abs() < 1e-15);
        let st = ansatz_state(&AnsatzParams::zeros(), 1).unwrap();
        // q0 → q1 → q2: |001⟩ → |011⟩ → |111⟩, twice gives |101⟩
        assert!((st.amplitudes()[0b101].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn wrong_parameter_count() {
        assert!(AnsatzParams::new(vec![0.0; 8]).is_err());
        assert!(ansatz_gates(&[0.0; 10]).is_err());
        assert!(serde_json::from_str::<AnsatzParams>("[1.0, 2.0]").is_err());
    }

    #[test]
    fn position_eigenstate_at_center_has_no_potential_energy() {
        let p = PrepProblem::default();
        let st = StateVector::new_basis_state(3, INITIAL_STATE).unwrap();
        let e = estimate_energy(&st, &p, 100, 1).unwrap();
        assert_eq!(e.potential, 0.0);
    }

    #[test]
    fn hamiltonian_is_real_for_zero_momentum() {
        let h = PrepProblem::default().hamiltonian();
        assert!(h.iter().all(|z| z.im.abs() < 1e-12));
        assert!((&h - h.adjoint()).camax() < 1e-12);
    }
}
