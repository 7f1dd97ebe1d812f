use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::statevec::{BasisSampler, Gate, GateKind, MeasurementCounts, StateVector};

/// Depolarizing gate noise and per-qubit readout confusion.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseSpec {
    /// Probability of a random Pauli after each single-qubit gate.
    pub depolarizing_1q: f64,
    /// Probability of a random two-qubit Pauli after each controlled gate.
    pub depolarizing_2q: f64,
    /// `readout[q][true][measured]`; empty means perfect readout.
    pub readout: Vec<[[f64; 2]; 2]>,
}

impl NoiseSpec {
    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        for p in [self.depolarizing_1q, self.depolarizing_2q] {
            if !(0.0..=1.0).contains(&p) {
                return Err(invalid(format!(
                    "depolarizing probability {p} outside [0, 1]"
                )));
            }
        }
        if !self.readout.is_empty() && self.readout.len() != num_qubits {
            return Err(invalid(format!(
                "readout confusion given for {} qubits, circuit has {num_qubits}",
                self.readout.len()
            )));
        }
        for (q, m) in self.readout.iter().enumerate() {
            for row in m {
                if row.iter().any(|&v| !(0.0..=1.0).contains(&v))
                    || (row[0] + row[1] - 1.0).abs() > 1e-9
                {
                    return Err(invalid(format!(
                        "readout matrix of qubit {q} is not row-stochastic"
                    )));
                }
            }
        }
        Ok(())
    }

    fn has_gate_noise(&self) -> bool {
        self.depolarizing_1q > 0.0 || self.depolarizing_2q > 0.0
    }

    fn has_readout_noise(&self) -> bool {
        self.readout.iter().any(|m| m[0][1] > 0.0 || m[1][0] > 0.0)
    }

    pub fn is_noiseless(&self) -> bool {
        !self.has_gate_noise() && !self.has_readout_noise()
    }

    fn confuse<R: Rng + ?Sized>(&self, mut outcome: usize, rng: &mut R) -> usize {
        for (q, m) in self.readout.iter().enumerate() {
            let bit = outcome >> q & 1;
            let flip = m[bit][1 - bit];
            if flip > 0.0 && rng.gen::<f64>() < flip {
                outcome ^= 1 << q;
            }
        }
        outcome
    }
}

const PAULIS: [GateKind; 3] = [GateKind::X, GateKind::Y, GateKind::Z];

/// Runs `gates` on `initial` `shots` times as stochastic Pauli trajectories
/// and samples one outcome per trajectory. Without noise this is exactly
/// `sample_counts_with` on the prepared state, drawing the same numbers.
pub fn sample_noisy_counts<R: Rng + ?Sized>(
    initial: &StateVector,
    gates: &[Gate],
    noise: &NoiseSpec,
    shots: u64,
    rng: &mut R,
) -> Result<MeasurementCounts> {
    let n = initial.num_qubits();
    noise.validate(n)?;
    for g in gates {
        g.validate(n)?;
    }
    if shots == 0 {
        return Err(invalid("shots must be positive"));
    }
    if noise.is_noiseless() {
        let mut st = initial.clone();
        st.apply_all(gates)?;
        return st.sample_counts_with(shots, rng);
    }
    let mut counts = MeasurementCounts::empty(n);
    if !noise.has_gate_noise() {
        let mut st = initial.clone();
        st.apply_all(gates)?;
        let sampler = BasisSampler::new(st.amplitudes());
        for _ in 0..shots {
            let k = sampler.draw(rng);
            counts.record(noise.confuse(k, rng));
        }
        return Ok(counts);
    }
    for _ in 0..shots {
        let mut st = initial.clone();
        for g in gates {
            st.apply_unchecked(g);
            let touched: Vec<usize> = g.qubits().collect();
            let p = if touched.len() == 1 {
                noise.depolarizing_1q
            } else {
                noise.depolarizing_2q
            };
            if p > 0.0 && rng.gen::<f64>() < p {
                // uniform over the 4^m - 1 non-identity Pauli strings
                let choices = (1usize << (2 * touched.len())) - 1;
                let mut r = rng.gen_range(1..=choices);
                for &q in &touched {
                    let d = r & 3;
                    r >>= 2;
                    if d > 0 {
                        st.apply_unchecked(&Gate::new(PAULIS[d - 1], q));
                    }
                }
            }
        }
        let k = BasisSampler::new(st.amplitudes()).draw(rng);
        counts.record(noise.confuse(k, rng));
    }
    Ok(counts)
}
