use serde::{Deserialize, Serialize};

use crate::statevec::{Control, Gate};

/// Diagonal operator `M[n,n] = exp(-i τ [γ (Δ n + x0)² + α])` on an integer
/// register `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticPhaseSpec {
    pub gamma: f64,
    pub x0: f64,
    pub alpha: f64,
    pub tau: f64,
    pub delta: f64,
}

impl QuadraticPhaseSpec {
    /// Exponent argument `γ (Δ n + x0)² + α` for basis state `n`.
    pub fn energy(&self, n: usize) -> f64 {
        let y = self.delta * n as f64 + self.x0;
        self.gamma * y * y + self.alpha
    }
}

/// Builds the diagonal quadratic-phase circuit.
///
/// With `n = Σ 2^i b_i`, the exponent expands into a constant, single-bit
/// terms (one PHASE per qubit) and pairwise products (one controlled PHASE
/// per qubit pair). The constant becomes a true global phase through
/// `X·P(φ)·X·P(φ)` on `register[0]`, which matters once the whole block is
/// controlled. Zero-angle gates are omitted.
pub fn build_quadratic_phase(
    spec: &QuadraticPhaseSpec,
    register: &[usize],
    control: Option<Control>,
) -> Vec<Gate> {
    let QuadraticPhaseSpec {
        gamma,
        x0,
        alpha,
        tau,
        delta,
    } = *spec;
    let n = register.len();
    let extra: Vec<Control> = control.into_iter().collect();
    let mut gates = Vec::with_capacity(n * (n + 1) / 2 + 4);

    let constant = -tau * (gamma * x0 * x0 + alpha);
    if constant != 0.0 && n > 0 {
        let q = register[0];
        gates.push(Gate::x(q));
        gates.push(Gate::phase(q, constant).with_controls(&extra));
        gates.push(Gate::x(q));
        gates.push(Gate::phase(q, constant).with_controls(&extra));
    }

    for (i, &q) in register.iter().enumerate() {
        let w = (1u64 << i) as f64;
        let angle = -tau * (gamma * delta * delta * w * w + 2.0 * gamma * delta * x0 * w);
        if angle != 0.0 {
            gates.push(Gate::phase(q, angle).with_controls(&extra));
        }
    }

    for i in 0..n {
        for j in i + 1..n {
            let w = (1u64 << (i + j + 1)) as f64;
            let angle = -tau * gamma * delta * delta * w;
            if angle != 0.0 {
                gates.push(Gate::cphase(register[i], register[j], angle).with_controls(&extra));
            }
        }
    }
    gates
}
