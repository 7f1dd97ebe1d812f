use std::f64::consts::PI;

use crate::statevec::{adjoint_circuit, Gate};

/// QFT with the `exp(+2πi jk/𝒩)` sign convention, including the final bit
/// reversal as explicit swaps.
pub fn build_qft(register: &[usize]) -> Vec<Gate> {
    let n = register.len();
    let mut gates = Vec::with_capacity(n * (n + 1) / 2 + 3 * (n / 2));
    for i in (0..n).rev() {
        gates.push(Gate::h(register[i]));
        for j in (0..i).rev() {
            let angle = PI / (1u64 << (i - j)) as f64;
            gates.push(Gate::cphase(register[j], register[i], angle));
        }
    }
    for k in 0..n / 2 {
        gates.extend(Gate::swap(register[k], register[n - 1 - k]));
    }
    gates
}

pub fn build_qft_inverse(register: &[usize]) -> Vec<Gate> {
    adjoint_circuit(&build_qft(register))
}

/// Centered QFT: the QFT followed by an X on the most significant qubit,
/// i.e. a cyclic shift of the output by `𝒩/2` so that momentum index
/// `𝒩/2` carries zero momentum.
pub fn build_cqft(register: &[usize]) -> Vec<Gate> {
    let mut gates = build_qft(register);
    if let Some(&msb) = register.last() {
        gates.push(Gate::x(msb));
    }
    gates
}

pub fn build_cqft_inverse(register: &[usize]) -> Vec<Gate> {
    adjoint_circuit(&build_cqft(register))
}
