use crate::error::{Error, Result};
use crate::statevec::{Control, Gate};

/// Work qubits needed to compare an `n`-qubit register.
pub fn comparator_work_qubits(n: usize) -> usize {
    n.saturating_sub(1)
}

/// Flips `flag` iff the value of `position` is strictly greater than
/// `threshold`.
///
/// Ripple-carry comparison: `x > t` exactly when adding the classical
/// constant `c = 2^N - 1 - t` to `x` overflows. Each carry is the majority
/// of `x_i`, `c_i` and the previous carry; with `c_i` known classically that
/// is an AND (`c_i = 0`) or an OR (`c_i = 1`) of two qubits. The final carry
/// lands in `flag` and the carry chain is uncomputed, leaving `work` in |0⟩.
/// The circuit is an involution, so applying it twice restores `flag`.
pub fn build_comparator(
    position: &[usize],
    threshold: u64,
    flag: usize,
    work: &[usize],
) -> Result<Vec<Gate>> {
    let n = position.len();
    if n == 0 {
        return Err(Error::Build("comparator needs a nonempty register".into()));
    }
    if n >= 64 || threshold >= (1u64 << n) {
        return Err(Error::Build(format!(
            "threshold {threshold} out of range for a {n}-qubit register"
        )));
    }
    let needed = comparator_work_qubits(n);
    if work.len() < needed {
        return Err(Error::Build(format!(
            "comparator on {n} qubits needs {needed} work qubits, got {}",
            work.len()
        )));
    }
    let addend = (1u64 << n) - 1 - threshold;
    let bit = |i: usize| (addend >> i) & 1 == 1;
    // carry i is written to work[i] for i < n-1 and to the flag for i = n-1
    let carry_qubit = |i: usize| if i + 1 == n { flag } else { work[i] };

    let mut chain = Vec::new();
    for i in 0..n {
        let out = carry_qubit(i);
        let x = position[i];
        if i == 0 {
            if bit(0) {
                chain.push(Gate::cnot(x, out));
            }
            continue;
        }
        let prev = work[i - 1];
        if bit(i) {
            // out = x OR prev = NOT(¬x AND ¬prev)
            chain.push(Gate::x(out).with_controls(&[Control::off(x), Control::off(prev)]));
            chain.push(Gate::x(out));
        } else {
            chain.push(Gate::x(out).with_controls(&[Control::on(x), Control::on(prev)]));
        }
    }

    // The final carry gate(s) belong to the flag; everything before it
    // computed work qubits and is undone in reverse.
    let final_len = if n == 1 {
        chain.len()
    } else if bit(n - 1) {
        2
    } else {
        1
    };
    let split = chain.len() - final_len;
    let mut gates = chain.clone();
    gates.extend(chain[..split].iter().rev().cloned());
    Ok(gates)
}
