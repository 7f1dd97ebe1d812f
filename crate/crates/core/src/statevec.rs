//! Dense statevector engine.
//!
//! Qubit 0 is the least-significant bit of a basis index. Gates are applied
//! in place by enumerating only the amplitudes they can touch: every control
//! (and, for diagonal gates, the target) pins one bit of the index, so a gate
//! with `c` pinned bits costs `2^(n-c)` updates instead of `2^n`.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::io::Write;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Upper bound on register width; 2^25 amplitudes is already 512 MiB.
pub const MAX_QUBITS: usize = 25;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Single-qubit operation carried by a [`Gate`]. Angles are in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GateKind {
    X,
    Y,
    Z,
    H,
    /// `exp(-i θ X / 2)`
    Rx(f64),
    /// `exp(-i θ Y / 2)`
    Ry(f64),
    /// `exp(-i θ Z / 2)`
    Rz(f64),
    /// `diag(1, e^{iθ})`
    Phase(f64),
}

impl GateKind {
    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        let i = Complex64::i();
        match *self {
            GateKind::X => [[ZERO, ONE], [ONE, ZERO]],
            GateKind::Y => [[ZERO, -i], [i, ZERO]],
            GateKind::Z => [[ONE, ZERO], [ZERO, -ONE]],
            GateKind::H => {
                let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
                [[h, h], [h, -h]]
            }
            GateKind::Rx(theta) => {
                let (s, c) = (theta / 2.0).sin_cos();
                let c = Complex64::new(c, 0.0);
                let ms = Complex64::new(0.0, -s);
                [[c, ms], [ms, c]]
            }
            GateKind::Ry(theta) => {
                let (s, c) = (theta / 2.0).sin_cos();
                [
                    [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
                    [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
                ]
            }
            GateKind::Rz(theta) => [
                [Complex64::from_polar(1.0, -theta / 2.0), ZERO],
                [ZERO, Complex64::from_polar(1.0, theta / 2.0)],
            ],
            GateKind::Phase(theta) => [[ONE, ZERO], [ZERO, Complex64::from_polar(1.0, theta)]],
        }
    }

    pub fn adjoint(&self) -> GateKind {
        match *self {
            GateKind::Rx(t) => GateKind::Rx(-t),
            GateKind::Ry(t) => GateKind::Ry(-t),
            GateKind::Rz(t) => GateKind::Rz(-t),
            GateKind::Phase(t) => GateKind::Phase(-t),
            k => k,
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            GateKind::Rx(t) | GateKind::Ry(t) | GateKind::Rz(t) | GateKind::Phase(t) => Some(t),
            _ => None,
        }
    }

    fn is_diagonal(&self) -> bool {
        matches!(self, GateKind::Z | GateKind::Rz(_) | GateKind::Phase(_))
    }
}

/// A control condition: the gate fires only when `qubit` reads `value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Control {
    pub qubit: usize,
    pub value: bool,
}

impl Control {
    pub fn on(qubit: usize) -> Self {
        Control { qubit, value: true }
    }

    pub fn off(qubit: usize) -> Self {
        Control {
            qubit,
            value: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub target: usize,
    pub controls: Vec<Control>,
}

impl Gate {
    pub fn new(kind: GateKind, target: usize) -> Self {
        Gate {
            kind,
            target,
            controls: Vec::new(),
        }
    }

    pub fn x(target: usize) -> Self {
        Gate::new(GateKind::X, target)
    }

    pub fn h(target: usize) -> Self {
        Gate::new(GateKind::H, target)
    }

    pub fn rx(target: usize, theta: f64) -> Self {
        Gate::new(GateKind::Rx(theta), target)
    }

    pub fn ry(target: usize, theta: f64) -> Self {
        Gate::new(GateKind::Ry(theta), target)
    }

    pub fn rz(target: usize, theta: f64) -> Self {
        Gate::new(GateKind::Rz(theta), target)
    }

    pub fn phase(target: usize, theta: f64) -> Self {
        Gate::new(GateKind::Phase(theta), target)
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Gate::x(target).controlled_by(Control::on(control))
    }

    pub fn cphase(control: usize, target: usize, theta: f64) -> Self {
        Gate::phase(target, theta).controlled_by(Control::on(control))
    }

    pub fn mcrx(controls: &[Control], target: usize, theta: f64) -> Self {
        Gate::rx(target, theta).with_controls(controls)
    }

    pub fn mcphase(controls: &[Control], target: usize, theta: f64) -> Self {
        Gate::phase(target, theta).with_controls(controls)
    }

    /// SWAP as three CNOTs.
    pub fn swap(a: usize, b: usize) -> [Gate; 3] {
        [Gate::cnot(a, b), Gate::cnot(b, a), Gate::cnot(a, b)]
    }

    pub fn controlled_by(mut self, control: Control) -> Self {
        self.controls.push(control);
        self
    }

    pub fn with_controls(mut self, controls: &[Control]) -> Self {
        self.controls.extend_from_slice(controls);
        self
    }

    pub fn adjoint(&self) -> Gate {
        Gate {
            kind: self.kind.adjoint(),
            target: self.target,
            controls: self.controls.clone(),
        }
    }

    /// All qubits the gate reads or writes.
    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        std::iter::once(self.target).chain(self.controls.iter().map(|c| c.qubit))
    }

    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        if self.target >= num_qubits {
            return Err(invalid(format!(
                "gate target {} out of range for {num_qubits} qubits",
                self.target
            )));
        }
        let mut seen = 1u64 << self.target;
        for c in &self.controls {
            if c.qubit >= num_qubits {
                return Err(invalid(format!(
                    "control qubit {} out of range for {num_qubits} qubits",
                    c.qubit
                )));
            }
            let bit = 1u64 << c.qubit;
            if seen & bit != 0 {
                return Err(invalid(format!("qubit {} used twice in one gate", c.qubit)));
            }
            seen |= bit;
        }
        Ok(())
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::circuits::text::format_gate(self))
    }
}

/// The inverse of a gate sequence: adjoints in reverse order.
pub fn adjoint_circuit(gates: &[Gate]) -> Vec<Gate> {
    gates.iter().rev().map(Gate::adjoint).collect()
}

/// Sorted bit positions pinned to fixed values; enumerates the free indices.
struct PinnedBits {
    positions: Vec<usize>,
    value: usize,
}

impl PinnedBits {
    fn new(mut pins: Vec<(usize, bool)>) -> Self {
        pins.sort_unstable_by_key(|p| p.0);
        let value = pins
            .iter()
            .filter(|p| p.1)
            .fold(0usize, |acc, p| acc | (1 << p.0));
        PinnedBits {
            positions: pins.into_iter().map(|p| p.0).collect(),
            value,
        }
    }

    /// Spread the bits of `k` over the non-pinned positions.
    #[inline(always)]
    fn deposit(&self, mut k: usize) -> usize {
        for &p in &self.positions {
            let low = k & ((1 << p) - 1);
            k = ((k >> p) << (p + 1)) | low;
        }
        k | self.value
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Computational basis state `|index⟩`.
    pub fn new_basis_state(num_qubits: usize, index: usize) -> Result<Self> {
        if num_qubits > MAX_QUBITS {
            return Err(invalid(format!(
                "{num_qubits} qubits exceeds the supported maximum of {MAX_QUBITS}"
            )));
        }
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(invalid(format!(
                "basis index {index} out of range for {num_qubits} qubits"
            )));
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        Ok(StateVector {
            num_qubits,
            amplitudes,
        })
    }

    /// Wraps raw amplitudes. The length must be a power of two; the norm is
    /// not checked so that unnormalized vectors can be used in tests.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = amplitudes.len();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(invalid(format!(
                "amplitude count {dim} is not a power of two"
            )));
        }
        let num_qubits = dim.trailing_zeros() as usize;
        if num_qubits > MAX_QUBITS {
            return Err(invalid(format!("{num_qubits} qubits exceeds maximum")));
        }
        Ok(StateVector {
            num_qubits,
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            let inv = 1.0 / n;
            self.amplitudes.iter_mut().for_each(|a| *a *= inv);
        }
    }

    /// `|⟨self|other⟩|²`
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.num_qubits)?;
        self.apply_unchecked(gate);
        Ok(())
    }

    pub fn apply_all(&mut self, gates: &[Gate]) -> Result<()> {
        for g in gates {
            g.validate(self.num_qubits)?;
        }
        for g in gates {
            self.apply_unchecked(g);
        }
        Ok(())
    }

    /// Caller guarantees `gate.validate(self.num_qubits())` succeeded.
    pub(crate) fn apply_unchecked(&mut self, gate: &Gate) {
        let controls = gate.controls.iter().map(|c| (c.qubit, c.value));
        let tbit = 1usize << gate.target;
        let amps = &mut self.amplitudes;
        match gate.kind {
            GateKind::Phase(theta) => {
                let pins = PinnedBits::new(controls.chain([(gate.target, true)]).collect());
                let ph = Complex64::from_polar(1.0, theta);
                let count = amps.len() >> pins.positions.len();
                for k in 0..count {
                    amps[pins.deposit(k)] *= ph;
                }
            }
            kind if kind.is_diagonal() => {
                let m = kind.matrix();
                let (d0, d1) = (m[0][0], m[1][1]);
                let pins = PinnedBits::new(controls.chain([(gate.target, false)]).collect());
                let count = amps.len() >> pins.positions.len();
                for k in 0..count {
                    let i0 = pins.deposit(k);
                    amps[i0] *= d0;
                    amps[i0 | tbit] *= d1;
                }
            }
            GateKind::X => {
                let pins = PinnedBits::new(controls.chain([(gate.target, false)]).collect());
                let count = amps.len() >> pins.positions.len();
                for k in 0..count {
                    let i0 = pins.deposit(k);
                    amps.swap(i0, i0 | tbit);
                }
            }
            kind => {
                let m = kind.matrix();
                let pins = PinnedBits::new(controls.chain([(gate.target, false)]).collect());
                let count = amps.len() >> pins.positions.len();
                for k in 0..count {
                    let i0 = pins.deposit(k);
                    let i1 = i0 | tbit;
                    let (a0, a1) = (amps[i0], amps[i1]);
                    amps[i0] = m[0][0] * a0 + m[0][1] * a1;
                    amps[i1] = m[1][0] * a0 + m[1][1] * a1;
                }
            }
        }
    }

    /// `⟨Z_q⟩ = Σ_k (±1)|a_k|²`, `+1` where bit `q` of `k` is clear.
    pub fn expectation_z(&self, qubit: usize) -> Result<f64> {
        self.check_qubit(qubit)?;
        let bit = 1usize << qubit;
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(k, a)| {
                if k & bit == 0 {
                    a.norm_sqr()
                } else {
                    -a.norm_sqr()
                }
            })
            .sum())
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Marginal distribution of the given qubits; `qubits[0]` is the
    /// least-significant bit of the returned index.
    pub fn marginal_probabilities(&self, qubits: &[usize]) -> Result<Vec<f64>> {
        for &q in qubits {
            self.check_qubit(q)?;
        }
        let mut out = vec![0.0; 1 << qubits.len()];
        for (k, a) in self.amplitudes.iter().enumerate() {
            out[extract_bits(k, qubits)] += a.norm_sqr();
        }
        Ok(out)
    }

    /// Probability that every listed qubit reads 0.
    pub fn probability_all_zero(&self, qubits: &[usize]) -> Result<f64> {
        for &q in qubits {
            self.check_qubit(q)?;
        }
        let mask = qubits.iter().fold(0usize, |m, &q| m | (1 << q));
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(k, _)| k & mask == 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Multinomial sample of `shots` projective measurements, seeded.
    pub fn sample_counts(&self, shots: u64, rng_seed: u64) -> Result<MeasurementCounts> {
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        self.sample_counts_with(shots, &mut rng)
    }

    pub fn sample_counts_with<R: Rng + ?Sized>(
        &self,
        shots: u64,
        rng: &mut R,
    ) -> Result<MeasurementCounts> {
        if shots == 0 {
            return Err(invalid("shots must be positive"));
        }
        let sampler = BasisSampler::new(&self.amplitudes);
        let mut counts = BTreeMap::new();
        for _ in 0..shots {
            *counts.entry(sampler.draw(rng)).or_insert(0) += 1;
        }
        Ok(MeasurementCounts {
            num_qubits: self.num_qubits,
            shots,
            counts,
        })
    }

    /// Debug dump: `index,real,imag`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "index,real,imag")?;
        for (k, a) in self.amplitudes.iter().enumerate() {
            writeln!(w, "{k},{},{}", a.re, a.im)?;
        }
        Ok(())
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.num_qubits {
            return Err(invalid(format!(
                "qubit {qubit} out of range for {} qubits",
                self.num_qubits
            )));
        }
        Ok(())
    }
}

/// Gathers the listed bits of `k` into a compact integer.
pub fn extract_bits(k: usize, qubits: &[usize]) -> usize {
    qubits
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &q)| acc | (((k >> q) & 1) << i))
}

/// Inverse-CDF sampler over basis states.
pub(crate) struct BasisSampler {
    cumulative: Vec<f64>,
}

impl BasisSampler {
    pub(crate) fn new(amplitudes: &[Complex64]) -> Self {
        let mut acc = 0.0;
        let cumulative = amplitudes
            .iter()
            .map(|a| {
                acc += a.norm_sqr();
                acc
            })
            .collect();
        BasisSampler { cumulative }
    }

    pub(crate) fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().unwrap_or(&0.0);
        let u = rng.gen::<f64>() * total;
        let idx = self.cumulative.partition_point(|&c| c <= u);
        // Skip zero-probability states that share a cumulative value.
        idx.min(self.cumulative.len() - 1)
    }
}

/// Histogram of measurement outcomes over basis indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementCounts {
    pub num_qubits: usize,
    pub shots: u64,
    pub counts: BTreeMap<usize, u64>,
}

impl MeasurementCounts {
    pub fn empty(num_qubits: usize) -> Self {
        MeasurementCounts {
            num_qubits,
            shots: 0,
            counts: BTreeMap::new(),
        }
    }

    pub fn record(&mut self, outcome: usize) {
        *self.counts.entry(outcome).or_insert(0) += 1;
        self.shots += 1;
    }

    pub fn get(&self, index: usize) -> u64 {
        self.counts.get(&index).copied().unwrap_or(0)
    }

    /// Dense count vector of length `2^num_qubits`.
    pub fn to_dense(&self) -> Vec<u64> {
        let mut v = vec![0; 1 << self.num_qubits];
        for (&k, &c) in &self.counts {
            v[k] = c;
        }
        v
    }

    pub fn frequencies(&self) -> Vec<f64> {
        let shots = self.shots.max(1) as f64;
        self.to_dense()
            .into_iter()
            .map(|c| c as f64 / shots)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_close(a: &[Complex64], b: &[Complex64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (k, (x, y)) in a.iter().zip(b).enumerate() {
            assert!((x - y).norm() < tol, "index {k}: {x} vs {y}");
        }
    }

    #[test]
    fn basis_states() {
        assert_eq!(
            StateVector::new_basis_state(1, 0).unwrap().amplitudes(),
            &[ONE, ZERO]
        );
        let s = StateVector::new_basis_state(3, 4).unwrap();
        assert_eq!(s.probabilities()[4], 1.0);
        assert_eq!(s.norm_sqr(), 1.0);
        assert_eq!(
            StateVector::new_basis_state(2, 3).unwrap().amplitudes(),
            &[ZERO, ZERO, ZERO, ONE]
        );
        assert!(StateVector::new_basis_state(2, 4).is_err());
    }

    #[test]
    fn identity_rotation_and_composition() {
        let mut s = StateVector::new_basis_state(2, 0).unwrap();
        s.apply(&Gate::h(0)).unwrap();
        s.apply(&Gate::ry(1, 0.3)).unwrap();
        let before = s.clone();
        s.apply(&Gate::rx(1, 0.0)).unwrap();
        assert_close(s.amplitudes(), before.amplitudes(), 1e-15);

        let mut a = before.clone();
        a.apply(&Gate::rx(0, 0.4)).unwrap();
        a.apply(&Gate::rx(0, 1.1)).unwrap();
        let mut b = before;
        b.apply(&Gate::rx(0, 1.5)).unwrap();
        assert_close(a.amplitudes(), b.amplitudes(), 1e-12);
    }

    #[test]
    fn cnot_truth_table() {
        // |10⟩ in control-target order: control qubit 1 set, target qubit 0 clear.
        let mut s = StateVector::new_basis_state(2, 0b10).unwrap();
        s.apply(&Gate::cnot(1, 0)).unwrap();
        assert_eq!(s.probabilities()[0b11], 1.0);
        let mut s = StateVector::new_basis_state(2, 0b00).unwrap();
        s.apply(&Gate::cnot(1, 0)).unwrap();
        assert_eq!(s.probabilities()[0b00], 1.0);
    }

    #[test]
    fn rejects_bad_indices() {
        let mut s = StateVector::new_basis_state(2, 0).unwrap();
        assert!(s.apply(&Gate::x(2)).is_err());
        assert!(s.apply(&Gate::cnot(1, 1)).is_err());
        assert!(s.apply(&Gate::cnot(5, 0)).is_err());
        assert!(s.expectation_z(2).is_err());
    }

    #[test]
    fn z_expectations() {
        let s = StateVector::new_basis_state(1, 0).unwrap();
        assert_eq!(s.expectation_z(0).unwrap(), 1.0);
        let s = StateVector::new_basis_state(1, 1).unwrap();
        assert_eq!(s.expectation_z(0).unwrap(), -1.0);
        let mut s = StateVector::new_basis_state(1, 0).unwrap();
        s.apply(&Gate::h(0)).unwrap();
        assert!(s.expectation_z(0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn control_on_zero() {
        let mut s = StateVector::new_basis_state(2, 0).unwrap();
        s.apply(&Gate::x(0).controlled_by(Control::off(1))).unwrap();
        assert_eq!(s.probabilities()[1], 1.0);
        s.apply(&Gate::x(1).controlled_by(Control::off(0))).unwrap();
        assert_eq!(s.probabilities()[1], 1.0);
    }

    #[test]
    fn phase_gate_only_touches_set_bit() {
        let mut s = StateVector::from_amplitudes(vec![c(0.5, 0.0); 4]).unwrap();
        s.apply(&Gate::cphase(0, 1, PI)).unwrap();
        assert_close(
            s.amplitudes(),
            &[c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(-0.5, 0.0)],
            1e-15,
        );
    }

    #[test]
    fn sampling() {
        let s = StateVector::new_basis_state(3, 5).unwrap();
        let counts = s.sample_counts(1000, 7).unwrap();
        assert_eq!(counts.get(5), 1000);
        assert_eq!(counts.counts.len(), 1);

        let mut u = StateVector::new_basis_state(2, 0).unwrap();
        u.apply_all(&[Gate::h(0), Gate::h(1)]).unwrap();
        let counts = u.sample_counts(8000, 11).unwrap();
        assert_eq!(counts.counts.values().sum::<u64>(), 8000);
        let sigma = (8000.0f64 * 0.25 * 0.75).sqrt();
        for k in 0..4 {
            assert!((counts.get(k) as f64 - 2000.0).abs() < 5.0 * sigma);
        }
        assert_eq!(counts, u.sample_counts(8000, 11).unwrap());
        assert!(u.sample_counts(0, 1).is_err());
    }

    #[test]
    fn zero_probability_states_never_sampled() {
        let s = StateVector::from_amplitudes(vec![ZERO, ONE, ZERO, ZERO]).unwrap();
        let counts = s.sample_counts(500, 3).unwrap();
        assert_eq!(counts.get(1), 500);
    }

    #[test]
    fn marginals_and_zero_probability() {
        let mut s = StateVector::new_basis_state(3, 0).unwrap();
        s.apply_all(&[Gate::h(0), Gate::x(2)]).unwrap();
        let m = s.marginal_probabilities(&[2, 0]).unwrap();
        assert!((m[0b01] - 0.5).abs() < 1e-15 && (m[0b11] - 0.5).abs() < 1e-15);
        assert!((s.probability_all_zero(&[1]).unwrap() - 1.0).abs() < 1e-15);
        assert!(s.probability_all_zero(&[2]).unwrap().abs() < 1e-15);
    }

    #[test]
    fn csv_dump() {
        let s = StateVector::new_basis_state(1, 1).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "index,real,imag\n0,0,0\n1,1,0\n"
        );
    }
}
