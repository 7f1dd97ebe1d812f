//! Small-register oracle suites and gate accounting, shared by the
//! `validate` command and the test suite.

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::circuits::{
    build_comparator, build_piecewise_rx, build_qft, build_quadratic_phase, comparator_work_qubits,
    PiecewiseLinearFn, QuadraticPhaseSpec, RegisterLayout,
};
use crate::dynamics::{
    embed_grid_wavefunction, evolve, extract_grid_wavefunction, CouplingChoice, ExactPropagator,
    GaussianPacket, GridSpec, ModelParams, TrotterConfig,
};
use crate::error::Result;
use crate::statevec::{Control, Gate, StateVector};

pub const MATRIX_TOLERANCE: f64 = 1e-10;

/// Builds a centered QFT on a register; injectable so the suite can be run
/// against a deliberately broken implementation.
pub type CqftBuilder = dyn Fn(&[usize]) -> Vec<Gate>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub suite: String,
    pub case: String,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckResult {
    fn new(suite: &str, case: String, max_error: f64, tolerance: f64) -> Self {
        CheckResult {
            suite: suite.to_string(),
            case,
            max_error,
            tolerance,
            passed: max_error <= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GateCountRow {
    pub n: usize,
    pub pieces: usize,
    pub comparison_qubits: usize,
    pub total_qubits: usize,
    pub qft_gates: usize,
    pub quadratic_gates: usize,
    pub quadratic_budget: usize,
    pub piecewise_gates: usize,
    pub piecewise_budget: usize,
}

impl GateCountRow {
    pub fn within_budget(&self) -> bool {
        self.quadratic_gates <= self.quadratic_budget
            && self.piecewise_gates <= self.piecewise_budget
            && self.qft_gates <= self.quadratic_budget
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
    pub gate_counts: Vec<GateCountRow>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed) && self.gate_counts.iter().all(|g| g.within_budget())
    }

    pub fn failures(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<12} {:<28} {:>12} {:>10}  status",
            "suite", "case", "max_error", "tol"
        );
        for c in &self.checks {
            let _ = writeln!(
                s,
                "{:<12} {:<28} {:>12.3e} {:>10.1e}  {}",
                c.suite,
                c.case,
                c.max_error,
                c.tolerance,
                if c.passed { "PASS" } else { "FAIL" }
            );
        }
        let _ = writeln!(s);
        let _ = writeln!(
            s,
            "{:>2} {:>2} {:>5} {:>5} {:>5} {:>10} {:>10}  status",
            "N", "P", "N_c", "total", "qft", "quad/bud", "pw/bud"
        );
        for g in &self.gate_counts {
            let _ = writeln!(
                s,
                "{:>2} {:>2} {:>5} {:>5} {:>5} {:>10} {:>10}  {}",
                g.n,
                g.pieces,
                g.comparison_qubits,
                g.total_qubits,
                g.qft_gates,
                format!("{}/{}", g.quadratic_gates, g.quadratic_budget),
                format!("{}/{}", g.piecewise_gates, g.piecewise_budget),
                if g.within_budget() { "PASS" } else { "FAIL" }
            );
        }
        s
    }
}

/// Matrix of a gate list, one column per basis input.
pub fn circuit_matrix(gates: &[Gate], num_qubits: usize) -> Result<DMatrix<Complex64>> {
    let dim = 1usize << num_qubits;
    let mut m = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        let mut st = StateVector::new_basis_state(num_qubits, col)?;
        st.apply_all(gates)?;
        for (row, a) in st.amplitudes().iter().enumerate() {
            m[(row, col)] = *a;
        }
    }
    Ok(m)
}

/// `F[k, j] = exp(2πi jk/𝒩)/√𝒩`.
pub fn dft_matrix(n: usize) -> DMatrix<Complex64> {
    let dim = 1usize << n;
    let s = 1.0 / (dim as f64).sqrt();
    DMatrix::from_fn(dim, dim, |k, j| {
        Complex64::from_polar(s, 2.0 * PI * ((j * k) % dim) as f64 / dim as f64)
    })
}

/// DFT followed by the cyclic shift `k → k + 𝒩/2`.
pub fn centered_dft_matrix(n: usize) -> DMatrix<Complex64> {
    let dim = 1usize << n;
    let f = dft_matrix(n);
    DMatrix::from_fn(dim, dim, |k, j| f[((k + dim / 2) % dim, j)])
}

fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn check_qft(n: usize) -> Result<CheckResult> {
    let reg: Vec<usize> = (0..n).collect();
    let err = max_abs_diff(&circuit_matrix(&build_qft(&reg), n)?, &dft_matrix(n));
    Ok(CheckResult::new(
        "qft",
        format!("N={n}"),
        err,
        MATRIX_TOLERANCE,
    ))
}

pub fn check_cqft(n: usize, builder: &CqftBuilder) -> Result<CheckResult> {
    let reg: Vec<usize> = (0..n).collect();
    let err = max_abs_diff(&circuit_matrix(&builder(&reg), n)?, &centered_dft_matrix(n));
    Ok(CheckResult::new(
        "cqft",
        format!("N={n}"),
        err,
        MATRIX_TOLERANCE,
    ))
}

/// Quadratic phase against its diagonal, bare and controlled on the extra
/// top qubit being `|1⟩` or `|0⟩`.
pub fn check_quadratic(n: usize) -> Result<Vec<CheckResult>> {
    let spec = QuadraticPhaseSpec {
        gamma: 0.015,
        x0: -1.5,
        alpha: 0.02,
        tau: 10.0,
        delta: 0.1 * (1 + n) as f64,
    };
    let reg: Vec<usize> = (0..n).collect();
    let diag = |k: usize| Complex64::from_polar(1.0, -spec.tau * spec.energy(k));
    let dim = 1usize << n;
    let mut out = Vec::new();
    let bare = circuit_matrix(&build_quadratic_phase(&spec, &reg, None), n)?;
    let want = DMatrix::from_fn(dim, dim, |r, c| {
        if r == c {
            diag(r)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    out.push(CheckResult::new(
        "quadratic",
        format!("N={n} uncontrolled"),
        max_abs_diff(&bare, &want),
        MATRIX_TOLERANCE,
    ));
    for value in [true, false] {
        let control = Control { qubit: n, value };
        let m = circuit_matrix(&build_quadratic_phase(&spec, &reg, Some(control)), n + 1)?;
        let want = DMatrix::from_fn(2 * dim, 2 * dim, |r, c| {
            if r != c {
                Complex64::new(0.0, 0.0)
            } else if (r >> n == 1) == value {
                diag(r % dim)
            } else {
                Complex64::new(1.0, 0.0)
            }
        });
        out.push(CheckResult::new(
            "quadratic",
            format!("N={n} control={}", value as u8),
            max_abs_diff(&m, &want),
            MATRIX_TOLERANCE,
        ));
    }
    Ok(out)
}

/// Every threshold and every input: flag flips iff `x > t`, work returns to 0.
pub fn check_comparator(n: usize) -> Result<CheckResult> {
    let position: Vec<usize> = (0..n).collect();
    let flag = n;
    let work: Vec<usize> = (n + 1..n + 1 + comparator_work_qubits(n)).collect();
    let total = n + 1 + work.len();
    let mut worst = 0.0f64;
    for t in 0..(1u64 << n) {
        let gates = build_comparator(&position, t, flag, &work)?;
        for x in 0..(1usize << n) {
            for f in 0..2usize {
                let mut st = StateVector::new_basis_state(total, x | f << flag)?;
                st.apply_all(&gates)?;
                let expect = x | (f ^ (x as u64 > t) as usize) << flag;
                worst = worst.max((st.amplitudes()[expect] - Complex64::new(1.0, 0.0)).norm());
            }
        }
    }
    Ok(CheckResult::new(
        "comparator",
        format!("N={n} all thresholds"),
        worst,
        MATRIX_TOLERANCE,
    ))
}

/// A three-piece test function with breakpoints spread over the register.
pub fn sample_piecewise(n: usize) -> Result<PiecewiseLinearFn> {
    let top = (1u64 << n) - 1;
    let b1 = top / 3;
    let b2 = (2 * top / 3).max(b1 + 1);
    PiecewiseLinearFn::new(
        vec![b1, b2],
        vec![0.013, -0.021, 0.008],
        vec![0.05, 0.11, -0.07],
    )
}

/// Piecewise RX against `RX(2τ f(j))` on every `|j, s, 0…0⟩` input.
pub fn check_piecewise(n: usize) -> Result<CheckResult> {
    let f = sample_piecewise(n)?;
    let layout = RegisterLayout::contiguous(n, f.pieces());
    let tau = 3.7;
    let gates = build_piecewise_rx(&f, tau, &layout)?;
    let total = layout.total_qubits();
    let anc = layout.surface_ancilla;
    let mut worst = 0.0f64;
    for j in 0..(1usize << n) {
        let (s, c) = (tau * f.eval(j as u64)).sin_cos();
        for surf in 0..2usize {
            let mut st = StateVector::new_basis_state(total, j | surf << anc)?;
            st.apply_all(&gates)?;
            let mut want = vec![Complex64::new(0.0, 0.0); 1 << total];
            want[j | surf << anc] = Complex64::new(c, 0.0);
            want[j | (1 - surf) << anc] = Complex64::new(0.0, -s);
            let err = st
                .amplitudes()
                .iter()
                .zip(&want)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            worst = worst.max(err);
        }
    }
    Ok(CheckResult::new(
        "piecewise",
        format!("N={n} P=3"),
        worst,
        MATRIX_TOLERANCE,
    ))
}

/// Circuit evolution vs exact propagation on a 4-qubit grid (dt = 1,
/// 50 steps); the reported error is the infidelity.
pub fn check_trotter_small() -> Result<CheckResult> {
    let grid = GridSpec::new(4, 20.0)?;
    let model = ModelParams::production(0.135).build(&grid)?;
    let layout = RegisterLayout::contiguous(4, 3);
    let psi = GaussianPacket::production().grid_wavefunction(&grid, 1)?;
    let mut st = embed_grid_wavefunction(&psi, &layout)?;
    let cfg = TrotterConfig {
        dt: 1.0,
        n_steps: 50,
    };
    evolve(&mut st, &model, &layout, &cfg)?;
    let exact = ExactPropagator::new(&model, CouplingChoice::Piecewise)?
        .propagate(&psi, cfg.total_time())?;
    let overlap: Complex64 = extract_grid_wavefunction(&st, &layout)
        .iter()
        .zip(&exact)
        .map(|(a, b)| a.conj() * b)
        .sum();
    Ok(CheckResult::new(
        "trotter",
        "N=4 dt=1 50 steps".into(),
        1.0 - overlap.norm_sqr(),
        1e-3,
    ))
}

/// `c·N²` for the QFT and quadratic phase.
pub fn quadratic_budget(n: usize) -> usize {
    2 * n * n
}

/// `c·P·N` for the piecewise rotation.
pub fn piecewise_budget(n: usize, pieces: usize) -> usize {
    8 * pieces * n
}

pub fn gate_counts(n: usize, pieces: usize) -> Result<GateCountRow> {
    let reg: Vec<usize> = (0..n).collect();
    let spec = QuadraticPhaseSpec {
        gamma: 0.015,
        x0: -8.5,
        alpha: 0.1,
        tau: 10.0,
        delta: 20.0 / (1u64 << n) as f64,
    };
    let layout = RegisterLayout::contiguous(n, pieces);
    let top = (1u64 << n) - 1;
    let breakpoints: Vec<u64> = (1..pieces as u64)
        .map(|p| p * top / pieces as u64)
        .collect();
    let mut bp = breakpoints;
    for i in 1..bp.len() {
        if bp[i] <= bp[i - 1] {
            bp[i] = bp[i - 1] + 1;
        }
    }
    let f = PiecewiseLinearFn::new(bp, vec![0.001; pieces], vec![0.01; pieces])?;
    Ok(GateCountRow {
        n,
        pieces,
        comparison_qubits: layout.comparison.len(),
        total_qubits: layout.total_qubits(),
        qft_gates: build_qft(&reg).len(),
        quadratic_gates: build_quadratic_phase(&spec, &reg, None).len(),
        quadratic_budget: quadratic_budget(n),
        piecewise_gates: build_piecewise_rx(&f, 10.0, &layout)?.len(),
        piecewise_budget: piecewise_budget(n, pieces),
    })
}

/// All suites for `1..=max_qubits`, plus gate counts for N = 2..=8.
pub fn run_validation(max_qubits: usize, cqft: &CqftBuilder) -> Result<ValidationReport> {
    let mut report = ValidationReport::default();
    for n in 1..=max_qubits {
        report.checks.push(check_qft(n)?);
        report.checks.push(check_cqft(n, cqft)?);
        report.checks.extend(check_quadratic(n)?);
        report.checks.push(check_comparator(n)?);
        if n >= 2 {
            report.checks.push(check_piecewise(n)?);
        }
    }
    report.checks.push(check_trotter_small()?);
    for n in 2..=8 {
        report.gate_counts.push(gate_counts(n, 3)?);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::build_cqft;

    #[test]
    fn production_register_size() {
        let row = gate_counts(8, 3).unwrap();
        assert_eq!(row.comparison_qubits, 9);
        assert_eq!(row.total_qubits, 18);
    }

    #[test]
    fn sign_error_in_cqft_is_caught() {
        let broken = |reg: &[usize]| -> Vec<Gate> {
            build_cqft(reg).into_iter().map(|g| g.adjoint()).collect()
        };
        assert!(check_cqft(3, &build_cqft).unwrap().passed);
        assert!(!check_cqft(3, &broken).unwrap().passed);
    }
}
