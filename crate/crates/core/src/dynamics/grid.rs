use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Uniform position grid of `2^N` points on `[0, L)` and its conjugate
/// momentum grid, centered so that zero momentum sits mid-zone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub num_qubits: usize,
    /// Box length in bohr.
    pub length: f64,
}

impl GridSpec {
    pub fn new(num_qubits: usize, length: f64) -> Result<Self> {
        let g = GridSpec { num_qubits, length };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_qubits == 0 || self.num_qubits > 20 {
            return Err(invalid(format!(
                "grid needs 1..=20 position qubits, got {}",
                self.num_qubits
            )));
        }
        if !(self.length.is_finite() && self.length > 0.0) {
            return Err(invalid(format!(
                "box length must be positive, got {}",
                self.length
            )));
        }
        Ok(())
    }

    pub fn points(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn dx(&self) -> f64 {
        self.length / self.points() as f64
    }

    pub fn dp(&self) -> f64 {
        2.0 * PI / (self.points() as f64 * self.dx())
    }

    /// Momentum shift `p_c = Δp 𝒩 / 2`.
    pub fn p_center(&self) -> f64 {
        self.dp() * self.points() as f64 / 2.0
    }

    pub fn x(&self, j: usize) -> f64 {
        j as f64 * self.dx()
    }

    /// Momentum carried by centered-momentum register value `k`.
    pub fn p(&self, k: usize) -> f64 {
        k as f64 * self.dp() - self.p_center()
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.points()).map(|j| self.x(j)).collect()
    }

    /// Nearest grid index to `x`, clamped into the box.
    pub fn nearest_index(&self, x: f64) -> u64 {
        let j = (x / self.dx()).round();
        j.clamp(0.0, (self.points() - 1) as f64) as u64
    }

    /// Signed frequency of DFT index `k`, in `[-𝒩/2, 𝒩/2)`.
    pub fn signed_frequency(&self, k: usize) -> i64 {
        let n = self.points() as i64;
        let k = k as i64;
        if k >= n / 2 {
            k - n
        } else {
            k
        }
    }
}

/// Position-space matrix of an operator diagonal in the QFT basis:
/// `(F† D F)[a,b] = (1/𝒩) Σ_k D_k exp(2πi k (b-a)/𝒩)`.
///
/// Requires `D_k = D_{𝒩-k}`, which makes the matrix real and symmetric.
pub fn fourier_diagonal_matrix(diagonal: &[f64]) -> DMatrix<f64> {
    let n = diagonal.len();
    let kernel: Vec<f64> = (0..n)
        .map(|d| {
            diagonal
                .iter()
                .enumerate()
                .map(|(k, dk)| dk * (2.0 * PI * ((k * d) % n) as f64 / n as f64).cos())
                .sum::<f64>()
                / n as f64
        })
        .collect();
    DMatrix::from_fn(n, n, |a, b| kernel[(b + n - a) % n])
}

/// Kinetic energy `p²/2m` in the position basis with centered momenta.
pub fn kinetic_matrix(grid: &GridSpec, mass: f64) -> DMatrix<f64> {
    let dp = grid.dp();
    let diag: Vec<f64> = (0..grid.points())
        .map(|k| {
            let p = grid.signed_frequency(k) as f64 * dp;
            p * p / (2.0 * mass)
        })
        .collect();
    fourier_diagonal_matrix(&diag)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reciprocal_spacings() {
        for n in 1..=10 {
            let g = GridSpec::new(n, 20.0).unwrap();
            let prod = g.dx() * g.dp() * g.points() as f64;
            assert!((prod - 2.0 * PI).abs() < 1e-12);
            assert!((g.p(0) + g.p_center()).abs() < 1e-12);
            assert!(g.p(g.points() / 2).abs() < 1e-12);
        }
    }

    #[test]
    fn invalid_grids() {
        assert!(GridSpec::new(0, 20.0).is_err());
        assert!(GridSpec::new(4, -1.0).is_err());
        assert!(GridSpec::new(4, f64::NAN).is_err());
    }

    #[test]
    fn kinetic_matrix_is_symmetric_and_positive() {
        let g = GridSpec::new(4, 20.0).unwrap();
        let k = kinetic_matrix(&g, 2.0);
        assert!((&k - k.transpose()).amax() < 1e-15);
        let eig = k.symmetric_eigen();
        assert!(eig.eigenvalues.iter().all(|&e| e > -1e-12));
    }
}
