use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Assignment of physical qubits to the position register, the surface
/// ancilla and the comparison register used by the coupling circuit.
///
/// The comparison register holds `N - 1` carry qubits shared by every
/// comparator followed by one flag per breakpoint, `N + P - 2` in total.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterLayout {
    pub position: Vec<usize>,
    pub surface_ancilla: usize,
    pub comparison: Vec<usize>,
}

impl RegisterLayout {
    /// Number of comparison qubits for an `n`-qubit grid and a `pieces`-piece
    /// coupling function.
    pub fn comparison_qubits_for(n: usize, pieces: usize) -> usize {
        (n + pieces).saturating_sub(2)
    }

    /// Position qubits `0..n`, ancilla `n`, comparison qubits after it.
    pub fn contiguous(n: usize, pieces: usize) -> Self {
        let nc = Self::comparison_qubits_for(n, pieces);
        RegisterLayout {
            position: (0..n).collect(),
            surface_ancilla: n,
            comparison: (n + 1..n + 1 + nc).collect(),
        }
    }

    pub fn num_position_qubits(&self) -> usize {
        self.position.len()
    }

    pub fn total_qubits(&self) -> usize {
        self.position.len() + 1 + self.comparison.len()
    }

    /// Carry qubits of the comparator chain.
    pub fn carries(&self) -> &[usize] {
        let n = self
            .position
            .len()
            .saturating_sub(1)
            .min(self.comparison.len());
        &self.comparison[..n]
    }

    /// Flag qubits, one per breakpoint.
    pub fn flags(&self) -> &[usize] {
        &self.comparison[self.carries().len()..]
    }

    /// Checks disjointness and that the register fits a `pieces`-piece coupling.
    pub fn validate(&self, pieces: usize) -> Result<()> {
        if self.position.is_empty() {
            return Err(Error::Build("position register is empty".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for q in self
            .position
            .iter()
            .chain(std::iter::once(&self.surface_ancilla))
            .chain(&self.comparison)
        {
            if !seen.insert(*q) {
                return Err(Error::Build(format!("qubit {q} assigned twice in layout")));
            }
        }
        let want = Self::comparison_qubits_for(self.position.len(), pieces);
        if self.comparison.len() != want {
            return Err(Error::Build(format!(
                "layout has {} comparison qubits, a {pieces}-piece coupling on {} position qubits needs {want}",
                self.comparison.len(),
                self.position.len()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn production_register_is_eighteen_qubits() {
        let l = RegisterLayout::contiguous(8, 3);
        assert_eq!(l.comparison.len(), 9);
        assert_eq!(l.total_qubits(), 18);
        assert_eq!(l.carries().len(), 7);
        assert_eq!(l.flags().len(), 2);
        l.validate(3).unwrap();
        assert!(l.validate(4).is_err());
    }

    #[test]
    fn overlapping_layout_rejected() {
        let mut l = RegisterLayout::contiguous(3, 2);
        l.surface_ancilla = 0;
        assert!(l.validate(2).is_err());
    }
}
