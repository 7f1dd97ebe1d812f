use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::GridSpec;
use crate::circuits::RegisterLayout;
use crate::error::{invalid, Result};
use crate::statevec::StateVector;

/// Gaussian wavepacket `exp(-((x - x0)/(2δ))²) exp(i p0 (x - x0))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianPacket {
    pub x0: f64,
    pub p0: f64,
    pub width: f64,
}

/// Tail amplitude above which a packet is reported as leaking.
pub const LEAK_THRESHOLD: f64 = 1e-6;

impl GaussianPacket {
    pub fn production() -> Self {
        GaussianPacket {
            x0: 11.5,
            p0: 1.0,
            width: 1.0 / 3.0,
        }
    }

    /// Initial packet of the parameter-study model.
    pub fn preliminary() -> Self {
        GaussianPacket {
            x0: 14.0,
            p0: -30.0,
            width: 1.0 / 3.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x0.is_finite() && self.p0.is_finite()) {
            return Err(invalid("packet center and momentum must be finite"));
        }
        if !(self.width.is_finite() && self.width > 0.0) {
            return Err(invalid(format!(
                "packet width must be positive, got {}",
                self.width
            )));
        }
        Ok(())
    }

    /// Grid amplitudes normalized to one.
    pub fn amplitudes(&self, grid: &GridSpec) -> Result<Vec<Complex64>> {
        self.validate()?;
        let mut amps: Vec<Complex64> = (0..grid.points())
            .map(|j| {
                let d = grid.x(j) - self.x0;
                let envelope = (-(d / (2.0 * self.width)).powi(2)).exp();
                Complex64::from_polar(envelope, self.p0 * d)
            })
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(invalid("packet has no weight on the grid"));
        }
        for a in &mut amps {
            *a /= norm;
        }
        let tail = amps[0].norm().max(amps[amps.len() - 1].norm());
        let inside = self.x0 - 4.0 * self.width >= 0.0 && self.x0 + 4.0 * self.width < grid.length;
        if tail > LEAK_THRESHOLD || !inside {
            log::warn!(
                "wavepacket at x0={} (width {}) leaks past the box edge: boundary amplitude {:.2e}",
                self.x0,
                self.width,
                tail
            );
        }
        Ok(amps)
    }

    /// Packet on `surface` as a `2𝒩` vector indexed `j + 𝒩·surface`.
    pub fn grid_wavefunction(&self, grid: &GridSpec, surface: usize) -> Result<Vec<Complex64>> {
        check_surface(surface)?;
        let n = grid.points();
        let mut psi = vec![Complex64::new(0.0, 0.0); 2 * n];
        psi[surface * n..(surface + 1) * n].copy_from_slice(&self.amplitudes(grid)?);
        Ok(psi)
    }
}

pub(crate) fn check_surface(surface: usize) -> Result<()> {
    if surface > 1 {
        return Err(invalid(format!("surface must be 0 or 1, got {surface}")));
    }
    Ok(())
}

/// Full register state with the packet on the position register, the
/// surface ancilla in `|surface⟩` and every comparison qubit in `|0⟩`.
pub fn load_gaussian(
    grid: &GridSpec,
    packet: &GaussianPacket,
    surface: usize,
    layout: &RegisterLayout,
) -> Result<StateVector> {
    let psi = packet.grid_wavefunction(grid, surface)?;
    embed_grid_wavefunction(&psi, layout)
}

/// Places a `2𝒩` grid wavefunction into the register described by `layout`.
pub fn embed_grid_wavefunction(psi: &[Complex64], layout: &RegisterLayout) -> Result<StateVector> {
    let n = layout.num_position_qubits();
    let points = 1usize << n;
    if psi.len() != 2 * points {
        return Err(invalid(format!(
            "grid wavefunction has {} entries, layout expects {}",
            psi.len(),
            2 * points
        )));
    }
    let total = layout.total_qubits();
    let mut state = StateVector::new_basis_state(total, 0)?;
    let amps = state.amplitudes_mut();
    amps[0] = Complex64::new(0.0, 0.0);
    for (idx, &a) in psi.iter().enumerate() {
        let (j, s) = (idx % points, idx / points);
        let mut k = s << layout.surface_ancilla;
        for (i, &q) in layout.position.iter().enumerate() {
            if j >> i & 1 == 1 {
                k |= 1 << q;
            }
        }
        amps[k] = a;
    }
    Ok(state)
}

/// Reads the `2𝒩` grid wavefunction back out of a register state, assuming
/// the comparison qubits are in `|0⟩`.
pub fn extract_grid_wavefunction(state: &StateVector, layout: &RegisterLayout) -> Vec<Complex64> {
    let n = layout.num_position_qubits();
    let points = 1usize << n;
    let amps = state.amplitudes();
    (0..2 * points)
        .map(|idx| {
            let (j, s) = (idx % points, idx / points);
            let mut k = s << layout.surface_ancilla;
            for (i, &q) in layout.position.iter().enumerate() {
                if j >> i & 1 == 1 {
                    k |= 1 << q;
                }
            }
            amps[k]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn production_packet_on_surface_one() {
        let grid = GridSpec::new(8, 20.0).unwrap();
        let layout = RegisterLayout::contiguous(8, 3);
        let st = load_gaussian(&grid, &GaussianPacket::production(), 1, &layout).unwrap();
        assert_eq!(st.num_qubits(), 18);
        assert!((st.norm_sqr() - 1.0).abs() < 1e-12);
        let p0 = (st.expectation_z(8).unwrap() + 1.0) / 2.0;
        assert!(p0.abs() < 1e-15);
        assert!((st.probability_all_zero(&layout.comparison).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_momentum_is_real_positive() {
        let grid = GridSpec::new(6, 20.0).unwrap();
        let pk = GaussianPacket {
            x0: 10.0,
            p0: 0.0,
            width: 0.5,
        };
        let amps = pk.amplitudes(&grid).unwrap();
        assert!(amps.iter().all(|a| a.im == 0.0 && a.re > 0.0));
    }

    #[test]
    fn embed_extract_round_trip() {
        let grid = GridSpec::new(4, 20.0).unwrap();
        let layout = RegisterLayout {
            position: vec![1, 3, 4, 6],
            surface_ancilla: 0,
            comparison: vec![2, 5, 7, 8, 9],
        };
        let pk = GaussianPacket {
            x0: 9.0,
            p0: 2.0,
            width: 1.5,
        };
        let psi = pk.grid_wavefunction(&grid, 0).unwrap();
        let st = embed_grid_wavefunction(&psi, &layout).unwrap();
        assert_eq!(extract_grid_wavefunction(&st, &layout), psi);
    }

    #[test]
    fn bad_inputs() {
        let grid = GridSpec::new(4, 20.0).unwrap();
        let pk = GaussianPacket {
            x0: 9.0,
            p0: 0.0,
            width: 0.0,
        };
        assert!(pk.amplitudes(&grid).is_err());
        assert!(GaussianPacket::production()
            .grid_wavefunction(&grid, 2)
            .is_err());
    }
}
