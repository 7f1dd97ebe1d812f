use serde::{Deserialize, Serialize};

use super::comparator::build_comparator;
use super::layout::RegisterLayout;
use crate::error::{invalid, Error, Result};
use crate::statevec::{Control, Gate};

/// Piecewise-linear function of an integer grid index.
///
/// Piece `p` covers `breakpoints[p-1] < j <= breakpoints[p]` and evaluates
/// to `slopes[p] * j + intercepts[p]` (energy per grid unit, energy).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseLinearFn {
    breakpoints: Vec<u64>,
    slopes: Vec<f64>,
    intercepts: Vec<f64>,
}

impl PiecewiseLinearFn {
    pub fn new(breakpoints: Vec<u64>, slopes: Vec<f64>, intercepts: Vec<f64>) -> Result<Self> {
        if slopes.len() != breakpoints.len() + 1 || intercepts.len() != slopes.len() {
            return Err(invalid(format!(
                "{} breakpoints need {} slopes and intercepts, got {} and {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                slopes.len(),
                intercepts.len()
            )));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("breakpoints must be strictly increasing"));
        }
        if slopes.iter().chain(&intercepts).any(|v| !v.is_finite()) {
            return Err(invalid("slopes and intercepts must be finite"));
        }
        Ok(PiecewiseLinearFn {
            breakpoints,
            slopes,
            intercepts,
        })
    }

    pub fn constant(value: f64) -> Self {
        PiecewiseLinearFn {
            breakpoints: Vec::new(),
            slopes: vec![0.0],
            intercepts: vec![value],
        }
    }

    pub fn pieces(&self) -> usize {
        self.slopes.len()
    }

    pub fn breakpoints(&self) -> &[u64] {
        &self.breakpoints
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn intercepts(&self) -> &[f64] {
        &self.intercepts
    }

    pub fn piece_of(&self, j: u64) -> usize {
        self.breakpoints.partition_point(|&b| b < j)
    }

    pub fn eval(&self, j: u64) -> f64 {
        let p = self.piece_of(j);
        self.slopes[p] * j as f64 + self.intercepts[p]
    }

    /// Checks that every breakpoint fits an `n`-qubit register.
    pub fn validate_for(&self, n: usize) -> Result<()> {
        let limit = 1u64 << n;
        if let Some(&b) = self.breakpoints.iter().find(|&&b| b >= limit) {
            return Err(invalid(format!(
                "breakpoint {b} outside a {n}-qubit register"
            )));
        }
        Ok(())
    }
}

/// Builds `exp(-i τ f(j) σ_x)` on the surface ancilla for every position
/// basis state `|j⟩`, i.e. `RX(2 τ f(j))`.
///
/// Layout: base RX for the first intercept, one controlled RX per position
/// bit for the first slope, then for each breakpoint a comparator into its
/// flag followed by the intercept and slope increments controlled on that
/// flag. The flags are uncomputed in reverse order at the end, so every
/// comparison qubit returns to |0⟩.
pub fn build_piecewise_rx(
    f: &PiecewiseLinearFn,
    tau: f64,
    layout: &RegisterLayout,
) -> Result<Vec<Gate>> {
    layout.validate(f.pieces())?;
    let n = layout.num_position_qubits();
    f.validate_for(n)
        .map_err(|e| Error::Build(format!("coupling does not fit layout: {e}")))?;
    let obj = layout.surface_ancilla;
    let carries = layout.carries();
    let flags = layout.flags();

    let mut gates = Vec::new();
    let push_rx = |gates: &mut Vec<Gate>, controls: &[Control], angle: f64| {
        if angle != 0.0 {
            gates.push(Gate::mcrx(controls, obj, angle));
        }
    };

    push_rx(&mut gates, &[], 2.0 * tau * f.intercepts[0]);
    for (i, &q) in layout.position.iter().enumerate() {
        let w = (1u64 << i) as f64;
        push_rx(&mut gates, &[Control::on(q)], 2.0 * tau * f.slopes[0] * w);
    }

    let mut comparators = Vec::with_capacity(f.breakpoints.len());
    for (p, &bp) in f.breakpoints.iter().enumerate() {
        let flag = flags[p];
        let cmp = build_comparator(&layout.position, bp, flag, carries)?;
        gates.extend(cmp.iter().cloned());
        let d_intercept = f.intercepts[p + 1] - f.intercepts[p];
        let d_slope = f.slopes[p + 1] - f.slopes[p];
        push_rx(&mut gates, &[Control::on(flag)], 2.0 * tau * d_intercept);
        for (i, &q) in layout.position.iter().enumerate() {
            let w = (1u64 << i) as f64;
            push_rx(
                &mut gates,
                &[Control::on(flag), Control::on(q)],
                2.0 * tau * d_slope * w,
            );
        }
        comparators.push(cmp);
    }
    for cmp in comparators.into_iter().rev() {
        gates.extend(cmp);
    }
    Ok(gates)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation_follows_pieces() {
        let f =
            PiecewiseLinearFn::new(vec![2, 5], vec![1.0, 0.0, -2.0], vec![0.0, 3.0, 20.0]).unwrap();
        assert_eq!(f.eval(0), 0.0);
        assert_eq!(f.eval(2), 2.0);
        assert_eq!(f.eval(3), 3.0);
        assert_eq!(f.eval(5), 3.0);
        assert_eq!(f.eval(6), 8.0);
    }

    #[test]
    fn malformed_functions_rejected() {
        assert!(PiecewiseLinearFn::new(vec![3, 3], vec![0.0; 3], vec![0.0; 3]).is_err());
        assert!(PiecewiseLinearFn::new(vec![3], vec![0.0], vec![0.0]).is_err());
        let f = PiecewiseLinearFn::new(vec![9], vec![0.0; 2], vec![0.0; 2]).unwrap();
        assert!(f.validate_for(3).is_err());
    }

    #[test]
    fn layout_mismatch_is_a_build_error() {
        let f = PiecewiseLinearFn::new(vec![2, 5], vec![0.0; 3], vec![0.0, 1.0, 0.0]).unwrap();
        let layout = RegisterLayout::contiguous(3, 2);
        assert!(matches!(
            build_piecewise_rx(&f, 1.0, &layout),
            Err(Error::Build(_))
        ));
    }
}
