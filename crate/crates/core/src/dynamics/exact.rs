use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::grid::kinetic_matrix;
use super::model::{CouplingChoice, DiabaticModel};
use super::record::{Propagator, RecordEntry, RunMetadata, RunRecord};
use super::trotter::TrotterConfig;
use crate::error::{invalid, Error, Result};

/// Largest grid the dense propagator accepts.
pub const MAX_EXACT_POINTS: usize = 4096;
const SYMMETRY_TOLERANCE: f64 = 1e-10;

/// Real symmetric `2𝒩 × 2𝒩` Hamiltonian, index `j + 𝒩·surface`.
pub fn grid_hamiltonian(model: &DiabaticModel, coupling: CouplingChoice) -> Result<DMatrix<f64>> {
    let n = model.grid.points();
    if n > MAX_EXACT_POINTS {
        return Err(invalid(format!(
            "exact propagation supports at most {MAX_EXACT_POINTS} grid points, got {n}"
        )));
    }
    let k = kinetic_matrix(&model.grid, model.mass());
    let f = model.coupling_on_grid(coupling)?;
    let mut h = DMatrix::zeros(2 * n, 2 * n);
    for s in 0..2 {
        let v = model.potential_on_grid(s);
        let off = s * n;
        h.view_mut((off, off), (n, n)).copy_from(&k);
        for j in 0..n {
            h[(off + j, off + j)] += v[j];
        }
    }
    for j in 0..n {
        h[(j, n + j)] = f[j];
        h[(n + j, j)] = f[j];
    }
    Ok(h)
}

/// `exp(-iHt)` through one eigendecomposition of the grid Hamiltonian.
#[derive(Debug, Clone)]
pub struct ExactPropagator {
    energies: DVector<f64>,
    vectors: DMatrix<f64>,
}

impl ExactPropagator {
    pub fn new(model: &DiabaticModel, coupling: CouplingChoice) -> Result<Self> {
        Self::from_hamiltonian(grid_hamiltonian(model, coupling)?)
    }

    pub fn from_hamiltonian(h: DMatrix<f64>) -> Result<Self> {
        if !h.is_square() {
            return Err(Error::Internal("Hamiltonian is not square".into()));
        }
        let asym = (&h - h.transpose()).amax();
        if !(asym <= SYMMETRY_TOLERANCE) {
            return Err(Error::Internal(format!(
                "assembled Hamiltonian is not Hermitian (asymmetry {asym:.3e})"
            )));
        }
        let eig = h.symmetric_eigen();
        Ok(ExactPropagator {
            energies: eig.eigenvalues,
            vectors: eig.eigenvectors,
        })
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &DVector<f64> {
        &self.energies
    }

    fn to_eigenbasis(&self, psi: &[Complex64]) -> Result<(DVector<f64>, DVector<f64>)> {
        if psi.len() != self.dim() {
            return Err(invalid(format!(
                "wavefunction has {} entries, propagator acts on {}",
                psi.len(),
                self.dim()
            )));
        }
        let re = DVector::from_iterator(psi.len(), psi.iter().map(|a| a.re));
        let im = DVector::from_iterator(psi.len(), psi.iter().map(|a| a.im));
        Ok((self.vectors.tr_mul(&re), self.vectors.tr_mul(&im)))
    }

    fn eigen_to_grid(&self, cre: &DVector<f64>, cim: &DVector<f64>, t: f64) -> Vec<Complex64> {
        let mut re = cre.clone();
        let mut im = cim.clone();
        for k in 0..self.dim() {
            let (s, c) = (-self.energies[k] * t).sin_cos();
            let (a, b) = (cre[k], cim[k]);
            re[k] = a * c - b * s;
            im[k] = a * s + b * c;
        }
        let re = &self.vectors * re;
        let im = &self.vectors * im;
        re.iter()
            .zip(im.iter())
            .map(|(&r, &i)| Complex64::new(r, i))
            .collect()
    }

    /// `exp(-iHt) ψ`.
    pub fn propagate(&self, psi: &[Complex64], t: f64) -> Result<Vec<Complex64>> {
        let (cre, cim) = self.to_eigenbasis(psi)?;
        Ok(self.eigen_to_grid(&cre, &cim, t))
    }

    /// Dense unitary `exp(-iHt)`.
    pub fn unitary(&self, t: f64) -> DMatrix<Complex64> {
        let v = self.vectors.map(|x| Complex64::new(x, 0.0));
        let mut vd = v.clone();
        for (k, &e) in self.energies.iter().enumerate() {
            let ph = Complex64::from_polar(1.0, -e * t);
            for z in vd.column_mut(k).iter_mut() {
                *z *= ph;
            }
        }
        vd * v.transpose()
    }

    /// `(t, P0, ⟨Ψ|Ψ⟩)` at `t = 0, dt, …, n_steps·dt`.
    pub fn trajectory(&self, psi0: &[Complex64], cfg: &TrotterConfig) -> Result<Vec<RecordEntry>> {
        cfg.validate()?;
        let (cre, cim) = self.to_eigenbasis(psi0)?;
        let half = self.dim() / 2;
        Ok((0..=cfg.n_steps)
            .map(|s| {
                let t = s as f64 * cfg.dt;
                let psi = self.eigen_to_grid(&cre, &cim, t);
                let p0: f64 = psi[..half].iter().map(|a| a.norm_sqr()).sum();
                let norm = p0 + psi[half..].iter().map(|a| a.norm_sqr()).sum::<f64>();
                RecordEntry {
                    t,
                    p0: p0.clamp(0.0, 1.0),
                    norm,
                }
            })
            .collect())
    }
}

/// Dense `exp(-iHt)` for the model, with either the reference Gaussian or
/// the piecewise coupling.
pub fn exact_propagator(
    model: &DiabaticModel,
    use_reference_coupling: bool,
    t: f64,
) -> Result<DMatrix<Complex64>> {
    let choice = if use_reference_coupling {
        CouplingChoice::Reference
    } else {
        CouplingChoice::Piecewise
    };
    Ok(ExactPropagator::new(model, choice)?.unitary(t))
}

/// Exact trajectory of a grid wavefunction as a [`RunRecord`].
pub fn exact_run(
    model: &DiabaticModel,
    coupling: CouplingChoice,
    psi0: &[Complex64],
    cfg: &TrotterConfig,
) -> Result<RunRecord> {
    let prop = ExactPropagator::new(model, coupling)?;
    Ok(RunRecord {
        entries: prop.trajectory(psi0, cfg)?,
        metadata: Some(RunMetadata::new(model, Propagator::Exact, coupling, *cfg)),
    })
}
