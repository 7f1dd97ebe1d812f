//! Rate extraction, Marcus rates and the effective-temperature fit of the
//! initial wavepacket.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    kinetic_matrix, GaussianPacket, GridSpec, HarmonicSurface, ModelParams, RunRecord,
};
use crate::error::{invalid, Result};

pub const DEFAULT_RATE_WINDOW: usize = 10;
/// Inverse temperature for the Marcus overlay.
pub const MARCUS_BETA: f64 = 552.0;
/// Populations below this are left out of the Boltzmann residuals.
pub const POPULATED_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub offset: f64,
    /// Slope of P0 against t.
    pub k: f64,
    pub intercept: f64,
    pub window: usize,
    /// Root-mean-square residual of the line.
    pub residual: f64,
}

/// Least-squares line through the first `window` points of a series,
/// including the `t = 0` point.
pub fn fit_rate_series(t: &[f64], p0: &[f64], window: usize, offset: f64) -> Result<RateFit> {
    if window < 2 {
        return Err(invalid(format!(
            "fit window must be at least 2, got {window}"
        )));
    }
    if t.len() != p0.len() {
        return Err(invalid("time and population series differ in length"));
    }
    if t.len() < window {
        return Err(invalid(format!(
            "record has {} points, fit window needs {window}",
            t.len()
        )));
    }
    let (t, y) = (&t[..window], &p0[..window]);
    let n = window as f64;
    let tm = t.iter().sum::<f64>() / n;
    let ym = y.iter().sum::<f64>() / n;
    let sxx: f64 = t.iter().map(|&ti| (ti - tm) * (ti - tm)).sum();
    if sxx == 0.0 {
        return Err(invalid("fit window spans zero time"));
    }
    let sxy: f64 = t
        .iter()
        .zip(y)
        .map(|(&ti, &yi)| (ti - tm) * (yi - ym))
        .sum();
    let k = sxy / sxx;
    let intercept = ym - k * tm;
    let ss: f64 = t
        .iter()
        .zip(y)
        .map(|(&ti, &yi)| (yi - intercept - k * ti).powi(2))
        .sum();
    Ok(RateFit {
        offset,
        k,
        intercept,
        window,
        residual: (ss / n).sqrt(),
    })
}

/// Rate of a run: slope of P0 over its first `window` entries. The offset
/// is taken from the metadata (NaN when absent).
pub fn fit_rate(record: &RunRecord, window: usize) -> Result<RateFit> {
    fit_rate_series(
        &record.times(),
        &record.populations(),
        window,
        record.offset().unwrap_or(f64::NAN),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarcusParams {
    pub coupling: f64,
    pub reorganization_energy: f64,
    pub offset: f64,
    pub beta_inv_temp: f64,
}

/// `2π V² sqrt(β/(4πλ)) exp(-β(λ - ε)²/(4λ))`, with ħ = 1.
pub fn marcus_rate(p: &MarcusParams) -> Result<f64> {
    let lam = p.reorganization_energy;
    if !(lam > 0.0) {
        return Err(invalid(format!(
            "reorganization energy must be positive, got {lam}"
        )));
    }
    if !(p.beta_inv_temp > 0.0) {
        return Err(invalid(format!(
            "inverse temperature must be positive, got {}",
            p.beta_inv_temp
        )));
    }
    let pi = std::f64::consts::PI;
    let d = lam - p.offset;
    Ok(2.0
        * pi
        * p.coupling
        * p.coupling
        * (p.beta_inv_temp / (4.0 * pi * lam)).sqrt()
        * (-p.beta_inv_temp * d * d / (4.0 * lam)).exp())
}

pub fn reorganization_energy(model: &ModelParams) -> f64 {
    model.reorganization_energy()
}

/// Eigenpairs of `p²/2m + V` on one surface, ascending in energy.
pub fn surface_eigenstates(
    grid: &GridSpec,
    mass: f64,
    surface: &HarmonicSurface,
) -> (Vec<f64>, DMatrix<f64>) {
    let mut h = kinetic_matrix(grid, mass);
    for j in 0..grid.points() {
        h[(j, j)] += surface.potential(grid.x(j));
    }
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let energies = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_columns(
        &order
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect::<Vec<DVector<f64>>>(),
    );
    (energies, vectors)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoltzmannFit {
    /// `+inf` when the population sits in a single state.
    pub beta: f64,
    pub energies: Vec<f64>,
    pub populations: Vec<f64>,
}

/// Projects the packet onto the lowest `n_states` eigenstates of one
/// surface and fits the populations to a Boltzmann distribution.
pub fn boltzmann_beta_fit(
    grid: &GridSpec,
    mass: f64,
    surface: &HarmonicSurface,
    packet: &GaussianPacket,
    n_states: usize,
) -> Result<BoltzmannFit> {
    if n_states == 0 || n_states > grid.points() {
        return Err(invalid(format!(
            "n_states must be in 1..={}, got {n_states}",
            grid.points()
        )));
    }
    let (energies, vectors) = surface_eigenstates(grid, mass, surface);
    let psi = packet.amplitudes(grid)?;
    let populations: Vec<f64> = (0..n_states)
        .map(|i| {
            let col = vectors.column(i);
            let (re, im) = psi
                .iter()
                .zip(col.iter())
                .fold((0.0, 0.0), |(r, m), (a, &v)| (r + v * a.re, m + v * a.im));
            re * re + im * im
        })
        .collect();
    let energies = energies[..n_states].to_vec();
    let beta = fit_boltzmann_beta(&energies, &populations)?;
    Ok(BoltzmannFit {
        beta,
        energies,
        populations,
    })
}

fn boltzmann_weights(energies: &[f64], beta: f64) -> Vec<f64> {
    let e0 = energies.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut q: Vec<f64> = energies.iter().map(|&e| (-beta * (e - e0)).exp()).collect();
    let z: f64 = q.iter().sum();
    for v in &mut q {
        *v /= z;
    }
    q
}

/// Least-squares fit of `P_i ≈ exp(-βE_i)/Z` (Z over every state given),
/// with residuals taken over the populated states. Returns `+inf` when one
/// state holds essentially all of the population.
pub fn fit_boltzmann_beta(energies: &[f64], populations: &[f64]) -> Result<f64> {
    if energies.len() != populations.len() || energies.len() < 2 {
        return Err(invalid(
            "need at least two states with matching populations",
        ));
    }
    let total: f64 = populations.iter().sum();
    let pmax = populations.iter().cloned().fold(0.0, f64::max);
    if pmax > (1.0 - 1e-9) * total {
        log::warn!("population concentrated in one state; effective temperature is zero");
        return Ok(f64::INFINITY);
    }
    let p: Vec<f64> = populations.iter().map(|v| v / total).collect();
    let populated: Vec<usize> = (0..p.len())
        .filter(|&i| p[i] > POPULATED_THRESHOLD)
        .collect();

    let loss = |beta: f64| -> f64 {
        let q = boltzmann_weights(energies, beta);
        populated.iter().map(|&i| (p[i] - q[i]).powi(2)).sum()
    };
    // d(loss)/dβ up to a factor of -2: Σ (P_i - q_i) q_i (⟨E⟩_q - E_i)
    let slope = |beta: f64| -> f64 {
        let q = boltzmann_weights(energies, beta);
        let mean: f64 = q.iter().zip(energies).map(|(qi, e)| qi * e).sum();
        populated
            .iter()
            .map(|&i| (p[i] - q[i]) * q[i] * (mean - energies[i]))
            .sum::<f64>()
    };

    let mut sorted = energies.to_vec();
    sorted.sort_by(f64::total_cmp);
    let gap = sorted
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|&d| d > 0.0)
        .fold(f64::INFINITY, f64::min);
    if !gap.is_finite() {
        return Err(invalid("all energies are equal"));
    }
    // log-spaced scan over βΔE ∈ [1e-4, 1e3]
    let scan: Vec<f64> = (0..=700)
        .map(|i| 10f64.powf(-4.0 + i as f64 / 100.0) / gap)
        .collect();
    let best = (0..scan.len())
        .min_by(|&a, &b| loss(scan[a]).total_cmp(&loss(scan[b])))
        .expect("scan is nonempty");
    if best == scan.len() - 1 {
        return Ok(f64::INFINITY);
    }
    let mut lo = scan[best.saturating_sub(1)];
    let mut hi = scan[best + 1];
    // The loss decreases while -2·slope < 0, i.e. slope > 0.
    if slope(lo) <= 0.0 || slope(hi) >= 0.0 {
        return Ok(golden_section(&loss, lo, hi));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if slope(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn golden_section(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    for _ in 0..200 {
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - r * (b - a);
        d = a + r * (b - a);
        if (b - a).abs() <= 1e-14 * b.abs() {
            break;
        }
    }
    0.5 * (a + b)
}

/// One row of the rate table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub offset: f64,
    pub k_sim: f64,
    /// NaN when no exact reference run was available.
    pub k_exact_oracle: f64,
    pub k_marcus: f64,
}

pub const RATE_TABLE_HEADER: &str = "offset,k_sim,k_exact_oracle,k_marcus";

pub fn write_rate_table<W: Write>(rows: &[RateRow], mut w: W) -> Result<()> {
    writeln!(w, "{RATE_TABLE_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{}",
            r.offset, r.k_sim, r.k_exact_oracle, r.k_marcus
        )?;
    }
    Ok(())
}

/// Index of the largest value; `None` for empty input or NaNs.
pub fn argmax(values: &[f64]) -> Option<usize> {
    if values.iter().any(|v| v.is_nan()) {
        return None;
    }
    (0..values.len()).max_by(|&a, &b| values[a].total_cmp(&values[b]))
}

/// Non-decreasing up to the maximum and non-increasing after it.
pub fn is_unimodal(values: &[f64]) -> bool {
    let Some(peak) = argmax(values) else {
        return false;
    };
    values[..=peak].windows(2).all(|w| w[1] >= w[0])
        && values[peak..].windows(2).all(|w| w[1] <= w[0])
}
