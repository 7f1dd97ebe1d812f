use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Gains `a_k = a/(k + 1 + A)^α` and `c_k = c/(k + 1)^γ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpsaConfig {
    pub max_iter: usize,
    /// Step-size numerator; calibrated from gradient probes when absent.
    pub a: Option<f64>,
    /// Stability constant `A`; `0.1·max_iter` when absent.
    pub stability: Option<f64>,
    pub alpha: f64,
    pub gamma: f64,
    pub c: f64,
    /// Size of the first parameter update targeted by the calibration.
    pub target_step: f64,
    pub calibration_samples: usize,
    /// Stop once the trace exceeds this multiple of the initial energy.
    pub divergence_factor: f64,
    pub seed: u64,
}

impl Default for SpsaConfig {
    fn default() -> Self {
        SpsaConfig {
            max_iter: 200,
            a: None,
            stability: None,
            alpha: 0.602,
            gamma: 0.101,
            c: 0.2,
            target_step: 0.5,
            calibration_samples: 25,
            divergence_factor: 10.0,
            seed: 0,
        }
    }
}

impl SpsaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0) {
            return Err(invalid("perturbation size c must be positive"));
        }
        if let Some(a) = self.a {
            if !(a > 0.0) {
                return Err(invalid("step size a must be positive"));
            }
        } else if self.calibration_samples == 0 || !(self.target_step > 0.0) {
            return Err(invalid(
                "calibration needs samples and a positive target step",
            ));
        }
        if !(self.alpha > 0.0 && self.gamma > 0.0) {
            return Err(invalid("gain exponents must be positive"));
        }
        if self.stability.is_some_and(|s| !(s >= 0.0)) {
            return Err(invalid("stability constant must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpsaResult {
    /// Final iterate.
    pub theta: Vec<f64>,
    /// Iterate with the lowest trace value.
    pub best_theta: Vec<f64>,
    pub best_energy: f64,
    /// `f(θ0)` followed by `(f(θ+) + f(θ-))/2` for each iteration.
    pub trace: Vec<f64>,
    pub a: f64,
    pub stability: f64,
    pub iterations: usize,
    pub diverged: bool,
}

fn perturbation(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim)
        .map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 })
        .collect()
}

fn shifted(theta: &[f64], delta: &[f64], c: f64) -> Vec<f64> {
    theta.iter().zip(delta).map(|(t, d)| t + c * d).collect()
}

/// Simultaneous-perturbation stochastic approximation. `f` receives the
/// shared generator so that noisy objectives stay reproducible.
pub fn spsa_minimize<F>(mut f: F, theta0: &[f64], cfg: &SpsaConfig) -> Result<SpsaResult>
where
    F: FnMut(&[f64], &mut ChaCha8Rng) -> f64,
{
    cfg.validate()?;
    if theta0.is_empty() {
        return Err(invalid("no parameters to optimize"));
    }
    let dim = theta0.len();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let stability = cfg.stability.unwrap_or(0.1 * cfg.max_iter as f64);
    let mut theta = theta0.to_vec();

    let a = match cfg.a {
        Some(a) => a,
        None => {
            let mut g = 0.0;
            for _ in 0..cfg.calibration_samples {
                let d = perturbation(&mut rng, dim);
                let ep = f(&shifted(&theta, &d, cfg.c), &mut rng);
                let em = f(&shifted(&theta, &d, -cfg.c), &mut rng);
                g += (ep - em).abs() / cfg.calibration_samples as f64;
            }
            let g = g / (2.0 * cfg.c);
            let scale = cfg.target_step * (stability + 1.0).powf(cfg.alpha);
            if g > 0.0 && g.is_finite() {
                scale / g
            } else {
                scale
            }
        }
    };

    let initial = f(&theta, &mut rng);
    let mut trace = vec![initial];
    let mut best = (initial, theta.clone());
    let mut diverged = false;
    let mut iterations = 0;
    for k in 0..cfg.max_iter {
        let ak = a / (k as f64 + 1.0 + stability).powf(cfg.alpha);
        let ck = cfg.c / (k as f64 + 1.0).powf(cfg.gamma);
        let d = perturbation(&mut rng, dim);
        let ep = f(&shifted(&theta, &d, ck), &mut rng);
        let em = f(&shifted(&theta, &d, -ck), &mut rng);
        let g = (ep - em) / (2.0 * ck);
        for (t, di) in theta.iter_mut().zip(&d) {
            *t -= ak * g * di;
        }
        iterations = k + 1;
        let e = 0.5 * (ep + em);
        trace.push(e);
        if e < best.0 {
            best = (e, theta.clone());
        }
        if !e.is_finite() || e > cfg.divergence_factor * initial.abs() {
            log::warn!(
                "SPSA diverged at iteration {iterations}: energy {e} against initial {initial}"
            );
            diverged = true;
            break;
        }
    }
    Ok(SpsaResult {
        theta,
        best_theta: best.1,
        best_energy: best.0,
        trace,
        a,
        stability,
        iterations,
        diverged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let cfg = SpsaConfig {
            max_iter: 500,
            seed: 11,
            ..Default::default()
        };
        let r = spsa_minimize(
            |t, _| t.iter().map(|x| x * x).sum(),
            &[1.0, -0.7, 0.4],
            &cfg,
        )
        .unwrap();
        let norm = r.theta.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!(norm < 1e-2, "{norm}");
        assert!(!r.diverged);
        assert_eq!(r.trace.len(), 501);
    }

    #[test]
    fn divergence_stops_early() {
        let cfg = SpsaConfig {
            max_iter: 100,
            a: Some(50.0),
            ..Default::default()
        };
        // overshooting steps on a bowl grow without bound
        let r = spsa_minimize(|t, _| t[0] * t[0], &[1.0], &cfg);
        let r = r.unwrap();
        assert!(r.diverged);
        assert!(r.iterations < 100);
    }

    #[test]
    fn reproducible() {
        let cfg = SpsaConfig {
            max_iter: 50,
            seed: 4,
            ..Default::default()
        };
        let noisy = |t: &[f64], rng: &mut ChaCha8Rng| t[0] * t[0] + 0.01 * rng.gen::<f64>();
        let a = spsa_minimize(noisy, &[1.0], &cfg).unwrap();
        let b = spsa_minimize(noisy, &[1.0], &cfg).unwrap();
        assert_eq!(a, b);
    }
}
