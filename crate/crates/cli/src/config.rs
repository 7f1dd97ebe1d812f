//! Run configuration files and the built-in presets.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use nadyn::dynamics::{
    CouplingShape, GaussianPacket, GridSpec, ModelParams, Propagator, SimulationSpec, TrotterConfig,
};
use nadyn::vqe::{AnsatzParams, NoiseSpec, PrepProblem, SpsaConfig};
use serde::{Deserialize, Serialize};

/// Environment variable naming the directory all outputs go under.
pub const OUTPUT_ROOT_VAR: &str = "NADYN_OUTPUT_ROOT";

const PRESETS: &[(&str, &str)] = &[
    ("volcano", include_str!("../presets/volcano.json")),
    (
        "volcano-gaussian",
        include_str!("../presets/volcano-gaussian.json"),
    ),
    (
        "coupling-shapes",
        include_str!("../presets/coupling-shapes.json"),
    ),
    (
        "grid-convergence",
        include_str!("../presets/grid-convergence.json"),
    ),
    ("trotter-step", include_str!("../presets/trotter-step.json")),
    (
        "vqe-noiseless-200",
        include_str!("../presets/vqe-noiseless-200.json"),
    ),
    (
        "vqe-noiseless-1000",
        include_str!("../presets/vqe-noiseless-1000.json"),
    ),
    ("vqe-noisy", include_str!("../presets/vqe-noisy.json")),
    ("vqe-replay", include_str!("../presets/vqe-replay.json")),
];

pub fn preset_names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|p| p.0)
}

/// A configuration problem the user can fix (exit code 2).
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Reads `preset:NAME` or a file path.
pub fn load_text(source: &str) -> Result<String> {
    if let Some(name) = source.strip_prefix("preset:") {
        return PRESETS
            .iter()
            .find(|p| p.0 == name)
            .map(|p| p.1.to_string())
            .ok_or_else(|| {
                let known: Vec<_> = preset_names().collect();
                usage(format!(
                    "unknown preset {name:?}; available: {}",
                    known.join(", ")
                ))
            });
    }
    std::fs::read_to_string(source).map_err(|e| usage(format!("cannot read config {source}: {e}")))
}

pub fn parse<T: for<'de> Deserialize<'de>>(source: &str) -> Result<T> {
    let text = load_text(source)?;
    serde_json::from_str(&text).map_err(|e| usage(format!("invalid config {source}: {e}")))
}

/// What to vary across the runs of one configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Scan {
    Offsets(Vec<f64>),
    /// That many offsets evenly spaced over `[0, 2λ]`.
    VolcanoOffsets(usize),
    GridQubits(Vec<usize>),
    CouplingShapes(Vec<CouplingShape>),
    /// Time steps at fixed total time.
    TimeSteps(Vec<f64>),
}

fn default_surface() -> usize {
    1
}

fn default_propagator() -> Propagator {
    Propagator::Circuit
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveConfig {
    pub name: String,
    pub model: ModelParams,
    pub grid: GridSpec,
    pub packet: GaussianPacket,
    #[serde(default = "default_surface")]
    pub initial_surface: usize,
    pub trotter: TrotterConfig,
    #[serde(default = "default_propagator")]
    pub propagator: Propagator,
    #[serde(default)]
    pub scan: Option<Scan>,
    /// Also run the exact propagator with the reference Gaussian coupling.
    #[serde(default)]
    pub exact_reference: bool,
    /// Relative to the output root; defaults to `name`.
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl EvolveConfig {
    pub fn base_spec(&self) -> SimulationSpec {
        SimulationSpec {
            model: self.model.clone(),
            grid: self.grid,
            packet: self.packet,
            initial_surface: self.initial_surface,
            trotter: self.trotter,
            propagator: self.propagator,
        }
    }

    /// One `(file stem, spec)` per run.
    pub fn expand(&self) -> Result<Vec<(String, SimulationSpec)>> {
        let base = self.base_spec();
        let runs = match &self.scan {
            None => vec![("run".to_string(), base)],
            Some(Scan::Offsets(list)) => offsets_runs(&base, list),
            Some(Scan::VolcanoOffsets(n)) => {
                offsets_runs(&base, &nadyn::dynamics::volcano_offsets(&base.model, *n))
            }
            Some(Scan::GridQubits(list)) => list
                .iter()
                .map(|&n| (format!("n{n}"), base.clone().with_grid_qubits(n)))
                .collect(),
            Some(Scan::CouplingShapes(list)) => list
                .iter()
                .map(|&s| (format!("shape_{}", s.tag()), base.clone().with_shape(s)))
                .collect(),
            Some(Scan::TimeSteps(list)) => {
                let total = base.trotter.total_time();
                let mut out = Vec::new();
                for &dt in list {
                    let steps = total / dt;
                    if !(dt > 0.0) || (steps - steps.round()).abs() > 1e-9 {
                        bail!(usage(format!(
                            "time step {dt} does not divide the total time {total}"
                        )));
                    }
                    let mut s = base.clone();
                    s.trotter = TrotterConfig {
                        dt,
                        n_steps: steps.round() as usize,
                    };
                    out.push((format!("dt_{dt}"), s));
                }
                out
            }
        };
        if runs.is_empty() {
            bail!(usage("the scan produces no runs"));
        }
        for (_, s) in &runs {
            s.model.validate().map_err(|e| usage(e.to_string()))?;
            s.grid.validate().map_err(|e| usage(e.to_string()))?;
            s.trotter.validate().map_err(|e| usage(e.to_string()))?;
            s.packet.validate().map_err(|e| usage(e.to_string()))?;
            if s.initial_surface > 1 {
                bail!(usage("initial_surface must be 0 or 1"));
            }
            if s.propagator == Propagator::Circuit
                && s.model.coupling_shape == CouplingShape::GaussianReferenceExactOnly
            {
                bail!(usage(
                    "the circuit propagator needs a piecewise coupling shape (constant, step or peak)"
                ));
            }
        }
        Ok(runs)
    }
}

fn offsets_runs(base: &SimulationSpec, offsets: &[f64]) -> Vec<(String, SimulationSpec)> {
    offsets
        .iter()
        .enumerate()
        .map(|(i, &o)| {
            let mut s = base.clone();
            s.model = s.model.with_offset(o);
            (format!("offset_{i:02}"), s)
        })
        .collect()
}

fn default_shots() -> u64 {
    8000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VqeConfig {
    pub name: String,
    #[serde(default)]
    pub problem: PrepProblem,
    #[serde(default = "default_shots")]
    pub shots: u64,
    #[serde(default)]
    pub spsa: SpsaConfig,
    #[serde(default)]
    pub noise: Option<NoiseSpec>,
    /// Seeds to run; `--seeds k` replaces them with `0..k`.
    #[serde(default)]
    pub seeds: Vec<u64>,
    /// Skip optimization and sample these angles instead.
    #[serde(default)]
    pub replay: Option<AnsatzParams>,
    #[serde(default)]
    pub sample_seed: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

/// `$NADYN_OUTPUT_ROOT/<dir or name>`.
pub fn output_dir(configured: Option<&Path>, name: &str) -> PathBuf {
    let root = std::env::var_os(OUTPUT_ROOT_VAR)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."));
    root.join(configured.unwrap_or_else(|| Path::new(name)))
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_parses() {
        for name in preset_names() {
            let src = format!("preset:{name}");
            let text = load_text(&src).unwrap();
            let v: serde_json::Value = serde_json::from_str(&text).unwrap();
            if v.get("model").is_some() {
                let cfg: EvolveConfig = parse(&src).unwrap();
                assert!(!cfg.expand().unwrap().is_empty(), "{name}");
            } else {
                let _: VqeConfig = parse(&src).unwrap();
            }
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut v: serde_json::Value =
            serde_json::from_str(&load_text("preset:volcano").unwrap()).unwrap();
        v["bogus"] = serde_json::json!(1);
        assert!(serde_json::from_value::<EvolveConfig>(v).is_err());
    }

    #[test]
    fn volcano_scan_has_thirteen_runs() {
        let cfg: EvolveConfig = parse("preset:volcano").unwrap();
        let runs = cfg.expand().unwrap();
        assert_eq!(runs.len(), 13);
        assert!((runs[6].1.model.offset() - 0.135).abs() < 1e-15);
    }
}
