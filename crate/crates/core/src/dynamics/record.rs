use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::grid::GridSpec;
use super::model::{CouplingChoice, CouplingShape, ModelParams};
use super::packet::GaussianPacket;
use super::trotter::TrotterConfig;
use crate::error::{Error, Result};

/// How a trajectory was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Propagator {
    /// Gate-level Trotterized circuit on the full register.
    Circuit,
    /// Dense eigendecomposition of the grid Hamiltonian.
    Exact,
    /// Lie–Trotter splitting applied directly to the grid wavefunction.
    SplitOperator,
}

impl Propagator {
    pub fn tag(&self) -> &'static str {
        match self {
            Propagator::Circuit => "circuit",
            Propagator::Exact => "exact",
            Propagator::SplitOperator => "split_operator",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecordEntry {
    pub t: f64,
    pub p0: f64,
    pub norm: f64,
}

/// Parameters stored in the JSON sidecar of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub propagator: Propagator,
    pub offset: f64,
    pub reorganization_energy: f64,
    pub coupling_shape: CouplingShape,
    pub coupling: CouplingChoice,
    pub grid: GridSpec,
    pub trotter: TrotterConfig,
    pub model: ModelParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub packet: Option<GaussianPacket>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_surface: Option<usize>,
}

/// Time series of the product-surface population.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub entries: Vec<RecordEntry>,
    /// Absent when the record was read from a bare CSV.
    pub metadata: Option<RunMetadata>,
}

pub const CSV_HEADER: &str = "t,P0,norm";

impl RunRecord {
    pub fn times(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.t).collect()
    }

    pub fn populations(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.p0).collect()
    }

    pub fn final_p0(&self) -> Option<f64> {
        self.entries.last().map(|e| e.p0)
    }

    pub fn offset(&self) -> Option<f64> {
        self.metadata.as_ref().map(|m| m.offset)
    }

    /// `max_t |P0_a(t) - P0_b(t)|` over the common prefix; the times must agree.
    pub fn max_deviation(&self, other: &RunRecord) -> Result<f64> {
        let mut worst = 0.0f64;
        for (a, b) in self.entries.iter().zip(&other.entries) {
            if (a.t - b.t).abs() > 1e-9 * a.t.abs().max(1.0) {
                return Err(Error::InvalidInput(format!(
                    "records sampled at different times ({} vs {})",
                    a.t, b.t
                )));
            }
            worst = worst.max((a.p0 - b.p0).abs());
        }
        Ok(worst)
    }

    /// Keeps every `stride`-th entry (starting with the first).
    pub fn subsample(&self, stride: usize) -> RunRecord {
        RunRecord {
            entries: self
                .entries
                .iter()
                .step_by(stride.max(1))
                .copied()
                .collect(),
            metadata: self.metadata.clone(),
        }
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{CSV_HEADER}")?;
        for e in &self.entries {
            writeln!(w, "{},{},{}", e.t, e.p0, e.norm)?;
        }
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<RunRecord> {
        let mut lines = BufReader::new(r).lines();
        let header = lines
            .next()
            .transpose()?
            .ok_or_else(|| Error::Parse("empty record file".into()))?;
        if header.trim() != CSV_HEADER {
            return Err(Error::Parse(format!("unexpected header {header:?}")));
        }
        let mut entries = Vec::new();
        for (n, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("line {}: bad number {s:?}", n + 2)))
            };
            if fields.len() != 3 {
                return Err(Error::Parse(format!(
                    "line {}: expected 3 fields, got {}",
                    n + 2,
                    fields.len()
                )));
            }
            entries.push(RecordEntry {
                t: parse(fields[0])?,
                p0: parse(fields[1])?,
                norm: parse(fields[2])?,
            });
        }
        Ok(RunRecord {
            entries,
            metadata: None,
        })
    }

    /// Writes `<stem>.csv` and, when metadata is present, `<stem>.json`.
    /// Returns the CSV path.
    pub fn save(&self, dir: &Path, stem: &str) -> Result<PathBuf> {
        fs::create_dir_all(dir)?;
        let csv = dir.join(format!("{stem}.csv"));
        self.write_csv(std::io::BufWriter::new(fs::File::create(&csv)?))?;
        if let Some(meta) = &self.metadata {
            let json = dir.join(format!("{stem}.json"));
            fs::write(json, serde_json::to_string_pretty(meta)?)?;
        }
        Ok(csv)
    }

    /// Reads a CSV and its sidecar, if one sits next to it.
    pub fn load(csv: &Path) -> Result<RunRecord> {
        let mut rec = RunRecord::read_csv(fs::File::open(csv)?)?;
        let sidecar = csv.with_extension("json");
        if sidecar.exists() {
            rec.metadata = Some(serde_json::from_str(&fs::read_to_string(sidecar)?)?);
        }
        Ok(rec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RunRecord {
        RunRecord {
            entries: (0..5)
                .map(|i| RecordEntry {
                    t: 10.0 * i as f64,
                    p0: 0.1 / 3.0 * i as f64,
                    norm: 1.0 - 1e-13 * i as f64,
                })
                .collect(),
            metadata: None,
        }
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let rec = sample();
        let mut buf = Vec::new();
        rec.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("t,P0,norm\n"));
        let back = RunRecord::read_csv(&buf[..]).unwrap();
        assert_eq!(back, rec);
    }

    #[test]
    fn malformed_csv_rejected() {
        assert!(RunRecord::read_csv("a,b\n1,2\n".as_bytes()).is_err());
        assert!(RunRecord::read_csv("t,P0,norm\n1,x,1\n".as_bytes()).is_err());
        assert!(RunRecord::read_csv("t,P0,norm\n1,2\n".as_bytes()).is_err());
        assert!(RunRecord::read_csv("".as_bytes()).is_err());
    }

    #[test]
    fn deviation_requires_matching_times() {
        let a = sample();
        let mut b = sample();
        b.entries[2].p0 += 0.25;
        assert!((a.max_deviation(&b).unwrap() - 0.25).abs() < 1e-15);
        b.entries[1].t = 11.0;
        assert!(a.max_deviation(&b).is_err());
    }
}
