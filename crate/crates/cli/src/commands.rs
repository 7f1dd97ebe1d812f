use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use log::{info, warn};
use nadyn::analysis::{fit_rate, marcus_rate, write_rate_table, MarcusParams, RateRow};
use nadyn::circuits::build_cqft;
use nadyn::dynamics::{run_all, CouplingChoice, CouplingShape, Propagator, RunRecord};
use nadyn::vqe::{ansatz_state, sampled_ansatz_energy, vqe_seeds, INITIAL_STATE, NUM_PARAMS};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{ensure_dir, output_dir, parse, usage, EvolveConfig, VqeConfig};

const REFERENCE_PREFIX: &str = "exact_reference_";

pub fn evolve(source: &str, exact_reference: bool, gnuplot: bool) -> Result<bool> {
    let cfg: EvolveConfig = parse(source)?;
    let mut runs = cfg.expand()?;
    if exact_reference || cfg.exact_reference {
        let extra: Vec<_> = runs
            .iter()
            .map(|(stem, s)| {
                let s = s
                    .clone()
                    .with_shape(CouplingShape::GaussianReferenceExactOnly)
                    .with_propagator(Propagator::Exact);
                (format!("{REFERENCE_PREFIX}{stem}"), s)
            })
            .collect();
        runs.extend(extra);
    }
    let dir = output_dir(cfg.output_dir.as_deref(), &cfg.name);
    ensure_dir(&dir)?;
    info!("{}: {} run(s) into {}", cfg.name, runs.len(), dir.display());

    let specs: Vec<_> = runs.iter().map(|r| r.1.clone()).collect();
    let records = run_all(&specs).context("time evolution failed")?;
    let mut csvs = Vec::new();
    for ((stem, _), rec) in runs.iter().zip(&records) {
        let path = rec.save(&dir, stem)?;
        info!(
            "{}: final P0 = {:.6}",
            path.display(),
            rec.final_p0().unwrap_or(f64::NAN)
        );
        csvs.push(path);
    }
    if gnuplot {
        write_population_plot(&dir, &csvs)?;
    }
    Ok(true)
}

fn is_reference(rec: &RunRecord) -> bool {
    rec.metadata.as_ref().is_some_and(|m| {
        m.propagator == Propagator::Exact && m.coupling == CouplingChoice::Reference
    })
}

pub fn rates(dir: &Path, window: usize, beta: f64, gnuplot: bool) -> Result<bool> {
    if window < 2 {
        return Err(usage("--window must be at least 2"));
    }
    let entries = fs::read_dir(dir)
        .map_err(|e| usage(format!("cannot read directory {}: {e}", dir.display())))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .filter(|p| p.file_name().is_some_and(|n| n != "rates.csv"))
        .collect();
    paths.sort();

    let mut sims = Vec::new();
    let mut refs = Vec::new();
    for p in &paths {
        let rec = match RunRecord::load(p) {
            Ok(r) => r,
            Err(e) => {
                warn!("skipping {}: {e}", p.display());
                continue;
            }
        };
        let fit = match fit_rate(&rec, window) {
            Ok(f) => f,
            Err(e) => {
                warn!("skipping {}: {e}", p.display());
                continue;
            }
        };
        if is_reference(&rec) {
            refs.push((rec, fit));
        } else {
            sims.push((rec, fit));
        }
    }
    if sims.is_empty() && !refs.is_empty() {
        // only reference runs: report them as the simulated series
        sims = std::mem::take(&mut refs);
    }
    if sims.is_empty() {
        return Err(usage(format!("no usable run records in {}", dir.display())));
    }

    let mut rows: Vec<RateRow> = sims
        .iter()
        .map(|(rec, fit)| {
            let k_marcus = rec
                .metadata
                .as_ref()
                .and_then(|m| {
                    marcus_rate(&MarcusParams {
                        coupling: m.model.coupling_amplitude,
                        reorganization_energy: m.reorganization_energy,
                        offset: m.offset,
                        beta_inv_temp: beta,
                    })
                    .ok()
                })
                .unwrap_or(f64::NAN);
            let k_exact_oracle = refs
                .iter()
                .find(|(_, r)| (r.offset - fit.offset).abs() <= 1e-12 * fit.offset.abs().max(1.0))
                .map_or(f64::NAN, |(_, r)| r.k);
            RateRow {
                offset: fit.offset,
                k_sim: fit.k,
                k_exact_oracle,
                k_marcus,
            }
        })
        .collect();
    rows.sort_by(|a, b| a.offset.total_cmp(&b.offset));

    let out = dir.join("rates.csv");
    write_rate_table(&rows, BufWriter::new(fs::File::create(&out)?))?;
    let mut stdout = std::io::stdout().lock();
    write_rate_table(&rows, &mut stdout)?;
    info!("wrote {}", out.display());
    if gnuplot {
        write_rate_plot(dir)?;
    }
    Ok(true)
}

#[derive(Serialize)]
struct SeedSummary {
    seed: u64,
    energy: f64,
    ground_energy: f64,
    fidelity: f64,
    converged: bool,
    diverged: bool,
    iterations: usize,
    best_energy: f64,
}

#[derive(Serialize)]
struct VqeSummary {
    name: String,
    shots: u64,
    ground_energy: f64,
    converged: usize,
    runs: Vec<SeedSummary>,
}

/// Relative energy tolerance for counting a run as converged.
const CONVERGED_TOLERANCE: f64 = 0.05;

pub fn vqe(source: &str, seeds: Option<u64>, iterations: Option<usize>) -> Result<bool> {
    let mut cfg: VqeConfig = parse(source)?;
    if let Some(k) = seeds {
        cfg.seeds = (0..k).collect();
    }
    if let Some(n) = iterations {
        cfg.spsa.max_iter = n;
    }
    cfg.problem.validate().map_err(|e| usage(e.to_string()))?;
    cfg.spsa.validate().map_err(|e| usage(e.to_string()))?;
    if let Some(n) = &cfg.noise {
        n.validate(cfg.problem.num_qubits())
            .map_err(|e| usage(e.to_string()))?;
    }
    if cfg.shots == 0 {
        return Err(usage("shots must be positive"));
    }
    let dir = output_dir(cfg.output_dir.as_deref(), &cfg.name);
    ensure_dir(&dir)?;

    if let Some(theta) = &cfg.replay {
        return replay(&cfg, theta.as_slice(), &dir);
    }
    if cfg.seeds.is_empty() {
        return Err(usage("no seeds given; set \"seeds\" or pass --seeds"));
    }

    info!(
        "{}: {} seed(s), {} iterations, {} shots",
        cfg.name,
        cfg.seeds.len(),
        cfg.spsa.max_iter,
        cfg.shots
    );
    let outcomes = vqe_seeds(
        &cfg.problem,
        &cfg.spsa,
        &cfg.seeds,
        cfg.noise.as_ref(),
        cfg.shots,
    )
    .context("optimization failed")?;
    let mut runs = Vec::new();
    for o in &outcomes {
        let mut w = BufWriter::new(fs::File::create(
            dir.join(format!("seed_{}_trace.csv", o.seed)),
        )?);
        writeln!(w, "iter,energy")?;
        for (i, e) in o.spsa.trace.iter().enumerate() {
            writeln!(w, "{i},{e}")?;
        }
        w.flush()?;
        fs::write(
            dir.join(format!("seed_{}_theta.json", o.seed)),
            serde_json::to_string_pretty(&o.theta)?,
        )?;
        let converged = o.converged(CONVERGED_TOLERANCE);
        info!(
            "seed {}: E = {:.6} (E0 = {:.6}), fidelity {:.5}{}",
            o.seed,
            o.energy,
            o.ground_energy,
            o.fidelity,
            if converged { "" } else { ", not converged" }
        );
        runs.push(SeedSummary {
            seed: o.seed,
            energy: o.energy,
            ground_energy: o.ground_energy,
            fidelity: o.fidelity,
            converged,
            diverged: o.spsa.diverged,
            iterations: o.spsa.iterations,
            best_energy: o.spsa.best_energy,
        });
    }
    let summary = VqeSummary {
        name: cfg.name.clone(),
        shots: cfg.shots,
        ground_energy: outcomes.first().map_or(f64::NAN, |o| o.ground_energy),
        converged: runs.iter().filter(|r| r.converged).count(),
        runs,
    };
    fs::write(
        dir.join("summary.json"),
        serde_json::to_string_pretty(&summary)?,
    )?;
    println!(
        "{}/{} runs converged",
        summary.converged,
        summary.runs.len()
    );
    Ok(true)
}

/// Samples fixed angles and writes the measured position histogram next to
/// the exact distribution.
fn replay(cfg: &VqeConfig, theta: &[f64], dir: &Path) -> Result<bool> {
    debug_assert_eq!(theta.len(), NUM_PARAMS);
    let noise = cfg.noise.clone().unwrap_or_default();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.sample_seed);
    let start =
        nadyn::statevec::StateVector::new_basis_state(cfg.problem.num_qubits(), INITIAL_STATE)?;
    let gates = nadyn::vqe::ansatz_gates(theta)?;
    let counts = nadyn::vqe::sample_noisy_counts(&start, &gates, &noise, cfg.shots, &mut rng)?;
    let params = nadyn::vqe::AnsatzParams::new(theta.to_vec())?;
    let state = ansatz_state(&params, INITIAL_STATE)?;
    let (e0, ground) = cfg.problem.ground_state()?;
    let exact = state.probabilities();
    let target = ground.probabilities();
    let freq = counts.frequencies();
    let positions = cfg.problem.grid.positions();

    let mut w = BufWriter::new(fs::File::create(dir.join("histogram.csv"))?);
    writeln!(
        w,
        "index,x,counts,frequency,ansatz_probability,ground_probability"
    )?;
    for (k, x) in positions.iter().enumerate() {
        writeln!(
            w,
            "{k},{x},{},{},{},{}",
            counts.get(k),
            freq[k],
            exact[k],
            target[k]
        )?;
    }
    w.flush()?;
    let energy = sampled_ansatz_energy(
        &cfg.problem,
        theta,
        INITIAL_STATE,
        cfg.shots,
        &noise,
        &mut rng,
    )?;
    let summary = serde_json::json!({
        "name": cfg.name,
        "shots": cfg.shots,
        "sampled_energy": energy,
        "exact_energy": nadyn::vqe::exact_energy(&state, &cfg.problem)?.total(),
        "ground_energy": e0,
        "fidelity": state.fidelity(&ground),
    });
    fs::write(
        dir.join("summary.json"),
        serde_json::to_string_pretty(&summary)?,
    )?;
    println!("fidelity with ground state: {:.6}", state.fidelity(&ground));
    Ok(true)
}

pub fn validate(max_qubits: usize) -> Result<bool> {
    if !(1..=10).contains(&max_qubits) {
        return Err(usage("--max-qubits must be between 1 and 10"));
    }
    let report = nadyn::validate::run_validation(max_qubits, &build_cqft)?;
    print!("{}", report.to_table());
    let ok = report.all_passed();
    if ok {
        println!("all checks passed");
    } else {
        println!("{} check(s) failed", report.failures().len());
    }
    Ok(ok)
}

fn write_population_plot(dir: &Path, csvs: &[PathBuf]) -> Result<()> {
    let mut s = String::from(
        "set datafile separator ','\nset key outside\nset xlabel 't'\nset ylabel 'P0'\nplot ",
    );
    let lines: Vec<String> = csvs
        .iter()
        .filter_map(|p| p.file_name()?.to_str().map(str::to_owned))
        .map(|f| {
            format!(
                "'{f}' skip 1 using 1:2 with lines title '{}'",
                f.trim_end_matches(".csv").replace('_', " ")
            )
        })
        .collect();
    s.push_str(&lines.join(", \\\n     "));
    s.push('\n');
    fs::write(dir.join("populations.gp"), s)?;
    Ok(())
}

fn write_rate_plot(dir: &Path) -> Result<()> {
    let s = "set datafile separator ','\nset xlabel 'offset'\nset ylabel 'k'\n\
plot 'rates.csv' skip 1 using 1:2 with linespoints title 'simulated', \\\n\
     '' skip 1 using 1:3 with lines title 'exact reference', \\\n\
     '' skip 1 using 1:4 with lines title 'Marcus'\n";
    fs::write(dir.join("rates.gp"), s)?;
    Ok(())
}
