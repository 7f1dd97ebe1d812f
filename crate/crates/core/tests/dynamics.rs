use nadyn::circuits::{PiecewiseLinearFn, RegisterLayout};
use nadyn::dynamics::*;
use nadyn::statevec::StateVector;
use num_complex::Complex64;

fn small_spec(n: usize, offset: f64) -> (DiabaticModel, RegisterLayout, Vec<Complex64>) {
    let grid = GridSpec::new(n, 20.0).unwrap();
    let model = ModelParams::production(offset).build(&grid).unwrap();
    let layout = RegisterLayout::contiguous(n, 3);
    let psi = GaussianPacket::production()
        .grid_wavefunction(&grid, 1)
        .unwrap();
    (model, layout, psi)
}

fn distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

fn fidelity(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.conj() * y)
        .sum::<Complex64>()
        .norm_sqr()
}

#[test]
fn circuit_step_matches_grid_splitting() {
    let (model, layout, psi) = small_spec(6, 0.06);
    let mut state = embed_grid_wavefunction(&psi, &layout).unwrap();
    let step = build_trotter_step(&model, &layout, 10.0).unwrap();
    let mut split = SplitOperator::new(&model, CouplingChoice::Piecewise, 10.0).unwrap();
    let mut grid_psi = psi.clone();
    for _ in 0..15 {
        state.apply_all(&step).unwrap();
        split.step(&mut grid_psi);
    }
    let circ = extract_grid_wavefunction(&state, &layout);
    assert!(distance(&circ, &grid_psi) < 1e-10);
}

#[test]
fn decoupled_surfaces_never_transfer() {
    let grid = GridSpec::new(5, 20.0).unwrap();
    let mut params = ModelParams::production(0.05);
    params.coupling_amplitude = 0.0;
    let model = params.build(&grid).unwrap();
    let layout = RegisterLayout::contiguous(5, 3);
    let mut st = load_gaussian(&grid, &GaussianPacket::production(), 1, &layout).unwrap();
    let rec = evolve(
        &mut st,
        &model,
        &layout,
        &TrotterConfig {
            dt: 10.0,
            n_steps: 30,
        },
    )
    .unwrap();
    assert!(rec.entries.iter().all(|e| e.p0 == 0.0));

    let psi = GaussianPacket::production()
        .grid_wavefunction(&grid, 1)
        .unwrap();
    let exact = exact_run(
        &model,
        CouplingChoice::Reference,
        &psi,
        &TrotterConfig {
            dt: 10.0,
            n_steps: 30,
        },
    )
    .unwrap();
    assert!(exact.entries.iter().all(|e| e.p0 < 1e-28));
}

#[test]
fn rabi_oscillation_without_kinetic_term() {
    // Equal surfaces and a constant coupling c: only the ancilla rotates.
    let grid = GridSpec::new(3, 20.0).unwrap();
    let c = 0.013;
    let mut params = ModelParams::production(0.0).with_shape(CouplingShape::Constant);
    params.surfaces[1] = params.surfaces[0];
    params.coupling_amplitude = c;
    params.coupling_center = CouplingCenter::Fixed(10.0);
    let model = params.build(&grid).unwrap();
    let layout = RegisterLayout::contiguous(3, 1);
    let dt = 7.0;
    let blocks = build_trotter_blocks(&model, &layout, dt).unwrap();
    let mut step = blocks.potential;
    step.extend(blocks.coupling);
    let index = 5 | 1 << layout.surface_ancilla;
    let mut st = StateVector::new_basis_state(layout.total_qubits(), index).unwrap();
    let cfg = TrotterConfig { dt, n_steps: 40 };
    let entries = run_steps(&mut st, &step, layout.surface_ancilla, &cfg).unwrap();
    for e in entries {
        let expect = (c * e.t).sin().powi(2);
        assert!(
            (e.p0 - expect).abs() < 1e-12,
            "t={} {} vs {}",
            e.t,
            e.p0,
            expect
        );
    }
}

#[test]
fn zero_steps_leave_state_alone() {
    let (model, layout, psi) = small_spec(4, 0.0);
    let mut st = embed_grid_wavefunction(&psi, &layout).unwrap();
    let before = st.clone();
    let rec = evolve(
        &mut st,
        &model,
        &layout,
        &TrotterConfig {
            dt: 10.0,
            n_steps: 0,
        },
    )
    .unwrap();
    assert_eq!(rec.entries.len(), 1);
    assert_eq!(rec.entries[0].p0, 0.0);
    assert_eq!(st, before);
}

#[test]
fn comparison_register_stays_clean_and_norm_is_kept() {
    let (model, layout, psi) = small_spec(5, 0.135);
    let mut st = embed_grid_wavefunction(&psi, &layout).unwrap();
    let step = build_trotter_step(&model, &layout, 10.0).unwrap();
    for _ in 0..40 {
        st.apply_all(&step).unwrap();
        assert!((st.probability_all_zero(&layout.comparison).unwrap() - 1.0).abs() < 1e-9);
        assert!((st.norm_sqr() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn small_grid_circuit_tracks_exact_evolution() {
    let (model, layout, psi) = small_spec(4, 0.135);
    let mut st = embed_grid_wavefunction(&psi, &layout).unwrap();
    let cfg = TrotterConfig {
        dt: 1.0,
        n_steps: 50,
    };
    evolve(&mut st, &model, &layout, &cfg).unwrap();
    let exact = ExactPropagator::new(&model, CouplingChoice::Piecewise)
        .unwrap()
        .propagate(&psi, cfg.total_time())
        .unwrap();
    let f = fidelity(&extract_grid_wavefunction(&st, &layout), &exact);
    assert!(f > 1.0 - 1e-3, "fidelity {f}");
}

#[test]
fn trotter_error_is_first_order() {
    let (model, layout, psi) = small_spec(6, 0.06);
    let total = 200.0;
    let exact = ExactPropagator::new(&model, CouplingChoice::Piecewise)
        .unwrap()
        .propagate(&psi, total)
        .unwrap();
    let dts = [1.25, 2.5, 5.0, 10.0];
    let mut errors = Vec::new();
    let mut prev = f64::INFINITY;
    for &dt in &dts {
        let mut st = embed_grid_wavefunction(&psi, &layout).unwrap();
        let cfg = TrotterConfig {
            dt,
            n_steps: (total / dt).round() as usize,
        };
        evolve(&mut st, &model, &layout, &cfg).unwrap();
        let err = distance(&extract_grid_wavefunction(&st, &layout), &exact);
        errors.push(err);
        let _ = prev;
        prev = err;
    }
    // halving dt always helps
    assert!(errors.windows(2).all(|w| w[0] < w[1]), "{errors:?}");
    let lx: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
    let ly: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let mx = lx.iter().sum::<f64>() / 4.0;
    let my = ly.iter().sum::<f64>() / 4.0;
    let slope = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum::<f64>()
        / lx.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    assert!(
        (0.8..=1.5).contains(&slope),
        "slope {slope}, errors {errors:?}"
    );
}

#[test]
fn single_step_infidelity_is_second_order() {
    let (model, layout, psi) = small_spec(8, 0.06);
    let prop = ExactPropagator::new(&model, CouplingChoice::Piecewise).unwrap();
    let mut inf = Vec::new();
    for dt in [1.0, 5.0, 10.0] {
        let mut st = embed_grid_wavefunction(&psi, &layout).unwrap();
        st.apply_all(&build_trotter_step(&model, &layout, dt).unwrap())
            .unwrap();
        let f = fidelity(
            &extract_grid_wavefunction(&st, &layout),
            &prop.propagate(&psi, dt).unwrap(),
        );
        inf.push((dt, 1.0 - f));
    }
    eprintln!("{inf:?}");
    for (dt, i) in inf {
        assert!(i <= 1e-3 * dt * dt, "dt={dt} infidelity {i}");
    }
}

#[test]
fn gauge_phase_leaves_population_bit_identical() {
    let (model, layout, psi) = small_spec(5, 0.1);
    let cfg = TrotterConfig {
        dt: 10.0,
        n_steps: 25,
    };
    let mut a = embed_grid_wavefunction(&psi, &layout).unwrap();
    let ra = evolve(&mut a, &model, &layout, &cfg).unwrap();
    for phase in [Complex64::new(0.0, 1.0), Complex64::new(-1.0, 0.0)] {
        let rotated: Vec<Complex64> = psi.iter().map(|z| z * phase).collect();
        let mut b = embed_grid_wavefunction(&rotated, &layout).unwrap();
        let rb = evolve(&mut b, &model, &layout, &cfg).unwrap();
        assert_eq!(ra.populations(), rb.populations());
    }
    let generic = Complex64::from_polar(1.0, 0.7);
    let rotated: Vec<Complex64> = psi.iter().map(|z| z * generic).collect();
    let mut b = embed_grid_wavefunction(&rotated, &layout).unwrap();
    let rb = evolve(&mut b, &model, &layout, &cfg).unwrap();
    assert!(ra.max_deviation(&rb).unwrap() < 1e-13);
}

#[test]
fn exact_propagator_basics() {
    let (model, _, psi) = small_spec(5, 0.05);
    let u0 = exact_propagator(&model, true, 0.0).unwrap();
    for i in 0..u0.nrows() {
        for j in 0..u0.ncols() {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((u0[(i, j)] - Complex64::new(want, 0.0)).norm() < 1e-12);
        }
    }
    let prop = ExactPropagator::new(&model, CouplingChoice::Reference).unwrap();
    let u = exact_propagator(&model, true, 37.0).unwrap();
    let dense: Vec<Complex64> = (0..psi.len())
        .map(|i| (0..psi.len()).map(|j| u[(i, j)] * psi[j]).sum())
        .collect();
    assert!(distance(&dense, &prop.propagate(&psi, 37.0).unwrap()) < 1e-12);
}

#[test]
fn free_particle_keeps_momentum_distribution() {
    let grid = GridSpec::new(6, 20.0).unwrap();
    let mut params = ModelParams::production(0.0);
    for s in &mut params.surfaces {
        s.force_constant = 0.0;
        s.energy_shift = 0.0;
    }
    params.coupling_amplitude = 0.0;
    params.coupling_center = CouplingCenter::Fixed(10.0);
    let model = params.build(&grid).unwrap();
    let psi = GaussianPacket {
        x0: 10.0,
        p0: 3.0,
        width: 1.0,
    }
    .grid_wavefunction(&grid, 0)
    .unwrap();
    let prop = ExactPropagator::new(&model, CouplingChoice::Reference).unwrap();
    let momentum = |v: &[Complex64]| -> Vec<f64> {
        let n = grid.points();
        (0..n)
            .map(|k| {
                (0..n)
                    .map(|j| {
                        v[j] * Complex64::from_polar(
                            1.0,
                            -2.0 * std::f64::consts::PI * (j * k) as f64 / n as f64,
                        )
                    })
                    .sum::<Complex64>()
                    .norm_sqr()
            })
            .collect()
    };
    let before = momentum(&psi);
    let after = momentum(&prop.propagate(&psi, 500.0).unwrap());
    for (a, b) in before.iter().zip(&after) {
        assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn circuit_rejects_reference_only_shape_and_bad_layouts() {
    let grid = GridSpec::new(4, 20.0).unwrap();
    let gauss = ModelParams::production(0.0)
        .with_shape(CouplingShape::GaussianReferenceExactOnly)
        .build(&grid)
        .unwrap();
    let layout = RegisterLayout::contiguous(4, 3);
    assert!(build_trotter_step(&gauss, &layout, 1.0).is_err());
    let step = ModelParams::production(0.0).build(&grid).unwrap();
    assert!(build_trotter_step(&step, &RegisterLayout::contiguous(4, 2), 1.0).is_err());
    assert!(build_trotter_step(&step, &RegisterLayout::contiguous(5, 3), 1.0).is_err());
}

#[test]
fn sweep_matches_direct_runs_and_is_deterministic() {
    let mut spec = SimulationSpec::production(0.0).with_grid_qubits(5);
    spec.trotter = TrotterConfig {
        dt: 10.0,
        n_steps: 12,
    };
    let offsets = [0.05, 0.05, 0.2];
    let recs = sweep_offsets(&offsets, &spec).unwrap();
    assert_eq!(recs[0], recs[1]);
    let mut direct = spec.clone();
    direct.model = direct.model.with_offset(0.2);
    assert_eq!(recs[2], direct.run().unwrap());
    assert_eq!(recs[2].offset(), Some(0.2));
    assert!(sweep_offsets(&[], &spec).is_err());
}

#[test]
fn record_files_round_trip() {
    let mut spec = SimulationSpec::production(0.1).with_grid_qubits(5);
    spec.trotter = TrotterConfig {
        dt: 10.0,
        n_steps: 12,
    };
    let rec = spec.with_propagator(Propagator::Exact).run().unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = rec.save(dir.path(), "run").unwrap();
    assert_eq!(RunRecord::load(&path).unwrap(), rec);
}

#[test]
fn volcano_offsets_span_twice_lambda() {
    let o = volcano_offsets(&ModelParams::production(0.0), 13);
    assert_eq!(o.len(), 13);
    assert_eq!(o[0], 0.0);
    assert!((o[6] - 0.135).abs() < 1e-15);
    assert!((o[12] - 0.27).abs() < 1e-15);
}

#[test]
fn custom_piecewise_function_in_circuit_matches_split() {
    // Four-piece peak shape through the same engine.
    let (mut model, _, psi) = small_spec(5, 0.1);
    let f = PiecewiseLinearFn::new(
        vec![10, 16, 22],
        vec![0.0, 0.001, -0.001, 0.0],
        vec![0.0, -0.01, 0.022, 0.0],
    )
    .unwrap();
    model.piecewise = Some(f);
    let layout = RegisterLayout::contiguous(5, 4);
    let mut st = embed_grid_wavefunction(&psi, &layout).unwrap();
    let step = build_trotter_step(&model, &layout, 5.0).unwrap();
    let mut split = SplitOperator::new(&model, CouplingChoice::Piecewise, 5.0).unwrap();
    let mut g = psi.clone();
    for _ in 0..10 {
        st.apply_all(&step).unwrap();
        split.step(&mut g);
    }
    assert!(distance(&extract_grid_wavefunction(&st, &layout), &g) < 1e-10);
}
