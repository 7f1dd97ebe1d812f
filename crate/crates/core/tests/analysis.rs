use nadyn::analysis::*;
use nadyn::dynamics::*;
use proptest::prelude::*;

#[test]
fn synthetic_boltzmann_populations_are_recovered() {
    let grid = GridSpec::new(8, 20.0).unwrap();
    let surf = ModelParams::production(0.0).surfaces[1];
    let (energies, _) = surface_eigenstates(&grid, PRODUCTION_MASS, &surf);
    let energies = &energies[..40];
    for beta in [100.0, 552.0, 1000.0] {
        let z: f64 = energies
            .iter()
            .map(|e| (-beta * (e - energies[0])).exp())
            .sum();
        let p: Vec<f64> = energies
            .iter()
            .map(|e| (-beta * (e - energies[0])).exp() / z)
            .collect();
        let fit = fit_boltzmann_beta(energies, &p).unwrap();
        assert!((fit - beta).abs() < 1e-6, "beta {beta} fitted {fit}");
    }
}

#[test]
fn ground_state_has_infinite_beta() {
    let grid = GridSpec::new(8, 20.0).unwrap();
    let surf = ModelParams::production(0.0).surfaces[1];
    let (energies, vectors) = surface_eigenstates(&grid, PRODUCTION_MASS, &surf);
    let pops: Vec<f64> = (0..grid.points())
        .map(|i| vectors.column(i).dot(&vectors.column(0)).powi(2))
        .collect();
    assert_eq!(fit_boltzmann_beta(&energies, &pops).unwrap(), f64::INFINITY);
}

#[test]
fn harmonic_spectrum_is_evenly_spaced() {
    let grid = GridSpec::new(8, 20.0).unwrap();
    let surf = ModelParams::production(0.0).surfaces[1];
    let (energies, _) = surface_eigenstates(&grid, PRODUCTION_MASS, &surf);
    let omega = surf.frequency(PRODUCTION_MASS);
    assert!((omega - 0.00406202).abs() < 1e-8);
    for n in 0..=10 {
        let spacing = energies[n + 1] - energies[n];
        assert!(
            (spacing / omega - 1.0).abs() < 0.01,
            "n={n} spacing {spacing}"
        );
    }
    assert!((energies[0] - omega / 2.0).abs() < 0.01 * omega);
}

#[test]
fn boltzmann_fit_rejects_bad_state_count() {
    let grid = GridSpec::new(6, 20.0).unwrap();
    let surf = ModelParams::production(0.0).surfaces[1];
    let pk = GaussianPacket::production();
    assert!(boltzmann_beta_fit(&grid, PRODUCTION_MASS, &surf, &pk, 0).is_err());
    assert!(boltzmann_beta_fit(&grid, PRODUCTION_MASS, &surf, &pk, 65).is_err());
}

#[test]
fn reorganization_energy_cases() {
    let mut m = ModelParams::production(0.0);
    assert!((reorganization_energy(&m) - 0.135).abs() < 1e-15);
    m.surfaces[0].force_constant *= 2.0;
    assert!((reorganization_energy(&m) - 0.27).abs() < 1e-15);
    m.surfaces[1].center = m.surfaces[0].center;
    assert_eq!(reorganization_energy(&m), 0.0);
}

#[test]
fn marcus_argmax_is_lambda() {
    let lam = 0.135;
    let offsets: Vec<f64> = (0..=2000).map(|i| i as f64 * 0.27 / 2000.0).collect();
    let rates: Vec<f64> = offsets
        .iter()
        .map(|&e| {
            marcus_rate(&MarcusParams {
                coupling: 0.01,
                reorganization_energy: lam,
                offset: e,
                beta_inv_temp: MARCUS_BETA,
            })
            .unwrap()
        })
        .collect();
    assert_eq!(offsets[argmax(&rates).unwrap()], lam);
    assert!(is_unimodal(&rates));
}

#[test]
fn rate_table_layout() {
    let rows = [RateRow {
        offset: 0.0,
        k_sim: 1e-5,
        k_exact_oracle: f64::NAN,
        k_marcus: 2e-6,
    }];
    let mut buf = Vec::new();
    write_rate_table(&rows, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "offset,k_sim,k_exact_oracle,k_marcus"
    );
    assert_eq!(text.lines().nth(1).unwrap(), "0,0.00001,NaN,0.000002");
}

#[test]
fn refit_after_file_round_trip_is_identical() {
    let mut spec = SimulationSpec::production(0.135).with_grid_qubits(6);
    spec.trotter = TrotterConfig {
        dt: 10.0,
        n_steps: 15,
    };
    let rec = spec
        .with_propagator(Propagator::SplitOperator)
        .run()
        .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = rec.save(dir.path(), "r").unwrap();
    let back = RunRecord::load(&path).unwrap();
    let a = fit_rate(&rec, 10).unwrap();
    let b = fit_rate(&back, 10).unwrap();
    assert!((a.k - b.k).abs() <= 1e-12 * a.k.abs().max(1e-300));
    assert_eq!(b.offset, 0.135);
}

proptest! {
    #[test]
    fn rate_fit_shift_and_dilation(k in -0.01f64..0.01, b in -1.0f64..1.0, shift in -500.0f64..500.0, scale in 0.1f64..10.0) {
        let t: Vec<f64> = (0..12).map(|i| 10.0 * i as f64).collect();
        let noise = [0.0, 1e-4, -2e-4, 3e-4, 0.0, -1e-4, 2e-4, 0.0, 1e-4, -3e-4, 0.0, 0.0];
        let p: Vec<f64> = t.iter().zip(noise).map(|(t, n)| k * t + b + n).collect();
        let base = fit_rate_series(&t, &p, 10, 0.0).unwrap();
        let shifted: Vec<f64> = t.iter().map(|x| x + shift).collect();
        let s = fit_rate_series(&shifted, &p, 10, 0.0).unwrap();
        prop_assert!((s.k - base.k).abs() < 1e-12);
        let dilated: Vec<f64> = t.iter().map(|x| x * scale).collect();
        let d = fit_rate_series(&dilated, &p, 10, 0.0).unwrap();
        prop_assert!((d.k * scale - base.k).abs() < 1e-12);
    }

    #[test]
    fn marcus_is_even_about_lambda(lam in 0.01f64..1.0, d in 0.0f64..0.5, v in 0.001f64..0.1) {
        let p = |e: f64| marcus_rate(&MarcusParams { coupling: v, reorganization_energy: lam, offset: e, beta_inv_temp: 552.0 }).unwrap();
        let top = p(lam);
        prop_assert!((p(lam + d) - p(lam - d)).abs() <= 1e-12 * top);
        prop_assert!(p(lam + d) <= top);
    }
}
