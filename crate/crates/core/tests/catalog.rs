//! Worked examples for each module, run against the public API.

use macrostab::analyzer::*;
use macrostab::cluster::*;
use macrostab::dynamics::*;
use macrostab::measure::*;
use macrostab::qcore::*;

fn open(n: usize) -> LatticeSpec {
    LatticeSpec::open(n).unwrap()
}

#[test]
fn symmetric_tfim_ground_state_is_unpolarized_and_anomalous() {
    let l = open(8);
    let ham = build_hamiltonian(&HamiltonianSpec::<f64>::transverse_ising(l, 1.0, 0.1)).unwrap();
    let gs = ground_state(&ham, Which::Lowest).unwrap().remove(0);
    assert!(magnetization(&gs.state).unwrap().abs() < 1e-6);
    let var = additive_variance(&AdditiveOperator::uniform(l, Axis::Z), &gs.state).unwrap();
    assert!(var >= 0.8 * 64.0);
}

#[test]
fn doublet_vacuum_is_polarized_and_normal() {
    let spec = HamiltonianSpec::<f64>::transverse_ising(open(8), 1.0, 0.1);
    for method in [
        VacuumMethod::DoubletSuperposition,
        VacuumMethod::SbFieldLimit,
    ] {
        let vac = pure_phase_vacuum(&spec, method).unwrap();
        assert!(vac.magnetization >= 0.9 * 8.0, "{method}");
        assert!(max_additive_fluctuation(&vac.state).unwrap().max_variance <= 16.0);
    }
}

#[test]
fn paramagnetic_ground_state_is_stable_and_clustered() {
    let l = open(10);
    let ham = build_hamiltonian(&HamiltonianSpec::<f64>::transverse_ising(l, 1.0, 2.0)).unwrap();
    let gs = ground_state(&ham, Which::Lowest).unwrap().remove(0).state;
    assert!(stability_test(&gs, 0.1, 0.05, 5).unwrap().stable);
    assert!(omega(&gs, 0.1).unwrap().omega <= 5);
}

#[test]
fn ghz_rates_and_scaling() {
    let mut collective = Vec::new();
    let mut independent = Vec::new();
    for n in [4, 6, 8] {
        let ghz = make_ghz::<f64>(open(n)).unwrap();
        collective.push((
            n,
            analytic_dephasing_rate(&ghz, &NoiseModel::axis(Axis::Z, 0.01, Kernel::Collective))
                .unwrap(),
        ));
        independent.push((
            n,
            analytic_dephasing_rate(&ghz, &NoiseModel::axis(Axis::Z, 0.01, Kernel::Independent))
                .unwrap(),
        ));
    }
    assert!((collective[0].1 - 0.16).abs() < 1e-12);
    assert!((independent[0].1 - 0.04).abs() < 1e-12);
    assert!(fit_gamma_scaling(&collective).unwrap().fragile);
    assert!(!fit_gamma_scaling(&independent).unwrap().fragile);
}

#[test]
fn measuring_ghz_once_leaves_a_normal_state() {
    for n in [3, 5, 8] {
        let l = open(n);
        let ghz = make_ghz::<f64>(l).unwrap();
        for site in [0, n - 1] {
            let out = measure_local(&ghz, &pauli(&l, site, Axis::Z).unwrap()).unwrap();
            for post in out.post_states.iter().flatten() {
                assert!(max_additive_fluctuation(post).unwrap().max_variance <= n as f64 + 1e-6);
            }
        }
    }
}

#[test]
fn single_precision_pipeline() {
    let l = open(6);
    let ghz = make_ghz::<f32>(l).unwrap();
    let var = additive_variance(&AdditiveOperator::uniform(l, Axis::Z), &ghz).unwrap();
    assert!((var - 36.0).abs() < 1e-3);
    let ham =
        build_hamiltonian(&HamiltonianSpec::<f32>::transverse_ising(open(2), 1.0, 1.0)).unwrap();
    let gs = ground_state(&ham, Which::Lowest).unwrap();
    assert!((gs[0].energy + 5f32.sqrt()).abs() < 1e-5);
    let report = omega(&ghz, 0.1).unwrap();
    assert_eq!(report.omega, 5);
}

#[test]
fn state_file_round_trip_through_disk() {
    let dir = std::env::temp_dir().join(format!("macrostab-catalog-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("w.state");
    let w = make_w::<f64>(open(5)).unwrap();
    write_state_file(&w, &path).unwrap();
    let back: StateVector<f64> = read_state_file(&path).unwrap();
    assert_eq!(back, w);
    std::fs::remove_dir_all(&dir).unwrap();
}
