use fluctua_core::channels::{check_cptp, choi_matrix};
use fluctua_core::models::three_level::*;
use fluctua_core::protocols::*;
use fluctua_core::qcore::*;
use fluctua_core::sampling::{random_density, SeededGenerator};

fn thermal_config(beta: f64) -> ThreeLevelConfig {
    ThreeLevelConfig {
        beta1: beta,
        beta2: beta,
        beta3: beta,
        drive: DriveForm::Off,
        t_max: 2000.0,
        ..Default::default()
    }
}

#[test]
fn driven_propagator_is_cptp_and_fourth_order() {
    let prop = three_level_propagator(&ThreeLevelConfig::default(), 10.0).unwrap();
    let s = prop.superoperator().unwrap();
    let rep = check_cptp(&s, 1e-5).unwrap();
    assert!(rep.trace_defect < 1e-8, "{rep:?}");
    assert!(hermitian_eig(&choi_matrix(&s)).unwrap().values[0] > -1e-5);
    let conv = prop.with_interval(0.0, 2.0).unwrap().convergence().unwrap();
    assert!(conv.order_factor >= 12.0, "{conv:?}");
}

#[test]
fn coarse_step_loses_the_order_factor() {
    let cfg = ThreeLevelConfig {
        step: 0.5,
        ..Default::default()
    };
    let conv = three_level_propagator(&cfg, 10.0).unwrap().convergence().unwrap();
    assert!(conv.order_factor < 12.0, "{conv:?}");
}

/// Detailed balance for Bose rates gives the Gibbs state of the bare Hamiltonian.
#[test]
fn equal_temperatures_relax_to_gibbs() {
    let beta = 0.7;
    let cfg = thermal_config(beta);
    let dyn_ = ThreeLevelDynamics::new(&cfg, &[2000.0]).unwrap();
    let z: f64 = [0.0, 1.0, 3.0].iter().map(|e: &f64| (-beta * e).exp()).sum();
    let gibbs = ComplexMatrix::from_real_diagonal(&[1.0 / z, (-beta * 1.0f64).exp() / z, (-beta * 3.0f64).exp() / z]);
    let mut g = SeededGenerator::new(3);
    let mut deltas = Vec::new();
    for _ in 0..5 {
        let rho = random_density(3, 3, &mut g).unwrap();
        let out = dyn_.channels[0].apply(&rho).unwrap();
        assert!(out.matrix().max_abs_diff(&gibbs) < 1e-6);
        let ds: Vec<_> = Protocol::ALL
            .iter()
            .map(|p| {
                delta_distribution(
                    &joint(*p, &rho, &dyn_.channels[0], &dyn_.spec_i, &dyn_.spec_f[0]).unwrap(),
                    None,
                )
            })
            .collect();
        deltas.push(ds);
    }
    for ds in deltas {
        assert!(tv_distance_delta(&ds[0], &ds[1]) < 1e-3);
        assert!(tv_distance_delta(&ds[0], &ds[2]) < 1e-3);
    }
}

#[test]
fn closed_drive_satisfies_tpm_jarzynski() {
    let cfg = ThreeLevelConfig {
        gamma: 0.0,
        ..Default::default()
    };
    let dyn_ = ThreeLevelDynamics::new(&cfg, &time_grid(10.0, 1.0)).unwrap();
    let rho = dyn_
        .coherent_thermal_state(0.6, 1.0, &mut SeededGenerator::new(1))
        .unwrap();
    for row in dyn_.evaluate(&rho, Some(0.6)).unwrap() {
        assert!((row.jarzynski_tpm.unwrap() - 1.0).abs() < 1e-9);
        let j = row.jarzynski.unwrap();
        assert!((j.total - j.diagonal_part - j.coherence_part).abs() < 1e-12);
    }
}

#[test]
fn thermal_state_has_no_coherence_contribution() {
    let dyn_ = ThreeLevelDynamics::new(&ThreeLevelConfig::default(), &time_grid(10.0, 1.0)).unwrap();
    let rho = dyn_.thermal_state(0.5);
    for i in 0..dyn_.times.len() {
        assert!(dyn_.second_moment_split(&rho, i).unwrap().coherence_part.abs() < 1e-10);
    }
}

#[test]
fn coherent_states_reach_large_second_moment_share() {
    let dyn_ = ThreeLevelDynamics::new(&ThreeLevelConfig::default(), &time_grid(10.0, 0.1)).unwrap();
    let best = ensemble(200, 11, |_, g| {
        let rho = dyn_.coherent_thermal_state(0.5, 1.0, g)?;
        Ok(dyn_.max_coherence_fraction(&rho)?.0)
    })
    .unwrap()
    .into_iter()
    .fold(f64::NEG_INFINITY, f64::max);
    assert!(best > 0.2, "{best}");
}

#[test]
fn bare_and_full_measurement_differ_only_when_driven() {
    let off = ThreeLevelConfig {
        drive: DriveForm::Off,
        ..Default::default()
    };
    let bare = ThreeLevelConfig {
        measurement: Measurement::Bare,
        ..off.clone()
    };
    assert_eq!(off.measured_hamiltonian(3.0), bare.measured_hamiltonian(3.0));
    let on = ThreeLevelConfig::default();
    assert!(on.measured_hamiltonian(0.0).max_abs_diff(&on.bare_hamiltonian()) > 1.0);
}
