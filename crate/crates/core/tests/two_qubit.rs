use fluctua_core::models::two_qubit::*;
use fluctua_core::qcore::C64;

/// Scalar reimplementation with plain arrays: diagonal H, pure input, controlled-U(θ,0,0).
struct Oracle {
    g_tpm: f64,
    g_epm: f64,
    g_diag: f64,
}

fn oracle(theta: f64, beta: f64, theta0: f64) -> Oracle {
    let energies = [2.0, 0.0, 0.0, -2.0];
    let (c0, s0) = ((theta0 / 2.0).cos(), (theta0 / 2.0).sin());
    let psi = [c0 * c0, c0 * s0, s0 * c0, s0 * s0];
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let u = [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, c, -s],
        [0.0, 0.0, s, c],
    ];
    let p: Vec<f64> = psi.iter().map(|a| a * a).collect();
    let out: Vec<f64> = (0..4)
        .map(|k| (0..4).map(|l| u[k][l] * psi[l]).sum::<f64>().powi(2))
        .collect();
    let deph: Vec<f64> = (0..4).map(|k| (0..4).map(|l| u[k][l] * u[k][l] * p[l]).sum()).collect();
    let a: f64 = (0..4).map(|l| p[l] * (beta * energies[l]).exp()).sum();
    let b = |q: &[f64]| -> f64 { (0..4).map(|k| q[k] * (-beta * energies[k]).exp()).sum() };
    let g_tpm = (0..4)
        .map(|l| {
            p[l] * (beta * energies[l]).exp()
                * (0..4)
                    .map(|k| u[k][l] * u[k][l] * (-beta * energies[k]).exp())
                    .sum::<f64>()
        })
        .sum();
    Oracle {
        g_tpm,
        g_epm: a * b(&out),
        g_diag: a * b(&deph),
    }
}

#[test]
fn sweep_matches_scalar_oracle() {
    let cfg = TwoQubitConfig::default();
    let (beta, theta0) = cfg.resolve().unwrap();
    for row in two_qubit_sweep(&cfg).unwrap() {
        let o = oracle(row.theta, beta, theta0);
        assert!((row.g_tpm - o.g_tpm).abs() < 1e-12);
        assert!((row.g_epm - o.g_epm).abs() < 1e-12);
        assert!((row.g_epm_diag - o.g_diag).abs() < 1e-12);
        assert!((row.g_epm_coh - (o.g_epm - o.g_diag)).abs() < 1e-12);
    }
}

#[test]
fn sweep_matches_closed_form_and_tpm_is_unity() {
    let cfg = TwoQubitConfig::default();
    let (beta, _) = cfg.resolve().unwrap();
    let rows = two_qubit_sweep(&cfg).unwrap();
    assert_eq!(rows.len(), 21);
    for row in rows {
        let c = closed_form_at_gate(row.theta, beta, 1.0);
        assert!((row.g_tpm - 1.0).abs() < 1e-9);
        assert!((row.g_epm - c.g_epm).abs() < 1e-9);
        assert!((row.g_epm_diag - c.g_epm_diag).abs() < 1e-9);
        assert!((row.g_epm_coh - c.g_epm_coh).abs() < 1e-9);
    }
}

#[test]
fn spot_value_at_zero_angle() {
    let c = closed_form_at_gate(0.0, 0.443, 1.0);
    assert!((c.g_epm - 1.37632).abs() < 1e-4);
    let cfg = TwoQubitConfig {
        beta: Some(0.443),
        theta0: None,
        ..Default::default()
    };
    let row = &two_qubit_sweep(&cfg).unwrap()[0];
    assert!((row.g_epm - 1.37632).abs() < 1e-4);
}

#[test]
fn closed_form_is_periodic_in_the_gate_angle() {
    for k in 0..8 {
        let t = 0.37 * k as f64;
        let a = closed_form_at_gate(t, 0.5, 1.0);
        let b = closed_form_at_gate(t + 2.0 * std::f64::consts::PI, 0.5, 1.0);
        assert!((a.g_epm - b.g_epm).abs() < 1e-12);
        assert!((a.g_epm_coh - b.g_epm_coh).abs() < 1e-12);
    }
}

#[test]
fn literal_form_vanishing_coherence_at_quarter_pi() {
    let c = closed_form_characteristics(std::f64::consts::FRAC_PI_4, 0.443, 1.0);
    assert!(c.g_epm_coh.abs() < 1e-15);
}

#[test]
fn inverse_temperature_and_angle_are_inverse_maps() {
    for &t in &[0.5, 1.0, 2.0, 2.5] {
        let b = beta_from_theta0(t, 1.0);
        assert!((theta0_from_beta(b, 1.0) - t).abs() < 1e-12);
        assert!(((b * 1.0).cosh().recip() - t.sin()).abs() < 1e-12);
    }
}

#[test]
fn inconsistent_pair_is_rejected() {
    let cfg = TwoQubitConfig {
        beta: Some(2.0),
        theta0: Some(2.0),
        ..Default::default()
    };
    assert!(cfg.resolve().is_err());
}

#[test]
fn shot_sweep_is_reproducible_and_close() {
    let cfg = TwoQubitConfig {
        shots: ShotMode::Shots(4096),
        seed: 7,
        ..Default::default()
    };
    let a = two_qubit_sweep(&cfg).unwrap();
    assert_eq!(a, two_qubit_sweep(&cfg).unwrap());
    for r in &a {
        let se = r.se.as_ref().unwrap();
        assert!(se.g_tpm >= 0.0);
        assert!((r.g_tpm - 1.0).abs() <= 6.0 * se.g_tpm);
    }
}

#[test]
fn gate_is_unitary() {
    let g = controlled_gate(0.7, 0.3, -1.1);
    let id = g.adjoint().matmul(&g);
    for i in 0..4 {
        for j in 0..4 {
            let expect = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
            assert!((id[(i, j)] - expect).norm() < 1e-14);
        }
    }
}
