use fluctua_core::channels::{check_cptp, choi_matrix, QuantumChannel};
use fluctua_core::protocols::*;
use fluctua_core::qcore::*;
use fluctua_core::sampling::*;
use proptest::prelude::*;

struct Instance {
    rho: DensityOperator,
    channel: QuantumChannel,
    spec_i: SpectralDecomposition,
    spec_f: SpectralDecomposition,
}

fn instance(d: usize, seed: u64, unitary: bool) -> Instance {
    let mut g = SeededGenerator::new(seed);
    let rho = random_density(d, d, &mut g).unwrap();
    let channel = if unitary {
        QuantumChannel::unitary(random_unitary(d, &mut g)).unwrap()
    } else {
        random_channel(d, 3, &mut g).unwrap()
    };
    let spec_i = SpectralDecomposition::new(&random_hermitian(d, &mut g)).unwrap();
    let spec_f = SpectralDecomposition::new(&random_hermitian(d, &mut g)).unwrap();
    Instance {
        rho,
        channel,
        spec_i,
        spec_f,
    }
}

fn joints(x: &Instance) -> Vec<JointEnergyDistribution> {
    Protocol::ALL
        .iter()
        .map(|p| joint(*p, &x.rho, &x.channel, &x.spec_i, &x.spec_f).unwrap())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_density_is_a_state(d in 1usize..6, seed in any::<u64>()) {
        let mut g = SeededGenerator::new(seed);
        let rank = 1 + g.index(d);
        let rho = random_density(d, rank, &mut g).unwrap();
        prop_assert!(rho.matrix().hermiticity_deviation() < 1e-12);
        prop_assert!((rho.matrix().trace().re - 1.0).abs() < 1e-12);
        prop_assert!(hermitian_eig(rho.matrix()).unwrap().values[0] > -1e-12);
    }

    #[test]
    fn random_unitary_is_unitary(d in 1usize..6, seed in any::<u64>()) {
        let u = random_unitary(d, &mut SeededGenerator::new(seed));
        prop_assert!(u.adjoint().matmul(&u).max_abs_diff(&ComplexMatrix::identity(d)) < 1e-12);
    }

    #[test]
    fn random_channel_is_cptp(d in 1usize..5, k in 1usize..5, seed in any::<u64>()) {
        let ch = random_channel(d, k, &mut SeededGenerator::new(seed)).unwrap();
        let s = ch.superoperator_matrix().unwrap();
        prop_assert!(check_cptp(&s, 1e-10).unwrap().is_cptp());
        prop_assert!(choi_matrix(&s).hermiticity_deviation() < 1e-12);
    }

    #[test]
    fn eigendecomposition_reconstructs(d in 1usize..7, seed in any::<u64>()) {
        let h = random_hermitian(d, &mut SeededGenerator::new(seed));
        let e = hermitian_eig(&h).unwrap();
        prop_assert!(e.reconstruct().max_abs_diff(&h) < 1e-11);
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        let sd = SpectralDecomposition::new(&h).unwrap();
        prop_assert!(sd.reconstruct().max_abs_diff(&h) < 1e-11);
    }

    #[test]
    fn joints_are_normalised_and_nonnegative(d in 2usize..5, seed in any::<u64>(), unitary in any::<bool>()) {
        let x = instance(d, seed, unitary);
        for j in joints(&x) {
            prop_assert!((j.total() - 1.0).abs() < 1e-12);
            prop_assert!(j.probs().iter().flatten().all(|p| *p >= 0.0));
        }
    }

    #[test]
    fn initial_marginals_agree_between_epm_and_tpm(d in 2usize..5, seed in any::<u64>()) {
        let x = instance(d, seed, false);
        let j = joints(&x);
        let p = initial_probabilities(&x.rho, &x.spec_i).unwrap();
        for (a, b) in j[0].initial_marginal().iter().zip(&p) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        for (a, b) in j[1].initial_marginal().iter().zip(&p) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn characteristic_functions_are_normalised_and_match_joints(d in 2usize..5, seed in any::<u64>(), u in -3.0f64..3.0) {
        let x = instance(d, seed, false);
        for (p, j) in Protocol::ALL.iter().zip(joints(&x)) {
            let g0 = characteristic_function(&x.rho, &x.channel, &x.spec_i, &x.spec_f, C64::new(0.0, 0.0), *p).unwrap();
            prop_assert!((g0 - C64::new(1.0, 0.0)).norm() < 1e-12);
            let g = characteristic_function(&x.rho, &x.channel, &x.spec_i, &x.spec_f, C64::new(u, 0.0), *p).unwrap();
            let from_joint = delta_distribution(&j, None).characteristic(C64::new(u, 0.0));
            prop_assert!((g - from_joint).norm() < 1e-10);
        }
    }

    #[test]
    fn dephasing_is_idempotent_and_trace_preserving(d in 1usize..5, seed in any::<u64>()) {
        let mut g = SeededGenerator::new(seed);
        let rho = random_density(d, d, &mut g).unwrap();
        let spec = SpectralDecomposition::new(&random_hermitian(d, &mut g)).unwrap();
        let once = dephase_sectors(&rho, &spec).unwrap();
        let twice = dephase_sectors(&once, &spec).unwrap();
        prop_assert!(once.matrix().max_abs_diff(twice.matrix()) < 1e-12);
        prop_assert!((once.matrix().trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tv_distance_is_a_metric_on_delta(d in 2usize..5, seed in any::<u64>()) {
        let x = instance(d, seed, false);
        let ds: Vec<_> = joints(&x).iter().map(|j| delta_distribution(j, None)).collect();
        for a in &ds {
            prop_assert!(tv_distance_delta(a, a) < 1e-15);
            for b in &ds {
                let ab = tv_distance_delta(a, b);
                prop_assert!((ab - tv_distance_delta(b, a)).abs() < 1e-14);
                prop_assert!((-1e-15..=1.0 + 1e-12).contains(&ab));
                for c in &ds {
                    prop_assert!(ab <= tv_distance_delta(a, c) + tv_distance_delta(c, b) + 1e-12);
                }
            }
        }
    }

    #[test]
    fn shot_sampling_is_deterministic(seed in any::<u64>()) {
        let x = instance(3, seed, false);
        let a = sample_shots(&x.rho, &x.channel, &x.spec_i, &x.spec_f, Protocol::Tpm, 50, seed).unwrap();
        let b = sample_shots(&x.rho, &x.channel, &x.spec_i, &x.spec_f, Protocol::Tpm, 50, seed).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn random_coherence_keeps_state_valid(seed in any::<u64>(), scale in 0.0f64..1.0) {
        let mut g = SeededGenerator::new(seed);
        let p = random_density(3, 3, &mut g).unwrap().matrix().diagonal().iter().map(|z| z.re).collect::<Vec<_>>();
        let chi = random_coherence(&p, scale, &mut g).unwrap();
        let rho = &ComplexMatrix::from_real_diagonal(&p) + &chi;
        prop_assert!(DensityOperator::new(rho).is_ok());
        prop_assert!(chi.diagonal().iter().all(|z| z.norm() == 0.0));
    }
}
