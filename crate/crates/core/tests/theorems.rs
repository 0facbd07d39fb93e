use fluctua_core::channels::QuantumChannel;
use fluctua_core::protocols::*;
use fluctua_core::qcore::*;
use fluctua_core::sampling::*;
use proptest::prelude::*;

fn channel(d: usize, unitary: bool, g: &mut SeededGenerator) -> QuantumChannel {
    if unitary {
        QuantumChannel::unitary(random_unitary(d, g)).unwrap()
    } else {
        random_channel(d, 1 + g.index(d * d), g).unwrap()
    }
}

fn spec(d: usize, g: &mut SeededGenerator) -> SpectralDecomposition {
    SpectralDecomposition::new(&random_hermitian(d, g)).unwrap()
}

fn tv(
    p: Protocol,
    q: Protocol,
    rho: &DensityOperator,
    ch: &QuantumChannel,
    si: &SpectralDecomposition,
    sf: &SpectralDecomposition,
) -> f64 {
    tv_distance_joint(&joint(p, rho, ch, si, sf).unwrap(), &joint(q, rho, ch, si, sf).unwrap()).unwrap()
}

/// State diagonal in `basis` with random weights.
fn diagonal_state(basis: &ComplexMatrix, g: &mut SeededGenerator) -> DensityOperator {
    let d = basis.dim();
    let w: Vec<f64> = (0..d).map(|_| g.uniform() + 0.05).collect();
    let s: f64 = w.iter().sum();
    let diag = ComplexMatrix::from_real_diagonal(&w.iter().map(|x| x / s).collect::<Vec<_>>());
    DensityOperator::new(diag.conjugate_by(basis)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn pure_states_make_epm_and_mll_coincide(d in 2usize..5, seed in any::<u64>(), unitary in any::<bool>()) {
        let mut g = SeededGenerator::new(seed);
        let rho = DensityOperator::from_pure(&haar_random_pure(d, &mut g)).unwrap();
        let ch = channel(d, unitary, &mut g);
        let (si, sf) = (spec(d, &mut g), spec(d, &mut g));
        prop_assert!(tv(Protocol::Epm, Protocol::Mll, &rho, &ch, &si, &sf) < 1e-10);
    }

    #[test]
    fn energy_diagonal_states_make_mll_and_tpm_coincide(d in 2usize..5, seed in any::<u64>(), unitary in any::<bool>()) {
        let mut g = SeededGenerator::new(seed);
        let (si, sf) = (spec(d, &mut g), spec(d, &mut g));
        let rho = diagonal_state(&si.eigen().vectors, &mut g);
        let ch = channel(d, unitary, &mut g);
        prop_assert!(tv(Protocol::Mll, Protocol::Tpm, &rho, &ch, &si, &sf) < 1e-10);
    }

    #[test]
    fn eigenstates_make_all_protocols_coincide(d in 2usize..5, seed in any::<u64>(), unitary in any::<bool>()) {
        let mut g = SeededGenerator::new(seed);
        let (si, sf) = (spec(d, &mut g), spec(d, &mut g));
        let rho = DensityOperator::from_pure(&si.eigen().vector(g.index(d))).unwrap();
        let ch = channel(d, unitary, &mut g);
        prop_assert!(tv(Protocol::Epm, Protocol::Tpm, &rho, &ch, &si, &sf) < 1e-10);
        prop_assert!(tv(Protocol::Epm, Protocol::Mll, &rho, &ch, &si, &sf) < 1e-10);
    }

    #[test]
    fn first_moments_agree_with_energy_balance(d in 2usize..5, seed in any::<u64>()) {
        let mut g = SeededGenerator::new(seed);
        let rho = random_density(d, d, &mut g).unwrap();
        let ch = channel(d, false, &mut g);
        let (si, sf) = (spec(d, &mut g), spec(d, &mut g));
        // Independent route: Tr(H_f Φ[ρ]) − Tr(H_i ρ) from reconstructed operators.
        let out = ch.apply(&rho).unwrap();
        let expect = (sf.reconstruct().matmul(out.matrix()).trace() - si.reconstruct().matmul(rho.matrix()).trace()).re;
        for p in [Protocol::Epm, Protocol::Mll] {
            let m = delta_distribution(&joint(p, &rho, &ch, &si, &sf).unwrap(), None).mean();
            prop_assert!((m - expect).abs() < 1e-9);
        }
    }

    #[test]
    fn second_moment_split_reconstructs(d in 2usize..5, seed in any::<u64>()) {
        let mut g = SeededGenerator::new(seed);
        let rho = random_density(d, d, &mut g).unwrap();
        let ch = channel(d, false, &mut g);
        let (si, sf) = (spec(d, &mut g), spec(d, &mut g));
        let split = epm_second_moment_split(&rho, &ch, &si, &sf, &Dephasing::EnergySectors).unwrap();
        let m2 = delta_distribution(&epm_joint(&rho, &ch, &si, &sf).unwrap(), None).moment(2);
        prop_assert!((split.population_part + split.coherence_part - m2).abs() < 1e-9);
        let p = dephase_sectors(&rho, &si).unwrap();
        let split_p = epm_second_moment_split(&p, &ch, &si, &sf, &Dephasing::EnergySectors).unwrap();
        prop_assert!(split_p.coherence_part.abs() < 1e-10);
    }

    #[test]
    fn incoherent_epm_is_the_product_of_tpm_marginals(seed in any::<u64>()) {
        let mut g = SeededGenerator::new(seed);
        let (si, sf) = (spec(3, &mut g), spec(3, &mut g));
        let rho = dephase_sectors(&random_density(3, 3, &mut g).unwrap(), &si).unwrap();
        let ch = channel(3, false, &mut g);
        let epm = epm_joint(&rho, &ch, &si, &sf).unwrap();
        let tpm = tpm_joint(&rho, &ch, &si, &sf).unwrap();
        let prod = JointEnergyDistribution::product(&si, &tpm.initial_marginal(), &sf, &tpm.final_marginal(), Protocol::Epm).unwrap();
        prop_assert!(tv_distance_joint(&epm, &prod).unwrap() < 1e-10);
        prop_assert!(shannon_entropy(&tpm) <= shannon_entropy(&epm) + 1e-12);
    }

    #[test]
    fn mll_entropy_is_bounded_by_epm(seed in any::<u64>(), pure in any::<bool>()) {
        let mut g = SeededGenerator::new(seed);
        let rho = random_density(3, if pure { 1 } else { 3 }, &mut g).unwrap();
        let (si, sf) = (spec(3, &mut g), spec(3, &mut g));
        let ch = channel(3, false, &mut g);
        let mll = mll_joint(&rho, &ch, &si, &sf).unwrap();
        let epm = epm_joint(&rho, &ch, &si, &sf).unwrap();
        prop_assert!(shannon_entropy(&mll) <= shannon_entropy(&epm) + 1e-12);
        let i = mutual_information(&mll, &epm).unwrap();
        prop_assert!(i >= -1e-12);
        if pure {
            prop_assert!(i.abs() < 1e-10);
        } else {
            prop_assert!(i > 1e-10);
        }
    }

    #[test]
    fn tpm_is_recovered_from_epm_runs(d in 2usize..5, seed in any::<u64>()) {
        let mut g = SeededGenerator::new(seed);
        let rho = random_density(d, d, &mut g).unwrap();
        let ch = channel(d, false, &mut g);
        let (si, sf) = (spec(d, &mut g), spec(d, &mut g));
        let rec = tpm_recovery(&rho, &ch, &si, &sf).unwrap();
        prop_assert!(tv_distance_joint(&rec, &tpm_joint(&rho, &ch, &si, &sf).unwrap()).unwrap() < 1e-12);
    }
}

#[test]
fn coherent_state_separates_epm_from_tpm() {
    let sz = SpectralDecomposition::new(&ComplexMatrix::from_real_diagonal(&[1.0, -1.0])).unwrap();
    let plus = DensityOperator::from_pure(&[C64::new(1.0, 0.0), C64::new(1.0, 0.0)]).unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let hadamard = ComplexMatrix::from_real_rows(&[&[h, h], &[h, -h]]);
    let ch = QuantumChannel::unitary(hadamard).unwrap();
    // TPM: uniform over all four cells. EPM: initial uniform, final |0⟩ with certainty.
    assert!((tv(Protocol::Epm, Protocol::Tpm, &plus, &ch, &sz, &sz) - 0.5).abs() < 1e-12);
}

#[test]
fn convexity_gap_exists_for_a_qubit_pair() {
    let sz = SpectralDecomposition::new(&ComplexMatrix::from_real_diagonal(&[1.0, -1.0])).unwrap();
    let mut g = SeededGenerator::new(5);
    let best = (0..100)
        .map(|_| {
            let r1 = random_density(2, 2, &mut g).unwrap();
            let r2 = random_density(2, 2, &mut g).unwrap();
            let ch = QuantumChannel::unitary(random_unitary(2, &mut g)).unwrap();
            convexity_witness(&r1, &r2, g.uniform(), &ch, &sz, &sz).unwrap()
        })
        .fold(0.0, f64::max);
    assert!(best > 1e-6, "{best}");
}
