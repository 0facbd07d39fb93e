use super::distribution::delta_distribution;
use super::distribution::tv_distance_delta;
use super::joint::{epm_joint, JointEnergyDistribution};
use crate::channels::QuantumChannel;
use crate::error::{Error, Result};
use crate::qcore::{DensityOperator, SpectralDecomposition};

/// `p` below this counts as zero when testing absolute continuity.
pub const SUPPORT_TOL: f64 = 1e-14;

fn entropy_of(p: impl Iterator<Item = f64>) -> f64 {
    -p.filter(|x| *x > 0.0).map(|x| x * x.ln()).sum::<f64>()
}

/// `−Σ p ln p` over the joint's cells.
pub fn shannon_entropy(joint: &JointEnergyDistribution) -> f64 {
    entropy_of(joint.probs().iter().flatten().copied())
}

pub fn shannon_entropy_of(p: &[f64]) -> f64 {
    entropy_of(p.iter().copied())
}

/// `Σ p ln(p / q)`, the divergence of `p` from `q`.
pub fn mutual_information(p: &JointEnergyDistribution, q: &JointEnergyDistribution) -> Result<f64> {
    p.check_axes(q)?;
    let mut s = 0.0;
    for (l, (rp, rq)) in p.probs().iter().zip(q.probs()).enumerate() {
        for (k, (&a, &b)) in rp.iter().zip(rq).enumerate() {
            if a <= SUPPORT_TOL {
                if a > 0.0 && b > 0.0 {
                    s += a * (a / b).ln();
                }
                continue;
            }
            if b <= 0.0 {
                return Err(Error::SupportMismatch {
                    initial: l,
                    final_: k,
                    p: a,
                });
            }
            s += a * (a / b).ln();
        }
    }
    Ok(s)
}

/// Distance between the EPM statistics of `ζρ₁ + (1−ζ)ρ₂` and the same
/// mixture of the individual EPM statistics, measured on ΔE.
pub fn convexity_witness(
    rho1: &DensityOperator,
    rho2: &DensityOperator,
    zeta: f64,
    channel: &QuantumChannel,
    spec_i: &SpectralDecomposition,
    spec_f: &SpectralDecomposition,
) -> Result<f64> {
    let mixed = rho1.mix(zeta, rho2)?;
    let of_mixture = epm_joint(&mixed, channel, spec_i, spec_f)?;
    let mixture_of = epm_joint(rho1, channel, spec_i, spec_f)?.mix(zeta, &epm_joint(rho2, channel, spec_i, spec_f)?)?;
    Ok(tv_distance_delta(
        &delta_distribution(&of_mixture, None),
        &delta_distribution(&mixture_of, None),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::Protocol;
    use crate::qcore::{ComplexMatrix, C64};

    fn uniform(n: usize, m: usize) -> JointEnergyDistribution {
        let e: Vec<f64> = (0..n).map(|x| x as f64).collect();
        let f: Vec<f64> = (0..m).map(|x| x as f64).collect();
        JointEnergyDistribution::new(e, f, vec![vec![1.0 / (n * m) as f64; m]; n], Protocol::Epm).unwrap()
    }

    #[test]
    fn entropy_values() {
        assert!((shannon_entropy(&uniform(2, 2)) - 4f64.ln()).abs() < 1e-15);
        assert_eq!(shannon_entropy(&uniform(1, 1)), 0.0);
    }

    #[test]
    fn divergence_basics() {
        let u = uniform(2, 2);
        assert_eq!(mutual_information(&u, &u).unwrap(), 0.0);
        let point = JointEnergyDistribution::new(
            vec![0.0, 1.0],
            vec![0.0, 1.0],
            vec![vec![1.0, 0.0], vec![0.0, 0.0]],
            Protocol::Epm,
        )
        .unwrap();
        assert!((mutual_information(&point, &u).unwrap() - 4f64.ln()).abs() < 1e-15);
        assert!(matches!(
            mutual_information(&u, &point),
            Err(Error::SupportMismatch { .. })
        ));
    }

    #[test]
    fn witness_trivial_cases() {
        let s = SpectralDecomposition::new(&ComplexMatrix::from_real_diagonal(&[1.0, -1.0])).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let had = QuantumChannel::unitary(ComplexMatrix::from_real_rows(&[&[h, h], &[h, -h]])).unwrap();
        let a = DensityOperator::from_pure(&[C64::new(1.0, 0.0), C64::new(0.5, 0.5)]).unwrap();
        let b = DensityOperator::from_probabilities(&[0.2, 0.8]).unwrap();
        for z in [0.0, 1.0] {
            assert!(convexity_witness(&a, &b, z, &had, &s, &s).unwrap() < 1e-15);
        }
        assert!(convexity_witness(&a, &a, 0.5, &had, &s, &s).unwrap() < 1e-15);
    }
}
