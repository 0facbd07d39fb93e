//! Joint energy statistics of the EPM, TPM and MLL schemes and derived
//! quantities.

mod characteristic;
mod distribution;
mod entropy;
mod joint;
mod shots;

pub use characteristic::{
    characteristic_function, characteristic_split, epm_second_moment_split, gibbs_state, jarzynski, mean_energy_change,
    CharacteristicSplit, JarzynskiReport, SecondMomentSplit, THERMAL_DIAGONAL_TOL,
};
pub use distribution::{
    default_merge_tol, delta_distribution, moment, tv_distance_delta, tv_distance_joint, EnergyChangeDistribution,
    DEFAULT_MERGE_FACTOR,
};
pub use entropy::{convexity_witness, mutual_information, shannon_entropy, shannon_entropy_of, SUPPORT_TOL};
pub use joint::{
    epm_joint, initial_probabilities, joint, mll_joint, tpm_conditionals, tpm_joint, tpm_recovery,
    JointEnergyDistribution, MllDecomposition, Protocol, CLAMP_TOL, MLL_EIGENVALUE_CUTOFF, NORMALIZATION_TOL,
};
pub use shots::{
    bootstrap_mean, epm_split_shots, estimate_exponential, estimate_moment, sample_shot_outcomes, sample_shots,
    EpmSplitEstimate, Estimate, ShotOutcomes, BOOTSTRAP_RESAMPLES,
};
