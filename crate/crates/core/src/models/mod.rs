//! The two-qubit gate experiment and the driven three-level engine.

pub mod presets;
pub mod three_level;
pub mod two_qubit;

pub use presets::{run_preset, Preset, PresetOptions, PresetOutput, Table};
pub use three_level::{
    three_level_experiment, three_level_model, three_level_propagator, DriveForm, Measurement, Occupation,
    ThreeLevelConfig, ThreeLevelDynamics, ThreeLevelRow,
};
pub use two_qubit::{
    closed_form_at_gate, closed_form_characteristics, controlled_gate, two_qubit_hamiltonian, two_qubit_initial_state,
    two_qubit_sweep, ClosedForm, ShotMode, SweepRow, TwoQubitConfig,
};
