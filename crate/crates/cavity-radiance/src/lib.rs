//! Steady-state simulator for two driven three-level ladder atoms coupled to
//! a single damped cavity mode.
//!
//! The crate assembles the Lindblad master equation of the coupled system,
//! solves for its steady state with a sparse direct method, and extracts the
//! photon statistics that diagnose multiphoton blockade and collective
//! radiance: ⟨a†a⟩, g²(0), g³(0), and the two-atom radiance witness R.
//! Dressed-state manifolds of the undriven Hamiltonian explain where the
//! resonances sit; detuning sweeps with CSV output map them out.
//!
//! Start with the `examples/` directory: each major capability has a runnable
//! example, from dressed-state tables to full figure-style sweeps.

pub mod manifold;
pub mod model;
pub mod observables;
pub mod operator;
pub mod params;
pub mod space;
pub mod sparse;
pub mod steady;
pub mod sweep;

pub use manifold::{
    control_resonance_detuning, eigenstate_overlap, manifold_basis, manifold_eigen,
    ManifoldLabel, ManifoldSpectrum, TargetState,
};
pub use model::{
    assemble_liouvillian, collapse_channels, hamiltonian, hamiltonian_with_cavity_drive,
    liouvillian, liouvillian_with_cavity_drive, CollapseChannel, Liouvillian,
};
pub use observables::{
    classify_blockade, classify_radiance, detect_blockade_windows, g2_zero, g3_zero,
    mean_photon_number, photon_moments, radiance_ratio, radiance_witness, Blockade,
    BlockadeWindow, ObservableError, ObservableRecord, PhotonMoments, Regime,
    MEAN_N_FLOOR, RADIANCE_CLASS_TOL,
};
pub use operator::{DensityMatrix, DensityMatrixError, Operator, OperatorError, Slot};
pub use params::{ParamsError, SystemParams};
pub use space::{Level, SpaceDescriptor, SpaceError, ATOM_LEVELS};
pub use sparse::SparseMatrix;
pub use steady::{
    converge_ncut, converge_ncut_capped, evolve, steady_state, SolveError,
    SteadyStateSolution, NCUT_HARD_CAP, RESIDUAL_TOL,
};
pub use sweep::{
    compare_runs, emit_csv, parse_config, parse_with_overrides, preset, run_sweep,
    CompareReport, ConfigError, NcutPolicy, SweepAxis, SweepConfig, SweepError, SweepRange,
    SweepResult, PRESET_NAMES,
};
