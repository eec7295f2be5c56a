//! Discrete-time quantum walks whose coin depends on a finite memory of past
//! coin values.
//!
//! A walker carries `N` coin registers. Each step the coin acts on the most
//! recent register with a matrix that may depend on the earlier ones, the
//! walker moves, and the registers cycle. Setting `N` and the memory function
//! interpolates between a memoryless walk and a walk that remembers its whole
//! path.
//!
//! ```
//! use memwalk::{evolve, position_distribution, CoinSpec, WalkSpec64};
//!
//! let spec = WalkSpec64::new(3, 6, CoinSpec::balanced());
//! let out = evolve(&spec.input_state()?, &spec)?;
//! let p = position_distribution(&out);
//! assert!((p.total() - 1.0).abs() < 1e-12);
//! # Ok::<(), memwalk::WalkError>(())
//! ```
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the `*64` and
//! `*32` aliases fix the scalar.

pub mod analysis;
pub mod coin;
pub mod disorder;
pub mod error;
pub mod evolution;
pub mod measurement;
pub mod memory;
pub mod optics;
pub mod scalar;
pub mod state;

pub use analysis::{
    fidelity, linear_fit, mean_and_variance, polynomial_fit, quadratic_fit, spatial_entanglement,
    total_variation, variance_series, Distribution, LineDistribution, LinearFit, PlaneDistribution,
    PolynomialFit, QuadraticFit, VarianceSeries,
};
pub use coin::{balanced_coin, biased_coin, coin_2d, pauli_exp, Coin2d, CoinMatrix, Pauli};
pub use disorder::{make_field, run_ensemble, EnsembleResult, RandomField};
pub use error::{Result, WalkError};
pub use evolution::{
    apply_coin, apply_conditional_unitary, apply_memory_update, apply_step, evolve, evolve_reverse, step,
    step_reverse, Boundary, CoinFamily, CoinSpec, EvolutionMode, Trajectory, WalkSpec,
};
pub use measurement::{
    measure_all_branches, measure_memory, outcome_table, position_distribution, project_memory,
    MeasurementOutcome, MixedEnsemble, PositionMarginal,
};
pub use memory::{history_sum, memory_angle, MemoryFunction};
pub use optics::{
    compile_layers, enumerate_modes, verify_circuit, CircuitDescription, Layer, ModeIndex, ModeMap,
    VerificationReport,
};
pub use scalar::Real;
pub use state::{
    make_product_input, make_symmetrized_input, BasisState, CoinValue, Dims, InputKind, InputSpec, Memory,
    Sign, Site, StateVector,
};

pub type StateVector64 = StateVector<f64>;
pub type StateVector32 = StateVector<f32>;
pub type WalkSpec64 = WalkSpec<f64>;
pub type WalkSpec32 = WalkSpec<f32>;
pub type CoinMatrix64 = CoinMatrix<f64>;
pub type CoinMatrix32 = CoinMatrix<f32>;
pub type Distribution64 = Distribution<f64>;
pub type Distribution32 = Distribution<f32>;
pub type CircuitDescription64 = CircuitDescription<f64>;
