//! Relativistic quantum clocks bound to a freely moving particle.
//!
//! A clock with internal energies ε_i rides on a particle whose mass becomes
//! m_i = m + ε_i/c². The crate evolves such states exactly on a momentum
//! grid and evaluates the spatial and temporal resolution limits that follow
//! from the coupling, together with their closed-form approximations.
//!
//! Everything is generic over the scalar type; `f64` aliases are provided at
//! the crate root.

// Negated comparisons reject NaN inputs on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod clock;
pub mod deriv;
pub mod dynamics;
pub mod error;
pub mod grid;
pub mod optimize;
pub mod params;
pub mod qsl;
pub mod relational;
pub mod sampler;
pub mod scalar;
pub mod spatial;
pub mod state;
pub mod tradeoff;

pub use clock::{ClockSpec, DiscreteClockSpec, IdealClockSpec, Level};
pub use dynamics::{
    compute_moments, compute_moments_with, evolve, reduce_clock, threshold_time,
    threshold_time_within, trace_distance, ClockReducedState, CoherenceTrajectory, Crossing,
    HamiltonianOrder, MomentReport,
};
pub use error::{Error, Result};
pub use grid::MomentumGrid;
pub use params::PhysicalParams;
pub use relational::{
    povm_normalization_audit, relational_minimum, relational_position_apply,
    relational_tradeoff_check, relational_variance, DilationSpectrum, PovmSpec,
    RelationalVarianceReport,
};
pub use sampler::{Family, QubitRecipe, StateSampler};
pub use scalar::Real;
pub use state::{
    make_contractive, make_gaussian_phase_space, make_ideal_clock_state,
    make_mus_configuration_space, ComFamily, CompositeState, Preparation, SystemSpec,
};

pub type Params = PhysicalParams<f64>;
pub type Grid = MomentumGrid<f64>;
pub type Clock = DiscreteClockSpec<f64>;
pub type IdealClock = IdealClockSpec<f64>;
pub type State = CompositeState<f64>;
pub type Moments = MomentReport<f64>;
pub type ReducedClock = ClockReducedState<f64>;

pub type State32 = CompositeState<f32>;
pub type Params32 = PhysicalParams<f32>;
