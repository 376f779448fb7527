//! Energy-preserving integrators for charged-particle dynamics
//! `ẍ = ẋ × B(x) + F(x)`, with a Boris baseline, conservation diagnostics
//! and a harness for convergence and long-time experiments.

pub mod diagnostics;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod integrators;
pub mod model;
pub mod output;
pub mod quadrature;

pub use diagnostics::{
    drift_series, energy, global_error, invariance_check, max_drift, momentum, reference_oracle, Quantity,
    Sample, TrajectoryRecord,
};
pub use error::{Error, Result};
pub use geometry::{btilde_apply, ParticleState, RotationGenerator, SkewMatrix3, Vec3};
pub use integrators::{
    boris_step, ep_step, fixed_point_solve, integrate, IntegrationError, MethodKind, MethodSpec, SolverParams,
    StepResult, Stepper,
};
pub use model::{builtin_model, consistency_check, FieldModel, FnModel, Ridge};
pub use quadrature::{average_force_quadrature, exact_linear_integral, gauss_legendre_rule, QuadratureRule};
