//! Dissipative rigid-body mechanics on `SO(3)` in the contact (Herglotz) setting.
//!
//! - [`algebra`]: `so(3)`, its dual and the rotation group.
//! - [`models`]: the damped, possibly heavy, rigid body and its reduced Legendre transform.
//! - [`dynamics`]: reduced and unreduced vector fields, RK4 and Lie-group integrators.
//! - [`jacobi`]: the Lie-Poisson-Jacobi bracket, its semidirect extension and property checks.
//! - [`scenarios`]: named parameter sets and closed-form references.
//! - [`verify`]: the self-check suites behind `herglotz verify`.

pub mod algebra;
pub mod dynamics;
pub mod error;
pub mod jacobi;
pub mod models;
pub mod numdiff;
pub mod scenarios;
pub mod verify;

pub use nalgebra;

pub use algebra::{
    ad, coad, coadjoint_group_action, exp_map, hat, pairing, vee, AlgebraMatrix, AlgebraVector, CoalgebraVector,
    GroupElement,
};
pub use dynamics::{FullState, LieMethod, Method, Trajectory};
pub use error::{Error, Result};
pub use jacobi::{BracketKind, BracketPoint, Observable};
pub use models::{CoContactState, ContactState, ExtendedMomentumState, ExtendedState, ExtendedVelocityState, SystemSpec};
pub use scenarios::{Scenario, ScenarioParams};
