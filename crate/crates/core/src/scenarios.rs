//! Named parameter sets for the damped rigid body and the heavy top, plus the
//! closed-form decay laws they are checked against.

use nalgebra::Matrix3;

use crate::algebra::{coadjoint_group_action, exp_map, AlgebraVector, CoalgebraVector, GroupElement};
use crate::dynamics::FullState;
use crate::error::{Error, Result};
use crate::models::{self, CoContactState, ContactState, ExtendedMomentumState, ExtendedVelocityState, SystemSpec};

/// Builder a scenario is resolved with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// No potential; built by [`damped_rigid_body`].
    RigidBody,
    /// Gravity breaks the symmetry; built by [`heavy_top_dissipative`].
    HeavyTop,
}

/// Initial body velocity or momentum; exactly one is stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialMotion {
    Velocity(AlgebraVector),
    Momentum(CoalgebraVector),
}

/// Editable scenario parameters. Start from [`defaults`] and override fields.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioParams {
    pub name: String,
    pub family: Family,
    pub inertia: Matrix3<f64>,
    pub gamma: f64,
    /// `m g l`.
    pub mgl: f64,
    pub chi: AlgebraVector,
    pub alpha0: CoalgebraVector,
    pub initial: InitialMotion,
    pub z0: f64,
    pub g0: GroupElement,
}

/// A resolved scenario: validated spec and initial data.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub spec: SystemSpec,
    pub velocity: ContactState,
    /// Body-frame advected parameter `α(0) = g₀⁻¹ α₀`.
    pub alpha: CoalgebraVector,
    pub g0: GroupElement,
}

impl Scenario {
    pub fn momentum(&self) -> CoContactState {
        models::legendre(&self.spec, &self.velocity)
    }

    pub fn extended_velocity(&self) -> ExtendedVelocityState {
        self.velocity.with_alpha(self.alpha)
    }

    pub fn extended_momentum(&self) -> ExtendedMomentumState {
        self.momentum().with_alpha(self.alpha)
    }

    pub fn full_velocity(&self) -> FullState<ContactState> {
        FullState::new(self.g0, self.velocity)
    }

    pub fn full_momentum(&self) -> FullState<CoContactState> {
        FullState::new(self.g0, self.momentum())
    }
}

/// Registry entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScenarioInfo {
    pub name: &'static str,
    pub description: &'static str,
}

pub const SCENARIOS: [ScenarioInfo; 5] = [
    ScenarioInfo { name: "damped-rigid-body", description: "triaxial rigid body with isotropic linear damping" },
    ScenarioInfo { name: "free-rigid-body", description: "triaxial rigid body, no damping" },
    ScenarioInfo { name: "heavy-top", description: "Lagrange top under gravity, tilted start, no damping" },
    ScenarioInfo { name: "heavy-top-dissipative", description: "Lagrange top under gravity with damping" },
    ScenarioInfo { name: "sleeping-top", description: "upright spinning Lagrange top (relative equilibrium)" },
];

fn rigid_body(name: &str, gamma: f64) -> ScenarioParams {
    ScenarioParams {
        name: name.to_owned(),
        family: Family::RigidBody,
        inertia: Matrix3::from_diagonal(&nalgebra::Vector3::new(1.0, 2.0, 3.0)),
        gamma,
        mgl: 0.0,
        chi: AlgebraVector::basis(2),
        alpha0: CoalgebraVector::basis(2),
        initial: InitialMotion::Velocity(AlgebraVector::new(1.0, 1.0, 1.0)),
        z0: 0.0,
        g0: GroupElement::identity(),
    }
}

fn heavy_top(name: &str, gamma: f64) -> ScenarioParams {
    ScenarioParams {
        name: name.to_owned(),
        family: Family::HeavyTop,
        inertia: Matrix3::from_diagonal(&nalgebra::Vector3::new(1.0, 1.0, 3.0)),
        gamma,
        mgl: 1.0,
        chi: AlgebraVector::basis(2),
        alpha0: CoalgebraVector::basis(2),
        initial: InitialMotion::Velocity(AlgebraVector::new(0.5, 0.2, 3.0)),
        z0: 0.0,
        g0: exp_map(&AlgebraVector::new(0.3, 0.0, 0.0)),
    }
}

/// Default parameters of a registered scenario.
pub fn defaults(name: &str) -> Result<ScenarioParams> {
    match name {
        "damped-rigid-body" => Ok(rigid_body(name, 0.1)),
        "free-rigid-body" => Ok(rigid_body(name, 0.0)),
        "heavy-top" => Ok(heavy_top(name, 0.0)),
        "heavy-top-dissipative" => Ok(heavy_top(name, 0.2)),
        "sleeping-top" => Ok(ScenarioParams {
            initial: InitialMotion::Velocity(AlgebraVector::new(0.0, 0.0, 2.0)),
            g0: GroupElement::identity(),
            ..heavy_top(name, 0.0)
        }),
        _ => Err(Error::UnknownScenario(name.to_owned())),
    }
}

/// Resolves parameters with the builder of their family.
pub fn build(params: &ScenarioParams) -> Result<Scenario> {
    match params.family {
        Family::RigidBody => damped_rigid_body(params),
        Family::HeavyTop => heavy_top_dissipative(params),
    }
}

/// Looks up and resolves a registered scenario with its defaults.
pub fn scenario(name: &str) -> Result<Scenario> {
    build(&defaults(name)?)
}

fn invalid(params: &ScenarioParams, reason: impl Into<String>) -> Error {
    Error::InvalidScenario { scenario: params.name.clone(), reason: reason.into() }
}

fn initial_velocity(spec: &SystemSpec, params: &ScenarioParams) -> Result<ContactState> {
    let s = match params.initial {
        InitialMotion::Velocity(xi) => ContactState::new(xi, params.z0),
        InitialMotion::Momentum(mu) => models::inverse_legendre(spec, &CoContactState::new(mu, params.z0)),
    };
    if s.xi.is_finite() && s.z.is_finite() {
        Ok(s)
    } else {
        Err(Error::NonFinite("initial state"))
    }
}

/// Damped rigid body `𝕀ξ̇ = 𝕀ξ × ξ − γ 𝕀ξ`. Rejects a nonzero potential.
pub fn damped_rigid_body(params: &ScenarioParams) -> Result<Scenario> {
    if params.mgl != 0.0 {
        return Err(invalid(params, format!("mgl must be 0 for a rigid body, got {}", params.mgl)));
    }
    let spec = SystemSpec::new(params.inertia, params.gamma)?;
    let velocity = initial_velocity(&spec, params)?;
    Ok(Scenario {
        name: params.name.clone(),
        velocity,
        alpha: CoalgebraVector::zeros(),
        g0: params.g0,
        spec,
    })
}

/// Heavy top with damping. `χ` must be a unit vector; the initial advected
/// parameter is `g₀⁻¹ α₀`.
pub fn heavy_top_dissipative(params: &ScenarioParams) -> Result<Scenario> {
    let chi_norm = params.chi.norm();
    if (chi_norm - 1.0).abs() > models::UNIT_TOLERANCE {
        return Err(Error::NonUnitChi(chi_norm));
    }
    let spec = SystemSpec::new(params.inertia, params.gamma)?
        .with_potential(params.mgl, params.chi)?
        .with_reference(params.alpha0, params.g0)?;
    let velocity = initial_velocity(&spec, params)?;
    Ok(Scenario {
        name: params.name.clone(),
        velocity,
        alpha: coadjoint_group_action(&params.g0.inverse(), &params.alpha0),
        g0: params.g0,
        spec,
    })
}

/// `h₀ e^{−γt}`.
pub fn analytic_hamiltonian_decay(h0: f64, gamma: f64, t: f64) -> f64 {
    h0 * (-gamma * t).exp()
}

/// `‖μ₀‖ e^{−γt}`.
pub fn analytic_casimir_decay(mu0_norm: f64, gamma: f64, t: f64) -> f64 {
    mu0_norm * (-gamma * t).exp()
}
