//! Reduced contact Lagrangians and Hamiltonians for a rigid body with linear-in-z
//! damping and an optional advected potential:
//!
//! ```text
//! ℓ(ξ, z, α) = ½ ξᵀ𝕀ξ − k ⟨α, χ⟩ − γ z
//! h(μ, z, α) = ½ μᵀ𝕀⁻¹μ + k ⟨α, χ⟩ + γ z
//! ```
//!
//! where `k = m g l` is the potential strength. `γ > 0` is dissipative; negative
//! values are allowed.

use nalgebra::{Matrix3, Vector3};

use crate::algebra::{pairing, AlgebraVector, CoalgebraVector, GroupElement};
use crate::error::{Error, Result};
use crate::numdiff;

/// Largest `‖𝕀 − 𝕀ᵀ‖_max` accepted for the inertia tensor.
pub const INERTIA_SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Largest `|‖χ‖ − 1|` accepted when the potential is active.
pub const UNIT_TOLERANCE: f64 = 1e-12;

/// Immutable physical parameters of a (possibly heavy, possibly damped) rigid body.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    inertia: Matrix3<f64>,
    inertia_inv: Matrix3<f64>,
    gamma: f64,
    potential_strength: f64,
    chi: AlgebraVector,
    alpha0: CoalgebraVector,
    g0: GroupElement,
}

impl SystemSpec {
    /// Free or damped rigid body with no potential. `chi` defaults to `e₃`,
    /// `alpha0` to `e₃` and `g0` to the identity.
    pub fn new(inertia: Matrix3<f64>, gamma: f64) -> Result<Self> {
        if !inertia.iter().all(|c| c.is_finite()) {
            return Err(Error::NonFinite("inertia"));
        }
        if !gamma.is_finite() {
            return Err(Error::NonFinite("gamma"));
        }
        let asymmetry = (inertia - inertia.transpose()).amax();
        if asymmetry > INERTIA_SYMMETRY_TOLERANCE {
            return Err(Error::InertiaNotSymmetric(asymmetry));
        }
        let chol = inertia.cholesky().ok_or(Error::InertiaNotPositiveDefinite)?;
        let inertia_inv = chol.inverse();
        if !inertia_inv.iter().all(|c| c.is_finite()) {
            return Err(Error::InertiaNotPositiveDefinite);
        }
        Ok(Self {
            inertia,
            inertia_inv,
            gamma,
            potential_strength: 0.0,
            chi: AlgebraVector::basis(2),
            alpha0: CoalgebraVector::basis(2),
            g0: GroupElement::identity(),
        })
    }

    /// Diagonal inertia shortcut.
    pub fn diagonal(moments: [f64; 3], gamma: f64) -> Result<Self> {
        Self::new(Matrix3::from_diagonal(&Vector3::from(moments)), gamma)
    }

    /// Adds the potential `k ⟨α, χ⟩`; `chi` must be a unit vector when `k ≠ 0`.
    pub fn with_potential(mut self, strength: f64, chi: AlgebraVector) -> Result<Self> {
        if !strength.is_finite() {
            return Err(Error::NonFinite("potential strength"));
        }
        if !chi.is_finite() {
            return Err(Error::NonFinite("chi"));
        }
        if strength != 0.0 && (chi.norm() - 1.0).abs() > UNIT_TOLERANCE {
            return Err(Error::NonUnitChi(chi.norm()));
        }
        self.potential_strength = strength;
        self.chi = chi;
        Ok(self)
    }

    /// Sets the spatial reference vector `α₀` and the initial attitude `g₀`.
    pub fn with_reference(mut self, alpha0: CoalgebraVector, g0: GroupElement) -> Result<Self> {
        if !alpha0.is_finite() {
            return Err(Error::NonFinite("alpha0"));
        }
        self.alpha0 = alpha0;
        self.g0 = g0;
        Ok(self)
    }

    pub fn inertia(&self) -> &Matrix3<f64> {
        &self.inertia
    }

    pub fn inertia_inverse(&self) -> &Matrix3<f64> {
        &self.inertia_inv
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn potential_strength(&self) -> f64 {
        self.potential_strength
    }

    pub fn chi(&self) -> AlgebraVector {
        self.chi
    }

    pub fn alpha0(&self) -> CoalgebraVector {
        self.alpha0
    }

    pub fn g0(&self) -> GroupElement {
        self.g0
    }

    /// True when the Lagrangian is invariant under the full group.
    pub fn is_symmetric(&self) -> bool {
        self.potential_strength == 0.0
    }

    /// `𝕀ξ` as an element of the dual.
    pub fn lower(&self, xi: &AlgebraVector) -> CoalgebraVector {
        CoalgebraVector(self.inertia * xi.0)
    }

    /// `𝕀⁻¹μ` as an element of the algebra.
    pub fn raise(&self, mu: &CoalgebraVector) -> AlgebraVector {
        AlgebraVector(self.inertia_inv * mu.0)
    }

    fn potential(&self, alpha: &CoalgebraVector) -> f64 {
        if self.potential_strength == 0.0 {
            0.0
        } else {
            self.potential_strength * pairing(alpha, &self.chi)
        }
    }
}

/// Reduced velocity-side state `(ξ, z) ∈ so(3) × R`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ContactState {
    pub xi: AlgebraVector,
    pub z: f64,
}

impl ContactState {
    pub fn new(xi: AlgebraVector, z: f64) -> Self {
        Self { xi, z }
    }

    pub fn with_alpha(self, alpha: CoalgebraVector) -> ExtendedState<ContactState> {
        ExtendedState { base: self, alpha }
    }
}

/// Reduced momentum-side state `(μ, z) ∈ so(3)* × R`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CoContactState {
    pub mu: CoalgebraVector,
    pub z: f64,
}

impl CoContactState {
    pub fn new(mu: CoalgebraVector, z: f64) -> Self {
        Self { mu, z }
    }

    pub fn with_alpha(self, alpha: CoalgebraVector) -> ExtendedState<CoContactState> {
        ExtendedState { base: self, alpha }
    }
}

/// A reduced state augmented with the advected parameter `α ∈ so(3)*`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ExtendedState<B> {
    pub base: B,
    pub alpha: CoalgebraVector,
}

impl<B> ExtendedState<B> {
    pub fn new(base: B, alpha: CoalgebraVector) -> Self {
        Self { base, alpha }
    }

    pub fn map_base<C>(self, f: impl FnOnce(B) -> C) -> ExtendedState<C> {
        ExtendedState { base: f(self.base), alpha: self.alpha }
    }
}

/// Velocity-side extended state `(ξ, z, α)`.
pub type ExtendedVelocityState = ExtendedState<ContactState>;
/// Momentum-side extended state `(μ, z, α)`.
pub type ExtendedMomentumState = ExtendedState<CoContactState>;

// Symmetric systems ignore α, so a plain state lifts with α = 0.
impl From<ContactState> for ExtendedState<ContactState> {
    fn from(base: ContactState) -> Self {
        Self { base, alpha: CoalgebraVector::zeros() }
    }
}

impl From<CoContactState> for ExtendedState<CoContactState> {
    fn from(base: CoContactState) -> Self {
        Self { base, alpha: CoalgebraVector::zeros() }
    }
}

/// `ℓ(ξ, z, α) = ½ ξᵀ𝕀ξ − k ⟨α, χ⟩ − γ z`.
pub fn lagrangian(spec: &SystemSpec, s: &ExtendedVelocityState) -> f64 {
    let xi = &s.base.xi;
    0.5 * pairing(&spec.lower(xi), xi) - spec.potential(&s.alpha) - spec.gamma * s.base.z
}

/// `h(μ, z, α) = ½ μᵀ𝕀⁻¹μ + k ⟨α, χ⟩ + γ z`.
pub fn hamiltonian(spec: &SystemSpec, s: &ExtendedMomentumState) -> f64 {
    let mu = &s.base.mu;
    0.5 * pairing(mu, &spec.raise(mu)) + spec.potential(&s.alpha) + spec.gamma * s.base.z
}

/// `δℓ/δξ = 𝕀ξ`.
pub fn dl_dxi(spec: &SystemSpec, s: &ExtendedVelocityState) -> CoalgebraVector {
    spec.lower(&s.base.xi)
}

/// `∂ℓ/∂z = −γ`.
pub fn dl_dz(spec: &SystemSpec, _s: &ExtendedVelocityState) -> f64 {
    -spec.gamma
}

/// `δℓ/δα = −k χ`, an element of `X = so(3)`.
pub fn dl_dalpha(spec: &SystemSpec, _s: &ExtendedVelocityState) -> AlgebraVector {
    -spec.potential_strength * spec.chi
}

/// `δh/δμ = 𝕀⁻¹μ`.
pub fn dh_dmu(spec: &SystemSpec, s: &ExtendedMomentumState) -> AlgebraVector {
    spec.raise(&s.base.mu)
}

/// `∂h/∂z = γ`.
pub fn dh_dz(spec: &SystemSpec, _s: &ExtendedMomentumState) -> f64 {
    spec.gamma
}

/// `δh/δα = k χ`.
pub fn dh_dalpha(spec: &SystemSpec, _s: &ExtendedMomentumState) -> AlgebraVector {
    spec.potential_strength * spec.chi
}

/// Reduced Legendre transform `(ξ, z) ↦ (𝕀ξ, z)`.
pub fn legendre(spec: &SystemSpec, s: &ContactState) -> CoContactState {
    CoContactState { mu: spec.lower(&s.xi), z: s.z }
}

/// Inverse Legendre transform `(μ, z) ↦ (𝕀⁻¹μ, z)`.
pub fn inverse_legendre(spec: &SystemSpec, s: &CoContactState) -> ContactState {
    ContactState { xi: spec.raise(&s.mu), z: s.z }
}

/// Legendre transform of an extended state; `α` passes through.
pub fn legendre_ext(spec: &SystemSpec, s: &ExtendedVelocityState) -> ExtendedMomentumState {
    s.map_base(|b| legendre(spec, &b))
}

pub fn inverse_legendre_ext(spec: &SystemSpec, s: &ExtendedMomentumState) -> ExtendedVelocityState {
    s.map_base(|b| inverse_legendre(spec, &b))
}

/// Gradient of a scalar on an extended state, split into its three blocks.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StateGradient {
    /// Derivative along the first block (ξ or μ).
    pub first: Vector3<f64>,
    pub z: f64,
    pub alpha: Vector3<f64>,
}

impl StateGradient {
    fn from_slice(g: &[f64]) -> Self {
        Self {
            first: Vector3::new(g[0], g[1], g[2]),
            z: g[3],
            alpha: Vector3::new(g[4], g[5], g[6]),
        }
    }
}

fn flatten(first: &Vector3<f64>, z: f64, alpha: &Vector3<f64>) -> [f64; 7] {
    [first.x, first.y, first.z, z, alpha.x, alpha.y, alpha.z]
}

/// Central-difference gradient of [`lagrangian`]; only the scalar evaluator is used.
pub fn numerical_lagrangian_gradient(spec: &SystemSpec, s: &ExtendedVelocityState) -> StateGradient {
    let x = flatten(&s.base.xi.0, s.base.z, &s.alpha.0);
    let g = numdiff::central_gradient(
        |v| {
            let st = ContactState::new(AlgebraVector::new(v[0], v[1], v[2]), v[3])
                .with_alpha(CoalgebraVector::new(v[4], v[5], v[6]));
            lagrangian(spec, &st)
        },
        &x,
    );
    StateGradient::from_slice(&g)
}

/// Central-difference gradient of [`hamiltonian`].
pub fn numerical_hamiltonian_gradient(spec: &SystemSpec, s: &ExtendedMomentumState) -> StateGradient {
    let x = flatten(&s.base.mu.0, s.base.z, &s.alpha.0);
    let g = numdiff::central_gradient(
        |v| {
            let st = CoContactState::new(CoalgebraVector::new(v[0], v[1], v[2]), v[3])
                .with_alpha(CoalgebraVector::new(v[4], v[5], v[6]));
            hamiltonian(spec, &st)
        },
        &x,
    );
    StateGradient::from_slice(&g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag123(gamma: f64) -> SystemSpec {
        SystemSpec::diagonal([1.0, 2.0, 3.0], gamma).unwrap()
    }

    #[test]
    fn lagrangian_examples() {
        let spec = diag123(0.1);
        let s = ContactState::new(AlgebraVector::new(1.0, 1.0, 1.0), 0.0).into();
        assert_eq!(lagrangian(&spec, &s), 3.0);
        assert_eq!(lagrangian(&spec, &ContactState::default().into()), 0.0);

        let e3 = AlgebraVector::basis(2);
        let heavy = SystemSpec::diagonal([1.0; 3], 0.0).unwrap().with_potential(1.0, e3).unwrap();
        let s = ContactState::default().with_alpha(CoalgebraVector::basis(2));
        assert_eq!(lagrangian(&heavy, &s), -1.0);
    }

    #[test]
    fn hamiltonian_examples() {
        let spec = diag123(0.1);
        let s = CoContactState::new(CoalgebraVector::new(1.0, 2.0, 3.0), 1.0).into();
        assert!((hamiltonian(&spec, &s) - 3.1).abs() < 1e-15);
        assert_eq!(hamiltonian(&spec, &CoContactState::default().into()), 0.0);
    }

    #[test]
    fn derivative_examples() {
        let spec = diag123(0.1);
        let s: ExtendedVelocityState = ContactState::new(AlgebraVector::new(1.0, 1.0, 1.0), 0.0).into();
        assert_eq!(dl_dxi(&spec, &s), CoalgebraVector::new(1.0, 2.0, 3.0));
        assert_eq!(dl_dz(&spec, &s), -0.1);
        assert_eq!(dh_dmu(&spec, &CoContactState::default().into()), AlgebraVector::zeros());
        assert_eq!(dh_dz(&spec, &CoContactState::default().into()), 0.1);
    }

    #[test]
    fn legendre_examples() {
        let spec = diag123(0.1);
        let s = ContactState::new(AlgebraVector::new(1.0, 1.0, 1.0), 5.0);
        assert_eq!(legendre(&spec, &s), CoContactState::new(CoalgebraVector::new(1.0, 2.0, 3.0), 5.0));
        let zero = legendre(&spec, &ContactState::new(AlgebraVector::zeros(), 2.5));
        assert_eq!(zero, CoContactState::new(CoalgebraVector::zeros(), 2.5));

        let back = inverse_legendre(&spec, &CoContactState::new(CoalgebraVector::new(1.0, 2.0, 3.0), 0.0));
        assert!((back.xi - AlgebraVector::new(1.0, 1.0, 1.0)).norm() < 1e-15);
        assert_eq!(inverse_legendre(&spec, &CoContactState::default()).xi, AlgebraVector::zeros());
    }

    #[test]
    fn alpha_passes_through_legendre() {
        let spec = diag123(0.0);
        let alpha = CoalgebraVector::new(0.1, 0.2, 0.3);
        let s = ContactState::new(AlgebraVector::new(1.0, -1.0, 0.5), 1.0).with_alpha(alpha);
        let m = legendre_ext(&spec, &s);
        assert_eq!(m.alpha, alpha);
        assert_eq!(inverse_legendre_ext(&spec, &m).alpha, alpha);
    }

    #[test]
    fn spec_validation() {
        assert!(matches!(
            SystemSpec::diagonal([1.0, -2.0, 3.0], 0.1),
            Err(Error::InertiaNotPositiveDefinite)
        ));
        assert!(SystemSpec::diagonal([1.0, 0.0, 3.0], 0.1).is_err());
        let skewed = Matrix3::new(1.0, 0.1, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0);
        assert!(matches!(SystemSpec::new(skewed, 0.0), Err(Error::InertiaNotSymmetric(_))));
        assert!(SystemSpec::diagonal([1.0, 2.0, f64::NAN], 0.1).is_err());

        let spec = diag123(0.0);
        assert!(matches!(
            spec.clone().with_potential(1.0, AlgebraVector::new(0.0, 0.0, 2.0)),
            Err(Error::NonUnitChi(_))
        ));
        // a non-unit chi is harmless without a potential
        assert!(spec.with_potential(0.0, AlgebraVector::new(0.0, 0.0, 2.0)).is_ok());
    }

    #[test]
    fn full_inertia_inverse() {
        let i = Matrix3::new(2.0, 0.3, 0.1, 0.3, 3.0, -0.2, 0.1, -0.2, 4.0);
        let spec = SystemSpec::new(i, 0.0).unwrap();
        assert!((spec.inertia() * spec.inertia_inverse() - Matrix3::identity()).norm() < 1e-14);
    }

    #[test]
    fn numerical_gradient_agrees_on_heavy_top() {
        let chi = AlgebraVector::new(0.0, 0.6, 0.8);
        let spec = diag123(0.3).with_potential(2.0, chi).unwrap();
        let s = ContactState::new(AlgebraVector::new(0.4, -1.3, 2.2), -0.7)
            .with_alpha(CoalgebraVector::new(0.3, 0.1, -0.9));
        let num = numerical_lagrangian_gradient(&spec, &s);
        assert!((num.first - dl_dxi(&spec, &s).0).norm() < 1e-8);
        assert!((num.z - dl_dz(&spec, &s)).abs() < 1e-8);
        assert!((num.alpha - dl_dalpha(&spec, &s).0).norm() < 1e-8);
    }
}
