//! SO(3) kernel: the Lie algebra so(3) and its dual identified with R^3,
//! hat/vee isomorphisms, (co)adjoint operators, the exponential map and the
//! coadjoint group action.
//!
//! Conventions: `hat(v) w = v × w`, `[ξ, η] = ξ × η`, `ad*_ξ μ = μ × ξ`, and the
//! pairing is the Euclidean dot product.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

/// Tolerance on `‖RᵀR − I‖_F` and `|det R − 1|` accepted by [`GroupElement::new`].
pub const ROTATION_TOLERANCE: f64 = 1e-9;

/// Largest asymmetry `‖A + Aᵀ‖_max` accepted by [`vee`].
pub const SKEW_TOLERANCE: f64 = 1e-12;

/// Below this angle the exponential map switches to its Taylor expansion.
pub const SMALL_ANGLE: f64 = 1e-6;

macro_rules! vector_newtype {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Default)]
        pub struct $name(pub Vector3<f64>);

        impl $name {
            pub const fn new(x1: f64, x2: f64, x3: f64) -> Self {
                Self(Vector3::new(x1, x2, x3))
            }

            pub fn zeros() -> Self {
                Self(Vector3::zeros())
            }

            /// The `i`-th standard basis vector (0-based).
            pub fn basis(i: usize) -> Self {
                let mut v = Vector3::zeros();
                v[i] = 1.0;
                Self(v)
            }

            pub fn from_array(a: [f64; 3]) -> Self {
                Self(Vector3::from(a))
            }

            pub fn to_array(self) -> [f64; 3] {
                [self.0.x, self.0.y, self.0.z]
            }

            pub fn norm(&self) -> f64 {
                self.0.norm()
            }

            pub fn is_finite(&self) -> bool {
                self.0.iter().all(|c| c.is_finite())
            }

            pub fn as_vector(&self) -> &Vector3<f64> {
                &self.0
            }
        }

        impl From<Vector3<f64>> for $name {
            fn from(v: Vector3<f64>) -> Self {
                Self(v)
            }
        }

        impl From<[f64; 3]> for $name {
            fn from(a: [f64; 3]) -> Self {
                Self::from_array(a)
            }
        }

        impl std::ops::Index<usize> for $name {
            type Output = f64;
            fn index(&self, i: usize) -> &f64 {
                &self.0[i]
            }
        }

        impl Add for $name {
            type Output = Self;
            fn add(self, rhs: Self) -> Self {
                Self(self.0 + rhs.0)
            }
        }

        impl AddAssign for $name {
            fn add_assign(&mut self, rhs: Self) {
                self.0 += rhs.0;
            }
        }

        impl Sub for $name {
            type Output = Self;
            fn sub(self, rhs: Self) -> Self {
                Self(self.0 - rhs.0)
            }
        }

        impl Neg for $name {
            type Output = Self;
            fn neg(self) -> Self {
                Self(-self.0)
            }
        }

        impl Mul<f64> for $name {
            type Output = Self;
            fn mul(self, k: f64) -> Self {
                Self(self.0 * k)
            }
        }

        impl Mul<$name> for f64 {
            type Output = $name;
            fn mul(self, v: $name) -> $name {
                $name(v.0 * self)
            }
        }
    };
}

vector_newtype!(
    /// Element of so(3) written in the basis `e₁, e₂, e₃` (`[e₁, e₂] = e₃`).
    AlgebraVector
);

vector_newtype!(
    /// Element of so(3)* in the dual basis, paired with [`AlgebraVector`] by the dot product.
    CoalgebraVector
);

/// Skew-symmetric 3×3 matrix, the image of [`hat`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgebraMatrix(Matrix3<f64>);

impl AlgebraMatrix {
    /// Wraps `a` after checking skew-symmetry to [`SKEW_TOLERANCE`].
    pub fn new(a: Matrix3<f64>) -> Result<Self> {
        if !a.iter().all(|c| c.is_finite()) {
            return Err(Error::NonFinite("algebra matrix"));
        }
        let asymmetry = (a + a.transpose()).amax();
        if asymmetry > SKEW_TOLERANCE {
            return Err(Error::NotSkewSymmetric { asymmetry });
        }
        Ok(Self(a))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }
}

/// Rotation matrix `R ∈ SO(3)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupElement(Matrix3<f64>);

impl GroupElement {
    /// Validates orthogonality and orientation to [`ROTATION_TOLERANCE`].
    pub fn new(r: Matrix3<f64>) -> Result<Self> {
        if !r.iter().all(|c| c.is_finite()) {
            return Err(Error::NonFinite("group element"));
        }
        let g = Self(r);
        let ortho = g.orthogonality_drift();
        let det = r.determinant();
        if ortho > ROTATION_TOLERANCE || (det - 1.0).abs() > ROTATION_TOLERANCE {
            return Err(Error::NotARotation { ortho, det });
        }
        Ok(g)
    }

    /// Builds from nine row-major entries.
    pub fn from_row_slice(rows: &[f64; 9]) -> Result<Self> {
        Self::new(Matrix3::from_row_slice(rows))
    }

    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    /// Row-major entries `r11, r12, …, r33`.
    pub fn to_row_major(&self) -> [f64; 9] {
        let m = &self.0;
        [
            m[(0, 0)], m[(0, 1)], m[(0, 2)],
            m[(1, 0)], m[(1, 1)], m[(1, 2)],
            m[(2, 0)], m[(2, 1)], m[(2, 2)],
        ]
    }

    pub fn inverse(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self(self.0 * other.0)
    }

    pub fn determinant(&self) -> f64 {
        self.0.determinant()
    }

    /// `‖RᵀR − I‖_F`.
    pub fn orthogonality_drift(&self) -> f64 {
        (self.0.transpose() * self.0 - Matrix3::identity()).norm()
    }

    /// Rotates a plain R^3 vector.
    pub fn apply(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.0 * v
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    // Products of exact rotations; skips revalidation inside integrator loops.
    pub(crate) fn from_matrix_unchecked(r: Matrix3<f64>) -> Self {
        Self(r)
    }
}

impl Mul for GroupElement {
    type Output = GroupElement;
    fn mul(self, rhs: GroupElement) -> GroupElement {
        self.compose(&rhs)
    }
}

/// `v ↦ v̂` with `v̂ w = v × w`.
pub fn hat(v: &AlgebraVector) -> AlgebraMatrix {
    let [x, y, z] = v.to_array();
    #[rustfmt::skip]
    let m = Matrix3::new(
        0.0, -z,  y,
         z, 0.0, -x,
        -y,  x, 0.0,
    );
    AlgebraMatrix(m)
}

/// Inverse of [`hat`]. Reads the strictly lower triangle, which for a validated
/// [`AlgebraMatrix`] is the negated upper triangle.
pub fn vee(a: &AlgebraMatrix) -> AlgebraVector {
    let m = &a.0;
    AlgebraVector::new(m[(2, 1)], m[(0, 2)], m[(1, 0)])
}

/// `ad_ξ η = [ξ, η] = ξ × η`.
pub fn ad(xi: &AlgebraVector, eta: &AlgebraVector) -> AlgebraVector {
    AlgebraVector(xi.0.cross(&eta.0))
}

/// `ad*_ξ μ = μ × ξ`, the dual of [`ad`] under [`pairing`].
pub fn coad(xi: &AlgebraVector, mu: &CoalgebraVector) -> CoalgebraVector {
    CoalgebraVector(mu.0.cross(&xi.0))
}

/// `⟨μ, ξ⟩ = Σ μᵢ ξᵢ`.
pub fn pairing(mu: &CoalgebraVector, xi: &AlgebraVector) -> f64 {
    mu.0.dot(&xi.0)
}

/// Rodrigues formula `exp(v̂) = I + A v̂ + B v̂²` with `A = sin θ/θ`,
/// `B = (1 − cos θ)/θ²`, `θ = ‖v‖`.
pub fn exp_map(v: &AlgebraVector) -> GroupElement {
    let theta2 = v.0.norm_squared();
    let theta = theta2.sqrt();
    let (a, b) = if theta < SMALL_ANGLE {
        (
            1.0 - theta2 / 6.0 + theta2 * theta2 / 120.0,
            0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0,
        )
    } else {
        (theta.sin() / theta, (1.0 - theta.cos()) / theta2)
    };
    let k = hat(v).0;
    GroupElement(Matrix3::identity() + k * a + k * k * b)
}

/// Coadjoint action under the R^3 identification: the rotation applied to the vector,
/// `α ↦ g α`. The advected parameter of a trajectory is
/// `coadjoint_group_action(&g.inverse(), α₀)`.
pub fn coadjoint_group_action(g: &GroupElement, alpha: &CoalgebraVector) -> CoalgebraVector {
    CoalgebraVector(g.0 * alpha.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    }

    #[test]
    fn hat_of_first_basis_vector() {
        let m = hat(&AlgebraVector::basis(0));
        let expected = Matrix3::new(0.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0);
        assert_eq!(*m.matrix(), expected);
    }

    #[test]
    fn hat_of_zero_is_zero() {
        assert_eq!(*hat(&AlgebraVector::zeros()).matrix(), Matrix3::zeros());
    }

    #[test]
    fn hat_table_matches_cross_products() {
        let v = AlgebraVector::new(1.0, 2.0, 3.0);
        let m = hat(&v);
        let expected = Matrix3::new(0.0, -3.0, 2.0, 3.0, 0.0, -1.0, -2.0, 1.0, 0.0);
        assert_eq!(*m.matrix(), expected);
        for i in 0..3 {
            let mut w = [0.0; 3];
            w[i] = 1.0;
            let got = m.matrix() * Vector3::from(w);
            assert_eq!(got, Vector3::from(cross([1.0, 2.0, 3.0], w)));
        }
    }

    #[test]
    fn vee_inverts_hat() {
        let v = AlgebraVector::new(1.0, 2.0, 3.0);
        assert_eq!(vee(&hat(&v)), v);
        assert_eq!(vee(&hat(&AlgebraVector::zeros())), AlgebraVector::zeros());
        let a = AlgebraMatrix::new(Matrix3::new(0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0)).unwrap();
        assert_eq!(vee(&a), AlgebraVector::new(0.0, 0.0, 1.0));
    }

    #[test]
    fn non_skew_matrix_rejected() {
        let err = AlgebraMatrix::new(Matrix3::new(0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0));
        assert!(matches!(err, Err(Error::NotSkewSymmetric { .. })));
        let err = AlgebraMatrix::new(Matrix3::identity() * 1e-11);
        assert!(err.is_err());
    }

    #[test]
    fn bracket_of_basis_elements() {
        let e = |i| AlgebraVector::basis(i);
        assert_eq!(ad(&e(0), &e(1)), e(2));
        assert_eq!(ad(&e(1), &e(2)), e(0));
        assert_eq!(ad(&e(2), &e(0)), e(1));
    }

    #[test]
    fn ad_examples() {
        let xi = AlgebraVector::new(1.0, 2.0, 3.0);
        assert_eq!(ad(&xi, &xi), AlgebraVector::zeros());
        let eta = AlgebraVector::new(4.0, 5.0, 6.0);
        assert_eq!(ad(&xi, &eta), AlgebraVector::new(-3.0, 6.0, -3.0));
    }

    #[test]
    fn coad_examples() {
        let got = coad(&AlgebraVector::new(0.0, 0.0, 1.0), &CoalgebraVector::new(1.0, 0.0, 0.0));
        assert_eq!(got, CoalgebraVector::new(0.0, -1.0, 0.0));
        // pairing identity against ad for this example
        for i in 0..3 {
            let eta = AlgebraVector::basis(i);
            let lhs = pairing(&got, &eta);
            let rhs = pairing(
                &CoalgebraVector::new(1.0, 0.0, 0.0),
                &ad(&AlgebraVector::new(0.0, 0.0, 1.0), &eta),
            );
            assert_eq!(lhs, rhs);
        }
        let v = AlgebraVector::new(0.3, -1.2, 2.0);
        assert_eq!(coad(&v, &CoalgebraVector(v.0)), CoalgebraVector::zeros());
        // e₂ with 𝕀 = diag(1,2,3): 𝕀ξ = 2e₂ is parallel to ξ
        let xi = AlgebraVector::basis(1);
        assert_eq!(coad(&xi, &CoalgebraVector::new(0.0, 2.0, 0.0)), CoalgebraVector::zeros());
    }

    #[test]
    fn exp_identity_and_quarter_turn() {
        assert_eq!(*exp_map(&AlgebraVector::zeros()).matrix(), Matrix3::identity());
        let r = exp_map(&AlgebraVector::new(0.0, 0.0, FRAC_PI_2));
        let col = r.matrix().column(0);
        assert!((col - Vector3::new(0.0, 1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn exp_inverse_property() {
        for theta in [1e-9, 1e-7, 1e-3, 0.5, 2.0, 3.1, 7.0] {
            let a = exp_map(&AlgebraVector::new(theta, 0.0, 0.0));
            let b = exp_map(&AlgebraVector::new(-theta, 0.0, 0.0));
            assert!(((a * b).matrix() - Matrix3::identity()).norm() < 1e-12);
        }
    }

    #[test]
    fn exp_small_angle_branch_is_continuous() {
        let dir = Vector3::new(0.3, -0.5, 0.8).normalize();
        let below = exp_map(&AlgebraVector(dir * (SMALL_ANGLE * 0.999)));
        let above = exp_map(&AlgebraVector(dir * (SMALL_ANGLE * 1.001)));
        assert!((below.matrix() - above.matrix()).norm() < 1e-8);
        assert!(below.orthogonality_drift() < 1e-15);
    }

    #[test]
    fn coadjoint_action_examples() {
        let alpha = CoalgebraVector::new(0.2, -1.0, 4.0);
        assert_eq!(coadjoint_group_action(&GroupElement::identity(), &alpha), alpha);
        let g = exp_map(&AlgebraVector::new(0.0, 0.0, FRAC_PI_2));
        let got = coadjoint_group_action(&g, &CoalgebraVector::new(1.0, 0.0, 0.0));
        assert!((got - CoalgebraVector::new(0.0, 1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn pairing_examples() {
        let mu = CoalgebraVector::new(1.0, 2.0, 3.0);
        assert_eq!(pairing(&mu, &AlgebraVector::new(1.0, 1.0, 1.0)), 6.0);
        assert_eq!(pairing(&mu, &AlgebraVector::zeros()), 0.0);
    }

    #[test]
    fn group_element_validation() {
        assert!(GroupElement::new(Matrix3::identity() * 2.0).is_err());
        let reflection = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -1.0));
        assert!(matches!(GroupElement::new(reflection), Err(Error::NotARotation { .. })));
        assert!(GroupElement::new(Matrix3::repeat(f64::NAN)).is_err());
        let r = exp_map(&AlgebraVector::new(0.4, 0.1, -2.0));
        assert!(GroupElement::new(*r.matrix()).is_ok());
        assert_eq!(GroupElement::from_row_slice(&r.to_row_major()).unwrap(), r);
    }
}
