//! The Lie-Poisson-Jacobi bracket on `so(3)* × R`, its semidirect extension on
//! `so(3)* × R × so(3)*`, Hamiltonian vector fields built from either bracket and
//! numerical checks of the Jacobi structure.
//!
//! With `E = −∂/∂z`,
//!
//! ```text
//! {f, g} = ⟨μ, [δf/δμ, δg/δμ]⟩ + ⟨μ, δf/δμ⟩ ∂g/∂z − ⟨μ, δg/δμ⟩ ∂f/∂z − f ∂g/∂z + g ∂f/∂z
//!        [+ ⟨α, δf/δμ × δg/δα⟩ − ⟨α, δg/δμ × δf/δα⟩]
//! ```
//!
//! and a Hamiltonian `h` moves observables by `ḟ = {h, f} − f ∂h/∂z`.

use std::fmt;
use std::sync::Arc;

use crate::algebra::{ad, pairing, AlgebraVector, CoalgebraVector};
use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::models::{self, CoContactState, SystemSpec};
use crate::numdiff;

/// Point `(μ, z[, α])` at which brackets are evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketPoint {
    pub mu: CoalgebraVector,
    pub z: f64,
    pub alpha: Option<CoalgebraVector>,
}

impl BracketPoint {
    pub fn new(mu: CoalgebraVector, z: f64) -> Self {
        Self { mu, z, alpha: None }
    }

    pub fn extended(mu: CoalgebraVector, z: f64, alpha: CoalgebraVector) -> Self {
        Self { mu, z, alpha: Some(alpha) }
    }

    fn alpha_or_zero(&self) -> CoalgebraVector {
        self.alpha.unwrap_or_default()
    }

    fn coordinates(&self) -> Vec<f64> {
        let mut v = vec![self.mu[0], self.mu[1], self.mu[2], self.z];
        if let Some(a) = self.alpha {
            v.extend_from_slice(&a.to_array());
        }
        v
    }

    fn from_coordinates(c: &[f64]) -> Self {
        Self {
            mu: CoalgebraVector::new(c[0], c[1], c[2]),
            z: c[3],
            alpha: (c.len() == 7).then(|| CoalgebraVector::new(c[4], c[5], c[6])),
        }
    }
}

/// Functional derivatives `(δf/δμ, ∂f/∂z, δf/δα)`; `δf/δμ` and `δf/δα` live in `so(3)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Gradient {
    pub mu: AlgebraVector,
    pub z: f64,
    pub alpha: AlgebraVector,
}

type EvalFn = Arc<dyn Fn(&BracketPoint) -> f64 + Send + Sync>;
type GradFn = Arc<dyn Fn(&BracketPoint) -> Gradient + Send + Sync>;

/// Smooth function on `so(3)* × R [× so(3)*]`, optionally with an analytic gradient.
/// Without one, gradients come from an eighth-order central-difference stencil.
#[derive(Clone)]
pub struct Observable {
    eval: EvalFn,
    grad: Option<GradFn>,
}

impl fmt::Debug for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Observable").field("analytic_gradient", &self.grad.is_some()).finish()
    }
}

impl Observable {
    pub fn new(eval: impl Fn(&BracketPoint) -> f64 + Send + Sync + 'static) -> Self {
        Self { eval: Arc::new(eval), grad: None }
    }

    pub fn with_gradient(
        eval: impl Fn(&BracketPoint) -> f64 + Send + Sync + 'static,
        grad: impl Fn(&BracketPoint) -> Gradient + Send + Sync + 'static,
    ) -> Self {
        Self { eval: Arc::new(eval), grad: Some(Arc::new(grad)) }
    }

    pub fn constant(c: f64) -> Self {
        Self::with_gradient(move |_| c, |_| Gradient::default())
    }

    /// Coordinate `μᵢ` (0-based).
    pub fn mu(i: usize) -> Self {
        Self::with_gradient(move |p| p.mu[i], move |_| Gradient { mu: AlgebraVector::basis(i), ..Default::default() })
    }

    /// Coordinate `z`.
    pub fn z() -> Self {
        Self::with_gradient(|p| p.z, |_| Gradient { z: 1.0, ..Default::default() })
    }

    /// Coordinate `αᵢ` (0-based); zero where the point carries no `α`.
    pub fn alpha(i: usize) -> Self {
        Self::with_gradient(
            move |p| p.alpha_or_zero()[i],
            move |_| Gradient { alpha: AlgebraVector::basis(i), ..Default::default() },
        )
    }

    /// The built-in Hamiltonian `h(μ, z, α)` of `spec`, with its analytic gradient.
    pub fn hamiltonian(spec: &SystemSpec) -> Self {
        let (s1, s2) = (spec.clone(), spec.clone());
        let state = |p: &BracketPoint| CoContactState::new(p.mu, p.z).with_alpha(p.alpha_or_zero());
        Self::with_gradient(
            move |p| models::hamiltonian(&s1, &state(p)),
            move |p| {
                let s = state(p);
                Gradient {
                    mu: models::dh_dmu(&s2, &s),
                    z: models::dh_dz(&s2, &s),
                    alpha: models::dh_dalpha(&s2, &s),
                }
            },
        )
    }

    pub fn eval(&self, p: &BracketPoint) -> f64 {
        (self.eval)(p)
    }

    pub fn has_analytic_gradient(&self) -> bool {
        self.grad.is_some()
    }

    pub fn gradient(&self, p: &BracketPoint) -> Gradient {
        match &self.grad {
            Some(g) => g(p),
            None => self.numerical_gradient(p),
        }
    }

    /// Stencil gradient of the evaluator, ignoring any analytic gradient.
    pub fn numerical_gradient(&self, p: &BracketPoint) -> Gradient {
        let x = p.coordinates();
        let g = numdiff::stencil_gradient(|c| self.eval(&BracketPoint::from_coordinates(c)), &x);
        Gradient {
            mu: AlgebraVector::new(g[0], g[1], g[2]),
            z: g[3],
            alpha: if g.len() == 7 { AlgebraVector::new(g[4], g[5], g[6]) } else { AlgebraVector::zeros() },
        }
    }

    /// Pointwise product; analytic gradient by the product rule when both factors have one.
    pub fn product(&self, other: &Observable) -> Observable {
        let (a, b) = (self.clone(), other.clone());
        let eval = move |p: &BracketPoint| a.eval(p) * b.eval(p);
        if self.grad.is_some() && other.grad.is_some() {
            let (a, b) = (self.clone(), other.clone());
            Observable::with_gradient(eval, move |p| {
                let (fa, fb) = (a.eval(p), b.eval(p));
                let (ga, gb) = (a.gradient(p), b.gradient(p));
                Gradient {
                    mu: ga.mu * fb + gb.mu * fa,
                    z: ga.z * fb + gb.z * fa,
                    alpha: ga.alpha * fb + gb.alpha * fa,
                }
            })
        } else {
            Observable::new(eval)
        }
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &Observable, b: f64) -> Observable {
        let (f, g) = (self.clone(), other.clone());
        let eval = move |p: &BracketPoint| a * f.eval(p) + b * g.eval(p);
        if self.grad.is_some() && other.grad.is_some() {
            let (f, g) = (self.clone(), other.clone());
            Observable::with_gradient(eval, move |p| {
                let (gf, gg) = (f.gradient(p), g.gradient(p));
                Gradient { mu: gf.mu * a + gg.mu * b, z: a * gf.z + b * gg.z, alpha: gf.alpha * a + gg.alpha * b }
            })
        } else {
            Observable::new(eval)
        }
    }
}

/// Which bracket to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BracketKind {
    /// Lie-Poisson-Jacobi bracket on `so(3)* × R`; `α`, if present, is a passive parameter.
    LiePoissonJacobi,
    /// Semidirect extension on `so(3)* × R × so(3)*`.
    Extended,
}

fn bracket_from_parts(kind: BracketKind, p: &BracketPoint, f: f64, df: &Gradient, g: f64, dg: &Gradient) -> f64 {
    // Each group flips sign exactly under f <-> g, so antisymmetry holds bit for bit.
    let mu = &p.mu;
    let lie = pairing(mu, &ad(&df.mu, &dg.mu));
    let reeb = pairing(mu, &df.mu) * dg.z - pairing(mu, &dg.mu) * df.z;
    let scaling = g * df.z - f * dg.z;
    let mut value = lie + reeb + scaling;
    if kind == BracketKind::Extended {
        let alpha = p.alpha_or_zero();
        value += pairing(&alpha, &ad(&df.mu, &dg.alpha)) - pairing(&alpha, &ad(&dg.mu, &df.alpha));
    }
    value
}

fn bracket_unchecked(kind: BracketKind, f: &Observable, g: &Observable, p: &BracketPoint) -> f64 {
    bracket_from_parts(kind, p, f.eval(p), &f.gradient(p), g.eval(p), &g.gradient(p))
}

/// Lie-Poisson-Jacobi bracket `{f, g}(μ, z)`.
pub fn lpj_bracket(f: &Observable, g: &Observable, p: &BracketPoint) -> f64 {
    bracket_unchecked(BracketKind::LiePoissonJacobi, f, g, p)
}

/// Extended bracket `{f, g}_{X*}(μ, z, α)`; the point must carry `α`.
pub fn lpj_bracket_ext(f: &Observable, g: &Observable, p: &BracketPoint) -> Result<f64> {
    if p.alpha.is_none() {
        return Err(Error::MissingAlpha);
    }
    Ok(bracket_unchecked(BracketKind::Extended, f, g, p))
}

/// `{f, g}` for either bracket; a missing `α` counts as zero.
pub fn bracket(kind: BracketKind, f: &Observable, g: &Observable, p: &BracketPoint) -> f64 {
    bracket_unchecked(kind, f, g, p)
}

/// `{f, g}` as an observable (numerical gradient), for nesting.
pub fn bracket_observable(kind: BracketKind, f: &Observable, g: &Observable) -> Observable {
    let (f, g) = (f.clone(), g.clone());
    Observable::new(move |p| bracket_unchecked(kind, &f, &g, p))
}

/// Tangent vector at a [`BracketPoint`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tangent {
    pub mu: CoalgebraVector,
    pub z: f64,
    pub alpha: Option<CoalgebraVector>,
}

/// Hamiltonian vector field of `h`, extracted coordinate by coordinate from
/// `ḟ = {h, f} − f ∂h/∂z`. The `α` component is present iff the point carries `α`.
pub fn hamiltonian_field_from_bracket(kind: BracketKind, h: &Observable, p: &BracketPoint) -> Tangent {
    let hv = h.eval(p);
    let dh = h.gradient(p);
    let rate = |f: &Observable| {
        bracket_from_parts(kind, p, hv, &dh, f.eval(p), &f.gradient(p)) - f.eval(p) * dh.z
    };
    Tangent {
        mu: CoalgebraVector::new(rate(&Observable::mu(0)), rate(&Observable::mu(1)), rate(&Observable::mu(2))),
        z: rate(&Observable::z()),
        alpha: p
            .alpha
            .map(|_| CoalgebraVector::new(rate(&Observable::alpha(0)), rate(&Observable::alpha(1)), rate(&Observable::alpha(2)))),
    }
}

fn max_over(points: &[BracketPoint], f: impl Fn(&BracketPoint) -> f64) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::NoPoints);
    }
    Ok(points.iter().map(f).fold(0.0, f64::max))
}

/// `max |{f, {g, k}} + {g, {k, f}} + {k, {f, g}}|` over `points`. Inner brackets are
/// differentiated numerically.
pub fn jacobi_identity_residual(
    kind: BracketKind,
    f: &Observable,
    g: &Observable,
    k: &Observable,
    points: &[BracketPoint],
) -> Result<f64> {
    let gk = bracket_observable(kind, g, k);
    let kf = bracket_observable(kind, k, f);
    let fg = bracket_observable(kind, f, g);
    max_over(points, |p| {
        (bracket_unchecked(kind, f, &gk, p) + bracket_unchecked(kind, g, &kf, p) + bracket_unchecked(kind, k, &fg, p)).abs()
    })
}

/// `max |{f, g k} − g {f, k} − k {f, g} + g k ∂f/∂z|` over `points`.
pub fn leibniz_residual(
    kind: BracketKind,
    f: &Observable,
    g: &Observable,
    k: &Observable,
    points: &[BracketPoint],
) -> Result<f64> {
    let gk = g.product(k);
    max_over(points, |p| {
        let (gv, kv) = (g.eval(p), k.eval(p));
        let df_dz = f.gradient(p).z;
        (bracket_unchecked(kind, f, &gk, p) - gv * bracket_unchecked(kind, f, k, p) - kv * bracket_unchecked(kind, f, g, p)
            + gv * kv * df_dz)
            .abs()
    })
}

/// `max |{f, g} + {g, f}|` over `points`.
pub fn antisymmetry_residual(kind: BracketKind, f: &Observable, g: &Observable, points: &[BracketPoint]) -> Result<f64> {
    max_over(points, |p| (bracket_unchecked(kind, f, g, p) + bracket_unchecked(kind, g, f, p)).abs())
}

/// Samples fewer than this are rejected by [`dissipation_check`].
pub const MIN_DISSIPATION_SAMPLES: usize = 5;

/// Checks `ḣ = −γ h` along a trajectory whose diagnostics include `hamiltonian`.
///
/// Without a potential this is the closed form
/// `max |h(t) − h(0) e^{−γt}| / max(1, |h(0)|)`; with one it is the differential form
/// `max |dh/dt + γ h| / max(1, |h(0)|)` with `dh/dt` from fourth-order differences
/// of the samples.
pub fn dissipation_check<S>(spec: &SystemSpec, traj: &Trajectory<S>) -> Result<f64> {
    if traj.len() < MIN_DISSIPATION_SAMPLES {
        return Err(Error::TrajectoryTooShort(traj.len(), MIN_DISSIPATION_SAMPLES));
    }
    let h = traj.diagnostic("hamiltonian").ok_or(Error::MissingDiagnostic("hamiltonian"))?;
    let gamma = spec.gamma();
    let scale = h[0].abs().max(1.0);
    let worst = if spec.is_symmetric() {
        traj.times
            .iter()
            .zip(&h)
            .map(|(t, hv)| (hv - h[0] * (-gamma * t).exp()).abs())
            .fold(0.0, f64::max)
    } else {
        let dt = traj.dt().ok_or(Error::TrajectoryTooShort(traj.len(), MIN_DISSIPATION_SAMPLES))?;
        let dh = numdiff::sampled_derivative(&h, dt)
            .ok_or(Error::TrajectoryTooShort(traj.len(), MIN_DISSIPATION_SAMPLES))?;
        dh.iter().zip(&h).map(|(d, hv)| (d + gamma * hv).abs()).fold(0.0, f64::max)
    };
    Ok(worst / scale)
}

/// Sparse polynomial in the coordinates `(μ₁, μ₂, μ₃, z, α₁, α₂, α₃)` with an
/// exact gradient. Used as the test family for the bracket checks.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    terms: Vec<(f64, [u8; 7])>,
}

impl Polynomial {
    pub fn new(terms: Vec<(f64, [u8; 7])>) -> Self {
        Self { terms }
    }

    pub fn terms(&self) -> &[(f64, [u8; 7])] {
        &self.terms
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|(_, e)| e.iter().map(|&x| x as u32).sum()).max().unwrap_or(0)
    }

    fn coords(p: &BracketPoint) -> [f64; 7] {
        let a = p.alpha_or_zero();
        [p.mu[0], p.mu[1], p.mu[2], p.z, a[0], a[1], a[2]]
    }

    pub fn eval_at(&self, p: &BracketPoint) -> f64 {
        let x = Self::coords(p);
        self.terms
            .iter()
            .map(|(c, e)| c * x.iter().zip(e).map(|(xi, &ei)| xi.powi(ei as i32)).product::<f64>())
            .sum()
    }

    pub fn gradient_at(&self, p: &BracketPoint) -> Gradient {
        let x = Self::coords(p);
        let mut g = [0.0; 7];
        for (c, e) in &self.terms {
            for (j, gj) in g.iter_mut().enumerate() {
                if e[j] == 0 {
                    continue;
                }
                let mut term = c * e[j] as f64;
                for (i, (xi, &ei)) in x.iter().zip(e).enumerate() {
                    let power = if i == j { ei as i32 - 1 } else { ei as i32 };
                    term *= xi.powi(power);
                }
                *gj += term;
            }
        }
        Gradient {
            mu: AlgebraVector::new(g[0], g[1], g[2]),
            z: g[3],
            alpha: AlgebraVector::new(g[4], g[5], g[6]),
        }
    }

    pub fn observable(&self) -> Observable {
        let (a, b) = (self.clone(), self.clone());
        Observable::with_gradient(move |p| a.eval_at(p), move |p| b.gradient_at(p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{integrate, lpj_ext_field, lpj_field, LpjField, Method};

    fn pt(mu: [f64; 3], z: f64) -> BracketPoint {
        BracketPoint::new(CoalgebraVector::from(mu), z)
    }

    #[test]
    fn coordinate_brackets() {
        let c = 2.5;
        let p = pt([0.0, 0.0, c], 7.0);
        assert_eq!(lpj_bracket(&Observable::mu(0), &Observable::mu(1), &p), c);
        let q = pt([1.3, -0.4, 2.0], -1.0);
        let f = Observable::mu(1);
        assert_eq!(lpj_bracket(&f, &f, &q), 0.0);
        assert_eq!(lpj_bracket(&Observable::z(), &Observable::mu(0), &q), 0.0);
    }

    #[test]
    fn extended_bracket_requires_alpha() {
        let p = pt([1.0, 2.0, 3.0], 0.0);
        assert!(matches!(lpj_bracket_ext(&Observable::mu(0), &Observable::z(), &p), Err(Error::MissingAlpha)));
    }

    #[test]
    fn extended_bracket_reduces_without_alpha_dependence() {
        let p = BracketPoint::extended(CoalgebraVector::new(0.3, -1.0, 2.0), 0.5, CoalgebraVector::new(1.0, 2.0, -0.5));
        let f = Polynomial::new(vec![(1.5, [2, 0, 1, 0, 0, 0, 0]), (-0.5, [0, 1, 0, 1, 0, 0, 0])]).observable();
        let g = Polynomial::new(vec![(0.7, [0, 0, 1, 2, 0, 0, 0]), (2.0, [1, 0, 0, 0, 0, 0, 0])]).observable();
        let a = lpj_bracket(&f, &g, &p);
        let b = lpj_bracket_ext(&f, &g, &p).unwrap();
        assert!((a - b).abs() < 1e-14);
        assert_eq!(lpj_bracket_ext(&f, &f, &p).unwrap(), 0.0);
    }

    #[test]
    fn mixed_coordinate_bracket() {
        // {μ₁, α₂} = α·(e₁ × e₂) = α₃
        let p = BracketPoint::extended(CoalgebraVector::new(0.1, 0.2, 0.3), 0.0, CoalgebraVector::new(4.0, 5.0, 6.0));
        assert_eq!(lpj_bracket_ext(&Observable::mu(0), &Observable::alpha(1), &p).unwrap(), 6.0);
        assert_eq!(lpj_bracket_ext(&Observable::alpha(0), &Observable::alpha(1), &p).unwrap(), 0.0);
    }

    #[test]
    fn field_from_bracket_matches_closed_form() {
        let spec = SystemSpec::diagonal([1.0, 2.0, 3.0], 0.1).unwrap();
        let h = Observable::hamiltonian(&spec);
        let p = pt([1.0, 2.0, 3.0], 0.5);
        let t = hamiltonian_field_from_bracket(BracketKind::LiePoissonJacobi, &h, &p);
        let d = lpj_field(&spec, &CoContactState::new(p.mu, p.z)).unwrap();
        assert!((t.mu - d.mu).norm() < 1e-14);
        assert!((t.z - d.z).abs() < 1e-14);
        assert!(t.alpha.is_none());

        let heavy = spec.with_potential(1.3, AlgebraVector::new(0.6, 0.0, 0.8)).unwrap();
        let h = Observable::hamiltonian(&heavy);
        let p = BracketPoint::extended(CoalgebraVector::new(1.0, -2.0, 0.5), 0.2, CoalgebraVector::new(0.3, 0.4, -0.2));
        let t = hamiltonian_field_from_bracket(BracketKind::Extended, &h, &p);
        let d = lpj_ext_field(&heavy, &CoContactState::new(p.mu, p.z).with_alpha(p.alpha.unwrap()));
        assert!((t.mu - d.base.mu).norm() < 1e-14);
        assert!((t.z - d.base.z).abs() < 1e-14);
        assert!((t.alpha.unwrap() - d.alpha).norm() < 1e-14);
    }

    #[test]
    fn field_of_constant_and_zero() {
        let p = pt([1.0, -2.0, 0.5], 3.0);
        let t = hamiltonian_field_from_bracket(BracketKind::LiePoissonJacobi, &Observable::constant(2.0), &p);
        assert_eq!(t.mu, CoalgebraVector::zeros());
        assert_eq!(t.z, -2.0);
        let t = hamiltonian_field_from_bracket(BracketKind::LiePoissonJacobi, &Observable::constant(0.0), &p);
        assert_eq!(t.mu, CoalgebraVector::zeros());
        assert_eq!(t.z, 0.0);
    }

    #[test]
    fn jacobi_identity_on_coordinates() {
        let pts = [pt([1.0, -2.0, 0.5], 3.0), pt([0.1, 0.2, -3.0], -1.0)];
        let r = jacobi_identity_residual(
            BracketKind::LiePoissonJacobi,
            &Observable::mu(0),
            &Observable::mu(1),
            &Observable::mu(2),
            &pts,
        )
        .unwrap();
        assert!(r <= 1e-13, "{r}");
        let f = Observable::mu(0);
        let r = jacobi_identity_residual(BracketKind::LiePoissonJacobi, &f, &f, &Observable::z(), &pts).unwrap();
        assert!(r <= 1e-13, "{r}");
        assert!(matches!(
            jacobi_identity_residual(BracketKind::LiePoissonJacobi, &f, &f, &f, &[]),
            Err(Error::NoPoints)
        ));
    }

    #[test]
    fn leibniz_examples() {
        let pts = [pt([1.0, -2.0, 0.5], 3.0), pt([0.1, 0.2, -3.0], -1.0)];
        let one = Observable::constant(1.0);
        let f = Polynomial::new(vec![(1.0, [1, 2, 0, 0, 0, 0, 0])]).observable();
        let r = leibniz_residual(BracketKind::LiePoissonJacobi, &f, &one, &one, &pts).unwrap();
        assert_eq!(r, 0.0);
        let m1 = Observable::mu(0);
        let r = leibniz_residual(BracketKind::LiePoissonJacobi, &Observable::z(), &m1, &m1, &pts).unwrap();
        assert!(r <= 1e-10, "{r}");
    }

    #[test]
    fn unit_bracket_is_reeb_derivative() {
        // {1, f} = E(f) = −∂f/∂z
        let f = Polynomial::new(vec![(2.0, [1, 0, 0, 2, 0, 0, 0]), (1.0, [0, 1, 0, 1, 0, 0, 0])]).observable();
        let p = pt([0.7, -1.1, 2.0], 1.5);
        let lhs = lpj_bracket(&Observable::constant(1.0), &f, &p);
        let df_dz = f.gradient(&p).z;
        assert!((lhs + df_dz).abs() < 1e-12);
    }

    #[test]
    fn polynomial_gradient_matches_stencil() {
        let poly = Polynomial::new(vec![
            (0.5, [1, 1, 1, 0, 0, 0, 0]),
            (-1.5, [0, 0, 0, 3, 0, 0, 0]),
            (2.0, [0, 2, 0, 0, 1, 0, 0]),
            (0.25, [0, 0, 0, 0, 0, 1, 2]),
        ]);
        assert_eq!(poly.degree(), 3);
        let obs = poly.observable();
        let p = BracketPoint::extended(CoalgebraVector::new(0.3, -1.2, 2.0), 0.9, CoalgebraVector::new(-0.4, 1.1, 2.5));
        let a = obs.gradient(&p);
        let n = obs.numerical_gradient(&p);
        assert!((a.mu - n.mu).norm() < 1e-11);
        assert!((a.z - n.z).abs() < 1e-11);
        assert!((a.alpha - n.alpha).norm() < 1e-11);
    }

    #[test]
    fn product_and_combination_gradients() {
        let f = Polynomial::new(vec![(1.0, [1, 0, 0, 1, 0, 0, 0])]).observable();
        let g = Observable::mu(2);
        let p = pt([0.5, 1.5, -2.0], 0.25);
        let fg = f.product(&g);
        assert!(fg.has_analytic_gradient());
        assert!((fg.eval(&p) - 0.5 * 0.25 * -2.0).abs() < 1e-15);
        let n = fg.numerical_gradient(&p);
        let a = fg.gradient(&p);
        assert!((a.mu - n.mu).norm() < 1e-12 && (a.z - n.z).abs() < 1e-12);
        let c = f.combine(2.0, &g, -3.0);
        assert!((c.eval(&p) - (2.0 * 0.125 + 6.0)).abs() < 1e-15);
        let no_grad = Observable::new(|p| p.z);
        assert!(!f.product(&no_grad).has_analytic_gradient());
    }

    #[test]
    fn dissipation_check_closed_form_and_errors() {
        let spec = SystemSpec::diagonal([1.0, 2.0, 3.0], 0.1).unwrap();
        let field = LpjField::new(&spec).unwrap();
        let s0 = CoContactState::new(CoalgebraVector::new(1.0, 2.0, 3.0), 0.0);
        let traj = integrate(&field, s0, 1e-3, 5000, Method::Rk4).unwrap();
        assert!(dissipation_check(&spec, &traj).unwrap() <= 1e-6);

        let short = integrate(&field, s0, 1e-3, 3, Method::Rk4).unwrap();
        assert!(matches!(dissipation_check(&spec, &short), Err(Error::TrajectoryTooShort(4, 5))));
    }
}
