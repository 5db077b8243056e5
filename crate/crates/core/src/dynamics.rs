//! Vector fields of the reduced and unreduced contact dynamics, fixed-step
//! integrators and reconstruction of the attitude from the body velocity.
//!
//! Every field is available as a free function on a state and as a small struct
//! implementing [`VectorField`] (reduced flows) or [`GroupField`] (flows that
//! also move the attitude `g`, with `ġ = g ω̂`).

use crate::algebra::{
    ad, coad, coadjoint_group_action, exp_map, pairing, AlgebraVector, CoalgebraVector, GroupElement,
};
use crate::error::{Error, Result};
use crate::models::{
    self, dh_dalpha, dh_dz, dl_dalpha, dl_dz, CoContactState, ContactState, ExtendedMomentumState,
    ExtendedState, ExtendedVelocityState, SystemSpec,
};

/// Vector-space states that explicit Runge-Kutta schemes can combine.
pub trait LinearState: Copy {
    /// `self + h · d`.
    fn add_scaled(&self, d: &Self, h: f64) -> Self;
    fn is_finite(&self) -> bool;
}

impl LinearState for ContactState {
    fn add_scaled(&self, d: &Self, h: f64) -> Self {
        ContactState { xi: self.xi + d.xi * h, z: self.z + h * d.z }
    }
    fn is_finite(&self) -> bool {
        self.xi.is_finite() && self.z.is_finite()
    }
}

impl LinearState for CoContactState {
    fn add_scaled(&self, d: &Self, h: f64) -> Self {
        CoContactState { mu: self.mu + d.mu * h, z: self.z + h * d.z }
    }
    fn is_finite(&self) -> bool {
        self.mu.is_finite() && self.z.is_finite()
    }
}

impl<B: LinearState> LinearState for ExtendedState<B> {
    fn add_scaled(&self, d: &Self, h: f64) -> Self {
        ExtendedState { base: self.base.add_scaled(&d.base, h), alpha: self.alpha + d.alpha * h }
    }
    fn is_finite(&self) -> bool {
        self.base.is_finite() && self.alpha.is_finite()
    }
}

/// Reduced state paired with an attitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FullState<S> {
    pub g: GroupElement,
    pub body: S,
}

impl<S> FullState<S> {
    pub fn new(g: GroupElement, body: S) -> Self {
        Self { g, body }
    }
}

/// Named scalar monitors reported alongside each sample.
pub type Diagnostics = Vec<(&'static str, f64)>;

/// Autonomous vector field on a vector-space state. The tangent has the state's type.
pub trait VectorField<S> {
    fn eval(&self, s: &S) -> S;

    fn diagnostics(&self, _s: &S) -> Diagnostics {
        Vec::new()
    }
}

impl<S, T: VectorField<S> + ?Sized> VectorField<S> for &T {
    fn eval(&self, s: &S) -> S {
        (**self).eval(s)
    }
    fn diagnostics(&self, s: &S) -> Diagnostics {
        (**self).diagnostics(s)
    }
}

/// Adapts a closure into a [`VectorField`] with no diagnostics.
pub struct FnField<F>(pub F);

impl<S, F: Fn(&S) -> S> VectorField<S> for FnField<F> {
    fn eval(&self, s: &S) -> S {
        (self.0)(s)
    }
}

/// Field on `G × S` in left-trivialized form: returns the body velocity `ω`
/// (`ġ = g ω̂`) and `ds/dt`.
pub trait GroupField<S> {
    fn eval(&self, g: &GroupElement, s: &S) -> (AlgebraVector, S);

    fn diagnostics(&self, _g: &GroupElement, _s: &S) -> Diagnostics {
        Vec::new()
    }
}

/// Body angular velocity carried by a reduced state, used for reconstruction.
pub trait BodyVelocity<S> {
    fn body_velocity(&self, s: &S) -> AlgebraVector;
}

impl<S, T: BodyVelocity<S> + ?Sized> BodyVelocity<S> for &T {
    fn body_velocity(&self, s: &S) -> AlgebraVector {
        (**self).body_velocity(s)
    }
}

/// Infinitesimal action on the body-frame advected parameter: if `α = g⁻¹α₀`
/// and `ġ = g ξ̂` then `α̇ = α × ξ = ad*_ξ α`.
pub fn advect(xi: &AlgebraVector, alpha: &CoalgebraVector) -> CoalgebraVector {
    coad(xi, alpha)
}

/// Momentum map of the coadjoint representation, `J_X(x, α) = −ad*_x α = −(α × x)`.
pub fn momentum_map_jx(x: &AlgebraVector, alpha: &CoalgebraVector) -> CoalgebraVector {
    -coad(x, alpha)
}

fn require_symmetric(spec: &SystemSpec, what: &'static str) -> Result<()> {
    if spec.is_symmetric() {
        Ok(())
    } else {
        Err(Error::BrokenSymmetry(what, spec.potential_strength()))
    }
}

fn eph_ext_rhs(spec: &SystemSpec, s: &ExtendedVelocityState) -> ExtendedVelocityState {
    let xi = s.base.xi;
    let momentum = spec.lower(&xi);
    let d_momentum = coad(&xi, &momentum)
        + momentum_map_jx(&dl_dalpha(spec, s), &s.alpha)
        + momentum * dl_dz(spec, s);
    ExtendedState {
        base: ContactState { xi: spec.raise(&d_momentum), z: models::lagrangian(spec, s) },
        alpha: advect(&xi, &s.alpha),
    }
}

fn lpj_ext_rhs(spec: &SystemSpec, s: &ExtendedMomentumState) -> ExtendedMomentumState {
    let mu = s.base.mu;
    let velocity = spec.raise(&mu);
    let h = models::hamiltonian(spec, s);
    let d_mu = coad(&velocity, &mu) - mu * dh_dz(spec, s) - momentum_map_jx(&dh_dalpha(spec, s), &s.alpha);
    ExtendedState {
        base: CoContactState { mu: d_mu, z: pairing(&mu, &velocity) - h },
        alpha: advect(&velocity, &s.alpha),
    }
}

/// Euler-Poincaré-Herglotz field `d/dt 𝕀ξ = ad*_ξ 𝕀ξ + 𝕀ξ ∂ℓ/∂z`, `ż = ℓ`.
pub fn eph_field(spec: &SystemSpec, s: &ContactState) -> Result<ContactState> {
    require_symmetric(spec, "eph_field")?;
    Ok(eph_ext_rhs(spec, &(*s).into()).base)
}

/// Lie-Poisson-Jacobi field `μ̇ = ad*_{δh/δμ} μ − μ ∂h/∂z`, `ż = ⟨μ, δh/δμ⟩ − h`.
pub fn lpj_field(spec: &SystemSpec, s: &CoContactState) -> Result<CoContactState> {
    require_symmetric(spec, "lpj_field")?;
    Ok(lpj_ext_rhs(spec, &(*s).into()).base)
}

/// Euler-Poincaré-Herglotz field with an advected parameter:
/// `d/dt 𝕀ξ = ad*_ξ 𝕀ξ + J_X(δℓ/δα, α) + 𝕀ξ ∂ℓ/∂z`, `α̇ = α × ξ`, `ż = ℓ`.
pub fn eph_ext_field(spec: &SystemSpec, s: &ExtendedVelocityState) -> ExtendedVelocityState {
    eph_ext_rhs(spec, s)
}

/// Lie-Poisson-Jacobi field with an advected parameter:
/// `μ̇ = ad*_{δh/δμ} μ − μ ∂h/∂z − J_X(δh/δα, α)`, `α̇ = α × δh/δμ`,
/// `ż = ⟨μ, δh/δμ⟩ − h`.
pub fn lpj_ext_field(spec: &SystemSpec, s: &ExtendedMomentumState) -> ExtendedMomentumState {
    lpj_ext_rhs(spec, s)
}

/// Left-trivialized Herglotz equations on `SO(3) × so(3) × R` for
/// `L(g, ξ, z) = ½ ξᵀ𝕀ξ − k ⟨α₀, g χ⟩ − γ z`. Returns `(ġ as body velocity, ξ̇, ż)`.
pub fn unreduced_herglotz_field(
    spec: &SystemSpec,
    g: &GroupElement,
    s: &ContactState,
) -> (AlgebraVector, ContactState) {
    let xi = s.xi;
    let momentum = spec.lower(&xi);
    let body_vertical = coadjoint_group_action(&g.inverse(), &spec.alpha0());
    // T*_e L_g (δL/δg): left-trivialized gradient of −k⟨α₀, gχ⟩
    let force = CoalgebraVector(-spec.potential_strength() * spec.chi().0.cross(&body_vertical.0));
    let d_momentum = coad(&xi, &momentum) + force - momentum * spec.gamma();
    let lagrangian = models::lagrangian(spec, &s.with_alpha(body_vertical));
    (xi, ContactState { xi: spec.raise(&d_momentum), z: lagrangian })
}

/// Left-trivialized contact Hamiltonian flow on `SO(3) × so(3)* × R` for a
/// G-invariant Hamiltonian. Returns `(ġ as body velocity 𝕀⁻¹μ, μ̇, ż)`.
pub fn unreduced_hamiltonian_field(
    spec: &SystemSpec,
    _g: &GroupElement,
    s: &CoContactState,
) -> Result<(AlgebraVector, CoContactState)> {
    require_symmetric(spec, "unreduced_hamiltonian_field")?;
    Ok((spec.raise(&s.mu), lpj_ext_rhs(spec, &(*s).into()).base))
}

fn velocity_diagnostics(spec: &SystemSpec, s: &ExtendedVelocityState, with_alpha: bool) -> Diagnostics {
    let m = models::legendre_ext(spec, s);
    let mut d = vec![
        ("lagrangian", models::lagrangian(spec, s)),
        ("hamiltonian", models::hamiltonian(spec, &m)),
        ("mu_norm", m.base.mu.norm()),
    ];
    if with_alpha {
        d.push(("alpha_norm", s.alpha.norm()));
    }
    d
}

fn momentum_diagnostics(spec: &SystemSpec, s: &ExtendedMomentumState, with_alpha: bool) -> Diagnostics {
    let mut d = vec![("hamiltonian", models::hamiltonian(spec, s)), ("mu_norm", s.base.mu.norm())];
    if with_alpha {
        d.push(("alpha_norm", s.alpha.norm()));
    }
    d
}

/// [`eph_field`] as a [`VectorField`].
#[derive(Debug, Clone, Copy)]
pub struct EphField<'a>(&'a SystemSpec);

impl<'a> EphField<'a> {
    pub fn new(spec: &'a SystemSpec) -> Result<Self> {
        require_symmetric(spec, "eph_field")?;
        Ok(Self(spec))
    }
}

impl VectorField<ContactState> for EphField<'_> {
    fn eval(&self, s: &ContactState) -> ContactState {
        eph_ext_rhs(self.0, &(*s).into()).base
    }
    fn diagnostics(&self, s: &ContactState) -> Diagnostics {
        velocity_diagnostics(self.0, &(*s).into(), false)
    }
}

impl BodyVelocity<ContactState> for EphField<'_> {
    fn body_velocity(&self, s: &ContactState) -> AlgebraVector {
        s.xi
    }
}

/// [`lpj_field`] as a [`VectorField`].
#[derive(Debug, Clone, Copy)]
pub struct LpjField<'a>(&'a SystemSpec);

impl<'a> LpjField<'a> {
    pub fn new(spec: &'a SystemSpec) -> Result<Self> {
        require_symmetric(spec, "lpj_field")?;
        Ok(Self(spec))
    }
}

impl VectorField<CoContactState> for LpjField<'_> {
    fn eval(&self, s: &CoContactState) -> CoContactState {
        lpj_ext_rhs(self.0, &(*s).into()).base
    }
    fn diagnostics(&self, s: &CoContactState) -> Diagnostics {
        momentum_diagnostics(self.0, &(*s).into(), false)
    }
}

impl BodyVelocity<CoContactState> for LpjField<'_> {
    fn body_velocity(&self, s: &CoContactState) -> AlgebraVector {
        self.0.raise(&s.mu)
    }
}

/// [`eph_ext_field`] as a [`VectorField`].
#[derive(Debug, Clone, Copy)]
pub struct EphExtField<'a>(pub &'a SystemSpec);

impl VectorField<ExtendedVelocityState> for EphExtField<'_> {
    fn eval(&self, s: &ExtendedVelocityState) -> ExtendedVelocityState {
        eph_ext_rhs(self.0, s)
    }
    fn diagnostics(&self, s: &ExtendedVelocityState) -> Diagnostics {
        velocity_diagnostics(self.0, s, true)
    }
}

impl BodyVelocity<ExtendedVelocityState> for EphExtField<'_> {
    fn body_velocity(&self, s: &ExtendedVelocityState) -> AlgebraVector {
        s.base.xi
    }
}

/// [`lpj_ext_field`] as a [`VectorField`].
#[derive(Debug, Clone, Copy)]
pub struct LpjExtField<'a>(pub &'a SystemSpec);

impl VectorField<ExtendedMomentumState> for LpjExtField<'_> {
    fn eval(&self, s: &ExtendedMomentumState) -> ExtendedMomentumState {
        lpj_ext_rhs(self.0, s)
    }
    fn diagnostics(&self, s: &ExtendedMomentumState) -> Diagnostics {
        momentum_diagnostics(self.0, s, true)
    }
}

impl BodyVelocity<ExtendedMomentumState> for LpjExtField<'_> {
    fn body_velocity(&self, s: &ExtendedMomentumState) -> AlgebraVector {
        self.0.raise(&s.base.mu)
    }
}

/// [`unreduced_herglotz_field`] as a [`GroupField`]. Diagnostics use the
/// body-frame vertical `g⁻¹α₀` as the advected parameter.
#[derive(Debug, Clone, Copy)]
pub struct UnreducedHerglotzField<'a>(pub &'a SystemSpec);

impl GroupField<ContactState> for UnreducedHerglotzField<'_> {
    fn eval(&self, g: &GroupElement, s: &ContactState) -> (AlgebraVector, ContactState) {
        unreduced_herglotz_field(self.0, g, s)
    }
    fn diagnostics(&self, g: &GroupElement, s: &ContactState) -> Diagnostics {
        let alpha = coadjoint_group_action(&g.inverse(), &self.0.alpha0());
        let mut d = velocity_diagnostics(self.0, &s.with_alpha(alpha), true);
        d.push(("ortho_drift", g.orthogonality_drift()));
        d
    }
}

/// [`unreduced_hamiltonian_field`] as a [`GroupField`].
#[derive(Debug, Clone, Copy)]
pub struct UnreducedHamiltonianField<'a>(&'a SystemSpec);

impl<'a> UnreducedHamiltonianField<'a> {
    pub fn new(spec: &'a SystemSpec) -> Result<Self> {
        require_symmetric(spec, "unreduced_hamiltonian_field")?;
        Ok(Self(spec))
    }
}

impl GroupField<CoContactState> for UnreducedHamiltonianField<'_> {
    fn eval(&self, _g: &GroupElement, s: &CoContactState) -> (AlgebraVector, CoContactState) {
        (self.0.raise(&s.mu), lpj_ext_rhs(self.0, &(*s).into()).base)
    }
    fn diagnostics(&self, g: &GroupElement, s: &CoContactState) -> Diagnostics {
        let mut d = momentum_diagnostics(self.0, &(*s).into(), false);
        d.push(("ortho_drift", g.orthogonality_drift()));
        d
    }
}

/// Drives the attitude with the body velocity of a reduced flow (`ġ = g ξ̂`).
#[derive(Debug, Clone, Copy)]
pub struct Reconstruction<F>(pub F);

impl<S, F> GroupField<S> for Reconstruction<F>
where
    F: VectorField<S> + BodyVelocity<S>,
{
    fn eval(&self, _g: &GroupElement, s: &S) -> (AlgebraVector, S) {
        (self.0.body_velocity(s), self.0.eval(s))
    }
    fn diagnostics(&self, g: &GroupElement, s: &S) -> Diagnostics {
        let mut d = self.0.diagnostics(s);
        d.push(("ortho_drift", g.orthogonality_drift()));
        d
    }
}

/// Explicit scheme for the vector-space part.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Euler,
    Rk4,
}

/// Scheme for flows on `SO(3) × S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LieMethod {
    /// `g ← g exp(h ω)`, explicit Euler on `S`.
    LieEuler,
    /// Fourth-order Runge-Kutta-Munthe-Kaas with commutator corrections; RK4 on `S`.
    Rkmk4,
}

/// Uniformly sampled solution with per-sample diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<S> {
    pub times: Vec<f64>,
    pub states: Vec<S>,
    diagnostic_names: Vec<&'static str>,
    diagnostic_rows: Vec<Vec<f64>>,
}

impl<S> Trajectory<S> {
    fn with_capacity(n: usize) -> Self {
        Self {
            times: Vec::with_capacity(n),
            states: Vec::with_capacity(n),
            diagnostic_names: Vec::new(),
            diagnostic_rows: Vec::with_capacity(n),
        }
    }

    fn push(&mut self, t: f64, s: S, diagnostics: Diagnostics) {
        if self.diagnostic_names.is_empty() {
            self.diagnostic_names = diagnostics.iter().map(|(n, _)| *n).collect();
        }
        self.diagnostic_rows.push(diagnostics.into_iter().map(|(_, v)| v).collect());
        self.times.push(t);
        self.states.push(s);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Step size (uniform by construction).
    pub fn dt(&self) -> Option<f64> {
        (self.times.len() >= 2).then(|| self.times[1] - self.times[0])
    }

    pub fn last(&self) -> Option<&S> {
        self.states.last()
    }

    pub fn diagnostic_names(&self) -> &[&'static str] {
        &self.diagnostic_names
    }

    /// Diagnostics of sample `k`, in field order.
    pub fn sample_diagnostics(&self, k: usize) -> impl Iterator<Item = (&'static str, f64)> + '_ {
        self.diagnostic_names.iter().copied().zip(self.diagnostic_rows[k].iter().copied())
    }

    /// Time series of one diagnostic.
    pub fn diagnostic(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.diagnostic_names.iter().position(|n| *n == name)?;
        Some(self.diagnostic_rows.iter().map(|row| row[i]).collect())
    }
}

fn check_steps(dt: f64, n_steps: usize) -> Result<()> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidStep(dt));
    }
    if n_steps == 0 {
        return Err(Error::NoSteps);
    }
    Ok(())
}

fn rk4_step<S: LinearState, F: VectorField<S> + ?Sized>(field: &F, s: &S, h: f64) -> S {
    let k1 = field.eval(s);
    let k2 = field.eval(&s.add_scaled(&k1, 0.5 * h));
    let k3 = field.eval(&s.add_scaled(&k2, 0.5 * h));
    let k4 = field.eval(&s.add_scaled(&k3, h));
    s.add_scaled(&k1, h / 6.0)
        .add_scaled(&k2, h / 3.0)
        .add_scaled(&k3, h / 3.0)
        .add_scaled(&k4, h / 6.0)
}

/// Fixed-step integration of a reduced flow; `n_steps + 1` samples at `t = k·dt`.
pub fn integrate<S, F>(field: &F, s0: S, dt: f64, n_steps: usize, method: Method) -> Result<Trajectory<S>>
where
    S: LinearState,
    F: VectorField<S> + ?Sized,
{
    check_steps(dt, n_steps)?;
    if !s0.is_finite() {
        return Err(Error::NonFinite("initial state"));
    }
    let mut traj = Trajectory::with_capacity(n_steps + 1);
    traj.push(0.0, s0, field.diagnostics(&s0));
    let mut s = s0;
    for step in 1..=n_steps {
        s = match method {
            Method::Euler => s.add_scaled(&field.eval(&s), dt),
            Method::Rk4 => rk4_step(field, &s, dt),
        };
        let t = step as f64 * dt;
        if !s.is_finite() {
            return Err(Error::Diverged { step, time: t });
        }
        traj.push(t, s, field.diagnostics(&s));
    }
    Ok(traj)
}

fn rkmk4_step<S, F>(field: &F, g: &GroupElement, s: &S, h: f64) -> (GroupElement, S)
where
    S: LinearState,
    F: GroupField<S> + ?Sized,
{
    let at = |u: AlgebraVector| g.compose(&exp_map(&u));

    let (w1, d1) = field.eval(g, s);
    let k1 = w1 * h;

    let (w2, d2) = field.eval(&at(k1 * 0.5), &s.add_scaled(&d1, 0.5 * h));
    let k2 = w2 * h;

    // right-multiplied form of the stage correction −⅛[k₁, k₂]
    let u3 = k2 * 0.5 + ad(&k1, &k2) * 0.125;
    let (w3, d3) = field.eval(&at(u3), &s.add_scaled(&d2, 0.5 * h));
    let k3 = w3 * h;

    let (w4, d4) = field.eval(&at(k3), &s.add_scaled(&d3, h));
    let k4 = w4 * h;

    let v = (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (1.0 / 6.0) + ad(&k1, &k4) * (1.0 / 12.0);
    let s_next = s
        .add_scaled(&d1, h / 6.0)
        .add_scaled(&d2, h / 3.0)
        .add_scaled(&d3, h / 3.0)
        .add_scaled(&d4, h / 6.0);
    (GroupElement::from_matrix_unchecked(g.matrix() * exp_map(&v).matrix()), s_next)
}

/// Fixed-step integration on `SO(3) × S` with multiplicative attitude updates
/// `g_{k+1} = g_k exp(dt Ω_k)`.
pub fn integrate_with_reconstruction<S, F>(
    field: &F,
    s0: FullState<S>,
    dt: f64,
    n_steps: usize,
    method: LieMethod,
) -> Result<Trajectory<FullState<S>>>
where
    S: LinearState,
    F: GroupField<S> + ?Sized,
{
    check_steps(dt, n_steps)?;
    if !(s0.body.is_finite() && s0.g.is_finite()) {
        return Err(Error::NonFinite("initial state"));
    }
    let mut traj = Trajectory::with_capacity(n_steps + 1);
    traj.push(0.0, s0, field.diagnostics(&s0.g, &s0.body));
    let (mut g, mut s) = (s0.g, s0.body);
    for step in 1..=n_steps {
        (g, s) = match method {
            LieMethod::LieEuler => {
                let (w, d) = field.eval(&g, &s);
                (g.compose(&exp_map(&(w * dt))), s.add_scaled(&d, dt))
            }
            LieMethod::Rkmk4 => rkmk4_step(field, &g, &s, dt),
        };
        let t = step as f64 * dt;
        if !(s.is_finite() && g.is_finite()) {
            return Err(Error::Diverged { step, time: t });
        }
        traj.push(t, FullState { g, body: s }, field.diagnostics(&g, &s));
    }
    Ok(traj)
}
