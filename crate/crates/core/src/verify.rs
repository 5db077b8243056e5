//! Numerical self-checks grouped into suites. Each check reports a measured
//! residual and the tolerance it must stay under.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{ad, coad, coadjoint_group_action, exp_map, hat, pairing, vee, AlgebraVector, CoalgebraVector};
use crate::dynamics::{
    integrate, integrate_with_reconstruction, lpj_ext_field, lpj_field, EphExtField, EphField, FullState, LieMethod,
    LpjExtField, LpjField, Method, Reconstruction, UnreducedHamiltonianField, UnreducedHerglotzField,
};
use crate::error::{Error, Result};
use crate::jacobi::{
    antisymmetry_residual, bracket, dissipation_check, hamiltonian_field_from_bracket, jacobi_identity_residual,
    leibniz_residual, BracketKind, BracketPoint, Observable, Polynomial,
};
use crate::models::{self, CoContactState, ContactState, SystemSpec};
use crate::scenarios;

/// Default seed for sampled checks.
pub const DEFAULT_SEED: u64 = 42;

/// One measured property.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn new(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self { name: name.into(), residual, tolerance }
    }

    /// NaN residuals fail.
    pub fn passed(&self) -> bool {
        self.residual <= self.tolerance
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Algebra,
    Brackets,
    Dynamics,
    Reduction,
    All,
}

impl std::str::FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "algebra" => Ok(Suite::Algebra),
            "brackets" => Ok(Suite::Brackets),
            "dynamics" => Ok(Suite::Dynamics),
            "reduction" => Ok(Suite::Reduction),
            "all" => Ok(Suite::All),
            _ => Err(format!("unknown suite '{s}' (expected algebra, brackets, dynamics, reduction or all)")),
        }
    }
}

/// Runs a suite and returns its checks sorted by name.
pub fn run_suite(suite: Suite, seed: u64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let parts: &[Suite] = match suite {
        Suite::All => &[Suite::Algebra, Suite::Brackets, Suite::Dynamics, Suite::Reduction],
        _ => std::slice::from_ref(&suite),
    };
    for part in parts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match part {
            Suite::Algebra => algebra_checks(&mut rng, &mut checks),
            Suite::Brackets => bracket_checks(&mut rng, &mut checks)?,
            Suite::Dynamics => dynamics_checks(&mut checks)?,
            Suite::Reduction => reduction_checks(&mut rng, &mut checks)?,
            Suite::All => unreachable!(),
        }
    }
    checks.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(checks)
}

/// Uniform vector in `[−r, r]³`.
pub fn random_vector<R: Rng + ?Sized>(rng: &mut R, r: f64) -> [f64; 3] {
    [rng.random_range(-r..=r), rng.random_range(-r..=r), rng.random_range(-r..=r)]
}

/// Evaluation point with coordinates uniform in `[−3, 3]`; `α` only when `extended`.
pub fn random_point<R: Rng + ?Sized>(rng: &mut R, extended: bool) -> BracketPoint {
    let mu = CoalgebraVector::from(random_vector(rng, 3.0));
    let z = rng.random_range(-3.0..=3.0);
    if extended {
        BracketPoint::extended(mu, z, CoalgebraVector::from(random_vector(rng, 3.0)))
    } else {
        BracketPoint::new(mu, z)
    }
}

/// Sparse polynomial of total degree ≤ 3 with one to four monomials and
/// coefficients in `[−1, 1]`, in `(μ, z)` or, when `extended`, in `(μ, z, α)`.
pub fn random_polynomial<R: Rng + ?Sized>(rng: &mut R, extended: bool) -> Polynomial {
    let vars = if extended { 7 } else { 4 };
    let n_terms = rng.random_range(1..=4);
    let terms = (0..n_terms)
        .map(|_| {
            let mut exps = [0u8; 7];
            let degree = rng.random_range(1..=3);
            for _ in 0..degree {
                exps[rng.random_range(0..vars)] += 1;
            }
            (rng.random_range(-1.0..=1.0), exps)
        })
        .collect();
    Polynomial::new(terms)
}

fn max_of(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, f64::max)
}

fn algebra_checks(rng: &mut ChaCha8Rng, out: &mut Vec<Check>) {
    let n = 200;
    let samples: Vec<[AlgebraVector; 3]> = (0..n)
        .map(|_| {
            [
                AlgebraVector::from(random_vector(rng, 3.0)),
                AlgebraVector::from(random_vector(rng, 3.0)),
                AlgebraVector::from(random_vector(rng, 3.0)),
            ]
        })
        .collect();
    out.push(Check::new(
        "algebra.ad_antisymmetry",
        max_of(samples.iter().map(|[x, y, _]| (ad(x, y) + ad(y, x)).norm())),
        1e-13,
    ));
    out.push(Check::new(
        "algebra.jacobi_identity",
        max_of(samples.iter().map(|[x, y, w]| (ad(x, &ad(y, w)) + ad(y, &ad(w, x)) + ad(w, &ad(x, y))).norm())),
        1e-13,
    ));
    out.push(Check::new(
        "algebra.coad_duality",
        max_of(samples.iter().map(|[x, m, y]| {
            let mu = CoalgebraVector(m.0);
            (pairing(&coad(x, &mu), y) - pairing(&mu, &ad(x, y))).abs()
        })),
        1e-12,
    ));
    out.push(Check::new(
        "algebra.hat_vee_roundtrip",
        max_of(samples.iter().map(|[x, _, _]| (vee(&hat(x)) - *x).norm())),
        0.0,
    ));
    out.push(Check::new(
        "algebra.exp_orthogonality",
        max_of(samples.iter().map(|[x, _, _]| {
            let g = exp_map(x);
            g.orthogonality_drift().max((g.determinant() - 1.0).abs())
        })),
        1e-12,
    ));
    out.push(Check::new(
        "algebra.coadjoint_action_norm",
        max_of(samples.iter().map(|[x, m, _]| {
            let a = CoalgebraVector(m.0);
            (coadjoint_group_action(&exp_map(x), &a).norm() - a.norm()).abs()
        })),
        1e-12,
    ));
}

fn random_spec(rng: &mut ChaCha8Rng, potential: bool) -> Result<SystemSpec> {
    let moments = [rng.random_range(0.5..=3.0), rng.random_range(0.5..=3.0), rng.random_range(0.5..=3.0)];
    let spec = SystemSpec::diagonal(moments, rng.random_range(-0.5..=0.5))?;
    if potential {
        let chi = nalgebra::Vector3::from(random_vector(rng, 1.0)).normalize();
        spec.with_potential(rng.random_range(0.1..=2.0), AlgebraVector(chi))
    } else {
        Ok(spec)
    }
}

/// Residuals of the bracket axioms over `triples` random polynomial triples at `points` random points.
pub fn bracket_axiom_residuals(
    rng: &mut ChaCha8Rng,
    kind: BracketKind,
    triples: usize,
    points: usize,
) -> Result<(f64, f64, f64)> {
    let extended = kind == BracketKind::Extended;
    let pts: Vec<BracketPoint> = (0..points).map(|_| random_point(rng, extended)).collect();
    let (mut jac, mut leib, mut anti) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..triples {
        let f = random_polynomial(rng, extended).observable();
        let g = random_polynomial(rng, extended).observable();
        let k = random_polynomial(rng, extended).observable();
        jac = jac.max(jacobi_identity_residual(kind, &f, &g, &k, &pts)?);
        leib = leib.max(leibniz_residual(kind, &f, &g, &k, &pts)?);
        anti = anti.max(antisymmetry_residual(kind, &f, &g, &pts)?);
    }
    Ok((jac, leib, anti))
}

/// Worst difference between the bracket-generated field and the closed form over `n` random states.
pub fn field_consistency_residual(rng: &mut ChaCha8Rng, kind: BracketKind, n: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for _ in 0..n {
        let extended = kind == BracketKind::Extended;
        let spec = random_spec(rng, extended)?;
        let p = random_point(rng, extended);
        let t = hamiltonian_field_from_bracket(kind, &Observable::hamiltonian(&spec), &p);
        let state = CoContactState::new(p.mu, p.z);
        let (d_mu, d_z, d_alpha) = if extended {
            let d = lpj_ext_field(&spec, &state.with_alpha(p.alpha.unwrap_or_default()));
            (d.base.mu, d.base.z, Some(d.alpha))
        } else {
            let d = lpj_field(&spec, &state)?;
            (d.mu, d.z, None)
        };
        let mut r = (t.mu - d_mu).norm().max((t.z - d_z).abs());
        if let (Some(a), Some(b)) = (t.alpha, d_alpha) {
            r = r.max((a - b).norm());
        }
        worst = worst.max(r);
    }
    Ok(worst)
}

fn bracket_checks(rng: &mut ChaCha8Rng, out: &mut Vec<Check>) -> Result<()> {
    for (kind, prefix) in [(BracketKind::LiePoissonJacobi, "brackets.lpj"), (BracketKind::Extended, "brackets.ext")] {
        let (jac, leib, anti) = bracket_axiom_residuals(rng, kind, 10, 20)?;
        out.push(Check::new(format!("{prefix}.jacobi_identity"), jac, 1e-8));
        out.push(Check::new(format!("{prefix}.leibniz"), leib, 1e-8));
        out.push(Check::new(format!("{prefix}.antisymmetry"), anti, 1e-13));
        out.push(Check::new(format!("{prefix}.field_consistency"), field_consistency_residual(rng, kind, 100)?, 1e-10));
    }

    let pts: Vec<BracketPoint> = (0..20).map(|_| random_point(rng, true)).collect();
    let f = random_polynomial(rng, true).observable();
    let g = random_polynomial(rng, true).observable();
    let k = random_polynomial(rng, true).observable();
    let (a, b) = (rng.random_range(-2.0..=2.0), rng.random_range(-2.0..=2.0));
    let comb = f.combine(a, &g, b);
    let bilinear = max_of(pts.iter().map(|p| {
        let lhs = bracket(BracketKind::Extended, &comb, &k, p);
        let rhs = a * bracket(BracketKind::Extended, &f, &k, p) + b * bracket(BracketKind::Extended, &g, &k, p);
        (lhs - rhs).abs() / rhs.abs().max(1.0)
    }));
    out.push(Check::new("brackets.bilinearity", bilinear, 1e-12));

    let one = Observable::constant(1.0);
    let reeb = max_of(pts.iter().map(|p| {
        (bracket(BracketKind::LiePoissonJacobi, &one, &f, p) + f.gradient(p).z).abs()
    }));
    out.push(Check::new("brackets.unit_reeb_derivative", reeb, 1e-10));
    Ok(())
}

fn dynamics_checks(out: &mut Vec<Check>) -> Result<()> {
    // Damped rigid body from μ₀ = (1, 2, 3).
    let spec = SystemSpec::diagonal([1.0, 2.0, 3.0], 0.1)?;
    let mu0 = CoalgebraVector::new(1.0, 2.0, 3.0);
    let traj = integrate(&LpjField::new(&spec)?, CoContactState::new(mu0, 0.0), 1e-3, 5000, Method::Rk4)?;
    out.push(Check::new("dynamics.hamiltonian_decay", dissipation_check(&spec, &traj)?, 1e-6));
    let casimir = max_of(traj.times.iter().zip(&traj.states).map(|(t, s)| {
        (s.mu.norm() - scenarios::analytic_casimir_decay(mu0.norm(), 0.1, *t)).abs() / mu0.norm()
    }));
    out.push(Check::new("dynamics.casimir_decay", casimir, 1e-6));

    let free = SystemSpec::diagonal([1.0, 2.0, 3.0], 0.0)?;
    let traj = integrate(&LpjField::new(&free)?, CoContactState::new(mu0, 0.0), 1e-3, 10_000, Method::Rk4)?;
    let h = traj.diagnostic("hamiltonian").ok_or(Error::MissingDiagnostic("hamiltonian"))?;
    let drift = max_of(
        traj.states.iter().zip(&h).map(|(s, hv)| (s.mu.norm() - mu0.norm()).abs().max((hv - h[0]).abs())),
    );
    out.push(Check::new("dynamics.conservative_drift", drift, 1e-8));

    let ratio = rk4_order_ratio(0.1)?;
    out.push(Check::new("dynamics.rk4_order", (ratio - 16.0).abs(), 4.0));

    let top = scenarios::scenario("heavy-top-dissipative")?;
    let traj = integrate(&LpjExtField(&top.spec), top.extended_momentum(), 1e-3, 5000, Method::Rk4)?;
    out.push(Check::new("dynamics.heavy_top_dissipation", dissipation_check(&top.spec, &traj)?, 1e-5));
    let a0 = top.alpha.norm();
    out.push(Check::new(
        "dynamics.alpha_norm",
        max_of(traj.states.iter().map(|s| (s.alpha.norm() - a0).abs())),
        1e-9,
    ));

    let sleeping = scenarios::scenario("sleeping-top")?;
    let s0 = sleeping.extended_velocity();
    let traj = integrate(&EphExtField(&sleeping.spec), s0, 1e-3, 10_000, Method::Rk4)?;
    let still = max_of(traj.states.iter().map(|s| (s.base.xi - s0.base.xi).norm().max((s.alpha - s0.alpha).norm())));
    out.push(Check::new("dynamics.sleeping_top_equilibrium", still, 1e-10));

    let rb = scenarios::scenario("free-rigid-body")?;
    let traj = integrate_with_reconstruction(
        &Reconstruction(EphField::new(&rb.spec)?),
        rb.full_velocity(),
        1e-3,
        10_000,
        LieMethod::Rkmk4,
    )?;
    let integrity = max_of(traj.states.iter().map(|s| s.g.orthogonality_drift().max((s.g.determinant() - 1.0).abs())));
    out.push(Check::new("dynamics.group_integrity", integrity, 1e-8));
    Ok(())
}

/// Ratio of RK4 errors at `dt` and `dt/2` against `μ(t) = μ₀ e^{−γt}` for an
/// isotropic body (`γ = 1`, `μ₀ = (1, 2, 3)`, `t = 2`).
pub fn rk4_order_ratio(dt: f64) -> Result<f64> {
    let gamma = 1.0;
    let t_final = 2.0;
    let spec = SystemSpec::diagonal([1.0, 1.0, 1.0], gamma)?;
    let field = LpjField::new(&spec)?;
    let mu0 = CoalgebraVector::new(1.0, 2.0, 3.0);
    let exact = mu0 * (-gamma * t_final).exp();
    let error = |h: f64| -> Result<f64> {
        let n = (t_final / h).round() as usize;
        let traj = integrate(&field, CoContactState::new(mu0, 0.0), h, n, Method::Rk4)?;
        Ok((traj.states[n].mu - exact).norm())
    };
    Ok(error(dt)? / error(dt / 2.0)?)
}

fn reduction_checks(rng: &mut ChaCha8Rng, out: &mut Vec<Check>) -> Result<()> {
    let dt = 1e-3;
    let rb = scenarios::scenario("damped-rigid-body")?;
    let eph = integrate(&EphField::new(&rb.spec)?, rb.velocity, dt, 5000, Method::Rk4)?;
    let lpj = integrate(&LpjField::new(&rb.spec)?, rb.momentum(), dt, 5000, Method::Rk4)?;
    let equiv = max_of(eph.states.iter().zip(&lpj.states).map(|(v, m)| {
        let mapped = models::legendre(&rb.spec, v);
        (mapped.mu - m.mu).norm().max((mapped.z - m.z).abs())
    }));
    out.push(Check::new("reduction.eph_lpj_equivalence", equiv, 1e-6));

    let unreduced = integrate_with_reconstruction(
        &UnreducedHamiltonianField::new(&rb.spec)?,
        rb.full_momentum(),
        dt,
        5000,
        LieMethod::Rkmk4,
    )?;
    let commute = max_of(
        unreduced
            .states
            .iter()
            .zip(&lpj.states)
            .map(|(u, m)| (u.body.mu - m.mu).norm().max((u.body.z - m.z).abs())),
    );
    out.push(Check::new("reduction.unreduced_lpj_commutation", commute, 1e-6));

    let top = scenarios::scenario("heavy-top")?;
    let n = 5000;
    let full = integrate_with_reconstruction(
        &UnreducedHerglotzField(&top.spec),
        FullState::new(top.g0, top.velocity),
        dt,
        n,
        LieMethod::Rkmk4,
    )?;
    let reduced = integrate(&EphExtField(&top.spec), top.extended_velocity(), dt, n, Method::Rk4)?;
    let semidirect = max_of(full.states.iter().zip(&reduced.states).map(|(u, r)| {
        let alpha = coadjoint_group_action(&u.g.inverse(), &top.spec.alpha0());
        (u.body.xi - r.base.xi).norm().max((u.body.z - r.base.z).abs()).max((alpha - r.alpha).norm())
    }));
    out.push(Check::new("reduction.semidirect_equivalence", semidirect, 1e-6));

    let mut roundtrip = 0.0f64;
    let mut gradient = 0.0f64;
    for _ in 0..50 {
        let spec = random_spec(rng, true)?;
        let v = ContactState::new(AlgebraVector::from(random_vector(rng, 3.0)), rng.random_range(-3.0..=3.0))
            .with_alpha(CoalgebraVector::from(random_vector(rng, 3.0)));
        let back = models::inverse_legendre_ext(&spec, &models::legendre_ext(&spec, &v));
        roundtrip = roundtrip.max((back.base.xi - v.base.xi).norm() / v.base.xi.norm().max(1.0));
        let m = models::legendre_ext(&spec, &v);
        let num = models::numerical_hamiltonian_gradient(&spec, &m);
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
        let dmu = models::dh_dmu(&spec, &m);
        let dal = models::dh_dalpha(&spec, &m);
        for i in 0..3 {
            gradient = gradient.max(rel(num.first[i], dmu[i])).max(rel(num.alpha[i], dal[i]));
        }
        gradient = gradient.max(rel(num.z, models::dh_dz(&spec, &m)));
    }
    out.push(Check::new("reduction.legendre_roundtrip", roundtrip, 1e-12));
    out.push(Check::new("reduction.hamiltonian_gradient", gradient, 1e-6));
    Ok(())
}
