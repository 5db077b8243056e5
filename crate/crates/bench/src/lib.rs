//! Fixtures shared by the criterion benches.

use herglotz_core::jacobi::{BracketPoint, Observable, Polynomial};
use herglotz_core::{CoalgebraVector, Scenario};

pub fn damped_rigid_body() -> Scenario {
    herglotz_core::scenarios::scenario("damped-rigid-body").expect("registered scenario")
}

pub fn heavy_top() -> Scenario {
    herglotz_core::scenarios::scenario("heavy-top").expect("registered scenario")
}

/// Two fixed cubic observables on `(μ, z, α)` and a point to evaluate them at.
pub fn bracket_inputs() -> (Observable, Observable, BracketPoint) {
    let f = Polynomial::new(vec![(0.7, [1, 1, 0, 1, 0, 0, 0]), (-1.2, [0, 0, 2, 0, 1, 0, 0])]).observable();
    let g = Polynomial::new(vec![(0.4, [0, 2, 0, 0, 0, 1, 0]), (1.1, [1, 0, 0, 0, 0, 0, 2])]).observable();
    let p = BracketPoint::extended(CoalgebraVector::new(0.3, -1.2, 2.0), 0.5, CoalgebraVector::new(0.0, 0.6, 0.8));
    (f, g, p)
}
