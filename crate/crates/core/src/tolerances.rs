//! Numerical tolerances and iteration caps shared across the crate.
//!
//! Every threshold used by the solvers and the verification suites lives
//! here so that tests and production code agree on one number.

/// Accuracy of the closed-form projections (singleton, half-space, ball).
pub const PROJ_CLOSED_FORM: f64 = 1e-10;

/// Accuracy of the iterative projections (ellipsoid, polytope, level set).
pub const PROJ_ITERATIVE: f64 = 1e-8;

/// Slack applied to membership tests.
pub const MEMBERSHIP: f64 = 1e-9;

/// Dead-band around zero inside which a state is classified `OnBarrier`.
pub const BARRIER_DEADBAND: f64 = 1e-9;

/// Residual allowed for points produced by the boundary-to-PBS map.
pub const PBS: f64 = 1e-7;

/// Allowed level-function value `|F(p)|` for a point to count as on the boundary.
pub const ON_BOUNDARY: f64 = 1e-6;

/// Central finite-difference step.
pub const FD_STEP: f64 = 1e-6;

pub const NEWTON_MAX_ITER: usize = 200;

pub const GRADIENT_MAX_ITER: usize = 10_000;

/// Bisection steps used when casting rays onto a level-set boundary.
pub const RAY_BISECTION_STEPS: usize = 80;
