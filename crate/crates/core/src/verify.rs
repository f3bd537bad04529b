//! Independent numerical oracles: finite-difference gradients, HJI
//! residuals, grid-search minimization of the attack objective, dense
//! sampling projections and barrier zero-crossings, plus the check suites
//! built from them.
//!
//! No oracle here calls the analytic quantity it is used to certify.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::barrier_geometry::{pbs_analytic, sample_pbs_analytic, sample_pbs_mesh};
use crate::convex_sets::{Ellipsoid, LevelSet, TargetSet};
use crate::error::{Error, Result};
use crate::game::{barrier, BarrierResult, GameConfig, GameState, Region};
use crate::strategies::{
    attack_objective, attack_plan, attack_value_gradient_from, capture_plan, capture_value_gradient,
};
use crate::tolerances;
use crate::Point;

/// Outcome of one named check over a batch of samples.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// The sample with the largest residual, flattened.
    pub worst_case: Vec<f64>,
    pub seed: u64,
}

impl CheckReport {
    /// Aggregates `(sample, residual)` pairs; the first of equal maxima wins.
    pub fn from_residuals(
        name: impl Into<String>,
        tolerance: f64,
        seed: u64,
        residuals: impl IntoIterator<Item = (Vec<f64>, f64)>,
    ) -> Self {
        let mut samples = 0;
        let mut max_residual = 0.0;
        let mut worst_case = Vec::new();
        for (state, r) in residuals {
            samples += 1;
            // NaN counts as a failure.
            if !(r <= max_residual) {
                max_residual = if r.is_nan() { f64::INFINITY } else { r };
                worst_case = state;
            }
        }
        Self {
            name: name.into(),
            samples,
            max_residual,
            tolerance,
            passed: samples > 0 && max_residual <= tolerance,
            worst_case,
            seed,
        }
    }
}

/// `⟨∂V/∂x, f(x, u_P⋆, u_E⋆)⟩` for the regime the state lies in.
///
/// States within `10 τ_B` of the barrier are rejected.
pub fn hji_residual(cfg: &GameConfig, s: &GameState, target: &TargetSet) -> Result<f64> {
    let b = barrier(cfg, s, target)?;
    if b.value.abs() <= 10.0 * tolerances::BARRIER_DEADBAND {
        return Err(Error::WrongRegion {
            expected: if b.value >= 0.0 { Region::Capture } else { Region::Attack },
            found: Region::OnBarrier,
            value: b.value,
        });
    }
    let (grad, dir_p, dir_e) = if b.value > 0.0 {
        let plan = capture_plan(cfg, s, target)?;
        (capture_value_gradient(cfg, s, target)?, plan.dir_p, plan.dir_e)
    } else {
        let plan = attack_plan(cfg, s, target)?;
        (attack_value_gradient_from(cfg, s, &plan.x_dagger)?, plan.dir_p, plan.dir_e)
    };
    let n = cfg.dim();
    let f_p = dir_p * cfg.v_p();
    let f_e = dir_e * cfg.v_e();
    Ok(grad.rows(0, n).dot(&f_p) + grad.rows(n, n).dot(&f_e))
}

/// Central-difference gradient of `value_fn` at `x`.
pub fn fd_gradient(value_fn: impl Fn(&Point) -> Result<f64>, x: &Point, step: f64) -> Result<Point> {
    if !(step > 0.0) {
        return Err(Error::InvalidParameter("finite-difference step must be positive".into()));
    }
    let mut grad = Point::zeros(x.len());
    let mut probe = x.clone();
    for i in 0..x.len() {
        probe[i] = x[i] + step;
        let up = value_fn(&probe)?;
        probe[i] = x[i] - step;
        let down = value_fn(&probe)?;
        probe[i] = x[i];
        grad[i] = (up - down) / (2.0 * step);
    }
    Ok(grad)
}

/// Best grid point of the attack objective.
#[derive(Clone, Debug, PartialEq)]
pub struct GridMinimum {
    pub point: Point,
    pub value: f64,
    /// Grid spacing along each axis.
    pub spacing: f64,
}

/// Regular grid over the bounding box of `cl(𝒜)`.
struct PhiGrid<'a> {
    cfg: &'a GameConfig,
    s: &'a GameState,
    target: &'a TargetSet,
    alpha: Point,
    beta: f64,
    spacing: f64,
    resolution: usize,
}

impl<'a> PhiGrid<'a> {
    fn new(cfg: &'a GameConfig, s: &'a GameState, target: &'a TargetSet, resolution: usize) -> Result<Self> {
        let n = cfg.dim();
        if n > 3 {
            return Err(Error::InvalidParameter(format!(
                "grid oracle supports dimensions up to 3, got {n}"
            )));
        }
        if resolution < 2 {
            return Err(Error::InvalidParameter("grid resolution must be at least 2".into()));
        }
        let b = barrier(cfg, s, target)?;
        if b.region != Region::Attack {
            return Err(Error::WrongRegion {
                expected: Region::Attack,
                found: b.region,
                value: b.value,
            });
        }
        let beta = b.apollonius.beta;
        Ok(Self {
            cfg,
            s,
            target,
            alpha: b.apollonius.alpha,
            beta,
            spacing: 2.0 * beta / (resolution - 1) as f64,
            resolution,
        })
    }

    fn len(&self) -> usize {
        self.resolution.pow(self.cfg.dim() as u32)
    }

    /// `φ` at grid node `flat` when the node is feasible.
    fn feasible(&self, flat: usize) -> Option<(f64, Point)> {
        let mut idx = flat;
        let z = Point::from_fn(self.cfg.dim(), |i, _| {
            let k = idx % self.resolution;
            idx /= self.resolution;
            self.alpha[i] - self.beta + k as f64 * self.spacing
        });
        if (&z - &self.alpha).norm() > self.beta {
            return None;
        }
        match self.target.contains(&z) {
            Ok(true) => Some((attack_objective(self.cfg, self.s, &z), z)),
            _ => None,
        }
    }
}

/// Exhaustive minimization of `φ` over a `resolution^n` grid on the bounding
/// box of `cl(𝒜)`, keeping points inside both `cl(𝒜)` and `Ω`. A singleton
/// target is evaluated at its point, which no grid would hit.
pub fn grid_minimize_phi(cfg: &GameConfig, s: &GameState, target: &TargetSet, resolution: usize) -> Result<GridMinimum> {
    let grid = PhiGrid::new(cfg, s, target, resolution)?;
    let spacing = grid.spacing;
    if let TargetSet::Singleton(c) = target {
        return Ok(GridMinimum {
            point: c.clone(),
            value: attack_objective(cfg, s, c),
            spacing,
        });
    }
    let best = (0..grid.len())
        .into_par_iter()
        .filter_map(|flat| grid.feasible(flat).map(|(v, z)| (flat, v, z)))
        .reduce_with(|a, b| if b.1 < a.1 || (b.1 == a.1 && b.0 < a.0) { b } else { a });
    match best {
        Some((_, value, point)) => Ok(GridMinimum { point, value, spacing }),
        None => Err(Error::EmptyFeasibleSet),
    }
}

/// Distance from `x` to the nearest feasible grid node whose objective is
/// within `slack` of the grid minimum.
///
/// At a boundary minimizer `φ` grows only quadratically along `∂Ω`, so the
/// single best node can sit several cells away from the true minimizer; the
/// near-optimal set does not have that problem.
pub fn grid_near_optimal_distance(
    cfg: &GameConfig,
    s: &GameState,
    target: &TargetSet,
    resolution: usize,
    x: &Point,
    slack: f64,
) -> Result<f64> {
    let grid = PhiGrid::new(cfg, s, target, resolution)?;
    if let TargetSet::Singleton(c) = target {
        return Ok((c - x).norm());
    }
    let nodes: Vec<(f64, Point)> = (0..grid.len()).into_par_iter().filter_map(|f| grid.feasible(f)).collect();
    let best = nodes.iter().map(|(v, _)| *v).fold(f64::INFINITY, f64::min);
    if !best.is_finite() {
        return Err(Error::EmptyFeasibleSet);
    }
    Ok(nodes
        .iter()
        .filter(|(v, _)| *v <= best + slack)
        .map(|(_, z)| (z - x).norm())
        .fold(f64::INFINITY, f64::min))
}

/// Projection onto an ellipsoid by dense sampling of its surface followed by
/// repeated local zooming around the best sample. Two and three dimensions.
pub fn dense_projection_ellipsoid(e: &Ellipsoid, x: &Point, resolution: usize) -> Result<Point> {
    let n = e.dim();
    if n != 2 && n != 3 {
        return Err(Error::InvalidParameter("dense projection supports dimensions 2 and 3".into()));
    }
    if e.level(x) <= 0.0 {
        return Ok(x.clone());
    }
    let res = resolution.max(8);
    let surface = |theta: f64, phi: f64| -> Point {
        let local = if n == 2 {
            Point::from_vec(vec![theta.cos(), theta.sin()])
        } else {
            Point::from_vec(vec![phi.sin() * theta.cos(), phi.sin() * theta.sin(), phi.cos()])
        };
        let scaled = local.component_mul(e.semi_axes());
        let world = match e.rotation() {
            Some(r) => r * scaled,
            None => scaled,
        };
        e.center() + world
    };
    let dist = |theta: f64, phi: f64| (surface(theta, phi) - x).norm();

    let (mut theta0, mut phi0) = (0.0, 0.5 * PI);
    let (mut theta_half, mut phi_half) = (PI, if n == 2 { 0.0 } else { 0.5 * PI });
    for _ in 0..60 {
        let mut best = (f64::INFINITY, theta0, phi0);
        let phi_steps = if n == 2 { 1 } else { res };
        for i in 0..res {
            let theta = theta0 - theta_half + 2.0 * theta_half * i as f64 / (res - 1) as f64;
            for j in 0..phi_steps {
                let phi = if n == 2 {
                    phi0
                } else {
                    (phi0 - phi_half + 2.0 * phi_half * j as f64 / (res - 1) as f64).clamp(0.0, PI)
                };
                let d = dist(theta, phi);
                if d < best.0 {
                    best = (d, theta, phi);
                }
            }
        }
        theta0 = best.1;
        phi0 = best.2;
        theta_half *= 4.0 / res as f64;
        phi_half *= 4.0 / res as f64;
        if theta_half < 1e-15 {
            break;
        }
    }
    Ok(surface(theta0, phi0))
}

/// Point where the barrier (defender fixed at `x_p0`) changes sign along the
/// ray `anchor + t·direction`, `t > 0`, by bracket doubling and bisection.
/// The barrier must be negative at `anchor`.
pub fn barrier_zero_on_ray(
    cfg: &GameConfig,
    x_p0: &Point,
    target: &TargetSet,
    anchor: &Point,
    direction: &Point,
) -> Result<Point> {
    let u = direction / direction.norm();
    let b_at = |t: f64| -> Result<f64> {
        let z = anchor + &u * t;
        Ok(barrier(cfg, &GameState::new(x_p0.clone(), z), target)?.value)
    };
    if b_at(0.0)? >= 0.0 {
        return Err(Error::InvalidParameter("barrier must be negative at the ray anchor".into()));
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut doublings = 0;
    while b_at(hi)? < 0.0 {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 64 {
            return Err(Error::RayCast);
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if b_at(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(anchor + u * (0.5 * (lo + hi)))
}

/// Random states in the requested region, drawn uniformly in a box of
/// half-width 3 around the target's anchor point. States within `10 τ_B` of
/// the barrier, with the attacker already in the target, or with nearly
/// coincident players are rejected.
pub fn sample_states(
    cfg: &GameConfig,
    target: &TargetSet,
    region: Region,
    count: usize,
    seed: u64,
) -> Result<Vec<GameState>> {
    sample_states_where(cfg, target, region, count, seed, |_| true)
}

/// [`sample_states`] with an extra acceptance test on the barrier.
pub fn sample_states_where(
    cfg: &GameConfig,
    target: &TargetSet,
    region: Region,
    count: usize,
    seed: u64,
    accept: impl Fn(&BarrierResult) -> bool,
) -> Result<Vec<GameState>> {
    let n = cfg.dim();
    let center = target.anchor();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut states = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while states.len() < count {
        attempts += 1;
        if attempts > 10_000 * count.max(1) {
            return Err(Error::InvalidParameter(format!(
                "could not sample {count} states in {}",
                region.name()
            )));
        }
        let x_p = &center + Point::from_fn(n, |_, _| rng.random_range(-3.0..3.0));
        let x_e = &center + Point::from_fn(n, |_, _| rng.random_range(-3.0..3.0));
        if (&x_p - &x_e).norm() < 1e-2 || target.contains(&x_e)? {
            continue;
        }
        let s = GameState::new(x_p, x_e);
        let b = barrier(cfg, &s, target)?;
        if b.value.abs() <= 10.0 * tolerances::BARRIER_DEADBAND || b.region != region || !accept(&b) {
            continue;
        }
        states.push(s);
    }
    Ok(states)
}

/// Value of the regime a state lies in: `V_c` on the capture side, the
/// payoff-sign `V_a` on the attack side.
fn regime_value(cfg: &GameConfig, target: &TargetSet, region: Region, x: &Point) -> Result<f64> {
    let s = GameState::from_stacked(x, 0.0);
    match region {
        Region::Attack => Ok(attack_plan(cfg, &s, target)?.value),
        _ => Ok(capture_plan(cfg, &s, target)?.value),
    }
}

/// Names accepted by [`run_suite`].
pub const SUITES: [&str; 5] = ["hji", "gradients", "pbs", "attack_point", "all"];

pub const DEFAULT_SEED: u64 = 20_240_521;

/// The three-dimensional targets exercised by the suites.
pub fn suite_targets() -> Vec<(&'static str, TargetSet, bool)> {
    vec![
        (
            "ball",
            TargetSet::ball(Point::zeros(3), 1.0).expect("valid ball"),
            true,
        ),
        (
            "half_space",
            TargetSet::half_space(Point::from_vec(vec![0.0, 0.0, 1.0]), 0.0).expect("valid half-space"),
            true,
        ),
        (
            "ellipsoid",
            TargetSet::ellipsoid(Point::zeros(3), Point::from_vec(vec![0.8, 0.4, 0.4])).expect("valid ellipsoid"),
            false,
        ),
    ]
}

fn flatten(s: &GameState) -> Vec<f64> {
    s.stacked().iter().copied().collect()
}

fn region_tag(region: Region) -> &'static str {
    match region {
        Region::Capture => "capture",
        Region::Attack => "attack",
        Region::OnBarrier => "barrier",
    }
}

/// HJI residuals at `count` random states per regime and target.
pub fn hji_suite(seed: u64, count: usize) -> Result<Vec<CheckReport>> {
    let cfg = GameConfig::new(0.5, 1.0, 3)?;
    let mut reports = Vec::new();
    for (k, (name, target, closed_form)) in suite_targets().into_iter().enumerate() {
        let tolerance = if closed_form { 1e-8 } else { 1e-5 };
        for (r, region) in [Region::Capture, Region::Attack].into_iter().enumerate() {
            let sample_seed = seed.wrapping_add(100 * k as u64 + r as u64);
            let states = sample_states(&cfg, &target, region, count, sample_seed)?;
            let residuals: Vec<(Vec<f64>, f64)> = states
                .par_iter()
                .map(|s| {
                    let r = hji_residual(&cfg, s, &target).map(f64::abs).unwrap_or(f64::INFINITY);
                    (flatten(s), r)
                })
                .collect();
            reports.push(CheckReport::from_residuals(
                format!("hji/{}/{name}", region_tag(region)),
                tolerance,
                sample_seed,
                residuals,
            ));
        }
    }
    Ok(reports)
}

/// Analytic value gradients against central differences of the value.
pub fn gradient_suite(seed: u64, count: usize) -> Result<Vec<CheckReport>> {
    let cfg = GameConfig::new(0.5, 1.0, 3)?;
    let mut reports = Vec::new();
    for (k, (name, target, _)) in suite_targets().into_iter().enumerate() {
        for (r, region) in [Region::Capture, Region::Attack].into_iter().enumerate() {
            let sample_seed = seed.wrapping_add(1000 + 100 * k as u64 + r as u64);
            let states = sample_states(&cfg, &target, region, count, sample_seed)?;
            let residuals: Vec<(Vec<f64>, f64)> = states
                .par_iter()
                .map(|s| {
                    let diff = (|| -> Result<f64> {
                        let analytic = match region {
                            Region::Attack => {
                                let plan = attack_plan(&cfg, s, &target)?;
                                attack_value_gradient_from(&cfg, s, &plan.x_dagger)?
                            }
                            _ => capture_value_gradient(&cfg, s, &target)?,
                        };
                        let numeric = fd_gradient(
                            |x| regime_value(&cfg, &target, region, x),
                            &s.stacked(),
                            tolerances::FD_STEP,
                        )?;
                        Ok((analytic - numeric).amax())
                    })();
                    (flatten(s), diff.unwrap_or(f64::INFINITY))
                })
                .collect();
            reports.push(CheckReport::from_residuals(
                format!("gradients/{}/{name}", region_tag(region)),
                1e-4,
                sample_seed,
                residuals,
            ));
        }
    }
    Ok(reports)
}

/// Planar closed-form targets used by the PBS and attack-point checks.
fn planar_targets() -> Vec<(&'static str, TargetSet, Point)> {
    vec![
        (
            "singleton",
            TargetSet::singleton(Point::zeros(2)),
            Point::from_vec(vec![1.0, 0.0]),
        ),
        (
            "half_space",
            TargetSet::half_space(Point::from_vec(vec![0.0, 1.0]), 0.0).expect("valid half-space"),
            Point::from_vec(vec![0.0, 1.0]),
        ),
        (
            "ball",
            TargetSet::ball(Point::zeros(2), 1.0).expect("valid ball"),
            Point::from_vec(vec![2.0, 0.0]),
        ),
    ]
}

/// Closed-form PBS points checked with the barrier, and barrier
/// zero-crossings checked with the closed-form residual, followed by
/// [`pbs_map_suite`].
pub fn pbs_suite(seed: u64, count: usize) -> Result<Vec<CheckReport>> {
    let mut reports = pbs_zeroing_suite(seed, count)?;
    reports.extend(pbs_map_suite(seed, 100, 32)?);
    Ok(reports)
}

/// `count` closed-form PBS points per planar target checked with the
/// barrier, and `count` barrier zero-crossings checked with the closed-form
/// residual.
pub fn pbs_zeroing_suite(seed: u64, count: usize) -> Result<Vec<CheckReport>> {
    let cfg = GameConfig::new(0.5, 1.0, 2)?;
    let mut reports = Vec::new();
    for (k, (name, target, x_p0)) in planar_targets().into_iter().enumerate() {
        let mesh = sample_pbs_analytic(&target, &x_p0, &cfg, count)?;
        let residuals: Vec<(Vec<f64>, f64)> = mesh
            .samples
            .iter()
            .map(|s| match s {
                Some(s) => {
                    let b = barrier(&cfg, &GameState::new(x_p0.clone(), s.pbs_point.clone()), &target)
                        .map(|b| b.value.abs())
                        .unwrap_or(f64::INFINITY);
                    (s.pbs_point.iter().copied().collect(), b)
                }
                None => (Vec::new(), f64::INFINITY),
            })
            .collect();
        reports.push(CheckReport::from_residuals(
            format!("pbs/analytic_points/{name}"),
            1e-9,
            seed,
            residuals,
        ));

        // Rays from inside the target. For the half-space only rays with
        // normal component above γ reach the barrier.
        let sample_seed = seed.wrapping_add(k as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(sample_seed);
        let anchor = match &target {
            TargetSet::Singleton(c) => c.clone(),
            other => other.anchor(),
        };
        let mut directions = Vec::with_capacity(count);
        while directions.len() < count {
            let angle = rng.random_range(0.0..2.0 * PI);
            let u = Point::from_vec(vec![angle.cos(), angle.sin()]);
            if let TargetSet::HalfSpace(h) = &target {
                if h.normal().dot(&u) < cfg.gamma() + 0.05 {
                    continue;
                }
            }
            directions.push(u);
        }
        let residuals: Vec<(Vec<f64>, f64)> = directions
            .par_iter()
            .map(|u| {
                let r = barrier_zero_on_ray(&cfg, &x_p0, &target, &anchor, u)
                    .and_then(|z| Ok((pbs_analytic(&target, &x_p0, &cfg, &z)?.abs(), z)));
                match r {
                    Ok((r, z)) => (z.iter().copied().collect(), r),
                    Err(_) => (u.iter().copied().collect(), f64::INFINITY),
                }
            })
            .collect();
        reports.push(CheckReport::from_residuals(
            format!("pbs/zero_crossings/{name}"),
            1e-9,
            sample_seed,
            residuals,
        ));
    }

    Ok(reports)
}

/// Transformation map: a ball written as a level set, sampled at
/// `ball_points` boundary points and checked against the closed-form
/// residual, then barrier residuals on ellipsoid and quartic-cube meshes of
/// the given resolution.
pub fn pbs_map_suite(seed: u64, ball_points: usize, resolution: usize) -> Result<Vec<CheckReport>> {
    let cfg = GameConfig::new(0.5, 1.0, 2)?;
    let mut reports = Vec::new();
    let ball_level = TargetSet::SmoothLevelSet(LevelSet::new(
        Point::zeros(2),
        |z: &Point| z.norm_squared() - 1.0,
        |z: &Point| z * 2.0,
    )?);
    let ball = TargetSet::ball(Point::zeros(2), 1.0)?;
    let x_p0 = Point::from_vec(vec![2.0, 0.5]);
    let mesh = sample_pbs_mesh(&ball_level, &x_p0, &cfg, ball_points)?;
    let residuals: Vec<(Vec<f64>, f64)> = mesh
        .samples
        .iter()
        .map(|s| match s {
            Some(s) => (
                s.pbs_point.iter().copied().collect(),
                pbs_analytic(&ball, &x_p0, &cfg, &s.pbs_point)
                    .map(f64::abs)
                    .unwrap_or(f64::INFINITY),
            ),
            None => (Vec::new(), f64::INFINITY),
        })
        .collect();
    reports.push(CheckReport::from_residuals("pbs/map/ball_level_set", 1e-8, seed, residuals));

    let cfg3 = GameConfig::new(0.5, 1.0, 3)?;
    let shapes = [
        (
            "ellipsoid",
            TargetSet::ellipsoid(Point::zeros(3), Point::from_vec(vec![0.8, 0.4, 0.4]))?,
            Point::from_vec(vec![-0.8, 0.0, 0.5]),
        ),
        (
            "quartic",
            TargetSet::SmoothLevelSet(LevelSet::superellipsoid(Point::zeros(3), Point::from_element(3, 1.0), 4.0)?),
            Point::from_vec(vec![1.5, 1.0, 1.2]),
        ),
    ];
    for (name, target, x_p0) in shapes {
        let mesh = sample_pbs_mesh(&target, &x_p0, &cfg3, resolution)?;
        let residuals: Vec<(Vec<f64>, f64)> = mesh
            .samples
            .par_iter()
            .map(|s| match s {
                Some(s) => (
                    s.pbs_point.iter().copied().collect(),
                    barrier(&cfg3, &GameState::new(x_p0.clone(), s.pbs_point.clone()), &target)
                        .map(|b| b.value.abs())
                        .unwrap_or(f64::INFINITY),
                ),
                None => (Vec::new(), f64::INFINITY),
            })
            .collect();
        reports.push(CheckReport::from_residuals(
            format!("pbs/map/{name}"),
            tolerances::PBS,
            seed,
            residuals,
        ));
    }
    Ok(reports)
}

/// Attack points against the grid oracle on planar ball and half-space
/// instances, two reports per target.
///
/// The distance report measures `x†` against the grid nodes within
/// `Lip(φ)·h√2` of the grid minimum, in units of the cell diagonal `h√2`;
/// `Lip(φ) = 1 + 1/γ`. The excess report is `φ(x†)` minus the grid value.
/// Instances are drawn with barrier depth at least two cell diagonals so
/// that `cl(𝒜) ∩ Ω` always contains grid nodes.
pub fn attack_point_suite(seed: u64, count: usize, resolution: usize) -> Result<Vec<CheckReport>> {
    let cfg = GameConfig::new(0.5, 1.0, 2)?;
    let lipschitz = 1.0 + 1.0 / cfg.gamma();
    let cell_of = |beta: f64| 2.0 * beta / (resolution.max(2) - 1) as f64 * 2f64.sqrt();
    let mut reports = Vec::new();
    for (k, (name, target, _)) in planar_targets().into_iter().skip(1).enumerate() {
        let sample_seed = seed.wrapping_add(2000 + k as u64);
        let states = sample_states_where(&cfg, &target, Region::Attack, count, sample_seed, |b| {
            -b.value >= 2.0 * cell_of(b.apollonius.beta)
        })?;
        let results: Vec<(Vec<f64>, f64, f64)> = states
            .par_iter()
            .map(|s| {
                let r = (|| -> Result<(f64, f64)> {
                    let plan = attack_plan(&cfg, s, &target)?;
                    let grid = grid_minimize_phi(&cfg, s, &target, resolution)?;
                    let cell = grid.spacing * 2f64.sqrt();
                    let d = grid_near_optimal_distance(&cfg, s, &target, resolution, &plan.x_dagger, lipschitz * cell)?;
                    Ok((d / cell, plan.objective - grid.value))
                })();
                match r {
                    Ok((d, excess)) => (flatten(s), d, excess),
                    Err(_) => (flatten(s), f64::INFINITY, f64::INFINITY),
                }
            })
            .collect();
        reports.push(CheckReport::from_residuals(
            format!("attack_point/distance_in_cells/{name}"),
            1.0,
            sample_seed,
            results.iter().map(|(s, d, _)| (s.clone(), *d)),
        ));
        reports.push(CheckReport::from_residuals(
            format!("attack_point/objective_excess/{name}"),
            1e-6,
            sample_seed,
            results.iter().map(|(s, _, e)| (s.clone(), e.max(0.0))),
        ));
    }
    Ok(reports)
}

/// Runs a named suite with the default sample counts.
pub fn run_suite(name: &str, seed: u64) -> Result<Vec<CheckReport>> {
    match name {
        "hji" => hji_suite(seed, 1000),
        "gradients" => gradient_suite(seed, 200),
        "pbs" => pbs_suite(seed, 500),
        "attack_point" => attack_point_suite(seed, 50, 400),
        "all" => {
            let mut all = Vec::new();
            for suite in ["hji", "gradients", "pbs", "attack_point"] {
                all.extend(run_suite(suite, seed)?);
            }
            Ok(all)
        }
        other => Err(Error::InvalidParameter(format!(
            "unknown suite '{other}' (expected one of {})",
            SUITES.join(", ")
        ))),
    }
}
