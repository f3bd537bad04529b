//! Saddle-point feedback strategies for the capture and attack subgames, and
//! the heuristic policies used to probe them.
//!
//! In the capture region both players head for the optimal capture point
//! `x⋆`, the point of the Apollonius sphere closest to the target; the value
//! is the barrier value itself. In the attack region both head for the
//! optimal attack point `x†`, the minimizer of
//! `φ(z) = −‖z − x_P‖ + ‖z − x_E‖/γ` over the part of the target the attacker
//! reaches first.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::convex_sets::TargetSet;
use crate::error::{Error, Result};
use crate::game::{barrier, BarrierResult, GameConfig, GameState, Region};
use crate::tolerances;
use crate::Point;

/// Optimal play in the capture region.
#[derive(Clone, Debug, PartialEq)]
pub struct CapturePlan {
    pub x_star: Point,
    /// `V_c = ‖α − proj_Ω(α)‖ − β`, the distance of `x⋆` from the target.
    pub value: f64,
    pub dir_p: Point,
    pub dir_e: Point,
}

/// Optimal play in the attack region.
#[derive(Clone, Debug, PartialEq)]
pub struct AttackPlan {
    pub x_dagger: Point,
    /// `φ(x†)`; non-positive, zero only on the barrier.
    pub objective: f64,
    /// `−φ(x†)`: the defender's remaining distance to `x†` when the attacker
    /// arrives there, i.e. the attack-game payoff under optimal play.
    pub value: f64,
    pub dir_p: Point,
    pub dir_e: Point,
}

/// Settings of the multi-start attack-point solver.
#[derive(Clone, Debug, PartialEq)]
pub struct AttackOptions {
    /// Random feasible starting points, in addition to `proj_Ω(α)` and
    /// `proj_Ω(x_E)`.
    pub random_starts: usize,
    pub seed: u64,
    /// Relative step-length tolerance of the projected-gradient iteration.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for AttackOptions {
    fn default() -> Self {
        Self {
            random_starts: 8,
            seed: 0,
            tol: 1e-12,
            max_iter: tolerances::GRADIENT_MAX_ITER,
        }
    }
}

/// Capture-game plan: `x⋆ = α − β ĝ` with `g = α − proj_Ω(α)`.
///
/// Accepts capture-region and on-barrier states.
pub fn capture_plan(cfg: &GameConfig, s: &GameState, target: &TargetSet) -> Result<CapturePlan> {
    let b = barrier(cfg, s, target)?;
    capture_plan_from(s, &b)
}

fn capture_plan_from(s: &GameState, b: &BarrierResult) -> Result<CapturePlan> {
    if b.region == Region::Attack {
        return Err(Error::WrongRegion {
            expected: Region::Capture,
            found: b.region,
            value: b.value,
        });
    }
    let alpha = &b.apollonius.alpha;
    let beta = b.apollonius.beta;
    if beta <= 0.0 {
        return Err(Error::Degenerate("players coincide"));
    }
    let g = alpha - &b.projection;
    let g_norm = g.norm();
    if g_norm <= 0.0 {
        return Err(Error::Degenerate("Apollonius center lies in the target"));
    }
    let x_star = alpha - &g * (beta / g_norm);
    let dir_p = unit(&(&x_star - &s.x_p))?;
    let dir_e = unit(&(&x_star - &s.x_e))?;
    Ok(CapturePlan {
        x_star,
        value: g_norm - beta,
        dir_p,
        dir_e,
    })
}

/// `∂V_c/∂(x_P, x_E) = (1 − γ²)⁻¹ [−γ² ĝ + γ ê ; ĝ − γ ê]` with
/// `ê = (x_E − x_P)/‖x_E − x_P‖`.
pub fn capture_value_gradient(cfg: &GameConfig, s: &GameState, target: &TargetSet) -> Result<Point> {
    let b = barrier(cfg, s, target)?;
    if b.region == Region::Attack {
        return Err(Error::WrongRegion {
            expected: Region::Capture,
            found: b.region,
            value: b.value,
        });
    }
    let g_hat = unit(&(&b.apollonius.alpha - &b.projection))?;
    let e_hat = unit(&(&s.x_e - &s.x_p))?;
    let gamma = cfg.gamma();
    let k = 1.0 - gamma * gamma;
    let d_p = (&e_hat * gamma - &g_hat * (gamma * gamma)) / k;
    let d_e = (&g_hat - &e_hat * gamma) / k;
    Ok(stack(&d_p, &d_e))
}

/// The attack-point objective `φ(z) = −‖z − x_P‖ + ‖z − x_E‖/γ`.
pub fn attack_objective(cfg: &GameConfig, s: &GameState, z: &Point) -> f64 {
    -(z - &s.x_p).norm() + (z - &s.x_e).norm() / cfg.gamma()
}

/// Attack-game plan with default solver settings.
pub fn attack_plan(cfg: &GameConfig, s: &GameState, target: &TargetSet) -> Result<AttackPlan> {
    attack_plan_with(cfg, s, target, &AttackOptions::default())
}

/// Attack-game plan.
///
/// `x†` minimizes `φ` over `cl(𝒜) ∩ Ω`. Projected gradient descent
/// (Barzilai-Borwein steps with Armijo backtracking) is started from
/// `proj_Ω(α)`, `proj_Ω(x_E)` and `opts.random_starts` seeded points of the
/// Apollonius ball, each first moved into the intersection; each run must pass a
/// feasibility and stationarity check and the best certified run wins, ties
/// going to the lexicographically smallest point.
///
/// When the attacker is already inside the target `x† = x_E`; its heading is
/// then taken directly away from the defender.
pub fn attack_plan_with(
    cfg: &GameConfig,
    s: &GameState,
    target: &TargetSet,
    opts: &AttackOptions,
) -> Result<AttackPlan> {
    let b = barrier(cfg, s, target)?;
    attack_plan_from(cfg, s, target, &b, opts)
}

fn attack_plan_from(
    cfg: &GameConfig,
    s: &GameState,
    target: &TargetSet,
    b: &BarrierResult,
    opts: &AttackOptions,
) -> Result<AttackPlan> {
    if b.region != Region::Attack {
        return Err(Error::WrongRegion {
            expected: Region::Attack,
            found: b.region,
            value: b.value,
        });
    }
    if target.contains(&s.x_e)? {
        let objective = attack_objective(cfg, s, &s.x_e);
        let dir_p = unit(&(&s.x_e - &s.x_p))?;
        return Ok(AttackPlan {
            x_dagger: s.x_e.clone(),
            objective,
            value: -objective,
            dir_e: dir_p.clone(),
            dir_p,
        });
    }

    let problem = AttackProblem {
        cfg,
        s,
        target,
        alpha: &b.apollonius.alpha,
        beta: b.apollonius.beta,
    };

    // proj_Ω(α) lies in the open Apollonius ball whenever B < 0.
    let anchor = &b.projection;
    let mut starts = vec![anchor.clone(), problem.make_feasible(&s.x_e, anchor)?];
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.random_starts {
        let u = problem.random_point_in_ball(&mut rng);
        starts.push(problem.make_feasible(&u, anchor)?);
    }

    let runs: Vec<Result<(Point, f64)>> = starts.par_iter().map(|z| problem.solve_from(z, opts)).collect();
    let mut best: Option<(Point, f64)> = None;
    let mut last_err = None;
    for run in runs {
        match run {
            Ok((z, f)) => {
                let better = match &best {
                    None => true,
                    Some((bz, bf)) => {
                        let tie = 1e-14 * (1.0 + bf.abs());
                        f < bf - tie || ((f - bf).abs() <= tie && lexicographic_less(&z, bz))
                    }
                };
                if better {
                    best = Some((z, f));
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    let (x_dagger, objective) = match best {
        Some(b) => b,
        None => return Err(last_err.unwrap_or(Error::EmptyFeasibleSet)),
    };
    let dir_p = unit(&(&x_dagger - &s.x_p))?;
    let dir_e = unit(&(&x_dagger - &s.x_e))?;
    Ok(AttackPlan {
        x_dagger,
        objective,
        value: -objective,
        dir_p,
        dir_e,
    })
}

/// `∂V_a/∂(x_P, x_E) = [−(x† − x_P)/‖x† − x_P‖ ; (x† − x_E)/(γ ‖x† − x_E‖)]`
/// for the payoff-sign value `V_a = −φ(x†)`.
pub fn attack_value_gradient(cfg: &GameConfig, s: &GameState, target: &TargetSet) -> Result<Point> {
    let plan = attack_plan(cfg, s, target)?;
    attack_value_gradient_from(cfg, s, &plan.x_dagger)
}

pub(crate) fn attack_value_gradient_from(cfg: &GameConfig, s: &GameState, x_dagger: &Point) -> Result<Point> {
    let to_p = unit(&(x_dagger - &s.x_p))?;
    let to_e = unit(&(x_dagger - &s.x_e))?;
    Ok(stack(&(-to_p), &(to_e / cfg.gamma())))
}

struct AttackProblem<'a> {
    cfg: &'a GameConfig,
    s: &'a GameState,
    target: &'a TargetSet,
    alpha: &'a Point,
    beta: f64,
}

impl AttackProblem<'_> {
    fn objective(&self, z: &Point) -> f64 {
        attack_objective(self.cfg, self.s, z)
    }

    fn gradient(&self, z: &Point) -> Point {
        let to_p = z - &self.s.x_p;
        let to_e = z - &self.s.x_e;
        let np = to_p.norm();
        let ne = to_e.norm();
        let mut g = Point::zeros(z.len());
        if np > 0.0 {
            g -= to_p / np;
        }
        if ne > 0.0 {
            g += to_e / (ne * self.cfg.gamma());
        }
        g
    }

    /// Moves a point into `cl(𝒜) ∩ Ω`: project onto `Ω`, then, if that
    /// leaves the Apollonius ball, pull back along the segment towards
    /// `anchor`, a point of the intersection. Both ends lie in `Ω`, so the
    /// segment does too.
    fn make_feasible(&self, x: &Point, anchor: &Point) -> Result<Point> {
        let p = self.target.project(x)?;
        if (&p - self.alpha).norm() <= self.beta {
            return Ok(p);
        }
        // Largest λ in [0, 1] with ‖anchor + λ(p − anchor) − α‖ <= β.
        let d = &p - anchor;
        let w = anchor - self.alpha;
        let a = d.norm_squared();
        let half_b = w.dot(&d);
        let c = w.norm_squared() - self.beta * self.beta;
        if a <= 0.0 || c > 0.0 {
            return Ok(anchor.clone());
        }
        let lambda = ((-half_b + (half_b * half_b - a * c).max(0.0).sqrt()) / a).clamp(0.0, 1.0);
        Ok(anchor + d * lambda)
    }

    fn random_point_in_ball(&self, rng: &mut ChaCha8Rng) -> Point {
        let n = self.alpha.len();
        loop {
            let u = Point::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
            if u.norm_squared() <= 1.0 {
                return self.alpha + u * self.beta;
            }
        }
    }

    /// Monotone projected gradient from a feasible start. Because
    /// `cl(𝒜) = {φ <= 0}`, a descent sequence started in `cl(𝒜)` stays there,
    /// so the iteration only projects onto `Ω`.
    fn solve_from(&self, start: &Point, opts: &AttackOptions) -> Result<(Point, f64)> {
        const ARMIJO: f64 = 1e-4;
        let mut z = start.clone();
        let mut f = self.objective(&z);
        let mut g = self.gradient(&z);
        let mut step = self.beta.max(1e-6) / g.norm().max(1e-12);
        for _ in 0..opts.max_iter {
            let mut s = step;
            let mut halvings = 0;
            let (z_new, f_new) = loop {
                let trial = self.target.project(&(&z - &g * s))?;
                let f_trial = self.objective(&trial);
                let decrease = g.dot(&(&trial - &z));
                if f_trial <= f + ARMIJO * decrease || halvings >= 60 {
                    break (trial, f_trial);
                }
                s *= 0.5;
                halvings += 1;
            };
            if f_new > f {
                // Backtracking exhausted at round-off level.
                break;
            }
            let d = &z_new - &z;
            let moved = d.norm();
            let g_new = self.gradient(&z_new);
            let y = &g_new - &g;
            let sy = d.dot(&y);
            step = if sy > 0.0 { d.norm_squared() / sy } else { 2.0 * s };
            step = step.clamp(1e-12, 1e12);
            z = z_new;
            f = f_new;
            g = g_new;
            if moved <= opts.tol * (1.0 + z.norm()) {
                break;
            }
        }

        // The gradient mapping divided by the local Lipschitz constant of ∇φ
        // estimates the distance to a stationary point; near x_E the raw
        // mapping is dominated by the 1/‖z − x_E‖ curvature.
        let scale = 1.0 + z.norm();
        let lipschitz = 1.0 / (&z - &self.s.x_p).norm() + 1.0 / (self.cfg.gamma() * (&z - &self.s.x_e).norm());
        let stationarity = (&z - self.target.project(&(&z - &g))?).norm() / lipschitz.max(1.0);
        let infeasibility = ((&z - self.alpha).norm() - self.beta)
            .max(0.0)
            .max(self.target.distance(&z)?);
        if stationarity > 1e-8 * scale || infeasibility > tolerances::PROJ_ITERATIVE * scale {
            return Err(Error::SolverFailure {
                solver: "attack point",
                iterations: opts.max_iter,
                residual: stationarity.max(infeasibility),
            });
        }
        Ok((z, f))
    }
}

fn lexicographic_less(a: &Point, b: &Point) -> bool {
    for (x, y) in a.iter().zip(b.iter()) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    false
}

fn unit(v: &Point) -> Result<Point> {
    let n = v.norm();
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::Degenerate("direction of zero length"));
    }
    Ok(v / n)
}

fn stack(a: &Point, b: &Point) -> Point {
    Point::from_iterator(a.len() + b.len(), a.iter().chain(b.iter()).copied())
}

/// Which player a policy steers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    Defender,
    Attacker,
}

impl Role {
    pub fn name(self) -> &'static str {
        match self {
            Role::Defender => "defender",
            Role::Attacker => "attacker",
        }
    }
}

/// A feedback law for one player.
#[derive(Clone, Debug, PartialEq)]
pub enum Policy {
    /// Capture-game strategy when the barrier value is non-negative (within
    /// the dead-band), attack-game strategy otherwise.
    OptimalAuto,
    /// Head straight at the attacker (defender only).
    PurePursuit,
    /// Head straight at a fixed point (attacker only).
    DirectTo(Point),
    /// A uniformly random heading, redrawn every `hold` time units.
    RandomHeading { seed: u64, hold: f64 },
}

impl Policy {
    pub fn name(&self) -> &'static str {
        match self {
            Policy::OptimalAuto => "optimal",
            Policy::PurePursuit => "pure_pursuit",
            Policy::DirectTo(_) => "direct_to",
            Policy::RandomHeading { .. } => "random",
        }
    }

    /// Rejects policies that make no sense for `role`.
    pub fn check_role(&self, role: Role) -> Result<()> {
        let ok = match self {
            Policy::PurePursuit => role == Role::Defender,
            Policy::DirectTo(_) => role == Role::Attacker,
            Policy::OptimalAuto => true,
            Policy::RandomHeading { hold, .. } => *hold > 0.0,
        };
        if ok {
            Ok(())
        } else if let Policy::RandomHeading { .. } = self {
            Err(Error::InvalidParameter("random heading hold time must be positive".into()))
        } else {
            Err(Error::PolicyRoleMismatch {
                policy: self.name(),
                role: role.name(),
            })
        }
    }
}

/// Both players' optimal headings at a state, with the barrier evaluation
/// that selected them.
#[derive(Clone, Debug, PartialEq)]
pub struct OptimalControls {
    pub barrier: BarrierResult,
    pub dir_p: Point,
    pub dir_e: Point,
}

/// Evaluates the barrier once and returns the headings of the regime it
/// selects (on-barrier states use the capture side).
pub fn optimal_controls(
    cfg: &GameConfig,
    s: &GameState,
    target: &TargetSet,
    opts: &AttackOptions,
) -> Result<OptimalControls> {
    let b = barrier(cfg, s, target)?;
    let (dir_p, dir_e) = if b.region == Region::Attack {
        let plan = attack_plan_from(cfg, s, target, &b, opts)?;
        (plan.dir_p, plan.dir_e)
    } else {
        let plan = capture_plan_from(s, &b)?;
        (plan.dir_p, plan.dir_e)
    };
    Ok(OptimalControls {
        barrier: b,
        dir_p,
        dir_e,
    })
}

/// Unit heading chosen by `policy` for the player `role`.
pub fn policy_step(
    policy: &Policy,
    role: Role,
    cfg: &GameConfig,
    s: &GameState,
    target: &TargetSet,
) -> Result<Point> {
    policy_step_with(policy, role, cfg, s, target, &AttackOptions::default())
}

pub fn policy_step_with(
    policy: &Policy,
    role: Role,
    cfg: &GameConfig,
    s: &GameState,
    target: &TargetSet,
    opts: &AttackOptions,
) -> Result<Point> {
    policy.check_role(role)?;
    cfg.check_state(s)?;
    match policy {
        Policy::OptimalAuto => {
            let c = optimal_controls(cfg, s, target, opts)?;
            Ok(match role {
                Role::Defender => c.dir_p,
                Role::Attacker => c.dir_e,
            })
        }
        Policy::PurePursuit => unit(&(&s.x_e - &s.x_p)),
        Policy::DirectTo(q) => {
            cfg.check_point(q)?;
            unit(&(q - &s.x_e))
        }
        Policy::RandomHeading { seed, hold } => Ok(random_heading(*seed, *hold, s.t, cfg.dim())),
    }
}

/// Deterministic random unit vector for the hold interval containing `t`.
fn random_heading(seed: u64, hold: f64, t: f64, dim: usize) -> Point {
    let interval = (t / hold).floor().max(0.0) as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(interval);
    loop {
        let u = Point::from_fn(dim, |_, _| rng.random_range(-1.0..1.0));
        let n = u.norm();
        if n > 1e-3 && n <= 1.0 {
            return u / n;
        }
    }
}
