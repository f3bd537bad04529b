//! Closed-loop simulation of the game kinematics `ẋ_P = v_P u_P`,
//! `ẋ_E = v_E u_E` under feedback policies.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::convex_sets::TargetSet;
use crate::error::{Error, Result};
use crate::game::{barrier, check_termination, GameConfig, GameState, Region, Termination};
use crate::strategies::{optimal_controls, policy_step_with, AttackOptions, Policy, Role};
use crate::Point;

/// Everything needed to run one game.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub cfg: GameConfig,
    pub target: TargetSet,
    pub x_p0: Point,
    pub x_e0: Point,
    pub policy_p: Policy,
    pub policy_e: Policy,
    pub dt: f64,
    pub t_max: f64,
    pub capture_radius: f64,
    /// Settings (including the seed) of the attack-point solver.
    pub attack: AttackOptions,
}

impl Scenario {
    pub const DEFAULT_DT: f64 = 1e-3;
    pub const DEFAULT_T_MAX: f64 = 50.0;
    pub const DEFAULT_CAPTURE_RADIUS: f64 = 1e-3;

    /// Both players optimal, default step, horizon and capture radius.
    pub fn new(cfg: GameConfig, target: TargetSet, x_p0: Point, x_e0: Point) -> Self {
        Self {
            cfg,
            target,
            x_p0,
            x_e0,
            policy_p: Policy::OptimalAuto,
            policy_e: Policy::OptimalAuto,
            dt: Self::DEFAULT_DT,
            t_max: Self::DEFAULT_T_MAX,
            capture_radius: Self::DEFAULT_CAPTURE_RADIUS,
            attack: AttackOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.cfg.dim();
        self.cfg.check_point(&self.x_p0)?;
        self.cfg.check_point(&self.x_e0)?;
        if self.target.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.target.dim(),
            });
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter("dt must be positive".into()));
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(Error::InvalidParameter("t_max must be positive".into()));
        }
        if !(self.capture_radius >= 0.0) {
            return Err(Error::InvalidParameter("capture_radius must be non-negative".into()));
        }
        self.policy_p.check_role(Role::Defender)?;
        self.policy_e.check_role(Role::Attacker)?;
        if let Policy::DirectTo(q) = &self.policy_e {
            self.cfg.check_point(q)?;
            if !self.target.contains(q)? {
                return Err(Error::InvalidParameter("direct_to point must lie in the target".into()));
            }
        }
        Ok(())
    }
}

/// How a game ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Captured,
    Attacked,
    HorizonExceeded,
}

impl Outcome {
    pub fn name(self) -> &'static str {
        match self {
            Outcome::Captured => "Captured",
            Outcome::Attacked => "Attacked",
            Outcome::HorizonExceeded => "HorizonExceeded",
        }
    }
}

/// One sample of a trajectory. The headings are the controls applied from
/// this sample on (for the terminal sample, the last controls applied).
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryRow {
    pub t: f64,
    pub x_p: Point,
    pub x_e: Point,
    pub barrier: f64,
    pub region: Region,
    pub dir_p: Point,
    pub dir_e: Point,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryRecord {
    pub rows: Vec<TrajectoryRow>,
    pub outcome: Outcome,
    pub t_f: f64,
    /// Interpolated times at which the barrier value changed sign.
    pub switch_times: Vec<f64>,
    /// `dist(x_E(t_f), Ω)` after a capture, `‖x_E(t_f) − x_P(t_f)‖` after an
    /// attack, `None` if the horizon ran out.
    pub payoff: Option<f64>,
    pub capture_radius: f64,
    pub dt: f64,
}

impl TrajectoryRecord {
    pub fn final_row(&self) -> &TrajectoryRow {
        self.rows.last().expect("records hold at least one row")
    }
}

struct Controls {
    barrier: f64,
    region: Region,
    dir_p: Point,
    dir_e: Point,
}

fn controls(sc: &Scenario, s: &GameState) -> Result<Controls> {
    let wants_optimal = sc.policy_p == Policy::OptimalAuto || sc.policy_e == Policy::OptimalAuto;
    let (value, region, opt) = if wants_optimal {
        let c = optimal_controls(&sc.cfg, s, &sc.target, &sc.attack)?;
        (c.barrier.value, c.barrier.region, Some((c.dir_p, c.dir_e)))
    } else {
        let b = barrier(&sc.cfg, s, &sc.target)?;
        (b.value, b.region, None)
    };
    let pick = |policy: &Policy, role: Role| -> Result<Point> {
        match (policy, &opt) {
            (Policy::OptimalAuto, Some((p, e))) => Ok(match role {
                Role::Defender => p.clone(),
                Role::Attacker => e.clone(),
            }),
            _ => policy_step_with(policy, role, &sc.cfg, s, &sc.target, &sc.attack),
        }
    };
    Ok(Controls {
        barrier: value,
        region,
        dir_p: pick(&sc.policy_p, Role::Defender)?,
        dir_e: pick(&sc.policy_e, Role::Attacker)?,
    })
}

fn velocity(sc: &Scenario, c: &Controls) -> (Point, Point) {
    (&c.dir_p * sc.cfg.v_p(), &c.dir_e * sc.cfg.v_e())
}

/// One classical RK4 step of length `h`, re-evaluating the feedback at each
/// stage, after which each agent advances `v·h` along the normalized
/// RK4-weighted mean of its stage headings, so speeds are exact. Stage
/// states keep the step's start time. A stage state past the
/// terminal manifold has no meaningful feedback and reuses the previous
/// stage's velocity.
fn rk4_step(sc: &Scenario, s: &GameState, first: &Controls, h: f64) -> Result<GameState> {
    let shifted = |k: &(Point, Point), a: f64| GameState {
        x_p: &s.x_p + &k.0 * a,
        x_e: &s.x_e + &k.1 * a,
        t: s.t,
    };
    let stage = |k: &(Point, Point), a: f64| -> Result<(Point, Point)> {
        let probe = shifted(k, a);
        if check_termination(&sc.cfg, &probe, &sc.target, sc.capture_radius)? != Termination::Running {
            return Ok(k.clone());
        }
        Ok(velocity(sc, &controls(sc, &probe)?))
    };
    let k1 = velocity(sc, first);
    let k2 = stage(&k1, 0.5 * h)?;
    let k3 = stage(&k2, 0.5 * h)?;
    let k4 = stage(&k3, h)?;
    // Each agent moves at full speed along the RK4-weighted mean heading.
    let advance = |k1: &Point, k2: &Point, k3: &Point, k4: &Point, speed: f64| {
        let mean = k1 + k2 * 2.0 + k3 * 2.0 + k4;
        let norm = mean.norm();
        if norm > 0.0 {
            mean * (speed * h / norm)
        } else {
            k1 * h
        }
    };
    Ok(GameState {
        x_p: &s.x_p + advance(&k1.0, &k2.0, &k3.0, &k4.0, sc.cfg.v_p()),
        x_e: &s.x_e + advance(&k1.1, &k2.1, &k3.1, &k4.1, sc.cfg.v_e()),
        t: s.t + h,
    })
}

/// Integrates a scenario until capture, attack or the horizon.
///
/// Each step is fixed-step RK4 with feedback re-evaluated at every stage and
/// the resulting heading held for the whole step.
/// When a step ends in a terminal state, the terminal time is refined by
/// bisection over the step length to `dt·1e-6`, so the reported final state
/// lies on the terminal manifold up to that resolution.
pub fn simulate(sc: &Scenario) -> Result<TrajectoryRecord> {
    sc.validate()?;
    let cfg = &sc.cfg;
    let mut s = GameState::new(sc.x_p0.clone(), sc.x_e0.clone());
    let mut rows: Vec<TrajectoryRow> = Vec::new();
    let mut switch_times = Vec::new();
    let mut last_signed: Option<(f64, f64)> = None;
    let mut step = 0usize;

    let mut note_barrier = |t: f64, value: f64, switch_times: &mut Vec<f64>| {
        if Region::classify(value) == Region::OnBarrier {
            return;
        }
        if let Some((t0, v0)) = last_signed {
            if (v0 > 0.0) != (value > 0.0) {
                switch_times.push(t0 + (t - t0) * v0 / (v0 - value));
            }
        }
        last_signed = Some((t, value));
    };

    let outcome = loop {
        let status = check_termination(cfg, &s, &sc.target, sc.capture_radius)?;
        if status != Termination::Running {
            // Only reachable at t = 0; later terminations are handled below.
            let b = barrier(cfg, &s, &sc.target)?;
            let zero = Point::zeros(cfg.dim());
            rows.push(TrajectoryRow {
                t: s.t,
                x_p: s.x_p.clone(),
                x_e: s.x_e.clone(),
                barrier: b.value,
                region: b.region,
                dir_p: zero.clone(),
                dir_e: zero,
            });
            break terminal_outcome(status);
        }

        let c = controls(sc, &s).map_err(|e| wrap(step, e))?;
        note_barrier(s.t, c.barrier, &mut switch_times);
        rows.push(TrajectoryRow {
            t: s.t,
            x_p: s.x_p.clone(),
            x_e: s.x_e.clone(),
            barrier: c.barrier,
            region: c.region,
            dir_p: c.dir_p.clone(),
            dir_e: c.dir_e.clone(),
        });

        if s.t >= sc.t_max * (1.0 - 1e-12) {
            break Outcome::HorizonExceeded;
        }
        let h = sc.dt.min(sc.t_max - s.t);
        let next = rk4_step(sc, &s, &c, h).map_err(|e| wrap(step, e))?;
        if !next.x_p.iter().chain(next.x_e.iter()).all(|v| v.is_finite()) {
            return Err(Error::NonFiniteState { step });
        }
        step += 1;

        let status = check_termination(cfg, &next, &sc.target, sc.capture_radius)?;
        if status == Termination::Running {
            s = next;
            continue;
        }

        // Bisect on the step length for the first terminal time.
        let (mut lo, mut hi) = (0.0, h);
        let mut end = next;
        let mut end_status = status;
        while hi - lo > sc.dt * 1e-6 {
            let mid = 0.5 * (lo + hi);
            let probe = rk4_step(sc, &s, &c, mid).map_err(|e| wrap(step, e))?;
            let probe_status = check_termination(cfg, &probe, &sc.target, sc.capture_radius)?;
            if probe_status == Termination::Running {
                lo = mid;
            } else {
                hi = mid;
                end = probe;
                end_status = probe_status;
            }
        }
        let b = barrier(cfg, &end, &sc.target)?;
        note_barrier(end.t, b.value, &mut switch_times);
        rows.push(TrajectoryRow {
            t: end.t,
            x_p: end.x_p.clone(),
            x_e: end.x_e.clone(),
            barrier: b.value,
            region: b.region,
            dir_p: c.dir_p,
            dir_e: c.dir_e,
        });
        s = end;
        break terminal_outcome(end_status);
    };

    let payoff = match outcome {
        Outcome::Captured => Some(sc.target.distance(&s.x_e)?),
        Outcome::Attacked => Some(s.separation()),
        Outcome::HorizonExceeded => None,
    };
    Ok(TrajectoryRecord {
        t_f: s.t,
        rows,
        outcome,
        switch_times,
        payoff,
        capture_radius: sc.capture_radius,
        dt: sc.dt,
    })
}

/// Runs independent scenarios in parallel, preserving order.
pub fn simulate_batch(scenarios: &[Scenario]) -> Vec<Result<TrajectoryRecord>> {
    scenarios.par_iter().map(simulate).collect()
}

fn terminal_outcome(status: Termination) -> Outcome {
    match status {
        Termination::Captured => Outcome::Captured,
        Termination::Attacked => Outcome::Attacked,
        Termination::Running => unreachable!("running state is not terminal"),
    }
}

fn wrap(step: usize, e: Error) -> Error {
    match e {
        Error::Strategy { .. } => e,
        other => Error::Strategy {
            step,
            source: Box::new(other),
        },
    }
}

/// Largest distance of a player's sampled positions from the chord joining
/// its first and last positions, relative to the chord length.
pub fn straightness_deviation(rec: &TrajectoryRecord, role: Role) -> Result<f64> {
    let positions: Vec<&Point> = rec
        .rows
        .iter()
        .map(|r| match role {
            Role::Defender => &r.x_p,
            Role::Attacker => &r.x_e,
        })
        .collect();
    if positions.len() < 2 {
        return Err(Error::InvalidParameter("need at least two samples".into()));
    }
    let first = positions[0];
    let chord = positions[positions.len() - 1] - first;
    let length = chord.norm();
    if !(length > 0.0) {
        return Err(Error::Degenerate("zero-length chord"));
    }
    let axis = &chord / length;
    let worst = positions
        .iter()
        .map(|p| {
            let d = *p - first;
            (&d - &axis * axis.dot(&d)).norm()
        })
        .fold(0.0, f64::max);
    Ok(worst / length)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    fn cfg(dim: usize) -> GameConfig {
        GameConfig::new(0.5, 1.0, dim).unwrap()
    }

    #[test]
    fn capture_run_against_a_point_target() {
        let target = TargetSet::singleton(dvector![0.0, 0.0]);
        let sc = Scenario::new(cfg(2), target, dvector![1.0, 0.0], dvector![0.7, 0.3]);
        let v0 = crate::barrier(&sc.cfg, &GameState::new(sc.x_p0.clone(), sc.x_e0.clone()), &sc.target)
            .unwrap()
            .value;
        let rec = simulate(&sc).unwrap();
        assert_eq!(rec.outcome, Outcome::Captured);
        assert!(rec.switch_times.is_empty());
        assert!((rec.payoff.unwrap() - v0).abs() < 1e-3);
        assert!(rec.rows.windows(2).all(|w| w[1].t > w[0].t));
        assert!(straightness_deviation(&rec, Role::Defender).unwrap() < 1e-9);
    }

    #[test]
    fn attack_run_against_a_ball() {
        let target = TargetSet::ball(dvector![0.0, 0.0], 0.5).unwrap();
        let x_p = dvector![2.0, 0.5];
        let x_e = dvector![0.8, -0.2];
        let sc = Scenario::new(cfg(2), target.clone(), x_p.clone(), x_e.clone());
        let plan = crate::attack_plan(&sc.cfg, &GameState::new(x_p, x_e), &target).unwrap();
        let rec = simulate(&sc).unwrap();
        assert_eq!(rec.outcome, Outcome::Attacked);
        assert!((rec.payoff.unwrap() - plan.value).abs() < 1e-3);
        assert!(straightness_deviation(&rec, Role::Attacker).unwrap() < 1e-6);
    }

    #[test]
    fn terminal_initial_state() {
        let target = TargetSet::ball(dvector![0.0, 0.0], 1.0).unwrap();
        let sc = Scenario::new(cfg(2), target, dvector![3.0, 0.0], dvector![0.0, 0.0]);
        let rec = simulate(&sc).unwrap();
        assert_eq!(rec.outcome, Outcome::Attacked);
        assert_eq!(rec.rows.len(), 1);
        assert_eq!(rec.t_f, 0.0);
    }

    #[test]
    fn horizon_is_enforced() {
        let target = TargetSet::singleton(dvector![10.0, 0.0]);
        let mut sc = Scenario::new(cfg(2), target, dvector![0.0, 0.0], dvector![0.0, 5.0]);
        sc.policy_p = Policy::RandomHeading { seed: 1, hold: 0.05 };
        sc.policy_e = Policy::RandomHeading { seed: 2, hold: 0.05 };
        sc.t_max = 0.1;
        let rec = simulate(&sc).unwrap();
        assert_eq!(rec.outcome, Outcome::HorizonExceeded);
        assert!(rec.payoff.is_none());
        assert!((rec.t_f - 0.1).abs() < 1e-12);
    }

    #[test]
    fn invalid_scenarios_are_rejected() {
        let target = TargetSet::singleton(dvector![0.0, 0.0]);
        let mut sc = Scenario::new(cfg(2), target, dvector![1.0, 0.0], dvector![0.7, 0.3]);
        sc.dt = 0.0;
        assert!(simulate(&sc).is_err());
        sc.dt = 1e-3;
        sc.policy_e = Policy::PurePursuit;
        assert!(matches!(simulate(&sc), Err(Error::PolicyRoleMismatch { .. })));
        sc.policy_e = Policy::DirectTo(dvector![1.0, 1.0]);
        assert!(matches!(simulate(&sc), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn straightness_of_a_two_sample_record_is_zero() {
        let row = |x: f64| TrajectoryRow {
            t: x,
            x_p: dvector![x, 0.0],
            x_e: dvector![x, 1.0],
            barrier: 1.0,
            region: Region::Capture,
            dir_p: dvector![1.0, 0.0],
            dir_e: dvector![1.0, 0.0],
        };
        let rec = TrajectoryRecord {
            rows: vec![row(0.0), row(1.0)],
            outcome: Outcome::Captured,
            t_f: 1.0,
            switch_times: vec![],
            payoff: Some(0.0),
            capture_radius: 0.0,
            dt: 1.0,
        };
        assert_eq!(straightness_deviation(&rec, Role::Defender).unwrap(), 0.0);
    }
}
