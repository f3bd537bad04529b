//! Two-player target-defense differential games in ℝⁿ.
//!
//! A fast defender `P` (speed `v_P`) guards a closed convex target set `Ω`
//! against a slower attacker `E` (speed `γ v_P`, `0 < γ < 1`). The crate
//! classifies states with the barrier function, builds barrier surfaces,
//! evaluates the saddle-point feedback strategies of the capture and attack
//! subgames, simulates closed-loop play and ships the numerical oracles used
//! to check all of the above.
//!
//! ```
//! use nalgebra::dvector;
//! use target_defense::{barrier, GameConfig, GameState, Region, TargetSet};
//!
//! let cfg = GameConfig::new(0.5, 1.0, 2)?;
//! let target = TargetSet::singleton(dvector![0.0, 0.0]);
//! let state = GameState::new(dvector![1.0, 0.0], dvector![0.7, 0.0]);
//! let b = barrier(&cfg, &state, &target)?;
//! assert!((b.value - 0.4).abs() < 1e-12);
//! assert_eq!(b.region, Region::Capture);
//! # Ok::<(), target_defense::Error>(())
//! ```

pub mod barrier_geometry;
pub mod convex_sets;
pub mod error;
pub mod export;
pub mod game;
pub mod simulator;
pub mod strategies;
pub mod tolerances;
pub mod verify;

pub use convex_sets::{Ellipsoid, HalfSpace, LevelSet, NormBall, Polytope, TargetKind, TargetSet};
pub use error::{Error, Result};
pub use game::{
    apollonius, barrier, check_termination, ApolloniusRegion, BarrierResult, GameConfig, GameState, Region,
    Termination,
};
pub use simulator::{simulate, straightness_deviation, Outcome, Scenario, TrajectoryRecord, TrajectoryRow};
pub use strategies::{
    attack_plan, attack_plan_with, attack_value_gradient, capture_plan, capture_value_gradient, policy_step,
    AttackOptions, AttackPlan, CapturePlan, Policy, Role,
};

/// A point or vector in ℝⁿ.
pub type Point = nalgebra::DVector<f64>;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    pub struct Readme;
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/target-sets.md")]
    pub struct TargetSets;
    #[doc = include_str!("../../../book/src/barrier.md")]
    pub struct Barrier;
    #[doc = include_str!("../../../book/src/barrier-surfaces.md")]
    pub struct BarrierSurfaces;
    #[doc = include_str!("../../../book/src/strategies.md")]
    pub struct Strategies;
    #[doc = include_str!("../../../book/src/simulation.md")]
    pub struct Simulation;
    #[doc = include_str!("../../../book/src/verification.md")]
    pub struct Verification;
    #[doc = include_str!("../../../book/src/cli.md")]
    pub struct Cli;
}
