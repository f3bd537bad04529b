//! Game configuration, Apollonius safe region, barrier function and
//! winning-region classification.

use serde::{Deserialize, Serialize};

use crate::convex_sets::TargetSet;
use crate::error::{Error, Result};
use crate::tolerances;
use crate::Point;

/// Speeds and dimension of a game. The evader is strictly slower.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GameConfig {
    gamma: f64,
    v_p: f64,
    v_e: f64,
    dim: usize,
}

impl GameConfig {
    /// `gamma = v_E / v_P` must lie in `(0, 1)`.
    pub fn new(gamma: f64, v_p: f64, dim: usize) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::InvalidParameter("gamma must lie in (0,1)".into()));
        }
        if !(v_p.is_finite() && v_p > 0.0) {
            return Err(Error::InvalidParameter("v_P must be positive".into()));
        }
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        Ok(Self {
            gamma,
            v_p,
            v_e: gamma * v_p,
            dim,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn v_p(&self) -> f64 {
        self.v_p
    }

    pub fn v_e(&self) -> f64 {
        self.v_e
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub(crate) fn check_point(&self, z: &Point) -> Result<()> {
        if z.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: z.len(),
            });
        }
        Ok(())
    }

    pub(crate) fn check_state(&self, s: &GameState) -> Result<()> {
        self.check_point(&s.x_p)?;
        self.check_point(&s.x_e)
    }
}

/// Positions of the defender `P` and attacker `E` at time `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct GameState {
    pub x_p: Point,
    pub x_e: Point,
    pub t: f64,
}

impl GameState {
    pub fn new(x_p: Point, x_e: Point) -> Self {
        Self { x_p, x_e, t: 0.0 }
    }

    pub fn separation(&self) -> f64 {
        (&self.x_e - &self.x_p).norm()
    }

    /// The stacked `2n` vector `(x_P, x_E)`.
    pub fn stacked(&self) -> Point {
        let n = self.x_p.len();
        Point::from_iterator(2 * n, self.x_p.iter().chain(self.x_e.iter()).copied())
    }

    /// Inverse of [`GameState::stacked`].
    pub fn from_stacked(x: &Point, t: f64) -> Self {
        let n = x.len() / 2;
        Self {
            x_p: x.rows(0, n).into_owned(),
            x_e: x.rows(n, n).into_owned(),
            t,
        }
    }
}

/// Ball `{z : ‖z − α‖ < β}` of points the attacker reaches strictly before the
/// defender.
#[derive(Clone, Debug, PartialEq)]
pub struct ApolloniusRegion {
    pub alpha: Point,
    pub beta: f64,
}

impl ApolloniusRegion {
    pub fn contains(&self, z: &Point) -> bool {
        (z - &self.alpha).norm() < self.beta
    }
}

/// Which side of the barrier a state lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    /// Capture is guaranteed under optimal defense (`B > 0`).
    Capture,
    /// Attack is guaranteed under optimal offense (`B < 0`).
    Attack,
    /// Within the dead-band of the barrier surface.
    OnBarrier,
}

impl Region {
    pub fn classify(value: f64) -> Self {
        if value > tolerances::BARRIER_DEADBAND {
            Region::Capture
        } else if value < -tolerances::BARRIER_DEADBAND {
            Region::Attack
        } else {
            Region::OnBarrier
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Region::Capture => "CaptureRegion",
            Region::Attack => "AttackRegion",
            Region::OnBarrier => "OnBarrier",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BarrierResult {
    pub value: f64,
    pub region: Region,
    /// `proj_Ω(α)`.
    pub projection: Point,
    pub apollonius: ApolloniusRegion,
}

/// Terminal status of a state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Termination {
    Running,
    Captured,
    Attacked,
}

/// Apollonius center `α = (x_E − γ² x_P)/(1 − γ²)` and radius
/// `β = γ ‖x_E − x_P‖/(1 − γ²)`.
pub fn apollonius(cfg: &GameConfig, s: &GameState) -> ApolloniusRegion {
    let g2 = cfg.gamma * cfg.gamma;
    let k = 1.0 - g2;
    ApolloniusRegion {
        alpha: (&s.x_e - &s.x_p * g2) / k,
        beta: cfg.gamma * s.separation() / k,
    }
}

/// Barrier value `B = ‖α − proj_Ω(α)‖ − β` and the region it implies.
///
/// Positive values mean the target and the open safe region are disjoint;
/// negative values mean they intersect.
pub fn barrier(cfg: &GameConfig, s: &GameState, target: &TargetSet) -> Result<BarrierResult> {
    cfg.check_state(s)?;
    let apollonius = apollonius(cfg, s);
    let projection = target.project(&apollonius.alpha)?;
    let value = (&apollonius.alpha - &projection).norm() - apollonius.beta;
    Ok(BarrierResult {
        value,
        region: Region::classify(value),
        projection,
        apollonius,
    })
}

/// Capture (`‖x_P − x_E‖ <= ε`) takes precedence over attack (`x_E ∈ Ω`).
pub fn check_termination(
    cfg: &GameConfig,
    s: &GameState,
    target: &TargetSet,
    capture_radius: f64,
) -> Result<Termination> {
    cfg.check_state(s)?;
    if s.separation() <= capture_radius {
        Ok(Termination::Captured)
    } else if target.contains(&s.x_e)? {
        Ok(Termination::Attacked)
    } else {
        Ok(Termination::Running)
    }
}
