//! JSON scenario files.
//!
//! ```json
//! {
//!   "dimension": 3,
//!   "gamma": 0.5,
//!   "v_P": 1.0,
//!   "target": { "type": "ellipsoid", "semi_axes": [0.8, 0.4, 0.4] },
//!   "x_P0": [-0.8, 0.0, 0.5],
//!   "x_E0": [0.2, 0.4, 0.9],
//!   "policy_P": "optimal",
//!   "policy_E": "optimal"
//! }
//! ```
//!
//! Omitted keys take defaults (`v_P` 1, `dt` 1e-3, `t_max` 50,
//! `capture_radius` 1e-3, `seed` 0, both policies `optimal`). Unknown keys are
//! rejected. Errors carry the line of the offending key.

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use target_defense::{
    AttackOptions, Ellipsoid, Error, GameConfig, HalfSpace, LevelSet, Point, Policy, Scenario, TargetSet,
};

/// Hold time of the `random` policy.
pub const RANDOM_HOLD: f64 = 0.05;

fn default_v_p() -> f64 {
    1.0
}
fn default_dt() -> f64 {
    Scenario::DEFAULT_DT
}
fn default_t_max() -> f64 {
    Scenario::DEFAULT_T_MAX
}
fn default_capture_radius() -> f64 {
    Scenario::DEFAULT_CAPTURE_RADIUS
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub dimension: usize,
    pub gamma: f64,
    #[serde(rename = "v_P", default = "default_v_p")]
    pub v_p: f64,
    pub target: TargetSpec,
    #[serde(rename = "x_P0")]
    pub x_p0: Vec<f64>,
    #[serde(rename = "x_E0")]
    pub x_e0: Vec<f64>,
    #[serde(rename = "policy_P", default)]
    pub policy_p: PolicyName,
    #[serde(rename = "policy_E", default)]
    pub policy_e: PolicyName,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_capture_radius")]
    pub capture_radius: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direct_to: Option<Vec<f64>>,
}

/// Target set description, tagged by `type`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum TargetSpec {
    Singleton {
        point: Vec<f64>,
    },
    /// `{z : <normal, z> <= offset}`.
    HalfSpace {
        normal: Vec<f64>,
        offset: f64,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    Ellipsoid {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Vec<f64>>,
        semi_axes: Vec<f64>,
        /// Row-major orthogonal matrix.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rotation: Option<Vec<Vec<f64>>>,
    },
    Polytope {
        faces: Vec<FaceSpec>,
    },
    /// `Σ |(zᵢ − cᵢ)/sᵢ|^p <= 1`; exponent 4 with unit axes is the quartic cube.
    Superellipsoid {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Vec<f64>>,
        semi_axes: Vec<f64>,
        exponent: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaceSpec {
    pub normal: Vec<f64>,
    pub offset: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyName {
    #[default]
    Optimal,
    PurePursuit,
    DirectTo,
    Random,
}

/// A parse or validation failure, anchored to a line of the source when
/// one can be found.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioError {
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "line {l}, column {c}: {}", self.message),
            (Some(l), None) => write!(f, "line {l}: {}", self.message),
            _ => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ScenarioError {}

/// A validation failure tied to a top-level key.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldError {
    pub key: &'static str,
    pub message: String,
}

fn field(key: &'static str, message: impl Into<String>) -> FieldError {
    FieldError {
        key,
        message: message.into(),
    }
}

fn point(key: &'static str, what: &str, v: &[f64], n: usize) -> Result<Point, FieldError> {
    if v.len() != n {
        return Err(field(key, format!("{what} has length {}, expected dimension {n}", v.len())));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(field(key, format!("{what} must be finite")));
    }
    Ok(Point::from_column_slice(v))
}

fn target_error(e: Error) -> FieldError {
    let message = match e {
        Error::InvalidParameter(m) => m,
        other => other.to_string(),
    };
    field("target", message)
}

impl TargetSpec {
    pub fn build(&self, n: usize) -> Result<TargetSet, FieldError> {
        let p = |what: &str, v: &[f64]| point("target", what, v, n);
        let center_or_origin = |c: &Option<Vec<f64>>| match c {
            Some(c) => p("target center", c),
            None => Ok(Point::zeros(n)),
        };
        match self {
            TargetSpec::Singleton { point } => Ok(TargetSet::singleton(p("target point", point)?)),
            TargetSpec::HalfSpace { normal, offset } => {
                TargetSet::half_space(p("target normal", normal)?, *offset).map_err(target_error)
            }
            TargetSpec::Ball { center, radius } => {
                TargetSet::ball(p("target center", center)?, *radius).map_err(target_error)
            }
            TargetSpec::Ellipsoid {
                center,
                semi_axes,
                rotation,
            } => {
                let mut e = Ellipsoid::new(center_or_origin(center)?, p("target semi_axes", semi_axes)?)
                    .map_err(target_error)?;
                if let Some(rows) = rotation {
                    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                        return Err(field("target", format!("rotation must be a {n}x{n} matrix")));
                    }
                    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
                    e = e.with_rotation(DMatrix::from_row_slice(n, n, &flat)).map_err(target_error)?;
                }
                Ok(TargetSet::Ellipsoid(e))
            }
            TargetSpec::Polytope { faces } => {
                let faces = faces
                    .iter()
                    .map(|f| HalfSpace::new(p("face normal", &f.normal)?, f.offset).map_err(target_error))
                    .collect::<Result<Vec<_>, _>>()?;
                TargetSet::polytope(faces).map_err(target_error)
            }
            TargetSpec::Superellipsoid {
                center,
                semi_axes,
                exponent,
            } => LevelSet::superellipsoid(center_or_origin(center)?, p("target semi_axes", semi_axes)?, *exponent)
                .map(TargetSet::SmoothLevelSet)
                .map_err(target_error),
        }
    }

    /// Whether the PBS of this target has a closed-form implicit equation.
    pub fn is_analytic(&self) -> bool {
        matches!(
            self,
            TargetSpec::Singleton { .. } | TargetSpec::HalfSpace { .. } | TargetSpec::Ball { .. }
        )
    }
}

impl ScenarioFile {
    pub fn from_json_str(text: &str) -> Result<Self, ScenarioError> {
        serde_json::from_str(text).map_err(|e| ScenarioError {
            line: Some(e.line()),
            column: Some(e.column()),
            message: e.to_string().split(" at line ").next().unwrap_or_default().to_string(),
        })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario files always serialize")
    }

    pub fn config(&self) -> Result<GameConfig, FieldError> {
        if self.dimension == 0 {
            return Err(field("dimension", "dimension must be at least 1"));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(field("gamma", "gamma must lie in (0,1)"));
        }
        if !(self.v_p.is_finite() && self.v_p > 0.0) {
            return Err(field("v_P", "v_P must be positive"));
        }
        GameConfig::new(self.gamma, self.v_p, self.dimension).map_err(|e| field("gamma", e.to_string()))
    }

    fn policy(&self, key: &'static str, name: PolicyName, seed: u64) -> Result<Policy, FieldError> {
        Ok(match name {
            PolicyName::Optimal => Policy::OptimalAuto,
            PolicyName::PurePursuit => Policy::PurePursuit,
            PolicyName::DirectTo => match &self.direct_to {
                Some(q) => Policy::DirectTo(point("direct_to", "direct_to", q, self.dimension)?),
                None => return Err(field(key, "direct_to policy needs a direct_to point")),
            },
            PolicyName::Random => Policy::RandomHeading { seed, hold: RANDOM_HOLD },
        })
    }

    /// Builds and validates the simulation scenario.
    pub fn to_scenario(&self) -> Result<Scenario, FieldError> {
        let n = self.dimension;
        let cfg = self.config()?;
        let target = self.target.build(n)?;
        let x_p0 = point("x_P0", "x_P0", &self.x_p0, n)?;
        let x_e0 = point("x_E0", "x_E0", &self.x_e0, n)?;
        if let Some(q) = &self.direct_to {
            point("direct_to", "direct_to", q, n)?;
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(field("dt", "dt must be positive"));
        }
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return Err(field("t_max", "t_max must be positive"));
        }
        if !(self.capture_radius.is_finite() && self.capture_radius >= 0.0) {
            return Err(field("capture_radius", "capture_radius must be non-negative"));
        }
        let mut sc = Scenario::new(cfg, target, x_p0, x_e0);
        sc.policy_p = self.policy("policy_P", self.policy_p, self.seed.wrapping_add(1))?;
        sc.policy_e = self.policy("policy_E", self.policy_e, self.seed)?;
        sc.dt = self.dt;
        sc.t_max = self.t_max;
        sc.capture_radius = self.capture_radius;
        sc.attack = AttackOptions {
            seed: self.seed,
            ..AttackOptions::default()
        };
        sc.validate().map_err(|e| match e {
            Error::PolicyRoleMismatch { role, .. } => {
                field(if role == "defender" { "policy_P" } else { "policy_E" }, e.to_string())
            }
            Error::InvalidParameter(m) if m.contains("direct_to") => field("direct_to", m),
            Error::InvalidParameter(m) => field("dimension", m),
            other => field("dimension", other.to_string()),
        })?;
        Ok(sc)
    }
}

/// 1-based line of the first occurrence of `"key"` in `text`.
fn key_line(text: &str, key: &str) -> Option<usize> {
    let needle = format!("\"{key}\"");
    text.lines().position(|l| l.contains(&needle)).map(|i| i + 1)
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<(ScenarioFile, Scenario), ScenarioError> {
    let file = ScenarioFile::from_json_str(text)?;
    let scenario = file.to_scenario().map_err(|e| ScenarioError {
        line: key_line(text, e.key),
        column: None,
        message: e.message,
    })?;
    Ok((file, scenario))
}
