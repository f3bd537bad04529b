use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::tolerances;
use crate::Point;

/// A caller-supplied scalar function on `ℝⁿ`.
pub type LevelFn = Arc<dyn Fn(&Point) -> f64 + Send + Sync>;

/// A caller-supplied gradient on `ℝⁿ`.
pub type GradientFn = Arc<dyn Fn(&Point) -> Point + Send + Sync>;

/// Sublevel set `{z : F(z) <= 0}` of a convex function `F`.
///
/// `F` must be convex with `∇F ≠ 0` on `{F = 0}`, and the set must be bounded
/// so that every ray from the interior point reaches the boundary. Both are
/// caller contracts and are not checked.
#[derive(Clone)]
pub struct LevelSet {
    dim: usize,
    interior: Point,
    level: LevelFn,
    gradient: GradientFn,
    label: String,
}

impl fmt::Debug for LevelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LevelSet")
            .field("dim", &self.dim)
            .field("interior", &self.interior.as_slice())
            .field("label", &self.label)
            .finish_non_exhaustive()
    }
}

impl LevelSet {
    /// `interior` must satisfy `F(interior) < 0`; it anchors ray casting.
    pub fn new(
        interior: Point,
        level: impl Fn(&Point) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&Point) -> Point + Send + Sync + 'static,
    ) -> Result<Self> {
        let value = level(&interior);
        if !(value < 0.0) {
            return Err(Error::InvalidParameter(format!(
                "interior point must satisfy F < 0 (got {value:.3e})"
            )));
        }
        Ok(Self {
            dim: interior.len(),
            interior,
            level: Arc::new(level),
            gradient: Arc::new(gradient),
            label: "custom".into(),
        })
    }

    /// `Σ |(zᵢ − cᵢ)/sᵢ|^p − 1` for `p >= 2`; `p = 4` with unit axes is the
    /// quartic cube `x⁴ + y⁴ + z⁴ <= 1`.
    pub fn superellipsoid(center: Point, semi_axes: Point, exponent: f64) -> Result<Self> {
        if center.len() != semi_axes.len() {
            return Err(Error::DimensionMismatch {
                expected: center.len(),
                found: semi_axes.len(),
            });
        }
        if semi_axes.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(Error::InvalidParameter(
                "superellipsoid semi-axes must be strictly positive".into(),
            ));
        }
        if !(exponent.is_finite() && exponent >= 2.0) {
            return Err(Error::InvalidParameter(
                "superellipsoid exponent must be at least 2".into(),
            ));
        }
        let (c, s) = (center.clone(), semi_axes.clone());
        let level = move |z: &Point| -> f64 {
            z.iter()
                .zip(c.iter().zip(s.iter()))
                .map(|(zi, (ci, si))| ((zi - ci) / si).abs().powf(exponent))
                .sum::<f64>()
                - 1.0
        };
        let (c, s) = (center.clone(), semi_axes);
        let gradient = move |z: &Point| -> Point {
            Point::from_iterator(
                z.len(),
                z.iter().zip(c.iter().zip(s.iter())).map(|(zi, (ci, si))| {
                    let t = (zi - ci) / si;
                    exponent * t.signum() * t.abs().powf(exponent - 1.0) / si
                }),
            )
        };
        let mut set = Self::new(center, level, gradient)?;
        set.label = format!("superellipsoid(p={exponent})");
        Ok(set)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn interior(&self) -> &Point {
        &self.interior
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn level(&self, z: &Point) -> f64 {
        (self.level)(z)
    }

    pub fn gradient(&self, z: &Point) -> Point {
        (self.gradient)(z)
    }

    /// Boundary point `c + t u` on the ray from the interior point along `u`.
    pub fn boundary_along(&self, direction: &Point) -> Result<Point> {
        let t = ray_cast(|z| self.level(z), &self.interior, direction)?;
        Ok(&self.interior + direction * t)
    }

    /// Projection by spectral projected gradient over ray directions.
    ///
    /// Boundary points are parameterized as `p(u) = c + r(u) u` with `u` on the
    /// unit sphere and `r(u)` found by ray casting. We minimize
    /// `f(u) = ½‖p(u) − x‖²`; implicit differentiation of `F(c + r u) = 0` gives
    /// `∇f = r (d − (⟨d,u⟩ / ⟨∇F,u⟩) ∇F)` with `d = p − x`. Steps are projected
    /// back onto the sphere by normalization, use Barzilai-Borwein lengths and
    /// Armijo backtracking. Convergence is declared when `x − p` is parallel to
    /// `∇F(p)`.
    pub fn project(&self, x: &Point) -> Result<Point> {
        if self.level(x) <= 0.0 {
            return Ok(x.clone());
        }
        let c = &self.interior;
        let scale = (x - c).norm();
        let tol = 1e-10 * scale.max(1.0);

        let mut u = (x - c) / scale;
        let mut cur = self.evaluate(x, &u)?;
        let mut step = 1.0 / cur.grad.norm().max(f64::MIN_POSITIVE);
        let mut residual = cur.residual(x);

        for _ in 0..tolerances::GRADIENT_MAX_ITER {
            if residual <= tol {
                return Ok(cur.point);
            }

            let mut accepted = None;
            for _ in 0..60 {
                let trial_u = (&u - &cur.grad * step).normalize();
                let trial = self.evaluate(x, &trial_u)?;
                let descent = cur.grad.dot(&(&trial_u - &u));
                // Armijo, with slack for round-off once f is at its floor.
                let floor = 8.0 * f64::EPSILON * cur.value.abs();
                if trial.value <= cur.value + 1e-4 * descent + floor {
                    accepted = Some((trial_u, trial));
                    break;
                }
                step *= 0.5;
            }
            let Some((next_u, next)) = accepted else {
                break;
            };

            let s = &next_u - &u;
            let y = &next.grad - &cur.grad;
            let sy = s.dot(&y);
            step = if sy > 0.0 {
                (s.norm_squared() / sy).clamp(1e-12, 1e12)
            } else {
                (1.0 / next.grad.norm().max(f64::MIN_POSITIVE)).min(1e12)
            };
            u = next_u;
            cur = next;
            residual = cur.residual(x);
        }

        Err(Error::SolverFailure {
            solver: "level-set projected gradient",
            iterations: tolerances::GRADIENT_MAX_ITER,
            residual,
        })
    }

    fn evaluate(&self, x: &Point, u: &Point) -> Result<RayEval> {
        let r = ray_cast(|z| self.level(z), &self.interior, u)?;
        let point = &self.interior + u * r;
        let normal = self.gradient(&point);
        let along = normal.dot(u);
        if !(along > 0.0) {
            return Err(Error::VanishingGradient);
        }
        let d = &point - x;
        let full = (&d - &normal * (d.dot(u) / along)) * r;
        let grad = &full - u * full.dot(u);
        Ok(RayEval {
            value: 0.5 * d.norm_squared(),
            grad,
            point,
            normal,
        })
    }
}

struct RayEval {
    value: f64,
    /// Gradient of `f` projected onto the tangent space of the sphere at `u`.
    grad: Point,
    point: Point,
    normal: Point,
}

impl RayEval {
    /// Component of `x − p` orthogonal to `∇F(p)`.
    fn residual(&self, x: &Point) -> f64 {
        let n = self.normal.normalize();
        let w = x - &self.point;
        (&w - &n * w.dot(&n)).norm()
    }
}

/// Distance `t > 0` at which the ray `anchor + t·u` crosses `{F = 0}`.
///
/// `F(anchor)` must be negative. The bracket is grown by doubling and then
/// refined with a fixed number of bisection steps.
pub fn ray_cast(level: impl Fn(&Point) -> f64, anchor: &Point, direction: &Point) -> Result<f64> {
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut doublings = 0;
    while level(&(anchor + direction * hi)) <= 0.0 {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 64 {
            return Err(Error::RayCast);
        }
    }
    for _ in 0..tolerances::RAY_BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if level(&(anchor + direction * mid)) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
