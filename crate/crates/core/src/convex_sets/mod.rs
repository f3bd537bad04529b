//! Closed convex target sets.
//!
//! [`TargetSet`] covers the shapes the game is usually played against.
//! Singletons, half-spaces and balls have closed-form projections; the
//! ellipsoid is projected with a scalar Newton iteration on the KKT
//! multiplier, polytopes with Dykstra's alternating projections, and
//! general smooth sublevel sets `{F <= 0}` with a spectral projected
//! gradient method over ray directions.

mod dykstra;
mod ellipsoid;
mod level_set;

use std::fmt;

use nalgebra::DVector;

pub use self::dykstra::dykstra;
pub use self::ellipsoid::Ellipsoid;
pub use self::level_set::{ray_cast, LevelFn, LevelSet};

use crate::error::{Error, Result};
use crate::tolerances;
use crate::Point;

/// A half-space `{z : <a, z> <= b}` with unit normal `a`.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfSpace {
    normal: Point,
    offset: f64,
}

impl HalfSpace {
    /// Builds the half-space `<normal, z> <= offset`. The pair is rescaled so the
    /// stored normal has unit length.
    pub fn new(normal: Point, offset: f64) -> Result<Self> {
        let norm = normal.norm();
        if !(norm.is_finite() && norm > 0.0) || !offset.is_finite() {
            return Err(Error::InvalidParameter(
                "half-space normal must be finite and nonzero".into(),
            ));
        }
        Ok(Self {
            normal: normal / norm,
            offset: offset / norm,
        })
    }

    pub fn normal(&self) -> &Point {
        &self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Signed distance of `z` to the bounding hyperplane, positive outside.
    pub fn signed_distance(&self, z: &Point) -> f64 {
        self.normal.dot(z) - self.offset
    }

    pub fn project(&self, x: &Point) -> Point {
        let excess = self.signed_distance(x);
        if excess <= 0.0 {
            x.clone()
        } else {
            x - &self.normal * excess
        }
    }
}

/// A closed Euclidean ball.
#[derive(Clone, Debug, PartialEq)]
pub struct NormBall {
    center: Point,
    radius: f64,
}

impl NormBall {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidParameter(
                "ball radius must be strictly positive".into(),
            ));
        }
        Ok(Self { center, radius })
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn project(&self, x: &Point) -> Point {
        let offset = x - &self.center;
        let dist = offset.norm();
        if dist <= self.radius {
            x.clone()
        } else {
            &self.center + offset * (self.radius / dist)
        }
    }
}

/// A polytope in H-representation: the intersection of finitely many half-spaces.
#[derive(Clone, Debug, PartialEq)]
pub struct Polytope {
    faces: Vec<HalfSpace>,
}

impl Polytope {
    pub fn new(faces: Vec<HalfSpace>) -> Result<Self> {
        let Some(first) = faces.first() else {
            return Err(Error::InvalidParameter(
                "polytope needs at least one half-space".into(),
            ));
        };
        let dim = first.normal.len();
        if let Some(bad) = faces.iter().find(|f| f.normal.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.normal.len(),
            });
        }
        Ok(Self { faces })
    }

    pub fn faces(&self) -> &[HalfSpace] {
        &self.faces
    }

    fn max_violation(&self, z: &Point) -> f64 {
        self.faces
            .iter()
            .map(|f| f.signed_distance(z))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Which closed form or solver backs a [`TargetSet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TargetKind {
    Singleton,
    HalfSpace,
    NormBall,
    Ellipsoid,
    Polytope,
    SmoothLevelSet,
}

impl TargetKind {
    pub fn name(self) -> &'static str {
        match self {
            TargetKind::Singleton => "singleton",
            TargetKind::HalfSpace => "half-space",
            TargetKind::NormBall => "ball",
            TargetKind::Ellipsoid => "ellipsoid",
            TargetKind::Polytope => "polytope",
            TargetKind::SmoothLevelSet => "level set",
        }
    }
}

impl fmt::Display for TargetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A nonempty closed convex target set `Ω ⊂ ℝⁿ`.
///
/// Values are immutable once built and every operation is a pure function,
/// so a `TargetSet` can be shared freely between threads.
#[derive(Clone, Debug)]
pub enum TargetSet {
    Singleton(Point),
    HalfSpace(HalfSpace),
    NormBall(NormBall),
    Ellipsoid(Ellipsoid),
    Polytope(Polytope),
    SmoothLevelSet(LevelSet),
}

impl TargetSet {
    pub fn singleton(point: Point) -> Self {
        TargetSet::Singleton(point)
    }

    pub fn half_space(normal: Point, offset: f64) -> Result<Self> {
        HalfSpace::new(normal, offset).map(TargetSet::HalfSpace)
    }

    pub fn ball(center: Point, radius: f64) -> Result<Self> {
        NormBall::new(center, radius).map(TargetSet::NormBall)
    }

    /// Axis-aligned ellipsoid; use [`Ellipsoid::with_rotation`] for a general
    /// orientation.
    pub fn ellipsoid(center: Point, semi_axes: Point) -> Result<Self> {
        Ellipsoid::new(center, semi_axes).map(TargetSet::Ellipsoid)
    }

    pub fn polytope(faces: Vec<HalfSpace>) -> Result<Self> {
        Polytope::new(faces).map(TargetSet::Polytope)
    }

    pub fn kind(&self) -> TargetKind {
        match self {
            TargetSet::Singleton(_) => TargetKind::Singleton,
            TargetSet::HalfSpace(_) => TargetKind::HalfSpace,
            TargetSet::NormBall(_) => TargetKind::NormBall,
            TargetSet::Ellipsoid(_) => TargetKind::Ellipsoid,
            TargetSet::Polytope(_) => TargetKind::Polytope,
            TargetSet::SmoothLevelSet(_) => TargetKind::SmoothLevelSet,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            TargetSet::Singleton(c) => c.len(),
            TargetSet::HalfSpace(h) => h.normal.len(),
            TargetSet::NormBall(b) => b.center.len(),
            TargetSet::Ellipsoid(e) => e.dim(),
            TargetSet::Polytope(p) => p.faces[0].normal.len(),
            TargetSet::SmoothLevelSet(l) => l.dim(),
        }
    }

    pub(crate) fn check_dim(&self, z: &Point) -> Result<()> {
        let expected = self.dim();
        if z.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: z.len(),
            });
        }
        Ok(())
    }

    /// Membership test, with [`tolerances::MEMBERSHIP`] slack.
    pub fn contains(&self, z: &Point) -> Result<bool> {
        self.check_dim(z)?;
        let tol = tolerances::MEMBERSHIP;
        Ok(match self {
            TargetSet::Singleton(c) => (z - c).norm() <= tol,
            TargetSet::HalfSpace(h) => h.signed_distance(z) <= tol,
            TargetSet::NormBall(b) => (z - &b.center).norm() <= b.radius + tol,
            TargetSet::Ellipsoid(e) => e.level(z) <= tol,
            TargetSet::Polytope(p) => p.max_violation(z) <= tol,
            TargetSet::SmoothLevelSet(l) => l.level(z) <= tol,
        })
    }

    /// Euclidean projection `argmin_{z ∈ Ω} ‖x − z‖`.
    pub fn project(&self, x: &Point) -> Result<Point> {
        self.check_dim(x)?;
        match self {
            TargetSet::Singleton(c) => Ok(c.clone()),
            TargetSet::HalfSpace(h) => Ok(h.project(x)),
            TargetSet::NormBall(b) => Ok(b.project(x)),
            TargetSet::Ellipsoid(e) => e.project(x),
            TargetSet::Polytope(p) => {
                if p.max_violation(x) <= 0.0 {
                    return Ok(x.clone());
                }
                let projectors: Vec<_> = p
                    .faces
                    .iter()
                    .map(|f| move |y: &Point| -> Result<Point> { Ok(f.project(y)) })
                    .collect();
                dykstra(
                    x,
                    &projectors,
                    tolerances::PROJ_CLOSED_FORM * 1e-3,
                    tolerances::GRADIENT_MAX_ITER,
                )
            }
            TargetSet::SmoothLevelSet(l) => l.project(x),
        }
    }

    /// `dist(x, Ω)`.
    pub fn distance(&self, x: &Point) -> Result<f64> {
        Ok((x - self.project(x)?).norm())
    }

    /// Value of the boundary function `F` when the set has one; the set is
    /// `{F <= 0}` and `∂Ω = {F = 0}`.
    ///
    /// Balls use `‖z − c‖² − r²`, ellipsoids `Σ (yᵢ/sᵢ)² − 1` in the principal
    /// frame, and half-spaces the affine `<a, z> − b`.
    pub fn level(&self, z: &Point) -> Option<f64> {
        match self {
            TargetSet::HalfSpace(h) => Some(h.signed_distance(z)),
            TargetSet::NormBall(b) => Some((z - &b.center).norm_squared() - b.radius * b.radius),
            TargetSet::Ellipsoid(e) => Some(e.level(z)),
            TargetSet::SmoothLevelSet(l) => Some(l.level(z)),
            TargetSet::Singleton(_) | TargetSet::Polytope(_) => None,
        }
    }

    /// `∇F(p)` at a boundary point.
    pub fn boundary_gradient(&self, p: &Point) -> Result<Point> {
        self.check_dim(p)?;
        let level = match self.level(p) {
            Some(v) => v,
            None => return Err(Error::NoSmoothBoundary(self.kind().name())),
        };
        if level.abs() > tolerances::ON_BOUNDARY {
            return Err(Error::NotOnBoundary { level });
        }
        let grad = match self {
            TargetSet::HalfSpace(h) => h.normal.clone(),
            TargetSet::NormBall(b) => (p - &b.center) * 2.0,
            TargetSet::Ellipsoid(e) => e.gradient(p),
            TargetSet::SmoothLevelSet(l) => l.gradient(p),
            TargetSet::Singleton(_) | TargetSet::Polytope(_) => unreachable!(),
        };
        if !(grad.norm() > 0.0) {
            return Err(Error::VanishingGradient);
        }
        Ok(grad)
    }

    /// True for sets whose boundary is a smooth closed hypersurface that can be
    /// reached by rays from [`TargetSet::anchor`].
    pub fn has_smooth_closed_boundary(&self) -> bool {
        matches!(
            self,
            TargetSet::NormBall(_) | TargetSet::Ellipsoid(_) | TargetSet::SmoothLevelSet(_)
        )
    }

    /// A representative point of the set: the center for symmetric shapes,
    /// the supplied interior point for level sets, the foot of the origin on
    /// the hyperplane for half-spaces.
    pub fn anchor(&self) -> Point {
        match self {
            TargetSet::Singleton(c) => c.clone(),
            TargetSet::HalfSpace(h) => &h.normal * h.offset,
            TargetSet::NormBall(b) => b.center.clone(),
            TargetSet::Ellipsoid(e) => e.center().clone(),
            TargetSet::Polytope(p) => {
                let origin = DVector::zeros(self.dim());
                self.project(&origin).unwrap_or_else(|_| {
                    p.faces[0].project(&origin)
                })
            }
            TargetSet::SmoothLevelSet(l) => l.interior().clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    #[test]
    fn membership_examples() {
        let ball = TargetSet::ball(dvector![0.0, 0.0, 0.0], 1.0).unwrap();
        assert!(ball.contains(&dvector![0.5, 0.0, 0.0]).unwrap());

        let hs = TargetSet::half_space(dvector![0.0, 0.0, 1.0], 0.0).unwrap();
        assert!(!hs.contains(&dvector![1.0, 2.0, 3.0]).unwrap());

        // (0.2/0.8)^2 + (0.2/0.4)^2 + (0.7/0.4)^2 = 3.375
        let ell = TargetSet::ellipsoid(dvector![0.0, 0.0, 0.0], dvector![0.8, 0.4, 0.4]).unwrap();
        assert!(!ell.contains(&dvector![0.2, 0.2, 0.7]).unwrap());
        assert!((ell.level(&dvector![0.2, 0.2, 0.7]).unwrap() - 2.375).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let ball = TargetSet::ball(dvector![0.0, 0.0], 1.0).unwrap();
        assert_eq!(
            ball.contains(&dvector![0.0, 0.0, 0.0]),
            Err(Error::DimensionMismatch { expected: 2, found: 3 })
        );
        assert!(ball.project(&dvector![1.0]).is_err());
    }

    #[test]
    fn closed_form_projections() {
        let hs = TargetSet::half_space(dvector![0.0, 0.0, 1.0], 0.0).unwrap();
        assert_eq!(hs.project(&dvector![1.0, 2.0, 3.0]).unwrap(), dvector![1.0, 2.0, 0.0]);

        let ball = TargetSet::ball(dvector![0.0, 0.0, 0.0], 1.0).unwrap();
        assert_eq!(ball.project(&dvector![2.0, 0.0, 0.0]).unwrap(), dvector![1.0, 0.0, 0.0]);

        let point = TargetSet::singleton(dvector![0.0, 0.0]);
        assert_eq!(point.project(&dvector![0.3, -0.4]).unwrap(), dvector![0.0, 0.0]);
    }

    #[test]
    fn distances() {
        let ball = TargetSet::ball(dvector![0.0, 0.0, 0.0], 1.0).unwrap();
        assert!((ball.distance(&dvector![2.0, 0.0, 0.0]).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(ball.distance(&dvector![0.1, 0.2, 0.3]).unwrap(), 0.0);

        let point = TargetSet::singleton(dvector![0.0, 0.0]);
        assert!((point.distance(&dvector![3.0, 4.0]).unwrap() - 5.0).abs() < 1e-15);
    }

    #[test]
    fn half_space_normal_is_normalized() {
        let hs = HalfSpace::new(dvector![0.0, 2.0], 4.0).unwrap();
        assert_eq!(hs.normal(), &dvector![0.0, 1.0]);
        assert_eq!(hs.offset(), 2.0);
        assert!(HalfSpace::new(dvector![0.0, 0.0], 1.0).is_err());
        assert!(NormBall::new(dvector![0.0], 0.0).is_err());
    }

    #[test]
    fn boundary_gradients() {
        let ball = TargetSet::ball(dvector![0.0, 0.0], 1.0).unwrap();
        assert_eq!(ball.boundary_gradient(&dvector![1.0, 0.0]).unwrap(), dvector![2.0, 0.0]);

        let ell = TargetSet::ellipsoid(dvector![0.0, 0.0, 0.0], dvector![0.8, 0.4, 0.4]).unwrap();
        let g = ell.boundary_gradient(&dvector![0.8, 0.0, 0.0]).unwrap();
        // 2 zᵢ / sᵢ² = 1.6 / 0.64.
        assert!((g - dvector![2.5, 0.0, 0.0]).norm() < 1e-12);

        let quartic = TargetSet::SmoothLevelSet(
            LevelSet::superellipsoid(dvector![0.0, 0.0, 0.0], dvector![1.0, 1.0, 1.0], 4.0).unwrap(),
        );
        let g = quartic.boundary_gradient(&dvector![1.0, 0.0, 0.0]).unwrap();
        assert!((g - dvector![4.0, 0.0, 0.0]).norm() < 1e-12);

        let hs = TargetSet::half_space(dvector![0.0, 1.0], 0.0).unwrap();
        assert_eq!(hs.boundary_gradient(&dvector![3.0, 0.0]).unwrap(), dvector![0.0, 1.0]);
    }

    #[test]
    fn boundary_gradient_rejections() {
        let point = TargetSet::singleton(dvector![0.0, 0.0]);
        assert!(matches!(
            point.boundary_gradient(&dvector![0.0, 0.0]),
            Err(Error::NoSmoothBoundary(_))
        ));
        let square = TargetSet::polytope(vec![
            HalfSpace::new(dvector![1.0, 0.0], 1.0).unwrap(),
            HalfSpace::new(dvector![-1.0, 0.0], 1.0).unwrap(),
        ])
        .unwrap();
        assert!(matches!(
            square.boundary_gradient(&dvector![1.0, 0.0]),
            Err(Error::NoSmoothBoundary(_))
        ));
        let ball = TargetSet::ball(dvector![0.0, 0.0], 1.0).unwrap();
        assert!(matches!(
            ball.boundary_gradient(&dvector![2.0, 0.0]),
            Err(Error::NotOnBoundary { .. })
        ));
    }

    #[test]
    fn polytope_projection_onto_box_corner() {
        let unit_box = TargetSet::polytope(vec![
            HalfSpace::new(dvector![1.0, 0.0], 1.0).unwrap(),
            HalfSpace::new(dvector![-1.0, 0.0], 1.0).unwrap(),
            HalfSpace::new(dvector![0.0, 1.0], 1.0).unwrap(),
            HalfSpace::new(dvector![0.0, -1.0], 1.0).unwrap(),
        ])
        .unwrap();
        let p = unit_box.project(&dvector![3.0, 2.0]).unwrap();
        assert!((p - dvector![1.0, 1.0]).norm() < 1e-10);
        let p = unit_box.project(&dvector![0.5, 4.0]).unwrap();
        assert!((p - dvector![0.5, 1.0]).norm() < 1e-10);
    }

    #[test]
    fn wedge_apex_projection() {
        // Both points lie in the polar cone, so they project onto the apex.
        let wedge = TargetSet::polytope(vec![
            HalfSpace::new(dvector![1.0, 1.0], 0.0).unwrap(),
            HalfSpace::new(dvector![-1.0, 1.0], 0.0).unwrap(),
        ])
        .unwrap();
        let p = wedge.project(&dvector![0.0, 2.0]).unwrap();
        assert!(p.norm() < 1e-9, "{p}");
        let p = wedge.project(&dvector![1.0, 3.0]).unwrap();
        assert!(p.norm() < 1e-9, "{p}");
    }
}
