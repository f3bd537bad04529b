//! Projected barrier surface (PBS) for a fixed defender position.
//!
//! With `x_P⁰` frozen, the attacker positions `z` with `B(x_P⁰, z) = 0` form a
//! hypersurface in `ℝⁿ` separating the attacker's winning positions from the
//! defender's. Singletons, half-spaces and balls give it in implicit closed
//! form ([`pbs_analytic`]). For any target with a smooth boundary `{F = 0}`
//! the surface is the image of the boundary under the transformation map
//! ([`map_boundary_to_pbs`]): each boundary point `p` is the tangency point of
//! the safe region for exactly one PBS point
//!
//! ```text
//! x_E = ξ⁺ ∇F(p) + γ² x_P⁰ + (1 − γ²) p
//! ```
//!
//! where `ξ⁺` is the positive root of
//! `‖∇F‖² ξ² + 2γ² ⟨x_P⁰ − p, ∇F⟩ ξ − γ²(1 − γ²)‖x_P⁰ − p‖² = 0`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::convex_sets::{ray_cast, TargetSet};
use crate::error::{Error, Result};
use crate::game::GameConfig;
use crate::Point;

/// One boundary point and its image on the PBS.
#[derive(Clone, Debug, PartialEq)]
pub struct PbsSample {
    pub boundary_point: Point,
    pub xi_plus: f64,
    pub pbs_point: Point,
    /// The mapped attacker position already lies in the target. This happens
    /// when the defender starts inside the (permeable) target; the point still
    /// has zero barrier value.
    pub evader_in_target: bool,
}

/// Residual of the implicit PBS equation for the closed-form targets.
///
/// The zero set is the PBS and the sign agrees with the barrier function:
/// positive on the defender's side, negative on the attacker's.
///
/// * singleton `{c}`: `‖z − c‖ − γ ‖x_P⁰ − c‖`
/// * half-space `⟨a, z⟩ <= b`: `ζ²/(γ²h²) − ‖w‖²/((1 − γ²)h²) − 1`, where
///   `ζ = ⟨a, z⟩ − b`, `h = ⟨a, x_P⁰⟩ − b` and `w` is the component of
///   `z − x_P⁰` parallel to the hyperplane (upper sheet of a hyperboloid
///   centered at the foot of `x_P⁰`)
/// * ball `(c, r)`: `‖z − c − γ²(x_P⁰ − c)‖ − γ ‖z − x_P⁰‖ − (1 − γ²) r`
pub fn pbs_analytic(target: &TargetSet, x_p0: &Point, cfg: &GameConfig, query: &Point) -> Result<f64> {
    cfg.check_point(x_p0)?;
    cfg.check_point(query)?;
    target.check_dim(query)?;
    if target.contains(query)? {
        return Err(Error::QueryInsideTarget);
    }
    analytic_residual(target, x_p0, cfg.gamma(), query)
}

fn analytic_residual(target: &TargetSet, x_p0: &Point, gamma: f64, z: &Point) -> Result<f64> {
    let g2 = gamma * gamma;
    match target {
        TargetSet::Singleton(c) => Ok((z - c).norm() - gamma * (x_p0 - c).norm()),
        TargetSet::HalfSpace(hs) => {
            let h = hs.signed_distance(x_p0);
            if h.abs() <= f64::EPSILON {
                return Err(Error::Degenerate("defender lies on the bounding hyperplane"));
            }
            let zeta = hs.signed_distance(z);
            let diff = z - x_p0;
            let w = &diff - hs.normal() * hs.normal().dot(&diff);
            let h2 = h * h;
            Ok(zeta * zeta / (g2 * h2) - w.norm_squared() / ((1.0 - g2) * h2) - 1.0)
        }
        TargetSet::NormBall(b) => {
            let c = b.center();
            let shifted = z - c - (x_p0 - c) * g2;
            Ok(shifted.norm() - gamma * (z - x_p0).norm() - (1.0 - g2) * b.radius())
        }
        other => Err(Error::InvalidParameter(format!(
            "no closed-form PBS for a {} target",
            other.kind()
        ))),
    }
}

/// Positive root `ξ⁺` of the tangency quadratic, computed without
/// cancellation.
pub fn xi_plus(p: &Point, grad: &Point, x_p0: &Point, cfg: &GameConfig) -> Result<f64> {
    let gamma = cfg.gamma();
    let g2 = gamma * gamma;
    let a = grad.norm_squared();
    if !(a > 0.0) {
        return Err(Error::VanishingGradient);
    }
    let offset = x_p0 - p;
    let dist2 = offset.norm_squared();
    if !(dist2 > 0.0) {
        return Err(Error::Degenerate("boundary point coincides with the defender"));
    }
    // a ξ² + 2 b ξ + c = 0 with c < 0, so exactly one root is positive.
    let b = g2 * offset.dot(grad);
    let c = -g2 * (1.0 - g2) * dist2;
    let root = (b * b - a * c).sqrt();
    let xi = if b >= 0.0 { c / -(b + root) } else { (root - b) / a };
    Ok(xi)
}

/// Image of a boundary point on the PBS.
pub fn map_boundary_to_pbs(
    p: &Point,
    target: &TargetSet,
    x_p0: &Point,
    cfg: &GameConfig,
) -> Result<PbsSample> {
    cfg.check_point(p)?;
    cfg.check_point(x_p0)?;
    let grad = target.boundary_gradient(p)?;
    let xi = xi_plus(p, &grad, x_p0, cfg)?;
    let g2 = cfg.gamma() * cfg.gamma();
    let pbs_point = &grad * xi + x_p0 * g2 + p * (1.0 - g2);
    let evader_in_target = target.contains(&pbs_point)?;
    Ok(PbsSample {
        boundary_point: p.clone(),
        xi_plus: xi,
        pbs_point,
        evader_in_target,
    })
}

/// Single-expression form of the transformation map,
///
/// ```text
/// γ² x_P⁰ + (1 − γ²) p + ∇F/‖∇F‖² · [ −γ² k + γ (γ² k² + (1 − γ²) ‖∇F‖² ‖x_P⁰ − p‖²)^½ ]
/// ```
///
/// with `k = ⟨x_P⁰ − p, ∇F(p)⟩`. Kept as an independent cross-check of
/// [`map_boundary_to_pbs`].
pub fn map_boundary_to_pbs_closed_form(
    p: &Point,
    target: &TargetSet,
    x_p0: &Point,
    cfg: &GameConfig,
) -> Result<Point> {
    let grad = target.boundary_gradient(p)?;
    let gamma = cfg.gamma();
    let g2 = gamma * gamma;
    let a = grad.norm_squared();
    let offset = x_p0 - p;
    let k = offset.dot(&grad);
    let bracket = -g2 * k + gamma * (g2 * k * k + (1.0 - g2) * a * offset.norm_squared()).sqrt();
    Ok(x_p0 * g2 + p * (1.0 - g2) + &grad * (bracket / a))
}

/// A sampled PBS on a regular parameter grid.
///
/// Vertex `(row, col)` is stored at `row * cols + col`. In three dimensions
/// rows run over polar angle and columns over azimuth (wrapping); in two
/// dimensions there is a single row forming a closed curve. Half-space
/// surfaces are unbounded and use a tangential grid that does not wrap.
#[derive(Clone, Debug)]
pub struct PbsMesh {
    pub dim: usize,
    pub rows: usize,
    pub cols: usize,
    pub wraps: bool,
    pub samples: Vec<Option<PbsSample>>,
    pub failures: Vec<SampleFailure>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleFailure {
    pub index: usize,
    pub reason: String,
}

impl PbsMesh {
    fn from_results(dim: usize, rows: usize, cols: usize, wraps: bool, results: Vec<Result<PbsSample>>) -> Self {
        let mut samples = Vec::with_capacity(results.len());
        let mut failures = Vec::new();
        for (index, r) in results.into_iter().enumerate() {
            match r {
                Ok(s) => samples.push(Some(s)),
                Err(e) => {
                    samples.push(None);
                    failures.push(SampleFailure {
                        index,
                        reason: e.to_string(),
                    });
                }
            }
        }
        Self {
            dim,
            rows,
            cols,
            wraps,
            samples,
            failures,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = &PbsSample> {
        self.samples.iter().flatten()
    }

    /// Triangles of the grid (three-dimensional meshes only), skipping any that
    /// touch a failed vertex.
    pub fn triangles(&self) -> Vec<[usize; 3]> {
        if self.dim != 3 || self.rows < 2 || self.cols < 2 {
            return Vec::new();
        }
        let col_pairs = if self.wraps { self.cols } else { self.cols - 1 };
        let mut tris = Vec::new();
        for i in 0..self.rows - 1 {
            for j in 0..col_pairs {
                let j1 = (j + 1) % self.cols;
                let a = i * self.cols + j;
                let b = i * self.cols + j1;
                let c = (i + 1) * self.cols + j;
                let d = (i + 1) * self.cols + j1;
                for tri in [[a, c, b], [b, c, d]] {
                    if tri.iter().all(|&v| self.samples[v].is_some()) {
                        tris.push(tri);
                    }
                }
            }
        }
        tris
    }

    /// Consecutive vertex pairs of a two-dimensional curve.
    pub fn segments(&self) -> Vec<[usize; 2]> {
        if self.dim != 2 || self.cols < 2 {
            return Vec::new();
        }
        let n = self.cols;
        let count = if self.wraps { n } else { n - 1 };
        (0..count)
            .map(|j| [j, (j + 1) % n])
            .filter(|[a, b]| self.samples[*a].is_some() && self.samples[*b].is_some())
            .collect()
    }
}

/// Unit directions of the deterministic sphere parameterization used for
/// meshing, with the grid shape `(rows, cols)`.
///
/// In ℝ² they are `resolution` equally spaced angles starting at `(1, 0)`; in
/// ℝ³ a `resolution × resolution` grid of polar angles `π(i + ½)/res` and
/// azimuths `2πj/res`. With `resolution = 1` both reduce to `e₁`.
pub fn sphere_directions(dim: usize, resolution: usize) -> Result<(usize, usize, Vec<Point>)> {
    if resolution == 0 {
        return Err(Error::InvalidParameter("resolution must be at least 1".into()));
    }
    match dim {
        2 => {
            let dirs = (0..resolution)
                .map(|k| {
                    let t = 2.0 * PI * k as f64 / resolution as f64;
                    Point::from_vec(vec![t.cos(), t.sin()])
                })
                .collect();
            Ok((1, resolution, dirs))
        }
        3 => {
            let mut dirs = Vec::with_capacity(resolution * resolution);
            for i in 0..resolution {
                let polar = PI * (i as f64 + 0.5) / resolution as f64;
                for j in 0..resolution {
                    let azimuth = 2.0 * PI * j as f64 / resolution as f64;
                    dirs.push(Point::from_vec(vec![
                        polar.sin() * azimuth.cos(),
                        polar.sin() * azimuth.sin(),
                        polar.cos(),
                    ]));
                }
            }
            Ok((resolution, resolution, dirs))
        }
        _ => Err(Error::InvalidParameter(format!(
            "PBS meshing supports dimensions 2 and 3, got {dim}"
        ))),
    }
}

/// Samples the boundary by ray casting from the target's anchor and maps each
/// sample through [`map_boundary_to_pbs`]. Samples are independent and
/// computed in parallel; the output order follows [`sphere_directions`].
pub fn sample_pbs_mesh(
    target: &TargetSet,
    x_p0: &Point,
    cfg: &GameConfig,
    resolution: usize,
) -> Result<PbsMesh> {
    cfg.check_point(x_p0)?;
    if !target.has_smooth_closed_boundary() {
        return Err(Error::NoSmoothBoundary(target.kind().name()));
    }
    let (rows, cols, dirs) = sphere_directions(cfg.dim(), resolution)?;
    let anchor = target.anchor();
    let level = |z: &Point| target.level(z).expect("smooth target has a level function");
    let results: Vec<Result<PbsSample>> = dirs
        .par_iter()
        .map(|u| {
            let t = ray_cast(level, &anchor, u)?;
            let p = &anchor + u * t;
            map_boundary_to_pbs(&p, target, x_p0, cfg)
        })
        .collect();
    Ok(PbsMesh::from_results(cfg.dim(), rows, cols, true, results))
}

/// Samples the closed-form PBS of a singleton, half-space or ball target.
///
/// Each vertex carries the tangency point `proj_Ω(α)` as its boundary point
/// and the `ξ` that reproduces it through the transformation map (for a
/// singleton the gradient is taken as a unit vector).
pub fn sample_pbs_analytic(
    target: &TargetSet,
    x_p0: &Point,
    cfg: &GameConfig,
    resolution: usize,
) -> Result<PbsMesh> {
    cfg.check_point(x_p0)?;
    let gamma = cfg.gamma();
    let dim = cfg.dim();
    let (rows, cols, wraps, points): (usize, usize, bool, Vec<Result<Point>>) = match target {
        TargetSet::Singleton(c) => {
            let radius = gamma * (x_p0 - c).norm();
            let (rows, cols, dirs) = sphere_directions(dim, resolution)?;
            let pts = dirs.into_iter().map(|u| Ok(c + u * radius)).collect();
            (rows, cols, true, pts)
        }
        TargetSet::NormBall(ball) => {
            let (rows, cols, dirs) = sphere_directions(dim, resolution)?;
            let c = ball.center();
            let pts = dirs
                .par_iter()
                .map(|u| {
                    let residual = |t: f64| analytic_residual(target, x_p0, gamma, &(c + u * t));
                    let t = bisect_increasing(residual, ball.radius())?;
                    Ok(c + u * t)
                })
                .collect();
            (rows, cols, true, pts)
        }
        TargetSet::HalfSpace(hs) => {
            if resolution == 0 {
                return Err(Error::InvalidParameter("resolution must be at least 1".into()));
            }
            let h = hs.signed_distance(x_p0);
            if h.abs() <= f64::EPSILON {
                return Err(Error::Degenerate("defender lies on the bounding hyperplane"));
            }
            let a = hs.normal();
            let foot = x_p0 - a * h;
            let basis = tangent_basis(a);
            let extent = 3.0 * h.abs();
            let coord = |k: usize| -> f64 {
                if resolution == 1 {
                    0.0
                } else {
                    -extent + 2.0 * extent * k as f64 / (resolution - 1) as f64
                }
            };
            let offsets: Vec<Point> = match dim {
                2 => (0..resolution).map(|k| &basis[0] * coord(k)).collect(),
                3 => (0..resolution)
                    .flat_map(|i| (0..resolution).map(move |j| (i, j)))
                    .map(|(i, j)| &basis[0] * coord(i) + &basis[1] * coord(j))
                    .collect(),
                _ => {
                    return Err(Error::InvalidParameter(format!(
                        "PBS meshing supports dimensions 2 and 3, got {dim}"
                    )))
                }
            };
            let (rows, cols) = if dim == 2 { (1, resolution) } else { (resolution, resolution) };
            let g2 = gamma * gamma;
            let pts = offsets
                .into_iter()
                .map(|w| {
                    let zeta = gamma * h.abs() * (1.0 + w.norm_squared() / ((1.0 - g2) * h * h)).sqrt();
                    Ok(&foot + &w + a * zeta)
                })
                .collect();
            (rows, cols, false, pts)
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "no closed-form PBS for a {} target",
                other.kind()
            )))
        }
    };

    let g2 = gamma * gamma;
    let results = points
        .into_iter()
        .map(|z| {
            let z = z?;
            let alpha = (&z - x_p0 * g2) / (1.0 - g2);
            let p = target.project(&alpha)?;
            let normal_scale = match target {
                TargetSet::NormBall(b) => 2.0 * (&p - b.center()).norm(),
                _ => 1.0,
            };
            let xi = (&z - x_p0 * g2 - &p * (1.0 - g2)).norm() / normal_scale;
            Ok(PbsSample {
                evader_in_target: target.contains(&z)?,
                boundary_point: p,
                xi_plus: xi,
                pbs_point: z,
            })
        })
        .collect();
    Ok(PbsMesh::from_results(dim, rows, cols, wraps, results))
}

/// Root of a function that is negative at `lo` and positive far out, by
/// bracket doubling and bisection.
fn bisect_increasing(f: impl Fn(f64) -> Result<f64>, lo: f64) -> Result<f64> {
    let mut lo = lo;
    let mut hi = 2.0 * lo.max(1.0);
    let mut doublings = 0;
    while f(hi)? <= 0.0 {
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
        if f(mid)? <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Orthonormal basis of the hyperplane orthogonal to the unit vector `a`.
fn tangent_basis(a: &Point) -> Vec<Point> {
    let n = a.len();
    let mut basis: Vec<Point> = Vec::with_capacity(n.saturating_sub(1));
    for k in 0..n {
        let mut v = Point::zeros(n);
        v[k] = 1.0;
        v -= a * a.dot(&v);
        for b in &basis {
            v -= b * b.dot(&v);
        }
        let norm = v.norm();
        if norm > 1e-8 {
            basis.push(v / norm);
        }
        if basis.len() + 1 == n {
            break;
        }
    }
    basis
}
