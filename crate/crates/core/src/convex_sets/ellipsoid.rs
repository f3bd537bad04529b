use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::tolerances;
use crate::Point;

/// Ellipsoid `{c + R y : Σ (yᵢ/sᵢ)² <= 1}`.
///
/// `R` is an optional orthogonal matrix whose columns are the principal axes;
/// without it the ellipsoid is axis-aligned.
#[derive(Clone, Debug, PartialEq)]
pub struct Ellipsoid {
    center: Point,
    semi_axes: Point,
    rotation: Option<DMatrix<f64>>,
}

impl Ellipsoid {
    pub fn new(center: Point, semi_axes: Point) -> Result<Self> {
        if center.len() != semi_axes.len() {
            return Err(Error::DimensionMismatch {
                expected: center.len(),
                found: semi_axes.len(),
            });
        }
        if semi_axes.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(Error::InvalidParameter(
                "ellipsoid semi-axes must be strictly positive".into(),
            ));
        }
        Ok(Self {
            center,
            semi_axes,
            rotation: None,
        })
    }

    pub fn with_rotation(mut self, rotation: DMatrix<f64>) -> Result<Self> {
        let n = self.dim();
        if rotation.nrows() != n || rotation.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: rotation.nrows().max(rotation.ncols()),
            });
        }
        let defect = (rotation.transpose() * &rotation - DMatrix::identity(n, n)).norm();
        if defect > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "ellipsoid rotation is not orthogonal (|RᵀR − I| = {defect:.2e})"
            )));
        }
        self.rotation = Some(rotation);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn semi_axes(&self) -> &Point {
        &self.semi_axes
    }

    pub fn rotation(&self) -> Option<&DMatrix<f64>> {
        self.rotation.as_ref()
    }

    fn to_local(&self, z: &Point) -> Point {
        let d = z - &self.center;
        match &self.rotation {
            Some(r) => r.tr_mul(&d),
            None => d,
        }
    }

    fn to_world(&self, y: &Point) -> Point {
        match &self.rotation {
            Some(r) => &self.center + r * y,
            None => &self.center + y,
        }
    }

    /// `Σ (yᵢ/sᵢ)² − 1`.
    pub fn level(&self, z: &Point) -> f64 {
        let y = self.to_local(z);
        y.iter()
            .zip(self.semi_axes.iter())
            .map(|(yi, si)| (yi / si).powi(2))
            .sum::<f64>()
            - 1.0
    }

    pub fn gradient(&self, z: &Point) -> Point {
        let y = self.to_local(z);
        let local = Point::from_iterator(
            y.len(),
            y.iter()
                .zip(self.semi_axes.iter())
                .map(|(yi, si)| 2.0 * yi / (si * si)),
        );
        match &self.rotation {
            Some(r) => r * local,
            None => local,
        }
    }

    /// Projection via Newton's method on the multiplier `λ` of the KKT system
    /// `zᵢ = sᵢ² yᵢ / (sᵢ² + λ)`, `Σ (zᵢ/sᵢ)² = 1`.
    ///
    /// The secular function `g(λ) = Σ sᵢ² yᵢ² / (sᵢ² + λ)² − 1` is convex and
    /// decreasing on `λ >= 0`, so Newton started at `λ = 0` increases
    /// monotonically to the root.
    pub fn project(&self, x: &Point) -> Result<Point> {
        let y = self.to_local(x);
        let s2: Vec<f64> = self.semi_axes.iter().map(|s| s * s).collect();
        let secular = |lambda: f64| -> (f64, f64) {
            let mut g = -1.0;
            let mut dg = 0.0;
            for (yi, si2) in y.iter().zip(&s2) {
                let denom = si2 + lambda;
                let term = si2 * yi * yi / (denom * denom);
                g += term;
                dg -= 2.0 * term / denom;
            }
            (g, dg)
        };

        let (g0, _) = secular(0.0);
        if g0 <= 0.0 {
            return Ok(x.clone());
        }

        let mut lambda = 0.0;
        let mut g = g0;
        let mut converged = false;
        for _ in 0..tolerances::NEWTON_MAX_ITER {
            let (value, slope) = secular(lambda);
            g = value;
            if g <= 4.0 * f64::EPSILON {
                converged = true;
                break;
            }
            let next = lambda - g / slope;
            if !(next > lambda) || next - lambda <= f64::EPSILON * lambda {
                converged = true;
                break;
            }
            lambda = next;
        }
        if !converged {
            return Err(Error::SolverFailure {
                solver: "ellipsoid newton",
                iterations: tolerances::NEWTON_MAX_ITER,
                residual: g.abs(),
            });
        }

        let z = Point::from_iterator(
            y.len(),
            y.iter().zip(&s2).map(|(yi, si2)| si2 * yi / (si2 + lambda)),
        );
        Ok(self.to_world(&z))
    }
}
