use crate::error::{Error, Result};
use crate::Point;

/// Dykstra's alternating projection onto the intersection of convex sets.
///
/// Each entry of `projectors` is the exact projection onto one set. The
/// iteration stops once a full cycle moves neither the iterate nor any of the
/// correction increments by more than `tol`.
pub fn dykstra<P>(x0: &Point, projectors: &[P], tol: f64, max_cycles: usize) -> Result<Point>
where
    P: Fn(&Point) -> Result<Point>,
{
    let mut x = x0.clone();
    let mut increments = vec![Point::zeros(x0.len()); projectors.len()];
    let scale = 1.0 + x0.norm();
    let mut change = f64::INFINITY;

    for _ in 0..max_cycles {
        change = 0.0;
        for (project, increment) in projectors.iter().zip(increments.iter_mut()) {
            let shifted = &x + &*increment;
            let next = project(&shifted)?;
            let next_increment = &shifted - &next;
            change += (&next - &x).norm_squared() + (&next_increment - &*increment).norm_squared();
            x = next;
            *increment = next_increment;
        }
        if change.sqrt() <= tol * scale {
            return Ok(x);
        }
    }

    Err(Error::SolverFailure {
        solver: "dykstra",
        iterations: max_cycles,
        residual: change.sqrt(),
    })
}
