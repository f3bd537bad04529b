//! SVG rendering of planar PBS curves.

use std::fmt::Write;

use target_defense::barrier_geometry::PbsMesh;
use target_defense::Point;

const SIZE: f64 = 600.0;
const MARGIN: f64 = 30.0;

/// The PBS curve as a polyline (closed unless the mesh is an unbounded
/// half-space branch) plus the boundary samples and the defender, in a
/// y-up viewport fitted to the data. `None` unless the mesh is planar.
pub fn pbs_svg(mesh: &PbsMesh, x_p0: &Point) -> Option<String> {
    if mesh.dim != 2 {
        return None;
    }
    let curve: Vec<&Point> = mesh.points().map(|s| &s.pbs_point).collect();
    let boundary: Vec<&Point> = mesh.points().map(|s| &s.boundary_point).collect();
    let all = curve.iter().chain(boundary.iter()).copied().chain(std::iter::once(x_p0));
    let (mut lo_x, mut lo_y, mut hi_x, mut hi_y) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in all {
        lo_x = lo_x.min(p[0]);
        hi_x = hi_x.max(p[0]);
        lo_y = lo_y.min(p[1]);
        hi_y = hi_y.max(p[1]);
    }
    let span = (hi_x - lo_x).max(hi_y - lo_y).max(1e-12);
    let scale = (SIZE - 2.0 * MARGIN) / span;
    let map = |p: &Point| (MARGIN + (p[0] - lo_x) * scale, SIZE - MARGIN - (p[1] - lo_y) * scale);
    let coords = |pts: &[&Point]| {
        let mut s = String::new();
        for p in pts {
            let (x, y) = map(p);
            let _ = write!(s, "{x:.3},{y:.3} ");
        }
        s.trim_end().to_string()
    };
    let shape = if mesh.wraps { "polygon" } else { "polyline" };
    let (px, py) = map(x_p0);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(
        out,
        r##"  <{shape} id="target-boundary" points="{}" fill="none" stroke="#888" stroke-width="1"/>"##,
        coords(&boundary)
    );
    let _ = writeln!(
        out,
        r##"  <{shape} id="pbs" points="{}" fill="none" stroke="#c0392b" stroke-width="2"/>"##,
        coords(&curve)
    );
    let _ = writeln!(out, r##"  <circle id="defender" cx="{px:.3}" cy="{py:.3}" r="4" fill="#2c3e50"/>"##);
    out.push_str("</svg>\n");
    Some(out)
}
