//! Plain-data exports: trajectories as CSV or JSON, PBS meshes as CSV or
//! indexed-triangle JSON.
//!
//! Floats are written with Rust's shortest round-trip formatting, so parsing
//! an export recovers the exact values.

use serde_json::{json, Value};

use crate::barrier_geometry::PbsMesh;
use crate::simulator::TrajectoryRecord;
use crate::Point;

fn coords(p: &Point) -> Vec<f64> {
    p.iter().copied().collect()
}

fn axis_headers(prefix: &str, n: usize) -> impl Iterator<Item = String> + '_ {
    (0..n).map(move |i| format!("{prefix}_{i}"))
}

fn csv_string(headers: Vec<String>, rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    // Writing to a Vec cannot fail.
    w.write_record(&headers).expect("in-memory csv");
    for r in rows {
        w.write_record(&r).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv output is utf-8")
}

/// One line per recorded step: `t`, `x_P_*`, `x_E_*`, `barrier`, `region`,
/// `dir_P_*`, `dir_E_*`.
pub fn trajectory_csv(rec: &TrajectoryRecord) -> String {
    let n = rec.rows.first().map_or(0, |r| r.x_p.len());
    let mut headers = vec!["t".to_string()];
    headers.extend(axis_headers("x_P", n));
    headers.extend(axis_headers("x_E", n));
    headers.push("barrier".into());
    headers.push("region".into());
    headers.extend(axis_headers("dir_P", n));
    headers.extend(axis_headers("dir_E", n));
    let rows = rec.rows.iter().map(|r| {
        let mut out = vec![r.t.to_string()];
        out.extend(r.x_p.iter().map(f64::to_string));
        out.extend(r.x_e.iter().map(f64::to_string));
        out.push(r.barrier.to_string());
        out.push(r.region.name().to_string());
        out.extend(r.dir_p.iter().map(f64::to_string));
        out.extend(r.dir_e.iter().map(f64::to_string));
        out
    });
    csv_string(headers, rows)
}

/// Full record with metadata.
pub fn trajectory_json(rec: &TrajectoryRecord) -> Value {
    let rows: Vec<Value> = rec
        .rows
        .iter()
        .map(|r| {
            json!({
                "t": r.t,
                "x_P": coords(&r.x_p),
                "x_E": coords(&r.x_e),
                "barrier": r.barrier,
                "region": r.region.name(),
                "dir_P": coords(&r.dir_p),
                "dir_E": coords(&r.dir_e),
            })
        })
        .collect();
    json!({
        "outcome": rec.outcome.name(),
        "t_f": rec.t_f,
        "payoff": rec.payoff,
        "switch_times": rec.switch_times,
        "capture_radius": rec.capture_radius,
        "dt": rec.dt,
        "steps": rec.rows.len(),
        "rows": rows,
    })
}

/// One line per successful sample: `index`, `p_*`, `pbs_*`, `xi_plus`,
/// `evader_in_target`.
pub fn mesh_csv(mesh: &PbsMesh) -> String {
    let n = mesh.dim;
    let mut headers = vec!["index".to_string()];
    headers.extend(axis_headers("p", n));
    headers.extend(axis_headers("pbs", n));
    headers.push("xi_plus".into());
    headers.push("evader_in_target".into());
    let rows = mesh.samples.iter().enumerate().filter_map(|(i, s)| {
        let s = s.as_ref()?;
        let mut out = vec![i.to_string()];
        out.extend(s.boundary_point.iter().map(f64::to_string));
        out.extend(s.pbs_point.iter().map(f64::to_string));
        out.push(s.xi_plus.to_string());
        out.push(s.evader_in_target.to_string());
        Some(out)
    });
    csv_string(headers, rows)
}

/// Indexed mesh: `vertices` holds the PBS points of successful samples in
/// sample order, and `triangles` (3-D) or `segments` (2-D) index into it.
/// `sample_index[k]` is the grid index of vertex `k`.
pub fn mesh_json(mesh: &PbsMesh) -> Value {
    let mut remap = vec![usize::MAX; mesh.samples.len()];
    let mut vertices = Vec::new();
    let mut boundary = Vec::new();
    let mut xi = Vec::new();
    let mut flagged = Vec::new();
    let mut sample_index = Vec::new();
    for (i, s) in mesh.samples.iter().enumerate() {
        if let Some(s) = s {
            remap[i] = vertices.len();
            vertices.push(coords(&s.pbs_point));
            boundary.push(coords(&s.boundary_point));
            xi.push(s.xi_plus);
            flagged.push(s.evader_in_target);
            sample_index.push(i);
        }
    }
    let triangles: Vec<[usize; 3]> = mesh
        .triangles()
        .into_iter()
        .map(|t| [remap[t[0]], remap[t[1]], remap[t[2]]])
        .collect();
    let segments: Vec<[usize; 2]> = mesh
        .segments()
        .into_iter()
        .map(|s| [remap[s[0]], remap[s[1]]])
        .collect();
    let failures: Vec<Value> = mesh
        .failures
        .iter()
        .map(|f| json!({ "index": f.index, "reason": f.reason }))
        .collect();
    json!({
        "dim": mesh.dim,
        "rows": mesh.rows,
        "cols": mesh.cols,
        "wraps": mesh.wraps,
        "vertices": vertices,
        "boundary_points": boundary,
        "xi_plus": xi,
        "evader_in_target": flagged,
        "sample_index": sample_index,
        "triangles": triangles,
        "segments": segments,
        "failures": failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barrier_geometry::{sample_pbs_analytic, sample_pbs_mesh};
    use crate::convex_sets::TargetSet;
    use crate::game::GameConfig;
    use crate::simulator::{simulate, Scenario};
    use nalgebra::dvector;

    #[test]
    fn trajectory_csv_round_trips_values() {
        let cfg = GameConfig::new(0.5, 1.0, 2).unwrap();
        let target = TargetSet::singleton(dvector![0.0, 0.0]);
        let sc = Scenario::new(cfg, target, dvector![1.0, 0.0], dvector![0.7, 0.0]);
        let rec = simulate(&sc).unwrap();
        let text = trajectory_csv(&rec);
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let headers = r.headers().unwrap().clone();
        assert_eq!(headers.len(), 1 + 2 + 2 + 2 + 2 + 2);
        assert_eq!(&headers[0], "t");
        let rows: Vec<csv::StringRecord> = r.records().map(|x| x.unwrap()).collect();
        assert_eq!(rows.len(), rec.rows.len());
        let last = rows.last().unwrap();
        assert_eq!(last[0].parse::<f64>().unwrap(), rec.t_f);
        assert_eq!(last[3].parse::<f64>().unwrap(), rec.final_row().x_e[0]);

        let j = trajectory_json(&rec);
        assert_eq!(j["outcome"], "Captured");
        assert_eq!(j["rows"].as_array().unwrap().len(), rec.rows.len());
    }

    #[test]
    fn planar_mesh_exports() {
        let cfg = GameConfig::new(0.5, 1.0, 2).unwrap();
        let ball = TargetSet::ball(dvector![0.0, 0.0], 1.0).unwrap();
        let mesh = sample_pbs_analytic(&ball, &dvector![2.0, 0.0], &cfg, 16).unwrap();
        let j = mesh_json(&mesh);
        assert_eq!(j["vertices"].as_array().unwrap().len(), 16);
        assert_eq!(j["segments"].as_array().unwrap().len(), 16);
        assert!(j["triangles"].as_array().unwrap().is_empty());
        let text = mesh_csv(&mesh);
        assert_eq!(text.lines().count(), 17);
        assert!(text.starts_with("index,p_0,p_1,pbs_0,pbs_1,xi_plus,evader_in_target"));
    }

    #[test]
    fn spatial_mesh_triangles_index_vertices() {
        let cfg = GameConfig::new(0.5, 1.0, 3).unwrap();
        let e = TargetSet::ellipsoid(Point::zeros(3), dvector![0.8, 0.4, 0.4]).unwrap();
        let mesh = sample_pbs_mesh(&e, &dvector![-0.8, 0.0, 0.5], &cfg, 6).unwrap();
        let j = mesh_json(&mesh);
        let nv = j["vertices"].as_array().unwrap().len();
        let tris = j["triangles"].as_array().unwrap();
        assert!(!tris.is_empty());
        for t in tris {
            for k in t.as_array().unwrap() {
                assert!((k.as_u64().unwrap() as usize) < nv);
            }
        }
    }
}
