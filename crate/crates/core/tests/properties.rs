//! Property tests for the geometric and game-theoretic invariants.

use nalgebra::DVector;
use proptest::prelude::*;
use target_defense::barrier_geometry::{map_boundary_to_pbs, map_boundary_to_pbs_closed_form, sample_pbs_mesh};
use target_defense::tolerances::{PBS, PROJ_CLOSED_FORM, PROJ_ITERATIVE};
use target_defense::{
    apollonius, barrier, capture_plan, GameConfig, GameState, HalfSpace, LevelSet, Point, Region, TargetSet,
};

fn point(n: usize, r: f64) -> impl Strategy<Value = Point> {
    prop::collection::vec(-r..r, n).prop_map(DVector::from_vec)
}

fn unit(n: usize) -> impl Strategy<Value = Point> {
    point(n, 1.0).prop_filter_map("nonzero direction", |v| {
        let norm = v.norm();
        (norm > 1e-3).then(|| v / norm)
    })
}

/// A random target together with its projection tolerance.
fn target(n: usize) -> impl Strategy<Value = (TargetSet, f64)> {
    prop_oneof![
        point(n, 2.0).prop_map(|c| (TargetSet::singleton(c), PROJ_CLOSED_FORM)),
        (unit(n), -1.0f64..1.0).prop_map(|(a, b)| (TargetSet::half_space(a, b).unwrap(), PROJ_CLOSED_FORM)),
        (point(n, 2.0), 0.2f64..2.0).prop_map(|(c, r)| (TargetSet::ball(c, r).unwrap(), PROJ_CLOSED_FORM)),
        (point(n, 1.0), prop::collection::vec(0.2f64..2.0, n))
            .prop_map(|(c, s)| (TargetSet::ellipsoid(c, DVector::from_vec(s)).unwrap(), PROJ_ITERATIVE)),
        (point(n, 1.0), prop::collection::vec(0.3f64..1.5, n)).prop_map(move |(c, s)| {
            let faces = (0..n)
                .flat_map(|i| {
                    let e = Point::from_fn(n, |j, _| if i == j { 1.0 } else { 0.0 });
                    [
                        HalfSpace::new(e.clone(), c[i] + s[i]).unwrap(),
                        HalfSpace::new(-e, -(c[i] - s[i])).unwrap(),
                    ]
                })
                .collect();
            (TargetSet::polytope(faces).unwrap(), PROJ_ITERATIVE)
        }),
        (point(n, 1.0), prop::collection::vec(0.4f64..1.5, n), 2.0f64..6.0).prop_map(|(c, s, p)| {
            (
                TargetSet::SmoothLevelSet(LevelSet::superellipsoid(c, DVector::from_vec(s), p).unwrap()),
                PROJ_ITERATIVE,
            )
        }),
    ]
}

fn dim() -> impl Strategy<Value = usize> {
    2usize..=3
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn projection_is_idempotent(((t, tol), x) in dim().prop_flat_map(|n| (target(n), point(n, 4.0)))) {
        let p = t.project(&x).unwrap();
        let pp = t.project(&p).unwrap();
        prop_assert!((&pp - &p).norm() <= tol * (1.0 + p.norm()), "moved by {}", (&pp - &p).norm());
        prop_assert!(t.contains(&p).unwrap());
    }

    #[test]
    fn projection_satisfies_variational_inequality(
        ((t, tol), x, y) in dim().prop_flat_map(|n| (target(n), point(n, 4.0), point(n, 4.0)))
    ) {
        prop_assume!(!t.contains(&x).unwrap());
        // Any point of Ω will do; projecting y gives one.
        let z = t.project(&y).unwrap();
        let p = t.project(&x).unwrap();
        let lhs = (&x - &p).dot(&(&z - &p));
        let scale = 1.0 + x.norm() + z.norm();
        prop_assert!(lhs <= tol * scale * (&x - &z).norm().max(1.0), "⟨x−P, z−P⟩ = {lhs:e}");
    }

    #[test]
    fn distance_is_one_lipschitz(((t, tol), x, y) in dim().prop_flat_map(|n| (target(n), point(n, 4.0), point(n, 4.0)))) {
        let dx = t.distance(&x).unwrap();
        let dy = t.distance(&y).unwrap();
        prop_assert!((dx - dy).abs() <= (&x - &y).norm() + 2.0 * tol * (1.0 + x.norm() + y.norm()));
    }

    #[test]
    fn level_set_ball_matches_closed_form(
        (c, r, x) in dim().prop_flat_map(|n| (point(n, 1.0), 0.2f64..2.0, point(n, 4.0)))
    ) {
        let center = c.clone();
        let level = TargetSet::SmoothLevelSet(LevelSet::new(
            c.clone(),
            move |z: &Point| (z - &center).norm_squared() - r * r,
            {
                let center = c.clone();
                move |z: &Point| (z - &center) * 2.0
            },
        ).unwrap());
        let ball = TargetSet::ball(c, r).unwrap();
        let numeric = level.project(&x).unwrap();
        let exact = ball.project(&x).unwrap();
        prop_assert!((numeric - exact).norm() < 1e-8);
    }

    #[test]
    fn apollonius_boundary_is_the_equal_time_locus(
        (x_p, x_e, u, gamma) in dim().prop_flat_map(|n| (point(n, 4.0), point(n, 4.0), unit(n), 0.05f64..0.95))
    ) {
        let cfg = GameConfig::new(gamma, 1.0, x_p.len()).unwrap();
        let s = GameState::new(x_p.clone(), x_e.clone());
        let a = apollonius(&cfg, &s);
        let z = &a.alpha + &u * a.beta;
        let lhs = (&z - &x_e).norm();
        let rhs = gamma * (&z - &x_p).norm();
        prop_assert!((lhs - rhs).abs() < 1e-9 * (1.0 + z.norm()) / (1.0 - gamma * gamma), "{lhs} vs {rhs}");
    }

    #[test]
    fn barrier_sign_matches_distance_comparison(
        ((t, _), x_p, x_e) in dim().prop_flat_map(|n| (target(n), point(n, 4.0), point(n, 4.0)))
    ) {
        let cfg = GameConfig::new(0.5, 1.0, x_p.len()).unwrap();
        let b = barrier(&cfg, &GameState::new(x_p, x_e), &t).unwrap();
        let gap = (&b.projection - &b.apollonius.alpha).norm();
        match b.region {
            Region::Attack => prop_assert!(gap < b.apollonius.beta),
            Region::Capture => prop_assert!(gap > b.apollonius.beta),
            Region::OnBarrier => prop_assert!((gap - b.apollonius.beta).abs() <= 1e-9),
        }
    }

    #[test]
    fn capture_value_equals_barrier(
        ((t, _), x_p, x_e) in dim().prop_flat_map(|n| (target(n), point(n, 4.0), point(n, 4.0)))
    ) {
        let cfg = GameConfig::new(0.5, 1.0, x_p.len()).unwrap();
        let s = GameState::new(x_p, x_e);
        let b = barrier(&cfg, &s, &t).unwrap();
        prop_assume!(b.region == Region::Capture);
        let plan = capture_plan(&cfg, &s, &t).unwrap();
        prop_assert_eq!(plan.value, b.value);
    }

    #[test]
    fn saddle_point_geometry(
        ((t, tol), x_p, x_e) in dim().prop_flat_map(|n| (target(n), point(n, 4.0), point(n, 4.0)))
    ) {
        let cfg = GameConfig::new(0.5, 1.0, x_p.len()).unwrap();
        let s = GameState::new(x_p.clone(), x_e.clone());
        let b = barrier(&cfg, &s, &t).unwrap();
        prop_assume!(b.region == Region::Capture && s.separation() > 1e-3);
        let plan = capture_plan(&cfg, &s, &t).unwrap();
        let a = &b.apollonius;
        prop_assert!(((&plan.x_star - &a.alpha).norm() - a.beta).abs() < 1e-9 * (1.0 + a.beta));
        // x* lies on the segment from α towards proj_Ω(α).
        let towards = (&b.projection - &a.alpha).normalize();
        prop_assert!(((&plan.x_star - &a.alpha).normalize() - towards).norm() < 1e-6 + tol);
        for (from, dir) in [(&x_p, &plan.dir_p), (&x_e, &plan.dir_e)] {
            let to_star = (&plan.x_star - from).normalize();
            prop_assert!((to_star - dir).norm() < 1e-9);
        }
        // x_P, x_E and α are colinear.
        let axis = (&x_e - &x_p).normalize();
        let offset = &a.alpha - &x_p;
        let off_axis = &offset - &axis * offset.dot(&axis);
        prop_assert!(off_axis.norm() < 1e-10 * (1.0 + offset.norm()));
    }

    #[test]
    fn barrier_scales_with_the_scene(
        (kind, x_p, x_e, c, r, k) in dim().prop_flat_map(|n| (0usize..3, point(n, 3.0), point(n, 3.0), point(n, 1.0), 0.2f64..1.5, 0.1f64..10.0))
    ) {
        let n = x_p.len();
        let cfg = GameConfig::new(0.5, 1.0, n).unwrap();
        let build = |scale: f64| match kind {
            0 => TargetSet::singleton(&c * scale),
            1 => TargetSet::ball(&c * scale, r * scale).unwrap(),
            _ => TargetSet::ellipsoid(&c * scale, Point::from_fn(n, |i, _| (r + 0.3 * i as f64) * scale)).unwrap(),
        };
        let b1 = barrier(&cfg, &GameState::new(x_p.clone(), x_e.clone()), &build(1.0)).unwrap().value;
        let bk = barrier(&cfg, &GameState::new(&x_p * k, &x_e * k), &build(k)).unwrap().value;
        let tol = if kind == 2 { 1e-7 } else { 1e-10 };
        prop_assert!((bk - k * b1).abs() <= tol * k * (1.0 + b1.abs()), "{bk} vs {}", k * b1);
    }
}

/// Smooth closed targets with a defender outside them.
fn smooth_case() -> impl Strategy<Value = (TargetSet, Point)> {
    dim().prop_flat_map(|n| {
        (prop::collection::vec(0.3f64..1.2, n), 2.0f64..6.0, unit(n), 1.5f64..4.0, 0usize..2).prop_map(
            move |(s, p, u, dist, kind)| {
                let s = DVector::from_vec(s);
                let t = if kind == 0 {
                    TargetSet::ellipsoid(Point::zeros(n), s).unwrap()
                } else {
                    TargetSet::SmoothLevelSet(LevelSet::superellipsoid(Point::zeros(n), s, p).unwrap())
                };
                (t, u * dist)
            },
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pbs_map_properties(((t, x_p0), gamma) in (smooth_case(), 0.2f64..0.8)) {
        let n = x_p0.len();
        let cfg = GameConfig::new(gamma, 1.0, n).unwrap();
        let mesh = sample_pbs_mesh(&t, &x_p0, &cfg, 10).unwrap();
        prop_assert!(mesh.failures.is_empty());
        let samples: Vec<_> = mesh.points().collect();
        for s in &samples {
            let p = &s.boundary_point;
            // Distance property of the image point.
            let lhs = (&s.pbs_point - p).norm();
            prop_assert!((lhs - gamma * (&x_p0 - p).norm()).abs() < PBS);
            // Round-trip tangency: the Apollonius center projects back onto p.
            let a = apollonius(&cfg, &GameState::new(x_p0.clone(), s.pbs_point.clone()));
            let back = t.project(&a.alpha).unwrap();
            prop_assert!((&back - p).norm() < 1e-6, "{}", (&back - p).norm());
            // Closed form and two-step computation agree.
            let closed = map_boundary_to_pbs_closed_form(p, &t, &x_p0, &cfg).unwrap();
            prop_assert!((&closed - &s.pbs_point).norm() < 1e-12 * (1.0 + closed.norm()));
            let again = map_boundary_to_pbs(p, &t, &x_p0, &cfg).unwrap();
            prop_assert_eq!(&again.pbs_point, &s.pbs_point);
        }
        // Distinct boundary samples have distinct images.
        for i in 0..samples.len() {
            for j in (i + 1)..samples.len() {
                if (&samples[i].boundary_point - &samples[j].boundary_point).norm() > 1e-9 {
                    prop_assert!((&samples[i].pbs_point - &samples[j].pbs_point).norm() > 0.0);
                }
            }
        }
    }
}
