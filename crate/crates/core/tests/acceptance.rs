//! Acceptance criteria, one line each. Runs without the libtest harness so
//! the lines are always printed; exits non-zero if any criterion fails.
//!
//! Each criterion returns a fingerprint of everything it computed (floats in
//! shortest round-trip form), which the determinism criterion compares
//! across reruns.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::dvector;
use serde_json::json;
use target_defense::barrier_geometry::map_boundary_to_pbs;
use target_defense::simulator::simulate_batch;
use target_defense::verify::{
    attack_point_suite, gradient_suite, hji_suite, pbs_map_suite, pbs_zeroing_suite, sample_states, CheckReport,
    DEFAULT_SEED,
};
use target_defense::{
    attack_plan, barrier, capture_plan, straightness_deviation, GameConfig, GameState, Outcome, Point, Policy, Region,
    Role, Scenario, TargetSet, TrajectoryRecord,
};

struct Verdict {
    passed: bool,
    detail: String,
    fingerprint: String,
}

fn from_reports(reports: Vec<CheckReport>) -> Verdict {
    let failed: Vec<&str> = reports.iter().filter(|r| !r.passed).map(|r| r.name.as_str()).collect();
    let worst = reports
        .iter()
        .map(|r| r.max_residual / r.tolerance)
        .fold(0.0, f64::max);
    let samples: usize = reports.iter().map(|r| r.samples).sum();
    Verdict {
        passed: failed.is_empty(),
        detail: if failed.is_empty() {
            format!("{} checks, {samples} samples, worst residual/tolerance {worst:.2e}", reports.len())
        } else {
            format!("failed: {}", failed.join(", "))
        },
        fingerprint: serde_json::to_string(&reports).expect("reports serialize"),
    }
}

fn c1_analytic_pbs_zeroing() -> Verdict {
    let reports = pbs_zeroing_suite(DEFAULT_SEED, 500).expect("suite runs");
    assert!(reports.iter().all(|r| r.samples == 500 && r.tolerance == 1e-9));
    from_reports(reports)
}

fn c2_transformation_map() -> Verdict {
    let reports = pbs_map_suite(DEFAULT_SEED, 100, 32).expect("suite runs");
    from_reports(reports)
}

fn c3_worked_quadratic() -> Verdict {
    let cfg = GameConfig::new(0.5, 1.0, 2).unwrap();
    let ball = TargetSet::ball(dvector![0.0, 0.0], 1.0).unwrap();
    let s = map_boundary_to_pbs(&dvector![1.0, 0.0], &ball, &dvector![2.0, 0.0], &cfg).unwrap();
    let xi_err = (s.xi_plus - 0.125).abs();
    let point_err = (&s.pbs_point - dvector![1.5, 0.0]).norm();
    Verdict {
        passed: xi_err <= 1e-12 && point_err <= 1e-12,
        detail: format!("ξ⁺ = {}, pbs_point = ({}, {})", s.xi_plus, s.pbs_point[0], s.pbs_point[1]),
        fingerprint: json!([s.xi_plus, s.pbs_point.as_slice()]).to_string(),
    }
}

fn c4_hji() -> Verdict {
    let reports = hji_suite(DEFAULT_SEED, 1000).expect("suite runs");
    assert!(reports.iter().all(|r| r.samples == 1000));
    from_reports(reports)
}

fn c5_gradients() -> Verdict {
    let reports = gradient_suite(DEFAULT_SEED, 200).expect("suite runs");
    assert!(reports.iter().all(|r| r.samples == 200 && r.tolerance == 1e-4));
    from_reports(reports)
}

fn ellipsoid_scenario(x_e0: Point) -> Scenario {
    let cfg = GameConfig::new(0.5, 1.0, 3).unwrap();
    let target = TargetSet::ellipsoid(Point::zeros(3), dvector![0.8, 0.4, 0.4]).unwrap();
    let mut sc = Scenario::new(cfg, target, dvector![-0.8, 0.0, 0.5], x_e0);
    sc.dt = 1e-3;
    sc.attack.seed = DEFAULT_SEED;
    sc
}

fn record_fingerprint(rec: &TrajectoryRecord) -> serde_json::Value {
    target_defense::export::trajectory_json(rec)
}

fn c6_scenarios() -> Verdict {
    let capture_start = dvector![0.2, 0.4, 0.9];
    let attack_start = dvector![0.2, 0.2, 0.7];
    let a = ellipsoid_scenario(capture_start.clone());
    let mut b = ellipsoid_scenario(capture_start);
    b.policy_p = Policy::PurePursuit;
    let c = ellipsoid_scenario(attack_start.clone());
    let mut d = ellipsoid_scenario(attack_start);
    d.policy_e = Policy::DirectTo(dvector![-0.8, 0.0, 0.0]);
    let runs: Vec<TrajectoryRecord> = simulate_batch(&[a.clone(), b, c.clone(), d.clone()])
        .into_iter()
        .map(|r| r.expect("simulation runs"))
        .collect();
    let mut failures = Vec::new();

    let start = |sc: &Scenario| GameState::new(sc.x_p0.clone(), sc.x_e0.clone());
    let v_c = capture_plan(&a.cfg, &start(&a), &a.target).unwrap().value;
    let ra = &runs[0];
    let straight = straightness_deviation(ra, Role::Defender)
        .unwrap()
        .max(straightness_deviation(ra, Role::Attacker).unwrap());
    let payoff_a = ra.payoff.unwrap_or(f64::NAN);
    if ra.outcome != Outcome::Captured
        || !(straight < 1e-6)
        || !((payoff_a - v_c).abs() < 1e-3)
        || !ra.rows.iter().all(|r| r.barrier > 0.0)
    {
        failures.push(format!("(a) {} straightness {straight:.1e} payoff {payoff_a} V_c {v_c}", ra.outcome.name()));
    }

    let rb = &runs[1];
    if rb.outcome != Outcome::Attacked || rb.switch_times.len() != 1 {
        failures.push(format!("(b) {} switches {:?}", rb.outcome.name(), rb.switch_times));
    }

    let v_a = attack_plan(&c.cfg, &start(&c), &c.target).unwrap().value;
    let rc = &runs[2];
    let payoff_c = rc.payoff.unwrap_or(f64::NAN);
    if rc.outcome != Outcome::Attacked || !((payoff_c - v_a).abs() < 1e-3) {
        failures.push(format!("(c) {} payoff {payoff_c} V_a {v_a}", rc.outcome.name()));
    }

    let rd = &runs[3];
    let e_final_outside = !d.target.contains(&rd.final_row().x_e).unwrap();
    if rd.outcome != Outcome::Captured || rd.switch_times.len() != 1 || !e_final_outside {
        failures.push(format!("(d) {} switches {:?}", rd.outcome.name(), rd.switch_times));
    }

    Verdict {
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            format!(
                "(a) |payoff−V_c| {:.1e}, straightness {straight:.1e}; (b) switch at {:.4}; (c) |payoff−V_a| {:.1e}; (d) switch at {:.4}, captured at t={:.4}",
                (payoff_a - v_c).abs(),
                rb.switch_times[0],
                (payoff_c - v_a).abs(),
                rd.switch_times[0],
                rd.t_f
            )
        } else {
            failures.join("; ")
        },
        fingerprint: json!(runs.iter().map(record_fingerprint).collect::<Vec<_>>()).to_string(),
    }
}

fn c7_attack_point_oracle() -> Verdict {
    let reports = attack_point_suite(DEFAULT_SEED, 50, 400).expect("suite runs");
    assert!(reports.iter().all(|r| r.samples == 50));
    from_reports(reports)
}

/// Largest per-step move of `B` against the direction the saddle point
/// allows: decreases when `sign = 1`, increases when `sign = -1`. Only steps
/// starting in the capture region count, where `B` is `V_c`.
fn worst_wrong_way_step(rec: &TrajectoryRecord, sign: f64) -> f64 {
    rec.rows
        .windows(2)
        .filter(|w| w[0].region != Region::Attack)
        .map(|w| -sign * (w[1].barrier - w[0].barrier))
        .fold(0.0, f64::max)
}

fn c8_value_monotonicity() -> Verdict {
    let cfg = GameConfig::new(0.5, 1.0, 3).unwrap();
    let target = TargetSet::ellipsoid(Point::zeros(3), dvector![0.8, 0.4, 0.4]).unwrap();
    let starts = sample_states(&cfg, &target, Region::Capture, 20, DEFAULT_SEED).expect("states");
    let mut scenarios = Vec::new();
    for (i, s) in starts.iter().enumerate() {
        let mut base = Scenario::new(cfg, target.clone(), s.x_p.clone(), s.x_e.clone());
        base.t_max = 3.0;
        base.attack.seed = DEFAULT_SEED;
        let random = Policy::RandomHeading {
            seed: DEFAULT_SEED + i as u64,
            hold: 0.05,
        };
        let mut e_random = base.clone();
        e_random.policy_e = random.clone();
        let mut p_random = base;
        p_random.policy_p = random;
        scenarios.push(e_random);
        scenarios.push(p_random);
    }
    let runs: Vec<TrajectoryRecord> = simulate_batch(&scenarios)
        .into_iter()
        .map(|r| r.expect("simulation runs"))
        .collect();
    let mut worst_up = 0.0f64;
    let mut worst_down = 0.0f64;
    let mut checked = 0usize;
    let mut net = [0.0f64; 2];
    for pair in runs.chunks(2) {
        worst_up = worst_up.max(worst_wrong_way_step(&pair[0], 1.0));
        worst_down = worst_down.max(worst_wrong_way_step(&pair[1], -1.0));
        for (k, rec) in pair.iter().enumerate() {
            for w in rec.rows.windows(2).filter(|w| w[0].region != Region::Attack) {
                checked += 1;
                net[k] += w[1].barrier - w[0].barrier;
            }
        }
    }
    let b0 = barrier(&cfg, &starts[0], &target).unwrap().value;
    Verdict {
        passed: worst_up <= 1e-3 && worst_down <= 1e-3,
        detail: format!(
            "20 starts, {checked} steps; worst V_c decrease with P optimal {worst_up:.1e} (net change {:+.2}), worst increase with E optimal {worst_down:.1e} (net change {:+.2})",
            net[0],
            net[1]
        ),
        fingerprint: json!([
            b0,
            worst_up,
            worst_down,
            runs.iter().map(record_fingerprint).collect::<Vec<_>>()
        ])
        .to_string(),
    }
}

type CriterionFn = fn() -> Verdict;

const CRITERIA: [(&str, CriterionFn, Duration); 8] = [
    ("analytic PBS zeroing", c1_analytic_pbs_zeroing, Duration::from_secs(5)),
    ("transformation-map consistency", c2_transformation_map, Duration::from_secs(30)),
    ("worked quadratic case", c3_worked_quadratic, Duration::from_secs(1)),
    ("HJI residual suite", c4_hji, Duration::from_secs(60)),
    ("value-gradient suite", c5_gradients, Duration::from_secs(60)),
    ("ellipsoid scenario reproduction", c6_scenarios, Duration::from_secs(60)),
    ("attack-point oracle equivalence", c7_attack_point_oracle, Duration::from_secs(60)),
    ("value monotonicity", c8_value_monotonicity, Duration::from_secs(120)),
];

fn main() -> ExitCode {
    let mut all_passed = true;
    let mut fingerprints = Vec::new();
    for (i, (name, run, budget)) in CRITERIA.iter().enumerate() {
        let started = Instant::now();
        let verdict = run();
        let elapsed = started.elapsed();
        let in_time = elapsed <= *budget;
        let passed = verdict.passed && in_time;
        all_passed &= passed;
        println!(
            "criterion {} {:<32} {}  {:>8.3}s (budget {}s)  {}",
            i + 1,
            name,
            if passed { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs(),
            if in_time { verdict.detail } else { format!("over budget; {}", verdict.detail) }
        );
        fingerprints.push(verdict.fingerprint);
    }

    let started = Instant::now();
    let mismatched: Vec<usize> = CRITERIA
        .iter()
        .zip(&fingerprints)
        .enumerate()
        .filter(|(_, ((_, run, _), first))| run().fingerprint != **first)
        .map(|(i, _)| i + 1)
        .collect();
    let passed = mismatched.is_empty();
    all_passed &= passed;
    println!(
        "criterion 9 {:<32} {}  {:>8.3}s  {}",
        "determinism",
        if passed { "PASS" } else { "FAIL" },
        started.elapsed().as_secs_f64(),
        if passed {
            "criteria 1-8 rerun with identical reports".to_string()
        } else {
            format!("reports differ on rerun for criteria {mismatched:?}")
        }
    );

    if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
