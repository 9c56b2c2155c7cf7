//! Frontier-level oracles: traced fronts against brute-force nondominated
//! staircases, anchor identities, spacing control and segment invariants.

use pareto_apc_core::apc::{anchor_points, compute_m1_bound, run_apc, ApcConfig};
use pareto_apc_core::cellnet::{
    build_bs_problem, compute_prices, generate_scenario, NetworkState, Scenario, ScenarioConfig,
    UserSlot,
};
use pareto_apc_core::moo::BiObjectiveProblem;
use pareto_apc_core::problems::SeparableQuadratic;
use pareto_apc_core::solver::{SolveStatus, SpSolver};
use pareto_apc_core::{filter_nondominated, ObjectivePair, SolverConfig, SpParameters};

/// Lower-left staircase of a point cloud: sort by f1 and keep strictly
/// decreasing f2. Independent of the production filter.
fn staircase(mut pts: Vec<ObjectivePair>) -> Vec<ObjectivePair> {
    pts.sort_by(|a, b| a.f1.partial_cmp(&b.f1).unwrap().then(a.f2.partial_cmp(&b.f2).unwrap()));
    let mut out: Vec<ObjectivePair> = Vec::new();
    for p in pts {
        if out.last().map_or(true, |q| p.f2 < q.f2) {
            out.push(p);
        }
    }
    out
}

fn hausdorff(a: &[ObjectivePair], b: &[ObjectivePair]) -> f64 {
    let one_sided = |xs: &[ObjectivePair], ys: &[ObjectivePair]| {
        xs.iter()
            .map(|x| {
                ys.iter()
                    .map(|y| x.distance(y))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0f64, f64::max)
    };
    one_sided(a, b).max(one_sided(b, a))
}

#[test]
fn toy_front_traces_the_tradeoff_curve() {
    let problem = SeparableQuadratic::unit_tradeoff();
    let mut config = ApcConfig::default();
    // anchors are f(0) = (0,1) and f(1) = (1,0); spacing 0.1 of their gap
    let gap = 2.0f64.sqrt();
    config.alpha = Some(0.1 * gap);
    let run = run_apc(&problem, &config).unwrap();
    assert!(!run.collapsed);
    assert_eq!(run.flagged.len(), 0);

    let len = run.front.len();
    assert!(
        (9..=14).contains(&len),
        "expected about 10-12 points at this spacing, got {len}"
    );

    // no front point is dominated by any point of a dense outcome grid
    let front = run.front.objective_pairs();
    for k in 0..=1_000_000usize {
        let p = k as f64 / 1_000_000.0;
        let g = problem.objectives(&[p]);
        for f in &front {
            assert!(
                !(g.f1 <= f.f1 && g.f2 <= f.f2 && (g.f1 < f.f1 || g.f2 < f.f2)),
                "front point {f:?} dominated by grid outcome {g:?} at p = {p}"
            );
        }
    }

    // endpoints are the anchors
    assert!((front[0].f2 - 0.0).abs() < 1e-12, "low end is the f2 anchor");
    assert!((front.last().unwrap().f2 - 1.0).abs() < 1e-6);

    // spacing within 30% of the target for the bulk of the pairs
    let spacing = run.spacing();
    let within = spacing
        .iter()
        .filter(|&&d| d >= 0.7 * run.alpha && d <= 1.3 * run.alpha)
        .count();
    assert!(
        within * 10 >= spacing.len() * 7,
        "spacing too uneven: {spacing:?} target {}",
        run.alpha
    );
}

#[test]
fn toy_front_is_nondominated_and_monotone() {
    let problem = SeparableQuadratic::unit_tradeoff();
    let run = run_apc(&problem, &ApcConfig::default()).unwrap();
    let front = run.front.objective_pairs();
    assert_eq!(filter_nondominated(&front).len(), front.len());
    assert_eq!(run.front.dropped(), 0);
    for w in front.windows(2) {
        assert!(w[0].f2 < w[1].f2, "f2 strictly increasing");
        assert!(w[0].f1 > w[1].f1, "f1 strictly decreasing");
    }
}

#[test]
fn two_cell_front_matches_grid_staircase() {
    let config = ScenarioConfig { bs_count: 2, subcarrier_count: 2, ..Default::default() };
    let scenario = generate_scenario(&config, 42).unwrap();
    let state = NetworkState::all_epa(&scenario, 30.0).unwrap();
    let prices = compute_prices(&scenario, &state);
    let problem = build_bs_problem(&scenario, 0, &state, &prices).unwrap();

    let run = run_apc(&problem, &ApcConfig::default()).unwrap();
    let front = run.front.objective_pairs();
    assert!(front.len() >= 20, "front has {} points", front.len());

    // 201 x 201 brute-force outcome grid
    let budget = problem.budget();
    let mut cloud = Vec::new();
    for i in 0..=200 {
        for j in 0..=200 - i {
            let p = vec![budget * i as f64 / 200.0, budget * j as f64 / 200.0];
            cloud.push(problem.objectives(&p));
        }
    }
    let stairs = staircase(cloud);
    let d = hausdorff(&front, &stairs);
    assert!(
        d <= 2.0 * run.alpha,
        "Hausdorff distance {d} exceeds 2 alpha = {}",
        2.0 * run.alpha
    );
}

#[test]
fn front_parameters_stay_on_hyperplane_segment() {
    let config = ScenarioConfig { bs_count: 2, subcarrier_count: 2, ..Default::default() };
    let scenario = generate_scenario(&config, 11).unwrap();
    let state = NetworkState::all_epa(&scenario, 30.0).unwrap();
    let prices = compute_prices(&scenario, &state);
    let problem = build_bs_problem(&scenario, 0, &state, &prices).unwrap();

    let apc_config = ApcConfig::default();
    let run = run_apc(&problem, &apc_config).unwrap();
    let b = apc_config.hyperplane.b;
    let offset = apc_config.hyperplane.offset;
    let a1 = run.anchors.a1;
    let v = run.anchors.v;
    let vv = v[0] * v[0] + v[1] * v[1];
    for entry in run.front.entries() {
        let a = entry.meta.a;
        assert!(
            (b[0] * a[0] + b[1] * a[1] - offset).abs() <= 1e-9 * (1.0 + a[0].abs() + a[1].abs()),
            "reference point off the hyperplane: {a:?}"
        );
        let rho = ((a[0] - a1[0]) * v[0] + (a[1] - a1[1]) * v[1]) / vv;
        assert!((-1e-9..=1.0 + 1e-9).contains(&rho), "rho = {rho}");
        // every kept point carries a converged certificate
        assert_eq!(entry.meta.solution.status, SolveStatus::Converged);
        assert!(entry.meta.solution.kkt_residual <= 1e-6);
    }
}

#[test]
fn anchor_equivalence_shares_solution_and_multiplier() {
    // solving at the projected anchor parameter returns the same minimal
    // solution and multiplier as the initialization subproblem
    let config = ScenarioConfig { bs_count: 2, subcarrier_count: 4, ..Default::default() };
    let scenario = generate_scenario(&config, 5).unwrap();
    let state = NetworkState::all_epa(&scenario, 30.0).unwrap();
    let prices = compute_prices(&scenario, &state);
    let problem = build_bs_problem(&scenario, 0, &state, &prices).unwrap();

    let apc_config = ApcConfig::default();
    let anchors = anchor_points(&problem, &apc_config).unwrap();

    let mut solver = SpSolver::new(SolverConfig::default());
    let params_tilde = SpParameters::new([0.0, anchors.m1], [1.0, 1.0]).unwrap();
    let sol_tilde = solver.solve_sp(&problem, &params_tilde, None).unwrap();

    let params_a1 = SpParameters::new(anchors.a1, [1.0, 1.0]).unwrap();
    let sol_a1 = solver.solve_sp(&problem, &params_a1, None).unwrap();
    assert_eq!(sol_a1.status, SolveStatus::Converged);

    for i in 0..problem.dimension() {
        assert!(
            (sol_tilde.p[i] - sol_a1.p[i]).abs() <= 1e-4,
            "p[{i}]: {} vs {}",
            sol_tilde.p[i],
            sol_a1.p[i]
        );
    }
    for i in 0..2 {
        assert!(
            (sol_tilde.mu[i] - sol_a1.mu[i]).abs() <= 1e-3,
            "mu[{i}]: {} vs {}",
            sol_tilde.mu[i],
            sol_a1.mu[i]
        );
    }
}

#[test]
fn m1_bound_certified_against_grid() {
    let config = ScenarioConfig { bs_count: 2, subcarrier_count: 2, ..Default::default() };
    let scenario = generate_scenario(&config, 42).unwrap();
    let state = NetworkState::all_epa(&scenario, 30.0).unwrap();
    let prices = compute_prices(&scenario, &state);
    let problem = build_bs_problem(&scenario, 0, &state, &prices).unwrap();

    let m1 = compute_m1_bound(&problem, [1.0, 1.0]);
    // grid estimate of max f2 - min f1 * r2/r1
    let budget = problem.budget();
    let mut max_f2 = f64::MIN;
    let mut min_f1 = f64::MAX;
    for i in 0..=200 {
        for j in 0..=200 - i {
            let p = vec![budget * i as f64 / 200.0, budget * j as f64 / 200.0];
            let f = problem.objectives(&p);
            max_f2 = max_f2.max(f.f2);
            min_f1 = min_f1.min(f.f1);
        }
    }
    assert!(m1 > max_f2 - min_f1, "m1 = {m1} vs grid bound {}", max_f2 - min_f1);
}

#[test]
fn m1_bound_zero_gain_scenario() {
    // with all gains zero the best rate is zero and the bound collapses to
    // the budget plus one
    let scenario = Scenario {
        format_version: 1,
        seed: 0,
        bs_count: 1,
        subcarrier_count: 2,
        inter_site_distance_m: 1000.0,
        bandwidth_hz: 1e7,
        noise_power_w: 1.0,
        power_budget_w: 5.0,
        bs_positions_m: vec![[0.0, 0.0]],
        users: vec![
            UserSlot { bs: 0, subcarrier: 0, position_m: [1.0, 0.0] },
            UserSlot { bs: 0, subcarrier: 1, position_m: [2.0, 0.0] },
        ],
        gains: vec![0.0, 0.0],
    };
    let state = NetworkState::all_epa(&scenario, 0.0).unwrap();
    let prices = compute_prices(&scenario, &state);
    let problem = build_bs_problem(&scenario, 0, &state, &prices).unwrap();
    assert_eq!(compute_m1_bound(&problem, [1.0, 1.0]), 6.0);
}

#[test]
fn step_spacing_near_target_on_toy() {
    // solving consecutive subproblems after one parameter step moves the
    // outcome by about alpha
    let problem = SeparableQuadratic::unit_tradeoff();
    let mut config = ApcConfig::default();
    config.alpha = Some(0.12);
    let run = run_apc(&problem, &config).unwrap();
    let spacing = run.spacing();
    // interior pairs only: the trace ends with a shortened partial step,
    // which sits at the low-f2 end after sorting
    assert!(spacing.len() > 3);
    for d in &spacing[1..spacing.len() - 1] {
        assert!(
            *d >= 0.7 * 0.12 && *d <= 1.3 * 0.12,
            "spacing {d} outside 30% of target"
        );
    }
}

#[test]
fn collapsed_front_single_point() {
    // identical targets make both objectives share their minimizer
    let problem = SeparableQuadratic::new(vec![0.3], vec![0.3], 1.0);
    let run = run_apc(&problem, &ApcConfig::default()).unwrap();
    assert!(run.collapsed);
    assert_eq!(run.front.len(), 1);
}
