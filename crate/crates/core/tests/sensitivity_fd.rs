//! Finite-difference oracles for the sensitivity system: derivatives are
//! checked against re-solves of the perturbed subproblem, and the
//! first-order predictors must show quadratic error decay in the step.

use pareto_apc_core::cellnet::{
    build_bs_problem, compute_prices, generate_scenario, NetworkState, ScenarioConfig,
};
use pareto_apc_core::moo::BiObjectiveProblem;
use pareto_apc_core::problems::SeparableQuadratic;
use pareto_apc_core::sensitivity::{
    classify_constraints, predict_objectives, predict_solution, sensitivity_residual,
    solve_sensitivity_system,
};
use pareto_apc_core::solver::{SolveStatus, SpSolver};
use pareto_apc_core::{SolverConfig, SpParameters};

fn resolve_at(
    solver: &mut SpSolver,
    problem: &dyn BiObjectiveProblem,
    a: [f64; 2],
    warm: &[f64],
) -> pareto_apc_core::SpSolution {
    let params = SpParameters::new(a, [1.0, 1.0]).unwrap();
    let sol = solver.solve_sp(problem, &params, Some(warm)).unwrap();
    assert_eq!(sol.status, SolveStatus::Converged);
    sol
}

#[test]
fn toy_derivatives_match_central_differences() {
    let problem = SeparableQuadratic::unit_tradeoff();
    let a0 = [0.0, 0.0];
    let params = SpParameters::new(a0, [1.0, 1.0]).unwrap();
    let mut solver = SpSolver::new(SolverConfig::default());
    let sol = solver.solve_sp(&problem, &params, None).unwrap();

    let part = classify_constraints(&sol, &params, &problem, 1e-6);
    assert!(!part.is_degenerate());
    let v = [1.0, 0.0];
    let d = solve_sensitivity_system(&sol, &part, v, &problem, &params).unwrap();

    let s = 1e-4;
    let hi = resolve_at(&mut solver, &problem, [a0[0] + s * v[0], a0[1] + s * v[1]], &sol.p);
    let lo = resolve_at(&mut solver, &problem, [a0[0] - s * v[0], a0[1] - s * v[1]], &sol.p);
    let t_fd = (hi.t - lo.t) / (2.0 * s);
    let p_fd = (hi.p[0] - lo.p[0]) / (2.0 * s);
    assert!((t_fd - d.t_bar).abs() <= 1e-3, "t_bar {} vs fd {t_fd}", d.t_bar);
    assert!((p_fd - d.p_bar[0]).abs() <= 1e-3, "p_bar {} vs fd {p_fd}", d.p_bar[0]);
}

#[test]
fn toy_prediction_close_to_resolve_at_small_step() {
    let problem = SeparableQuadratic::unit_tradeoff();
    let params = SpParameters::new([0.0, 0.0], [1.0, 1.0]).unwrap();
    let mut solver = SpSolver::new(SolverConfig::default());
    let sol = solver.solve_sp(&problem, &params, None).unwrap();
    let part = classify_constraints(&sol, &params, &problem, 1e-6);
    let v = [1.0, 0.0];
    let d = solve_sensitivity_system(&sol, &part, v, &problem, &params).unwrap();

    let s = 1e-3;
    let pred = predict_solution(&sol, &d, s);
    let re = resolve_at(&mut solver, &problem, [s, 0.0], &sol.p);
    assert!((pred.t - re.t).abs() <= 1e-5, "t {} vs {}", pred.t, re.t);
    assert!((pred.p[0] - re.p[0]).abs() <= 1e-5, "p {} vs {}", pred.p[0], re.p[0]);
    assert!((pred.mu[0] - re.mu[0]).abs() <= 1e-4);
}

fn two_cell_setup() -> (impl BiObjectiveProblem, SpParameters, SpSolver) {
    let config = ScenarioConfig { bs_count: 2, subcarrier_count: 2, ..Default::default() };
    let scenario = generate_scenario(&config, 42).unwrap();
    let state = NetworkState::all_epa(&scenario, 30.0).unwrap();
    let prices = compute_prices(&scenario, &state);
    let problem = build_bs_problem(&scenario, 0, &state, &prices).unwrap();
    let f_mid = problem.objectives(&vec![5.0, 5.0]);
    let params = SpParameters::new([f_mid.f1 - 8.0, 0.0], [1.0, 1.0]).unwrap();
    let solver = SpSolver::new(SolverConfig::default());
    (problem, params, solver)
}

#[test]
fn two_cell_prediction_error_decays_quadratically() {
    let (problem, params, mut solver) = two_cell_setup();
    let sol = solver.solve_sp(&problem, &params, None).unwrap();
    assert_eq!(sol.status, SolveStatus::Converged);
    let part = classify_constraints(&sol, &params, &problem, 1e-6);
    assert!(!part.is_degenerate(), "probe point must be non-degenerate");
    let v = [1.0, 0.0];
    let d = solve_sensitivity_system(&sol, &part, v, &problem, &params).unwrap();
    let res = sensitivity_residual(&sol, &part, &d, v, &problem, &params);
    let sys_scale = 1.0 + d.t_bar.abs() + sol.mu[0].abs();
    assert!(res <= 1e-8 * sys_scale, "system residual {res}");

    let mut errors = Vec::new();
    for &s in &[1e-2, 1e-3] {
        let a_s = [params.a[0] + s * v[0], params.a[1] + s * v[1]];
        let re = resolve_at(&mut solver, &problem, a_s, &sol.p);
        let pred = predict_solution(&sol, &d, s);
        let mut err = (pred.t - re.t).abs();
        for i in 0..2 {
            err = err.max((pred.p[i] - re.p[i]).abs());
        }
        errors.push(err);
    }
    // first-order model: error O(s^2), so a 10x smaller step must shrink the
    // error by well over 3x (about 100x in exact arithmetic)
    assert!(
        errors[1] <= errors[0] / 3.0,
        "no quadratic decay: {errors:?}"
    );
}

#[test]
fn objective_prediction_error_decays_quadratically() {
    let (problem, params, mut solver) = two_cell_setup();
    let sol = solver.solve_sp(&problem, &params, None).unwrap();
    let f0 = problem.objectives(&sol.p);
    let v = [1.0, 0.0];

    let mut errors = Vec::new();
    for &s in &[1e-2, 1e-3] {
        let a_s = [params.a[0] + s * v[0], params.a[1] + s * v[1]];
        let re = resolve_at(&mut solver, &problem, a_s, &sol.p);
        let f_re = problem.objectives(&re.p);
        let pred = predict_objectives(&f0, s, v, sol.mu, params.r);
        errors.push(f_re.distance(&pred));
    }
    assert!(
        errors[1] <= errors[0] / 3.0,
        "no quadratic decay in objective prediction: {errors:?}"
    );
}

#[test]
fn value_function_identity_on_two_cell_instance() {
    // central finite difference of optimal t w.r.t. a equals -mu within
    // 1e-3 relative error at a non-degenerate point
    let (problem, params, mut solver) = two_cell_setup();
    let sol = solver.solve_sp(&problem, &params, None).unwrap();
    let part = classify_constraints(&sol, &params, &problem, 1e-6);
    assert!(!part.is_degenerate());
    for i in 0..2 {
        let delta = 1e-5 * (1.0 + params.a[i].abs());
        let mut hi = params.a;
        let mut lo = params.a;
        hi[i] += delta;
        lo[i] -= delta;
        let sol_hi = resolve_at(&mut solver, &problem, hi, &sol.p);
        let sol_lo = resolve_at(&mut solver, &problem, lo, &sol.p);
        let fd = (sol_hi.t - sol_lo.t) / (2.0 * delta);
        let rel = (fd + sol.mu[i]).abs() / sol.mu[i].abs().max(1e-9);
        assert!(rel <= 1e-3, "component {i}: fd {fd} vs -mu {}", -sol.mu[i]);
    }
}
