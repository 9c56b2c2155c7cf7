//! Brute-force grid oracles for the scalarized-subproblem solver on small
//! network instances.

use pareto_apc_core::cellnet::{
    build_bs_problem, compute_prices, generate_scenario, NetworkState, ScenarioConfig,
};
use pareto_apc_core::moo::BiObjectiveProblem;
use pareto_apc_core::solver::{kkt_residual, Objective, SolveStatus, SpSolver};
use pareto_apc_core::{SolverConfig, SpParameters};

fn two_cell_problem(seed: u64) -> impl BiObjectiveProblem {
    let config = ScenarioConfig { bs_count: 2, subcarrier_count: 2, ..Default::default() };
    let scenario = generate_scenario(&config, seed).unwrap();
    let state = NetworkState::all_epa(&scenario, 30.0).unwrap();
    let prices = compute_prices(&scenario, &state);
    build_bs_problem(&scenario, 0, &state, &prices).unwrap()
}

/// Exhaustive grid search of `value` over the feasible square, then zoomed
/// re-grids around the incumbent until the cell size resolves the target
/// tolerance. Pure enumeration; shares nothing with the solver path.
fn grid_search(
    problem: &dyn BiObjectiveProblem,
    steps: usize,
    zooms: usize,
    value: impl Fn(&[f64]) -> f64,
) -> (f64, Vec<f64>) {
    let budget = problem.budget();
    let mut lo = [0.0f64; 2];
    let mut hi = [budget; 2];
    let mut best = (f64::INFINITY, vec![0.0; 2]);
    for _ in 0..=zooms {
        for i in 0..=steps {
            for j in 0..=steps {
                let p = vec![
                    lo[0] + (hi[0] - lo[0]) * i as f64 / steps as f64,
                    lo[1] + (hi[1] - lo[1]) * j as f64 / steps as f64,
                ];
                if p[0] + p[1] > budget * (1.0 + 1e-12) {
                    continue;
                }
                let v = value(&p);
                if v < best.0 {
                    best = (v, p);
                }
            }
        }
        // zoom a two-cell-wide box around the incumbent
        for d in 0..2 {
            let cell = (hi[d] - lo[d]) / steps as f64;
            lo[d] = (best.1[d] - 2.0 * cell).max(0.0);
            hi[d] = (best.1[d] + 2.0 * cell).min(budget);
        }
    }
    best
}

/// Dense-grid minimax oracle: evaluate t(p) = max_i (f_i(p) - a_i)/r_i over
/// a feasible grid and return the best (t, p).
fn grid_minimax(
    problem: &dyn BiObjectiveProblem,
    a: [f64; 2],
    r: [f64; 2],
    steps: usize,
) -> (f64, Vec<f64>) {
    grid_search(problem, steps, 3, |p| {
        let f = problem.objectives(p);
        ((f.f1 - a[0]) / r[0]).max((f.f2 - a[1]) / r[1])
    })
}

fn grid_min_objective(
    problem: &dyn BiObjectiveProblem,
    which: Objective,
    steps: usize,
) -> (f64, Vec<f64>) {
    grid_search(problem, steps, 3, |p| {
        let f = problem.objectives(p);
        match which {
            Objective::F1 => f.f1,
            Objective::F2 => f.f2,
        }
    })
}

#[test]
fn sp_matches_grid_oracle_on_two_cell_instance() {
    let problem = two_cell_problem(42);
    let mut solver = SpSolver::new(SolverConfig::default());

    // reference points spanning the frontier region
    let f_origin = problem.objectives(&vec![0.0, 0.0]);
    let f_mid = problem.objectives(&vec![7.0, 7.0]);
    for a in [
        [f_origin.f1 - 5.0, 0.0],
        [f_mid.f1 - 10.0, 0.0],
        [-40.0, 0.0],
    ] {
        let params = SpParameters::new(a, [1.0, 1.0]).unwrap();
        let sol = solver.solve_sp(&problem, &params, None).unwrap();
        assert_eq!(sol.status, SolveStatus::Converged, "a = {a:?}");
        let (t_grid, _) = grid_minimax(&problem, a, [1.0, 1.0], 200);
        // the grid only overestimates the optimum
        assert!(
            sol.t <= t_grid + 1e-9,
            "solver t {} should not exceed grid t {}",
            sol.t,
            t_grid
        );
        assert!(
            (sol.t - t_grid).abs() <= 1e-3 * (1.0 + t_grid.abs()),
            "solver t {} vs grid t {} at a = {a:?}",
            sol.t,
            t_grid
        );
        assert!(sol.kkt_residual <= 1e-6, "residual {}", sol.kkt_residual);
    }
}

#[test]
fn min_objectives_match_grid_oracle() {
    let problem = two_cell_problem(42);
    let mut solver = SpSolver::new(SolverConfig::default());

    let p2 = solver.solve_min_objective(&problem, Objective::F2).unwrap();
    assert_eq!(p2, vec![0.0, 0.0], "f2 is minimized by the zero allocation");

    let p1 = solver.solve_min_objective(&problem, Objective::F1).unwrap();
    let (v_grid, _) = grid_min_objective(&problem, Objective::F1, 200);
    let v1 = problem.objectives(&p1).f1;
    assert!(v1 <= v_grid + 1e-9);
    assert!(
        (v1 - v_grid).abs() <= 1e-3 * (1.0 + v_grid.abs()),
        "solver {v1} vs grid {v_grid}"
    );
}

#[test]
fn solver_multiplier_matches_value_function_slope() {
    // central finite difference of the optimal t in a equals -mu
    let problem = two_cell_problem(7);
    let mut solver = SpSolver::new(SolverConfig::default());
    let f_mid = problem.objectives(&vec![5.0, 5.0]);
    let a0 = [f_mid.f1 - 8.0, 0.0];
    let params = SpParameters::new(a0, [1.0, 1.0]).unwrap();
    let sol = solver.solve_sp(&problem, &params, None).unwrap();
    assert_eq!(sol.status, SolveStatus::Converged);

    for i in 0..2 {
        let delta = 1e-5 * (1.0 + a0[i].abs());
        let mut hi = a0;
        let mut lo = a0;
        hi[i] += delta;
        lo[i] -= delta;
        let sol_hi = solver
            .solve_sp(&problem, &SpParameters::new(hi, [1.0, 1.0]).unwrap(), Some(&sol.p))
            .unwrap();
        let sol_lo = solver
            .solve_sp(&problem, &SpParameters::new(lo, [1.0, 1.0]).unwrap(), Some(&sol.p))
            .unwrap();
        let fd = (sol_hi.t - sol_lo.t) / (2.0 * delta);
        let rel = (fd + sol.mu[i]).abs() / sol.mu[i].abs().max(1e-6);
        assert!(rel <= 1e-3, "i={i}: finite difference {fd} vs -mu {}", -sol.mu[i]);
    }
}

#[test]
fn solver_beats_every_feasible_grid_point() {
    let problem = two_cell_problem(3);
    let mut solver = SpSolver::new(SolverConfig::default());
    let f_mid = problem.objectives(&vec![4.0, 4.0]);
    let a = [f_mid.f1 - 6.0, 0.0];
    let params = SpParameters::new(a, [1.0, 1.0]).unwrap();
    let sol = solver.solve_sp(&problem, &params, None).unwrap();
    let budget = problem.budget();
    let steps = 200;
    for i in 0..=steps {
        for j in 0..=steps - i {
            let p = vec![
                budget * i as f64 / steps as f64,
                budget * j as f64 / steps as f64,
            ];
            let f = problem.objectives(&p);
            let t = (f.f1 - a[0]).max(f.f2 - a[1]);
            assert!(sol.t <= t + 1e-9);
        }
    }
}

#[test]
fn residual_of_converged_solution_is_reported() {
    let problem = two_cell_problem(15);
    let mut solver = SpSolver::new(SolverConfig::default());
    let f_mid = problem.objectives(&vec![3.0, 3.0]);
    let params = SpParameters::new([f_mid.f1 - 4.0, 0.0], [1.0, 1.0]).unwrap();
    let sol = solver.solve_sp(&problem, &params, None).unwrap();
    let recomputed = kkt_residual(&problem, &params, &sol);
    assert!((recomputed - sol.kkt_residual).abs() <= 1e-12);
    assert!(sol.kkt_residual <= 1e-6);
}
