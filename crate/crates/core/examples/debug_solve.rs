//! Replay a single subproblem at a chosen reference point and print the
//! residual breakdown.

use pareto_apc_core::cellnet::{
    build_bs_problem, compute_prices, generate_scenario, NetworkState, ScenarioConfig,
};
use pareto_apc_core::moo::BiObjectiveProblem;
use pareto_apc_core::solver::SpSolver;
use pareto_apc_core::{SolverConfig, SpParameters};

fn main() {
    let a1: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(-1.1378);
    let scenario = generate_scenario(&ScenarioConfig::default(), 1).unwrap();
    let state = NetworkState::all_epa(&scenario, 30.0).unwrap();
    let prices = compute_prices(&scenario, &state);
    let problem = build_bs_problem(&scenario, 0, &state, &prices).unwrap();

    let params = SpParameters::new([a1, 0.0], [1.0, 1.0]).unwrap();
    let mut solver = SpSolver::new(SolverConfig::default());
    let sol = solver.solve_sp(&problem, &params, None).unwrap();
    println!("status {:?}, t = {:.6}, residual = {:.3e}", sol.status, sol.t, sol.kkt_residual);
    println!("mu = {:?}, mu'r = {}", sol.mu, sol.mu[0] + sol.mu[1]);
    let f = problem.objectives(&sol.p);
    println!("f = ({:.6}, {:.6})", f.f1, f.f2);
    let k = [params.a[0] + sol.t - f.f1, params.a[1] + sol.t - f.f2];
    println!("cone slacks: {:?}", k);
    let nz: Vec<(usize, f64)> = sol
        .p
        .iter()
        .enumerate()
        .filter(|(_, &x)| x > 0.0)
        .map(|(i, &x)| (i, x))
        .collect();
    println!("{} active subcarriers: {:?}", nz.len(), &nz[..nz.len().min(8)]);
    // residual components
    let (g1, g2) = problem.objective_gradients(&sol.p);
    let n = problem.dimension();
    let mut worst_stat = (0.0f64, 0usize);
    for i in 0..n {
        let v = (sol.mu[0] * g1[i] + sol.mu[1] * g2[i] - sol.beta[i] + sol.beta[n]).abs();
        if v > worst_stat.0 {
            worst_stat = (v, i);
        }
    }
    println!("worst stationarity row: {:.3e} at coord {}", worst_stat.0, worst_stat.1);
    let compl: f64 = (0..2).map(|i| (sol.mu[i] * k[i]).abs()).fold(0.0, f64::max);
    println!("cone complementarity: {:.3e}", compl);
    let g = problem.constraints(&sol.p);
    let gcompl = (0..=n).map(|j| (sol.beta[j] * g[j]).abs()).fold(0.0, f64::max);
    println!("g complementarity: {:.3e}", gcompl);

    // rebuild the multiplier recovery system and compare NNLS against the
    // unconstrained least-squares residual on the same active columns
    let act_tol = 1e-7 * 30.0;
    let k_act: Vec<usize> = (0..2).filter(|&i| k[i] <= act_tol).collect();
    let g_act: Vec<usize> = (0..=n).filter(|&j| g[j] <= act_tol).collect();
    let cols = k_act.len() + g_act.len();
    let rows = 1 + n;
    let grads = [&g1, &g2];
    let mut a_mat = vec![0.0; rows * cols];
    for (c, &i) in k_act.iter().enumerate() {
        a_mat[c] = 1.0;
        for row in 0..n {
            a_mat[(row + 1) * cols + c] = grads[i][row];
        }
    }
    for (c0, &j) in g_act.iter().enumerate() {
        let c = k_act.len() + c0;
        if j < n {
            a_mat[(j + 1) * cols + c] = -1.0;
        } else {
            for row in 0..n {
                a_mat[(row + 1) * cols + c] = 1.0;
            }
        }
    }
    let mut rhs = vec![0.0; rows];
    rhs[0] = 1.0;
    let (x, resid) = pareto_apc_core::linalg::nnls(&a_mat, &rhs, rows, cols).unwrap();
    println!("nnls: {} cols, residual {:.3e}, mu = {:?}", cols, resid, &x[..k_act.len()]);
    println!("nnls negative entries: {}", x.iter().filter(|&&v| v < 0.0).count());
}
