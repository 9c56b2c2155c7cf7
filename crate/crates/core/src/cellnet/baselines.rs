//! Baseline allocators: equal power, rate-greedy water-filling, and the
//! pricing-aware best response.

use alloc::vec::Vec;

use super::model::{
    build_bs_problem, ModelError, NetworkState, PowerAllocation, PriceTable,
};
use super::scenario::Scenario;
use crate::solver::{Objective, SolverConfig, SpSolver};

/// Equal power allocation: `total_power` spread uniformly over subcarriers.
pub fn epa_allocation(scenario: &Scenario, total_power: f64) -> Result<PowerAllocation, ModelError> {
    if !(0.0..=scenario.power_budget_w * (1.0 + 1e-9)).contains(&total_power) {
        return Err(ModelError::BudgetViolation);
    }
    let per = total_power / scenario.subcarrier_count as f64;
    PowerAllocation::new(alloc::vec![per; scenario.subcarrier_count], scenario)
}

/// Rate-greedy allocation of base station `m`: maximize its own sum rate
/// under the budget, ignoring the interference it causes. Exact water
/// filling with a sort-based level search.
pub fn utility_max(
    scenario: &Scenario,
    m: usize,
    state: &NetworkState,
    budget: f64,
) -> Result<PowerAllocation, ModelError> {
    if m >= scenario.bs_count {
        return Err(ModelError::Index);
    }
    if !(0.0..=scenario.power_budget_w * (1.0 + 1e-9)).contains(&budget) {
        return Err(ModelError::BudgetViolation);
    }
    let n = scenario.subcarrier_count;
    // effective gain per watt; zero-gain channels never receive power
    let gamma: Vec<f64> = (0..n)
        .map(|nn| {
            let den = scenario.noise_power_w + super::model::interference(scenario, m, nn, state);
            scenario.gain(m, m, nn) / den
        })
        .collect();
    let mut inv: Vec<(f64, usize)> = gamma
        .iter()
        .enumerate()
        .filter(|(_, &g)| g > 0.0)
        .map(|(i, &g)| (1.0 / g, i))
        .collect();
    let mut p = alloc::vec![0.0; n];
    if budget == 0.0 || inv.is_empty() {
        return PowerAllocation::new(p, scenario);
    }
    inv.sort_unstable_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    // water level over the k cheapest channels: nu_k = (budget + sum inv)/k,
    // feasible when nu_k exceeds the k-th inverse gain
    let mut cum = 0.0;
    let mut level = 0.0;
    let mut active = 0;
    for (k, &(w, _)) in inv.iter().enumerate() {
        cum += w;
        let nu = (budget + cum) / (k + 1) as f64;
        if nu > w {
            level = nu;
            active = k + 1;
        } else {
            break;
        }
    }
    for &(w, idx) in inv.iter().take(active) {
        p[idx] = level - w;
    }
    PowerAllocation::new(p, scenario)
}

/// Best response of base station `m` under interference pricing: maximize
/// its throughput contribution over the budget simplex-box. With all prices
/// zero the cost term vanishes and the problem is plain rate maximization,
/// answered by the water-filling routine; otherwise the convex program is
/// solved through the scalarization machinery in single-objective mode.
pub fn pricing_best_response(
    scenario: &Scenario,
    m: usize,
    state: &NetworkState,
    prices: &PriceTable,
    budget: f64,
    solver_config: &SolverConfig,
) -> Result<PowerAllocation, ModelError> {
    if prices.is_zero() {
        return utility_max(scenario, m, state, budget);
    }
    if !(budget > 0.0) || budget > scenario.power_budget_w * (1.0 + 1e-9) {
        return Err(ModelError::BudgetViolation);
    }
    let problem = build_bs_problem(scenario, m, state, prices)?.with_budget(budget)?;
    let mut solver = SpSolver::new(*solver_config);
    let p = solver
        .solve_min_objective(&problem, Objective::F1)
        .map_err(|_| ModelError::BudgetViolation)?;
    PowerAllocation::new(p, scenario)
}
