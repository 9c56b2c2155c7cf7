//! Rate, interference-pricing and throughput-contribution model, and the
//! per-base-station bi-objective problem builder.
//!
//! Gain index conventions follow the rate and cost formulas exactly as the
//! model states them: the interference at the user of (m, n) sums
//! gain(j, m, n) * p_j, while the priced cost of base station m toward cell
//! j uses gain(m, j, n). Prices must be recomputed after any power change
//! before dependent evaluations; version stamps enforce that discipline.

use alloc::vec::Vec;

use super::scenario::Scenario;
use crate::math;
use crate::moo::{BiObjectiveProblem, ObjectiveBounds, ObjectivePair};

/// One base station's per-subcarrier transmit powers, validated against the
/// scenario budget on construction.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PowerAllocation {
    watts: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelError {
    /// Powers are negative, non-finite, or exceed the budget.
    BudgetViolation,
    /// A price table was computed from a different power state.
    StalePrices,
    /// Index or dimension out of range.
    Index,
}

impl core::fmt::Display for ModelError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ModelError::BudgetViolation => write!(f, "power allocation violates the budget"),
            ModelError::StalePrices => {
                write!(f, "price table is stale with respect to the power state")
            }
            ModelError::Index => write!(f, "index out of range"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ModelError {}

impl PowerAllocation {
    pub fn new(watts: Vec<f64>, scenario: &Scenario) -> Result<Self, ModelError> {
        if watts.len() != scenario.subcarrier_count {
            return Err(ModelError::Index);
        }
        let sum: f64 = watts.iter().sum();
        let ok = watts.iter().all(|w| w.is_finite() && *w >= 0.0)
            && sum <= scenario.power_budget_w * (1.0 + 1e-9) + 1e-12;
        if !ok {
            return Err(ModelError::BudgetViolation);
        }
        Ok(Self { watts })
    }

    pub fn watts(&self) -> &[f64] {
        &self.watts
    }

    pub fn total(&self) -> f64 {
        self.watts.iter().sum()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.watts
    }
}

/// All base stations' powers with per-station version stamps. Any mutation
/// bumps the owner's stamp, which invalidates price tables computed before
/// the change.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkState {
    powers: Vec<Vec<f64>>,
    versions: Vec<u64>,
}

impl NetworkState {
    /// Every base station spreads `total_power` evenly over all subcarriers.
    pub fn all_epa(scenario: &Scenario, total_power: f64) -> Result<Self, ModelError> {
        if !(0.0..=scenario.power_budget_w * (1.0 + 1e-9)).contains(&total_power) {
            return Err(ModelError::BudgetViolation);
        }
        let per = total_power / scenario.subcarrier_count as f64;
        Ok(Self {
            powers: alloc::vec![alloc::vec![per; scenario.subcarrier_count]; scenario.bs_count],
            versions: alloc::vec![0; scenario.bs_count],
        })
    }

    pub fn bs(&self, m: usize) -> &[f64] {
        &self.powers[m]
    }

    pub fn set_bs(&mut self, m: usize, allocation: PowerAllocation) {
        self.powers[m] = allocation.into_vec();
        self.versions[m] += 1;
    }

    pub fn versions(&self) -> &[u64] {
        &self.versions
    }

    pub fn total_power(&self) -> f64 {
        self.powers.iter().map(|p| p.iter().sum::<f64>()).sum()
    }
}

/// Interference pricing rates pi[j][n], stamped with the power-state
/// versions they were computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceTable {
    pi: Vec<Vec<f64>>,
    stamped: Vec<u64>,
}

impl PriceTable {
    pub fn get(&self, j: usize, n: usize) -> f64 {
        self.pi[j][n]
    }

    /// All prices zero, consistent with any state (prices do not bind).
    pub fn zero(scenario: &Scenario, state: &NetworkState) -> Self {
        Self {
            pi: alloc::vec![alloc::vec![0.0; scenario.subcarrier_count]; scenario.bs_count],
            stamped: state.versions().to_vec(),
        }
    }

    /// Consistent with `state` for every base station except `exclude`,
    /// whose own power is the decision variable under optimization.
    pub fn consistent_excluding(&self, state: &NetworkState, exclude: usize) -> bool {
        self.stamped
            .iter()
            .zip(state.versions())
            .enumerate()
            .all(|(j, (a, b))| j == exclude || a == b)
    }

    pub fn is_zero(&self) -> bool {
        self.pi.iter().all(|row| row.iter().all(|&x| x == 0.0))
    }
}

/// Interference power at the user of (m, n): sum over j != m of
/// gain(j, m, n) * p_j[n].
pub fn interference(scenario: &Scenario, m: usize, n: usize, state: &NetworkState) -> f64 {
    (0..scenario.bs_count)
        .filter(|&j| j != m)
        .map(|j| scenario.gain(j, m, n) * state.bs(j)[n])
        .sum()
}

/// Spectral efficiency of base station m on subcarrier n, bits/s/Hz:
/// log2(1 + g_mm p / (noise + interference)).
pub fn subchannel_rate(scenario: &Scenario, m: usize, n: usize, state: &NetworkState) -> f64 {
    let s = scenario.gain(m, m, n) * state.bs(m)[n];
    let den = scenario.noise_power_w + interference(scenario, m, n, state);
    math::log2(1.0 + s / den)
}

/// Interference pricing rate of base station j on subcarrier n: the
/// marginal rate loss per unit interference power,
/// (1/ln 2) * s / ((noise + i) * (noise + i + s)) with s = g_jj p_j.
pub fn pricing_rate(scenario: &Scenario, j: usize, n: usize, state: &NetworkState) -> f64 {
    let s = scenario.gain(j, j, n) * state.bs(j)[n];
    let den = scenario.noise_power_w + interference(scenario, j, n, state);
    s / (core::f64::consts::LN_2 * den * (den + s))
}

/// Price table of the whole network at `state`.
pub fn compute_prices(scenario: &Scenario, state: &NetworkState) -> PriceTable {
    let pi = (0..scenario.bs_count)
        .map(|j| {
            (0..scenario.subcarrier_count)
                .map(|n| pricing_rate(scenario, j, n, state))
                .collect()
        })
        .collect();
    PriceTable { pi, stamped: state.versions().to_vec() }
}

/// Throughput contribution of base station m: its own sum rate minus the
/// priced interference cost it inflicts on the other cells.
pub fn throughput_contribution(
    scenario: &Scenario,
    m: usize,
    state: &NetworkState,
    prices: &PriceTable,
) -> Result<f64, ModelError> {
    if !prices.consistent_excluding(state, m) {
        return Err(ModelError::StalePrices);
    }
    let mut total = 0.0;
    for n in 0..scenario.subcarrier_count {
        total += subchannel_rate(scenario, m, n, state);
        let p = state.bs(m)[n];
        for j in 0..scenario.bs_count {
            if j != m {
                total -= prices.get(j, n) * scenario.gain(m, j, n) * p;
            }
        }
    }
    Ok(total)
}

/// Network-level metrics at a power state.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NetworkMetrics {
    pub throughput_bps: f64,
    pub total_power_w: f64,
    pub energy_efficiency_bps_per_w: f64,
}

/// Throughput is the per-subcarrier bandwidth times the summed spectral
/// efficiencies; energy efficiency is throughput over total power, defined
/// as zero at zero power.
pub fn network_metrics(scenario: &Scenario, state: &NetworkState) -> NetworkMetrics {
    let mut sum_rate = 0.0;
    for m in 0..scenario.bs_count {
        for n in 0..scenario.subcarrier_count {
            sum_rate += subchannel_rate(scenario, m, n, state);
        }
    }
    let throughput =
        scenario.bandwidth_hz / scenario.subcarrier_count as f64 * sum_rate;
    let power = state.total_power();
    let ee = if power > 0.0 { throughput / power } else { 0.0 };
    NetworkMetrics {
        throughput_bps: throughput,
        total_power_w: power,
        energy_efficiency_bps_per_w: ee,
    }
}

/// The bi-objective problem of one base station with the other stations'
/// powers and the price table frozen: f1 is the negated throughput
/// contribution as a function of its own powers, f2 the total transmit
/// power. Interference and prices are baked in at construction.
#[derive(Debug, Clone)]
pub struct BsPowerProblem {
    /// Effective SINR slope per watt: g_mm / (noise + interference).
    sinr_gain: Vec<f64>,
    /// Priced marginal cost per watt on each subcarrier.
    cost: Vec<f64>,
    budget: f64,
    /// Certified lower bound on f1 derived from the scenario alone.
    f1_lower_bound: f64,
}

/// Build the problem of base station `m`. Prices must be consistent with
/// the powers of every other station.
pub fn build_bs_problem(
    scenario: &Scenario,
    m: usize,
    state: &NetworkState,
    prices: &PriceTable,
) -> Result<BsPowerProblem, ModelError> {
    if m >= scenario.bs_count {
        return Err(ModelError::Index);
    }
    if !prices.consistent_excluding(state, m) {
        return Err(ModelError::StalePrices);
    }
    let n = scenario.subcarrier_count;
    let mut sinr_gain = Vec::with_capacity(n);
    let mut cost = Vec::with_capacity(n);
    for nn in 0..n {
        let den = scenario.noise_power_w + interference(scenario, m, nn, state);
        sinr_gain.push(scenario.gain(m, m, nn) / den);
        let c = (0..scenario.bs_count)
            .filter(|&j| j != m)
            .map(|j| prices.get(j, nn) * scenario.gain(m, j, nn))
            .sum();
        cost.push(c);
    }
    // each subcarrier rate is at most log2(1 + g_max * budget / noise), and
    // the cost term only increases f1
    let g_max = scenario.max_own_gain(m);
    let budget = scenario.power_budget_w;
    let f1_lower_bound =
        -(n as f64) * math::log2(1.0 + g_max * budget / scenario.noise_power_w);
    Ok(BsPowerProblem { sinr_gain, cost, budget, f1_lower_bound })
}

impl BsPowerProblem {
    /// Same problem under a tightened power budget.
    pub fn with_budget(mut self, budget: f64) -> Result<Self, ModelError> {
        if !(budget > 0.0) || budget > self.budget * (1.0 + 1e-12) {
            return Err(ModelError::BudgetViolation);
        }
        self.budget = budget;
        Ok(self)
    }

    pub fn sinr_gain(&self) -> &[f64] {
        &self.sinr_gain
    }

    pub fn cost(&self) -> &[f64] {
        &self.cost
    }
}

impl BiObjectiveProblem for BsPowerProblem {
    fn dimension(&self) -> usize {
        self.sinr_gain.len()
    }

    fn budget(&self) -> f64 {
        self.budget
    }

    fn objectives(&self, p: &[f64]) -> ObjectivePair {
        let mut f1 = 0.0;
        let mut f2 = 0.0;
        for i in 0..p.len() {
            f1 += -math::log2(1.0 + self.sinr_gain[i] * p[i]) + self.cost[i] * p[i];
            f2 += p[i];
        }
        ObjectivePair::new(f1, f2)
    }

    fn objective_gradients(&self, p: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let g1 = (0..p.len())
            .map(|i| {
                let gamma = self.sinr_gain[i];
                -gamma / (core::f64::consts::LN_2 * (1.0 + gamma * p[i])) + self.cost[i]
            })
            .collect();
        (g1, alloc::vec![1.0; p.len()])
    }

    fn objective_hessians(&self, p: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = p.len();
        let mut h1 = alloc::vec![0.0; n * n];
        for i in 0..n {
            let gamma = self.sinr_gain[i];
            let d = 1.0 + gamma * p[i];
            h1[i * n + i] = gamma * gamma / (core::f64::consts::LN_2 * d * d);
        }
        (h1, alloc::vec![0.0; n * n])
    }

    fn objective_bounds(&self) -> ObjectiveBounds {
        ObjectiveBounds { f1_min: self.f1_lower_bound, f2_max: self.budget }
    }
}
