//! Multi-cell OFDMA instance: scenario generation, the rate and
//! interference-pricing model, the per-base-station problem builder and the
//! baseline allocators.

mod baselines;
mod model;
mod scenario;


pub use baselines::{epa_allocation, pricing_best_response, utility_max};
pub use model::{
    build_bs_problem, compute_prices, interference, network_metrics, pricing_rate,
    subchannel_rate, throughput_contribution, BsPowerProblem, ModelError, NetworkMetrics,
    NetworkState, PowerAllocation, PriceTable,
};
pub use scenario::{
    generate_scenario, path_loss_db, thermal_noise_w, Scenario, ScenarioConfig, ScenarioError,
    UserSlot, SCENARIO_FORMAT_VERSION,
};
