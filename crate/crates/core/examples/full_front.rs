//! Quick driver: trace the frontier of one base station in the full
//! 19-cell, 64-subcarrier instance and print timing/quality statistics.

use std::time::Instant;

use pareto_apc_core::apc::{run_apc, ApcConfig};
use pareto_apc_core::cellnet::{
    build_bs_problem, compute_prices, generate_scenario, NetworkState, ScenarioConfig,
};
use pareto_apc_core::filter_nondominated;

fn main() {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let t0 = Instant::now();
    let scenario = generate_scenario(&ScenarioConfig::default(), seed).unwrap();
    println!("scenario generated in {:?}", t0.elapsed());

    let state = NetworkState::all_epa(&scenario, 30.0).unwrap();
    let prices = compute_prices(&scenario, &state);
    let problem = build_bs_problem(&scenario, 0, &state, &prices).unwrap();

    let t1 = Instant::now();
    let run = run_apc(&problem, &ApcConfig::default()).unwrap();
    let dt = t1.elapsed();

    let front = run.front.objective_pairs();
    println!(
        "front: {} points, {} dropped, {} flagged, {} solves ({} warm) in {:?}",
        front.len(),
        run.front.dropped(),
        run.flagged.len(),
        run.sp_solves,
        run.warm_starts,
        dt
    );
    println!("alpha = {:.4}", run.alpha);
    println!(
        "f1 range [{:.3}, {:.3}], f2 range [{:.3}, {:.3}]",
        front.first().unwrap().f1,
        front.last().unwrap().f1,
        front.first().unwrap().f2,
        front.last().unwrap().f2
    );
    let spacing = run.spacing();
    let ok = spacing
        .iter()
        .filter(|&&d| d >= 0.5 * run.alpha && d <= 1.5 * run.alpha)
        .count();
    println!(
        "spacing: {}/{} within [0.5a, 1.5a], min {:.4}, max {:.4}",
        ok,
        spacing.len(),
        spacing.iter().cloned().fold(f64::INFINITY, f64::min),
        spacing.iter().cloned().fold(0.0, f64::max)
    );
    let worst_res = run
        .front
        .entries()
        .iter()
        .map(|e| e.meta.solution.kkt_residual)
        .fold(0.0f64, f64::max);
    println!("worst KKT residual: {worst_res:.3e}");
    for f in &run.flagged {
        println!("flagged: a = [{:.4}, {:.4}], residual {:.3e}", f.a[0], f.a[1], f.kkt_residual);
    }
    assert_eq!(filter_nondominated(&front).len(), front.len());
    println!("front passes nondominated filter unchanged");
}
