//! Temperature-annealed smoothed-max descent with projected gradient steps.

use alloc::vec::Vec;

use super::projection::project_simplex_box;
use super::{Objective, SolverConfig, SpParameters};
use crate::math;
use crate::moo::BiObjectiveProblem;

/// Smoothed minimax value and gradient at `p`.
///
/// phi_tau = m + tau * ln(sum_i exp((u_i - m)/tau)) with
/// u_i = (f_i(p) - a_i)/r_i and m = max(u); the gradient mixes the objective
/// gradients with the softmax weights.
fn lse_value(problem: &dyn BiObjectiveProblem, params: &SpParameters, p: &[f64], tau: f64) -> f64 {
    let f = problem.objectives(p);
    let u1 = (f.f1 - params.a[0]) / params.r[0];
    let u2 = (f.f2 - params.a[1]) / params.r[1];
    let m = u1.max(u2);
    m + tau * math::ln(math::exp((u1 - m) / tau) + math::exp((u2 - m) / tau))
}

fn lse_value_grad(
    problem: &dyn BiObjectiveProblem,
    params: &SpParameters,
    p: &[f64],
    tau: f64,
    grad: &mut [f64],
) -> f64 {
    let f = problem.objectives(p);
    let (g1, g2) = problem.objective_gradients(p);
    let u1 = (f.f1 - params.a[0]) / params.r[0];
    let u2 = (f.f2 - params.a[1]) / params.r[1];
    let m = u1.max(u2);
    let z1 = math::exp((u1 - m) / tau);
    let z2 = math::exp((u2 - m) / tau);
    let s = z1 + z2;
    let w1 = z1 / s / params.r[0];
    let w2 = z2 / s / params.r[1];
    for i in 0..p.len() {
        grad[i] = w1 * g1[i] + w2 * g2[i];
    }
    m + tau * math::ln(s)
}

/// Projected-gradient descent of a smooth convex objective over the
/// simplex-box, with backtracking on the proximal decrease condition.
/// Returns the number of iterations spent.
fn descend<F, G>(
    p: &mut Vec<f64>,
    budget: f64,
    max_iter: usize,
    mut value: F,
    mut value_grad: G,
) -> usize
where
    F: FnMut(&[f64]) -> f64,
    G: FnMut(&[f64], &mut [f64]) -> f64,
{
    let n = p.len();
    let mut grad = alloc::vec![0.0; n];
    let mut phi = value_grad(p, &mut grad);
    let gnorm = math::norm(&grad);
    let mut eta = if gnorm > 0.0 { 0.1 * (1.0 + budget) / gnorm } else { 1.0 };
    let step_tol = 1e-11 * (1.0 + budget);
    let mut cand = alloc::vec![0.0; n];

    let mut iter = 0;
    while iter < max_iter {
        iter += 1;
        let mut accepted = false;
        for _ in 0..60 {
            for i in 0..n {
                cand[i] = p[i] - eta * grad[i];
            }
            project_simplex_box(&mut cand, budget);
            let mut dphi = 0.0;
            let mut dd = 0.0;
            for i in 0..n {
                let d = cand[i] - p[i];
                dphi += grad[i] * d;
                dd += d * d;
            }
            let phi_c = value(&cand);
            if phi_c <= phi + dphi + dd / (2.0 * eta) + 1e-300 {
                accepted = true;
                let step = math::sqrt(dd);
                core::mem::swap(p, &mut cand);
                phi = value_grad(p, &mut grad);
                eta = (eta * 1.3).min(1e12);
                if step <= step_tol {
                    return iter;
                }
                break;
            }
            eta *= 0.5;
            if eta < 1e-18 {
                return iter;
            }
        }
        if !accepted {
            return iter;
        }
    }
    iter
}

/// Anneal the smoothed minimax from a coarse to a fine temperature.
pub(super) fn anneal_minimax(
    problem: &dyn BiObjectiveProblem,
    params: &SpParameters,
    p: &mut Vec<f64>,
    warm: bool,
    config: &SolverConfig,
) {
    let budget = problem.budget();
    // scalar objective scale fixes the absolute temperature ladder
    let u_scale = {
        let f = problem.objectives(p);
        let u1 = (f.f1 - params.a[0]) / params.r[0];
        let u2 = (f.f2 - params.a[1]) / params.r[1];
        1.0f64.max(math::abs(u1)).max(math::abs(u2))
    };
    let start = if warm { config.temperature_warm } else { config.temperature_cold };
    let mut taus = Vec::new();
    let mut tau = start;
    while tau > config.temperature_min * 0.999 {
        taus.push(tau * u_scale);
        tau *= 0.1;
    }
    if taus.is_empty() {
        taus.push(config.temperature_min * u_scale);
    }
    let per_level = (config.max_inner_iter / taus.len()).max(50);
    for &tau in &taus {
        descend(
            p,
            budget,
            per_level,
            |q| lse_value(problem, params, q, tau),
            |q, g| lse_value_grad(problem, params, q, tau, g),
        );
    }
}

/// Plain projected-gradient descent of a single objective.
pub(super) fn descend_single(
    problem: &dyn BiObjectiveProblem,
    which: Objective,
    p: &mut Vec<f64>,
    config: &SolverConfig,
) {
    let budget = problem.budget();
    let pick = |problem: &dyn BiObjectiveProblem, q: &[f64]| -> f64 {
        let f = problem.objectives(q);
        match which {
            Objective::F1 => f.f1,
            Objective::F2 => f.f2,
        }
    };
    descend(
        p,
        budget,
        config.max_inner_iter,
        |q| pick(problem, q),
        |q, g| {
            let (g1, g2) = problem.objective_gradients(q);
            let src = match which {
                Objective::F1 => &g1,
                Objective::F2 => &g2,
            };
            g.copy_from_slice(src);
            pick(problem, q)
        },
    );
}
