//! Active-set Newton polish.
//!
//! The annealed projected-gradient phase locates the optimal face; the
//! polish then solves the equality-constrained KKT system on that face by
//! Newton's method to machine-precision residuals, adjusting the working
//! sets when multiplier signs or constraint violations show them wrong.

use alloc::vec::Vec;

use super::{Objective, SolverConfig, SpParameters};
use crate::linalg;
use crate::math;
use crate::moo::BiObjectiveProblem;

#[derive(Debug, Clone)]
pub(super) struct ActiveSets {
    /// Active cone constraints, subset of {0, 1}, kept sorted.
    pub cone: Vec<usize>,
    /// Coordinates pinned at their lower bound.
    pub bound: Vec<bool>,
    /// Whether the budget constraint is held as an equality.
    pub budget: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(super) enum PolishFail {
    Singular,
    Stalled,
    RoundsExhausted,
}

pub(super) fn detect_sets(
    problem: &dyn BiObjectiveProblem,
    params: &SpParameters,
    p: &[f64],
    t: f64,
    scale: f64,
    _config: &SolverConfig,
) -> ActiveSets {
    let f = problem.objectives(p);
    let u = [
        (f.f1 - params.a[0]) / params.r[0],
        (f.f2 - params.a[1]) / params.r[1],
    ];
    // loose tolerance: the annealed point is only locally accurate, wrong
    // guesses are repaired by the validation loop
    let cone_tol = 1e-4 * scale;
    let cone: Vec<usize> = (0..2)
        .filter(|&i| params.r[i] * (t - u[i]) <= cone_tol)
        .collect();
    let p_tol = 1e-9 * (1.0 + problem.budget());
    let bound: Vec<bool> = p.iter().map(|&x| x <= p_tol).collect();
    let budget = problem.budget() - p.iter().sum::<f64>() <= p_tol;
    ActiveSets { cone: if cone.is_empty() { alloc::vec![0] } else { cone }, bound, budget }
}

struct Eval {
    f: [f64; 2],
    grads: [Vec<f64>; 2],
}

fn eval(problem: &dyn BiObjectiveProblem, p: &[f64]) -> Eval {
    let f = problem.objectives(p);
    let (g1, g2) = problem.objective_gradients(p);
    Eval { f: [f.f1, f.f2], grads: [g1, g2] }
}

/// Newton polish of the minimax KKT system. Mutates `p`, `t` and `sets`;
/// on success the residual of the held equalities is at machine precision
/// and all working-set multipliers have admissible signs.
pub(super) fn polish_minimax(
    problem: &dyn BiObjectiveProblem,
    params: &SpParameters,
    p: &mut Vec<f64>,
    t: &mut f64,
    sets: &mut ActiveSets,
    scale: f64,
    config: &SolverConfig,
) -> Result<(), PolishFail> {
    let n = problem.dimension();
    let budget = problem.budget();
    let mut mu = [0.0f64; 2];
    for &i in &sets.cone {
        mu[i] = 1.0 / (sets.cone.len() as f64 * params.r[i]);
    }
    let mut beta_b = 0.0f64;
    let vtol_mu = 1e-9;
    let vtol_c = 1e-9 * scale;

    for _round in 0..config.max_polish_rounds {
        let free: Vec<usize> = (0..n).filter(|&i| !sets.bound[i]).collect();
        let na = sets.cone.len();
        let nf = free.len();
        let nb = sets.budget as usize;
        let dim = 1 + nf + na + nb;

        let e0 = eval(problem, p);
        let grad_scale = 1.0f64
            .max(math::norm_inf(&e0.grads[0]))
            .max(math::norm_inf(&e0.grads[1]));
        let sys_scale = scale.max(grad_scale);
        let newton_tol = 1e-12 * sys_scale;

        let mut converged = false;
        let mut singular = false;
        for _newton in 0..50 {
            let e = eval(problem, p);
            let (h1, h2) = problem.objective_hessians(p);

            let mut res = alloc::vec![0.0; dim];
            for (ci, &i) in sets.cone.iter().enumerate() {
                res[ci] = params.a[i] + *t * params.r[i] - e.f[i];
            }
            for (k, &nn) in free.iter().enumerate() {
                let mut s = if sets.budget { beta_b } else { 0.0 };
                for &i in &sets.cone {
                    s += mu[i] * e.grads[i][nn];
                }
                res[na + k] = s;
            }
            res[na + nf] = 1.0 - sets.cone.iter().map(|&i| mu[i] * params.r[i]).sum::<f64>();
            if nb == 1 {
                res[na + nf + 1] = p.iter().sum::<f64>() - budget;
            }

            if math::norm_inf(&res) <= newton_tol {
                converged = true;
                break;
            }

            // columns: [t | p_free | mu_cone | beta_b]
            let mut jac = alloc::vec![0.0; dim * dim];
            for (ci, &i) in sets.cone.iter().enumerate() {
                jac[ci * dim] = params.r[i];
                for (k, &nn) in free.iter().enumerate() {
                    jac[ci * dim + 1 + k] = -e.grads[i][nn];
                }
            }
            for (k, &nn) in free.iter().enumerate() {
                let row = na + k;
                for (k2, &mm) in free.iter().enumerate() {
                    let mut h = 0.0;
                    if sets.cone.contains(&0) {
                        h += mu[0] * h1[nn * n + mm];
                    }
                    if sets.cone.contains(&1) {
                        h += mu[1] * h2[nn * n + mm];
                    }
                    jac[row * dim + 1 + k2] = h;
                }
                for (ci, &i) in sets.cone.iter().enumerate() {
                    jac[row * dim + 1 + nf + ci] = e.grads[i][nn];
                }
                if nb == 1 {
                    jac[row * dim + 1 + nf + na] = 1.0;
                }
            }
            for (ci, &i) in sets.cone.iter().enumerate() {
                jac[(na + nf) * dim + 1 + nf + ci] = -params.r[i];
            }
            if nb == 1 {
                for k in 0..nf {
                    jac[(na + nf + 1) * dim + 1 + k] = 1.0;
                }
            }

            let mut rhs: Vec<f64> = res.iter().map(|v| -v).collect();
            if linalg::solve_in_place(&mut jac, &mut rhs).is_err() {
                singular = true;
                break;
            }

            // fraction to boundary keeps free coordinates strictly positive
            let mut alpha = 1.0f64;
            for (k, &nn) in free.iter().enumerate() {
                let d = rhs[1 + k];
                if d < 0.0 && p[nn] + d < 0.0 {
                    alpha = alpha.min(0.95 * p[nn] / (-d));
                }
            }
            *t += alpha * rhs[0];
            for (k, &nn) in free.iter().enumerate() {
                p[nn] += alpha * rhs[1 + k];
            }
            for (ci, &i) in sets.cone.iter().enumerate() {
                mu[i] += alpha * rhs[1 + nf + ci];
            }
            if nb == 1 {
                beta_b += alpha * rhs[1 + nf + na];
            }
        }

        if singular {
            // prefer keeping the lower-index cone constraint; its multiplier
            // is the one shared between equivalent subproblems
            if na > 1 {
                let dropped = sets.cone.pop().unwrap();
                mu[dropped] = 0.0;
                continue;
            }
            return Err(PolishFail::Singular);
        }

        // validate working sets against signs and violations
        let e = eval(problem, p);
        let u = [
            (e.f[0] - params.a[0]) / params.r[0],
            (e.f[1] - params.a[1]) / params.r[1],
        ];
        let mut changed = false;

        let mut drop_cone: Option<usize> = None;
        for &i in &sets.cone {
            if mu[i] < -vtol_mu && sets.cone.len() > 1 {
                drop_cone = Some(i);
            }
        }
        if let Some(i) = drop_cone {
            sets.cone.retain(|&c| c != i);
            mu[i] = 0.0;
            changed = true;
        }
        for i in 0..2 {
            if !sets.cone.contains(&i) && u[i] > *t + vtol_c / params.r[i] {
                sets.cone.push(i);
                sets.cone.sort_unstable();
                mu[i] = 0.0;
                changed = true;
            }
        }
        if sets.budget && beta_b < -vtol_mu {
            sets.budget = false;
            beta_b = 0.0;
            changed = true;
        }
        if !sets.budget && p.iter().sum::<f64>() > budget + vtol_c {
            sets.budget = true;
            changed = true;
        }
        let bb = if sets.budget { beta_b } else { 0.0 };
        for nn in 0..n {
            if sets.bound[nn] {
                let mut s = bb;
                for &i in &sets.cone {
                    s += mu[i] * e.grads[i][nn];
                }
                // s is the bound multiplier; negative means the coordinate
                // wants to leave zero
                if s < -vtol_mu * (1.0 + math::abs(bb)) {
                    sets.bound[nn] = false;
                    changed = true;
                }
            } else if p[nn] < 1e-11 * (1.0 + budget) {
                sets.bound[nn] = true;
                p[nn] = 0.0;
                changed = true;
            }
        }

        if !changed {
            return if converged { Ok(()) } else { Err(PolishFail::Stalled) };
        }
    }
    Err(PolishFail::RoundsExhausted)
}

/// Newton polish for a single smooth objective over the simplex-box.
pub(super) fn polish_single(
    problem: &dyn BiObjectiveProblem,
    which: Objective,
    p: &mut Vec<f64>,
    scale: f64,
    config: &SolverConfig,
) -> Result<(), PolishFail> {
    let n = problem.dimension();
    let budget = problem.budget();
    let p_tol = 1e-9 * (1.0 + budget);
    let mut bound: Vec<bool> = p.iter().map(|&x| x <= p_tol).collect();
    let mut has_budget = budget - p.iter().sum::<f64>() <= p_tol;
    let mut beta_b = 0.0f64;
    let vtol_mu = 1e-9;
    let vtol_c = 1e-9 * scale;

    let grad_of = |problem: &dyn BiObjectiveProblem, q: &[f64]| -> Vec<f64> {
        let (g1, g2) = problem.objective_gradients(q);
        match which {
            Objective::F1 => g1,
            Objective::F2 => g2,
        }
    };
    let hess_of = |problem: &dyn BiObjectiveProblem, q: &[f64]| -> Vec<f64> {
        let (h1, h2) = problem.objective_hessians(q);
        match which {
            Objective::F1 => h1,
            Objective::F2 => h2,
        }
    };

    for _round in 0..config.max_polish_rounds {
        let free: Vec<usize> = (0..n).filter(|&i| !bound[i]).collect();
        let nf = free.len();
        let nb = has_budget as usize;
        let dim = nf + nb;

        let mut converged = dim == 0;
        let mut singular = false;
        if dim > 0 {
            let g0 = grad_of(problem, p);
            let sys_scale = scale.max(math::norm_inf(&g0)).max(1.0);
            let newton_tol = 1e-12 * sys_scale;
            for _newton in 0..50 {
                let g = grad_of(problem, p);
                let h = hess_of(problem, p);
                let mut res = alloc::vec![0.0; dim];
                for (k, &nn) in free.iter().enumerate() {
                    res[k] = g[nn] + if has_budget { beta_b } else { 0.0 };
                }
                if nb == 1 {
                    res[nf] = p.iter().sum::<f64>() - budget;
                }
                if math::norm_inf(&res) <= newton_tol {
                    converged = true;
                    break;
                }
                let mut jac = alloc::vec![0.0; dim * dim];
                for (k, &nn) in free.iter().enumerate() {
                    for (k2, &mm) in free.iter().enumerate() {
                        jac[k * dim + k2] = h[nn * n + mm];
                    }
                    if nb == 1 {
                        jac[k * dim + nf] = 1.0;
                    }
                }
                if nb == 1 {
                    for k2 in 0..nf {
                        jac[nf * dim + k2] = 1.0;
                    }
                }
                let mut rhs: Vec<f64> = res.iter().map(|v| -v).collect();
                if linalg::solve_in_place(&mut jac, &mut rhs).is_err() {
                    singular = true;
                    break;
                }
                let mut alpha = 1.0f64;
                for (k, &nn) in free.iter().enumerate() {
                    let d = rhs[k];
                    if d < 0.0 && p[nn] + d < 0.0 {
                        alpha = alpha.min(0.95 * p[nn] / (-d));
                    }
                }
                for (k, &nn) in free.iter().enumerate() {
                    p[nn] += alpha * rhs[k];
                }
                if nb == 1 {
                    beta_b += alpha * rhs[nf];
                }
            }
        }
        if singular {
            return Err(PolishFail::Singular);
        }

        let g = grad_of(problem, p);
        let mut changed = false;
        if has_budget && beta_b < -vtol_mu {
            has_budget = false;
            beta_b = 0.0;
            changed = true;
        }
        if !has_budget && p.iter().sum::<f64>() > budget + vtol_c {
            has_budget = true;
            changed = true;
        }
        let bb = if has_budget { beta_b } else { 0.0 };
        for nn in 0..n {
            if bound[nn] {
                if g[nn] + bb < -vtol_mu * (1.0 + math::abs(bb)) {
                    bound[nn] = false;
                    changed = true;
                }
            } else if p[nn] < 1e-11 * (1.0 + budget) {
                bound[nn] = true;
                p[nn] = 0.0;
                changed = true;
            }
        }
        if !changed {
            return if converged { Ok(()) } else { Err(PolishFail::Stalled) };
        }
    }
    Err(PolishFail::RoundsExhausted)
}
