//! Parametric sensitivity of scalarized solutions in the reference point.
//!
//! At a solved subproblem the active constraints are classified into
//! plus/zero/minus sets (active with positive multiplier, degenerate, and
//! slack). In the non-degenerate case the right-handed directional
//! derivatives of (t, p, mu, beta) along a perturbation a -> a + s v solve a
//! square linear system assembled from the KKT conditions; the derivatives
//! feed first-order predictions of both the next solution (warm starts) and
//! the next objective point (the equal-spacing step rule).

use alloc::vec::Vec;

use crate::linalg;
use crate::math;
use crate::moo::{BiObjectiveProblem, ObjectivePair};
use crate::solver::{SpParameters, SpSolution};

/// Three-way partition of both constraint families.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActiveSetPartition {
    /// Cone constraints: active and non-degenerate (value ~ 0, mu > 0).
    pub i_plus: Vec<usize>,
    /// Cone constraints: active and degenerate (value ~ 0, mu ~ 0).
    pub i_zero: Vec<usize>,
    /// Cone constraints: slack (value > 0, mu ~ 0).
    pub i_minus: Vec<usize>,
    pub j_plus: Vec<usize>,
    pub j_zero: Vec<usize>,
    pub j_minus: Vec<usize>,
}

impl ActiveSetPartition {
    /// Degenerate partitions (nonempty zero sets) are reported, not errors;
    /// callers fall back to a cold solve.
    pub fn is_degenerate(&self) -> bool {
        !self.i_zero.is_empty() || !self.j_zero.is_empty()
    }
}

/// Classify both constraint families at a solved point with threshold `tol`
/// on constraint values and multipliers.
pub fn classify_constraints(
    solution: &SpSolution,
    params: &SpParameters,
    problem: &dyn BiObjectiveProblem,
    tol: f64,
) -> ActiveSetPartition {
    let f = problem.objectives(&solution.p);
    let k = [
        params.a[0] + solution.t * params.r[0] - f.f1,
        params.a[1] + solution.t * params.r[1] - f.f2,
    ];
    let g = problem.constraints(&solution.p);

    let mut part = ActiveSetPartition {
        i_plus: Vec::new(),
        i_zero: Vec::new(),
        i_minus: Vec::new(),
        j_plus: Vec::new(),
        j_zero: Vec::new(),
        j_minus: Vec::new(),
    };
    for i in 0..2 {
        if k[i] <= tol {
            if solution.mu[i] > tol {
                part.i_plus.push(i);
            } else {
                part.i_zero.push(i);
            }
        } else {
            part.i_minus.push(i);
        }
    }
    for (j, &gj) in g.iter().enumerate() {
        if gj <= tol {
            if solution.beta[j] > tol {
                part.j_plus.push(j);
            } else {
                part.j_zero.push(j);
            }
        } else {
            part.j_minus.push(j);
        }
    }
    part
}

/// Right-handed directional derivatives of (t, p, mu, beta) with respect to
/// the step length s along the parameter direction v.
#[derive(Debug, Clone)]
pub struct SensitivityDerivatives {
    pub t_bar: f64,
    pub p_bar: Vec<f64>,
    pub mu_bar: [f64; 2],
    pub beta_bar: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SensitivityError {
    /// Zero sets nonempty: the equality form of the system does not apply.
    DegenerateActiveSet,
    SingularSystem,
}

impl core::fmt::Display for SensitivityError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SensitivityError::DegenerateActiveSet => {
                write!(f, "degenerate active set; re-solve instead of differentiating")
            }
            SensitivityError::SingularSystem => write!(f, "sensitivity system is singular"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SensitivityError {}

/// Solve the sensitivity system at a non-degenerate solution.
///
/// Equations: the differentiated multiplier normalization, the
/// differentiated stationarity in p (with the objective Hessians; g is
/// linear), persistence of the active cone equalities (r_i t_bar -
/// grad f_i' p_bar = -v_i on I+) and of the active g equalities, with
/// minus-set derivatives fixed at zero.
pub fn solve_sensitivity_system(
    solution: &SpSolution,
    partition: &ActiveSetPartition,
    v: [f64; 2],
    problem: &dyn BiObjectiveProblem,
    params: &SpParameters,
) -> Result<SensitivityDerivatives, SensitivityError> {
    if partition.is_degenerate() {
        return Err(SensitivityError::DegenerateActiveSet);
    }
    let n = problem.dimension();
    let p = &solution.p;
    let (g1, g2) = problem.objective_gradients(p);
    let grads = [&g1, &g2];
    let (h1, h2) = problem.objective_hessians(p);

    let na = partition.i_plus.len();
    let ng = partition.j_plus.len();
    let dim = 1 + n + na + ng;

    // unknowns: [t_bar | p_bar (n) | mu_bar on I+ | beta_bar on J+]
    let mut mat = alloc::vec![0.0; dim * dim];
    let mut rhs = alloc::vec![0.0; dim];

    // normalization row
    for (ci, &i) in partition.i_plus.iter().enumerate() {
        mat[1 + n + ci] = params.r[i];
    }
    // stationarity rows
    for row in 0..n {
        let base = (1 + row) * dim;
        for col in 0..n {
            let mut h = 0.0;
            h += solution.mu[0] * h1[row * n + col];
            h += solution.mu[1] * h2[row * n + col];
            mat[base + 1 + col] = h;
        }
        for (ci, &i) in partition.i_plus.iter().enumerate() {
            mat[base + 1 + n + ci] = grads[i][row];
        }
        for (cj, &j) in partition.j_plus.iter().enumerate() {
            // minus the constraint gradient: -e_j for bounds, +1 for budget
            mat[base + 1 + n + na + cj] = if j < n {
                if j == row {
                    -1.0
                } else {
                    0.0
                }
            } else {
                1.0
            };
        }
    }
    // active cone equalities
    for (ci, &i) in partition.i_plus.iter().enumerate() {
        let base = (1 + n + ci) * dim;
        mat[base] = params.r[i];
        for col in 0..n {
            mat[base + 1 + col] = -grads[i][col];
        }
        rhs[1 + n + ci] = -v[i];
    }
    // active g equalities
    for (cj, &j) in partition.j_plus.iter().enumerate() {
        let base = (1 + n + na + cj) * dim;
        if j < n {
            mat[base + 1 + j] = 1.0;
        } else {
            for col in 0..n {
                mat[base + 1 + col] = -1.0;
            }
        }
    }

    let mut x = rhs;
    linalg::solve_in_place(&mut mat, &mut x).map_err(|_| SensitivityError::SingularSystem)?;

    let mut mu_bar = [0.0; 2];
    for (ci, &i) in partition.i_plus.iter().enumerate() {
        mu_bar[i] = x[1 + n + ci];
    }
    let mut beta_bar = alloc::vec![0.0; n + 1];
    for (cj, &j) in partition.j_plus.iter().enumerate() {
        beta_bar[j] = x[1 + n + na + cj];
    }
    Ok(SensitivityDerivatives {
        t_bar: x[0],
        p_bar: x[1..1 + n].to_vec(),
        mu_bar,
        beta_bar,
    })
}

/// First-order update of a solution, used as a warm start only. The
/// predicted decision vector is clamped at the lower bound so warm starts
/// stay in the solver's domain.
#[derive(Debug, Clone)]
pub struct PredictedSolution {
    pub t: f64,
    pub p: Vec<f64>,
    pub mu: [f64; 2],
    pub beta: Vec<f64>,
}

pub fn predict_solution(
    solution: &SpSolution,
    derivatives: &SensitivityDerivatives,
    s: f64,
) -> PredictedSolution {
    let p = solution
        .p
        .iter()
        .zip(&derivatives.p_bar)
        .map(|(p0, pb)| (p0 + s * pb).max(0.0))
        .collect();
    let beta = solution
        .beta
        .iter()
        .zip(&derivatives.beta_bar)
        .map(|(b0, bb)| b0 + s * bb)
        .collect();
    PredictedSolution {
        t: solution.t + s * derivatives.t_bar,
        p,
        mu: [
            solution.mu[0] + s * derivatives.mu_bar[0],
            solution.mu[1] + s * derivatives.mu_bar[1],
        ],
        beta,
    }
}

/// First-order prediction of the objective point after a parameter step
/// a -> a + s v: f0 + s v + s (-mu0' v) r. The directional coefficient uses
/// the value-function gradient, which equals the negated multiplier.
pub fn predict_objectives(
    f0: &ObjectivePair,
    s: f64,
    v: [f64; 2],
    mu0: [f64; 2],
    r: [f64; 2],
) -> ObjectivePair {
    let dir = -(mu0[0] * v[0] + mu0[1] * v[1]);
    ObjectivePair::new(
        f0.f1 + s * v[0] + s * dir * r[0],
        f0.f2 + s * v[1] + s * dir * r[1],
    )
}

/// Residual of the sensitivity system at given derivatives, for validation.
pub fn sensitivity_residual(
    solution: &SpSolution,
    partition: &ActiveSetPartition,
    derivatives: &SensitivityDerivatives,
    v: [f64; 2],
    problem: &dyn BiObjectiveProblem,
    params: &SpParameters,
) -> f64 {
    let n = problem.dimension();
    let (g1, g2) = problem.objective_gradients(&solution.p);
    let grads = [&g1, &g2];
    let (h1, h2) = problem.objective_hessians(&solution.p);

    let mut worst = math::abs(
        derivatives.mu_bar[0] * params.r[0] + derivatives.mu_bar[1] * params.r[1],
    );
    for row in 0..n {
        let mut s = 0.0;
        for col in 0..n {
            s += (solution.mu[0] * h1[row * n + col] + solution.mu[1] * h2[row * n + col])
                * derivatives.p_bar[col];
        }
        for i in 0..2 {
            s += derivatives.mu_bar[i] * grads[i][row];
        }
        for j in 0..=n {
            let gj = if j < n {
                if j == row {
                    1.0
                } else {
                    0.0
                }
            } else {
                -1.0
            };
            s -= derivatives.beta_bar[j] * gj;
        }
        worst = worst.max(math::abs(s));
    }
    for &i in &partition.i_plus {
        let s = params.r[i] * derivatives.t_bar - math::dot(grads[i], &derivatives.p_bar) + v[i];
        worst = worst.max(math::abs(s));
    }
    for &j in &partition.j_plus {
        let s = if j < n {
            derivatives.p_bar[j]
        } else {
            -derivatives.p_bar.iter().sum::<f64>()
        };
        worst = worst.max(math::abs(s));
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::SeparableQuadratic;
    use crate::solver::{SolveStatus, SolverConfig, SpSolver};

    fn toy_solution() -> (SeparableQuadratic, SpParameters, SpSolution) {
        let prob = SeparableQuadratic::unit_tradeoff();
        let params = SpParameters::new([0.0, 0.0], [1.0, 1.0]).unwrap();
        let mut solver = SpSolver::new(SolverConfig::default());
        let sol = solver.solve_sp(&prob, &params, None).unwrap();
        assert_eq!(sol.status, SolveStatus::Converged);
        (prob, params, sol)
    }

    #[test]
    fn classify_toy_solution() {
        let (prob, params, sol) = toy_solution();
        let part = classify_constraints(&sol, &params, &prob, 1e-6);
        // both cone constraints tight with positive multipliers, all g slack
        assert_eq!(part.i_plus, alloc::vec![0, 1]);
        assert!(part.i_zero.is_empty() && part.i_minus.is_empty());
        assert!(part.j_plus.is_empty() && part.j_zero.is_empty());
        assert_eq!(part.j_minus, alloc::vec![0, 1]);
        assert!(!part.is_degenerate());
    }

    #[test]
    fn classify_slack_constraint_lands_in_minus() {
        let (prob, params, mut sol) = toy_solution();
        // inflate t so both cone constraints have slack; multipliers near zero
        sol.t += 1.0;
        sol.mu = [0.0, 0.0];
        let part = classify_constraints(&sol, &params, &prob, 1e-6);
        assert_eq!(part.i_minus, alloc::vec![0, 1]);
    }

    #[test]
    fn zero_direction_gives_zero_derivatives() {
        let (prob, params, sol) = toy_solution();
        let part = classify_constraints(&sol, &params, &prob, 1e-6);
        let d = solve_sensitivity_system(&sol, &part, [0.0, 0.0], &prob, &params).unwrap();
        assert!(d.t_bar.abs() < 1e-12);
        assert!(d.p_bar[0].abs() < 1e-12);
        assert!(d.mu_bar[0].abs() < 1e-12 && d.mu_bar[1].abs() < 1e-12);
    }

    #[test]
    fn degenerate_partition_is_rejected() {
        let (prob, params, mut sol) = toy_solution();
        sol.mu = [0.0, 0.0]; // forces I0 nonempty
        let part = classify_constraints(&sol, &params, &prob, 1e-6);
        assert!(part.is_degenerate());
        assert_eq!(
            solve_sensitivity_system(&sol, &part, [1.0, 0.0], &prob, &params).unwrap_err(),
            SensitivityError::DegenerateActiveSet
        );
    }

    #[test]
    fn toy_derivative_matches_analytic() {
        // For f = (p^2, (1-p)^2), a = (a1, a2): balance point
        // p(a) = (1 + a1 - a2)/2, t(a) = p^2 - a1.
        // d/da1 at a = 0: p_bar = 1/2, t_bar = 2 p p_bar - 1 = -1/2 = -mu_1.
        let (prob, params, sol) = toy_solution();
        let part = classify_constraints(&sol, &params, &prob, 1e-6);
        let d = solve_sensitivity_system(&sol, &part, [1.0, 0.0], &prob, &params).unwrap();
        assert!((d.p_bar[0] - 0.5).abs() < 1e-9, "p_bar = {}", d.p_bar[0]);
        assert!((d.t_bar + 0.5).abs() < 1e-9, "t_bar = {}", d.t_bar);
        // residual of the system itself
        let res = sensitivity_residual(&sol, &part, &d, [1.0, 0.0], &prob, &params);
        assert!(res < 1e-10);
    }

    #[test]
    fn predict_solution_identity_at_zero_step() {
        let (prob, params, sol) = toy_solution();
        let part = classify_constraints(&sol, &params, &prob, 1e-6);
        let d = solve_sensitivity_system(&sol, &part, [1.0, 0.0], &prob, &params).unwrap();
        let pred = predict_solution(&sol, &d, 0.0);
        assert_eq!(pred.t, sol.t);
        assert_eq!(pred.p, sol.p);
        assert_eq!(pred.mu, sol.mu);
    }

    #[test]
    fn predict_solution_clamps_negative_coordinates() {
        let (_, _, sol) = toy_solution();
        let d = SensitivityDerivatives {
            t_bar: 0.0,
            p_bar: alloc::vec![-10.0],
            mu_bar: [0.0, 0.0],
            beta_bar: alloc::vec![0.0, 0.0],
        };
        let pred = predict_solution(&sol, &d, 1.0);
        assert_eq!(pred.p[0], 0.0);
    }

    #[test]
    fn predict_objectives_identities() {
        let f0 = ObjectivePair::new(2.0, 3.0);
        // s = 0 returns f0
        let same = predict_objectives(&f0, 0.0, [1.0, -1.0], [0.5, 0.5], [1.0, 1.0]);
        assert_eq!(same, f0);
        // mu0'v = 0 drops the direction term
        let plain = predict_objectives(&f0, 0.1, [1.0, 1.0], [0.5, -0.5], [1.0, 1.0]);
        assert!((plain.f1 - 2.1).abs() < 1e-15);
        assert!((plain.f2 - 3.1).abs() < 1e-15);
    }
}
