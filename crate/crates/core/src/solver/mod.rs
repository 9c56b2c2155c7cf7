//! Scalarized-subproblem solver over the power simplex-box.
//!
//! The scalar problem SP(a, r) minimizes t subject to a + t·r - f(p) >= 0
//! and g(p) >= 0. For componentwise positive r the variable t is eliminated
//! through the minimax identity t*(p) = max_i (f_i(p) - a_i) / r_i, and the
//! resulting convex minimax is solved by a temperature-annealed smoothed max
//! with projected gradient steps, followed by an active-set Newton polish.
//! Lagrange multipliers are recovered from the stationarity system by
//! nonnegative least squares restricted to the active constraints.

mod polish;
mod projection;
mod smooth;

pub use projection::project_simplex_box;

use alloc::vec::Vec;

use crate::linalg;
use crate::math;
use crate::moo::BiObjectiveProblem;

/// Reference point `a` and direction `r` of one scalarized subproblem.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpParameters {
    pub a: [f64; 2],
    pub r: [f64; 2],
}

impl SpParameters {
    pub fn new(a: [f64; 2], r: [f64; 2]) -> Result<Self, SolverError> {
        if !(a[0].is_finite() && a[1].is_finite() && r[0].is_finite() && r[1].is_finite()) {
            return Err(SolverError::InvalidParameters("non-finite scalarization parameters"));
        }
        if !(r[0] > 0.0) || r[1] < 0.0 {
            return Err(SolverError::InvalidParameters("direction requires r1 > 0 and r2 >= 0"));
        }
        Ok(Self { a, r })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SolveStatus {
    Converged,
    MaxIter,
    /// Reserved for defensive checks; valid inputs always admit p = 0.
    Infeasible,
}

/// Solution of one scalarized subproblem with its KKT certificates.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpSolution {
    /// Scalar objective value, t = max_i (f_i(p) - a_i) / r_i.
    pub t: f64,
    /// Decision vector (watts per subcarrier on the network instance).
    pub p: Vec<f64>,
    /// Multipliers of the two cone constraints.
    pub mu: [f64; 2],
    /// Multipliers of the N+1 constraints g (nonnegativity, then budget).
    pub beta: Vec<f64>,
    pub kkt_residual: f64,
    pub status: SolveStatus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Target on the combined KKT residual.
    pub kkt_tol: f64,
    /// Cap on inner projected-gradient iterations per solve.
    pub max_inner_iter: usize,
    /// Constraint values within this factor times the problem scale count
    /// as active during multiplier recovery.
    pub active_tol_factor: f64,
    /// Starting smoothing temperature, relative to the scalar objective
    /// scale, for cold and warm starts.
    pub temperature_cold: f64,
    pub temperature_warm: f64,
    /// Final smoothing temperature factor before the polish step.
    pub temperature_min: f64,
    /// Cap on active-set adjustment rounds in the polish.
    pub max_polish_rounds: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            kkt_tol: 1e-6,
            max_inner_iter: 10_000,
            active_tol_factor: 1e-7,
            temperature_cold: 1e-1,
            temperature_warm: 1e-3,
            temperature_min: 1e-7,
            max_polish_rounds: 40,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverError {
    InvalidParameters(&'static str),
    DimensionMismatch,
    /// The minimax elimination needs r2 > 0; reject rather than guess.
    UnsupportedDirection,
}

impl core::fmt::Display for SolverError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SolverError::InvalidParameters(msg) => write!(f, "invalid parameters: {msg}"),
            SolverError::DimensionMismatch => write!(f, "decision vector length mismatch"),
            SolverError::UnsupportedDirection => {
                write!(f, "minimax solver requires a componentwise positive direction")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SolverError {}

/// Selects the single objective minimized by [`SpSolver::solve_min_objective`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    F1,
    F2,
}

/// Solver instance. Holds configuration and is intended to be used from one
/// thread; inputs and outputs are plain values and move freely across
/// threads, and independent subproblems may be solved in parallel with one
/// instance each.
#[derive(Debug, Clone)]
pub struct SpSolver {
    config: SolverConfig,
}

impl SpSolver {
    pub fn new(config: SolverConfig) -> Self {
        Self { config }
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    /// Solve SP(a, r). A warm start is projected onto the feasible set
    /// before use. `MaxIter` status reports a solution whose residual missed
    /// the tolerance within the iteration budget; the solution is still
    /// returned with its certificates.
    pub fn solve_sp(
        &mut self,
        problem: &dyn BiObjectiveProblem,
        params: &SpParameters,
        warm_start: Option<&[f64]>,
    ) -> Result<SpSolution, SolverError> {
        let n = problem.dimension();
        if !(params.r[0] > 0.0) || !(params.r[1] > 0.0) {
            return Err(SolverError::UnsupportedDirection);
        }
        if let Some(w) = warm_start {
            if w.len() != n {
                return Err(SolverError::DimensionMismatch);
            }
        }
        let budget = problem.budget();

        // starting point
        let (mut p, warm) = match warm_start {
            Some(w) => {
                let mut p = w.to_vec();
                project_simplex_box(&mut p, budget);
                (p, true)
            }
            None => (alloc::vec![0.5 * budget / n as f64; n], false),
        };

        // smoothed minimax descent
        smooth::anneal_minimax(problem, params, &mut p, warm, &self.config);

        // active-set Newton polish to machine-precision KKT
        let mut t = minimax_value(problem, params, &p);
        let scale = problem_scale(params, budget);
        let mut sets = polish::detect_sets(problem, params, &p, t, scale, &self.config);
        match polish::polish_minimax(problem, params, &mut p, &mut t, &mut sets, scale, &self.config)
        {
            Ok(()) => {}
            Err(_e) => {
                #[cfg(feature = "std")]
                {
                    if std::env::var("PARETO_APC_DEBUG").is_ok() {
                        std::eprintln!("polish failed: {:?} at a = {:?}", _e, params.a);
                    }
                }
                // keep the annealed iterate; residual-based status below stays honest
            }
        }
        t = minimax_value(problem, params, &p);

        // multiplier recovery on the final point
        let (mu, beta) = recover_multipliers(problem, params, t, &p, scale, &self.config);
        let mut solution = SpSolution {
            t,
            p,
            mu,
            beta,
            kkt_residual: 0.0,
            status: SolveStatus::Converged,
        };
        solution.kkt_residual = kkt_residual(problem, params, &solution);
        if !solution.kkt_residual.is_finite() || solution.kkt_residual > self.config.kkt_tol {
            solution.status = SolveStatus::MaxIter;
        }
        Ok(solution)
    }

    /// Minimize a single objective over the constraint set. For the power
    /// problem and `Objective::F2` this is identically the zero vector.
    pub fn solve_min_objective(
        &mut self,
        problem: &dyn BiObjectiveProblem,
        which: Objective,
    ) -> Result<Vec<f64>, SolverError> {
        let n = problem.dimension();
        let budget = problem.budget();
        let mut p = alloc::vec![0.5 * budget / n as f64; n];
        smooth::descend_single(problem, which, &mut p, &self.config);
        let scale = problem_scale(&SpParameters { a: [0.0, 0.0], r: [1.0, 1.0] }, budget);
        let _ = polish::polish_single(problem, which, &mut p, scale, &self.config);
        // exact zeros for coordinates driven into the bound
        for x in p.iter_mut() {
            if *x < 0.0 {
                *x = 0.0;
            }
        }
        Ok(p)
    }
}

/// Scalar objective of the minimax reformulation at `p`.
pub(crate) fn minimax_value(
    problem: &dyn BiObjectiveProblem,
    params: &SpParameters,
    p: &[f64],
) -> f64 {
    let f = problem.objectives(p);
    let u1 = (f.f1 - params.a[0]) / params.r[0];
    let u2 = (f.f2 - params.a[1]) / params.r[1];
    u1.max(u2)
}

pub(crate) fn problem_scale(params: &SpParameters, budget: f64) -> f64 {
    1.0f64
        .max(math::abs(params.a[0]))
        .max(math::abs(params.a[1]))
        .max(budget)
}

/// Combined KKT residual of a candidate solution: the maximum of the
/// stationarity norms in (t, p), primal and dual feasibility violations and
/// the complementarity violations of both constraint families.
pub fn kkt_residual(
    problem: &dyn BiObjectiveProblem,
    params: &SpParameters,
    candidate: &SpSolution,
) -> f64 {
    let n = problem.dimension();
    debug_assert_eq!(candidate.p.len(), n);
    debug_assert_eq!(candidate.beta.len(), n + 1);
    let f = problem.objectives(&candidate.p);
    let (g1, g2) = problem.objective_gradients(&candidate.p);
    let g = problem.constraints(&candidate.p);
    let mu = candidate.mu;
    let beta = &candidate.beta;

    let stat_t = math::abs(1.0 - (mu[0] * params.r[0] + mu[1] * params.r[1]));

    // stationarity in p: mu' grad f - beta' grad g, with grad g_j = e_j for
    // the bounds and -1 for the budget row
    let mut stat_p = 0.0f64;
    for i in 0..n {
        let v = mu[0] * g1[i] + mu[1] * g2[i] - beta[i] + beta[n];
        stat_p = stat_p.max(math::abs(v));
    }

    let k = [
        params.a[0] + candidate.t * params.r[0] - f.f1,
        params.a[1] + candidate.t * params.r[1] - f.f2,
    ];
    let mut primal = 0.0f64;
    for &ki in &k {
        primal = primal.max(-ki);
    }
    for &gj in &g {
        primal = primal.max(-gj);
    }
    primal = primal.max(0.0);

    let mut dual = 0.0f64;
    for &m in &mu {
        dual = dual.max(-m);
    }
    for &b in beta.iter() {
        dual = dual.max(-b);
    }
    dual = dual.max(0.0);

    let mut compl = 0.0f64;
    for i in 0..2 {
        compl = compl.max(math::abs(mu[i] * k[i]));
    }
    for j in 0..=n.saturating_sub(0) {
        if j < beta.len() {
            compl = compl.max(math::abs(beta[j] * g[j]));
        }
    }

    stat_t.max(stat_p).max(primal).max(dual).max(compl)
}

/// Recover (mu, beta) from the stationarity system by nonnegative least
/// squares restricted to the active constraints. Constraint values within
/// `active_tol_factor * scale` count as active.
///
/// Each bound multiplier appears only in its own stationarity row, so it is
/// eliminated in closed form; the remaining system over the cone
/// multipliers and the budget multiplier is tiny. When the system admits a
/// multiplier with the second cone component zero at matching residual, that
/// sparser multiplier is preferred; it is the one that transfers between
/// equivalent subproblems sharing a minimal solution.
pub(crate) fn recover_multipliers(
    problem: &dyn BiObjectiveProblem,
    params: &SpParameters,
    t: f64,
    p: &[f64],
    scale: f64,
    config: &SolverConfig,
) -> ([f64; 2], Vec<f64>) {
    let n = problem.dimension();
    let act_tol = config.active_tol_factor * scale;
    let f = problem.objectives(p);
    let (g1, g2) = problem.objective_gradients(p);
    let g = problem.constraints(p);

    let k = [
        params.a[0] + t * params.r[0] - f.f1,
        params.a[1] + t * params.r[1] - f.f2,
    ];
    let cone_active: Vec<usize> = (0..2).filter(|&i| k[i] <= act_tol).collect();
    let budget_active = g[n] <= act_tol;
    let free: Vec<usize> = (0..n).filter(|&j| g[j] > act_tol).collect();
    let grads = [&g1, &g2];

    // reduced system: the multiplier normalization row plus one stationarity
    // row per free coordinate; columns are the active cone multipliers and
    // the budget multiplier
    let solve_for = |cones: &[usize]| -> Option<(Vec<f64>, f64)> {
        let cols = cones.len() + budget_active as usize;
        if cols == 0 {
            return None;
        }
        let rows = 1 + free.len();
        let mut a = alloc::vec![0.0; rows * cols];
        let mut rhs = alloc::vec![0.0; rows];
        rhs[0] = 1.0;
        for (c, &i) in cones.iter().enumerate() {
            a[c] = params.r[i];
            for (row, &j) in free.iter().enumerate() {
                a[(row + 1) * cols + c] = grads[i][j];
            }
        }
        if budget_active {
            let c = cones.len();
            for row in 0..free.len() {
                a[(row + 1) * cols + c] = 1.0;
            }
        }
        linalg::nnls(&a, &rhs, rows, cols).ok()
    };

    let grad_scale = 1.0f64.max(math::norm_inf(&g1)).max(math::norm_inf(&g2));
    // the elimination treats bound rows as freely absorbable; a solution
    // whose implied bound multiplier goes negative violates those rows and
    // is penalized when candidates are compared
    let assemble = |cones: &[usize], x: &[f64]| -> ([f64; 2], Vec<f64>, f64) {
        let mut mu = [0.0; 2];
        let mut beta = alloc::vec![0.0; n + 1];
        for (c, &i) in cones.iter().enumerate() {
            mu[i] = x[c];
        }
        if budget_active {
            beta[n] = x[cones.len()];
        }
        let mut clip = 0.0f64;
        for j in 0..n {
            if g[j] <= act_tol {
                let s = mu[0] * g1[j] + mu[1] * g2[j] + beta[n];
                beta[j] = s.max(0.0);
                clip = clip.max(-s);
            }
        }
        (mu, beta, clip.max(0.0))
    };

    let reduced = solve_for(&cone_active).map(|(x, res)| {
        let (mu, beta, clip) = assemble(&cone_active, &x);
        (mu, beta, res.max(clip))
    });
    // prefer the sparser multiplier (second cone component zero) when it
    // reaches a matching residual: it is the one that transfers between
    // equivalent subproblems sharing a minimal solution
    let mut best = reduced.clone();
    if cone_active.len() == 2 {
        if let Some((x, res)) = solve_for(&cone_active[..1]) {
            let (mu, beta, clip) = assemble(&cone_active[..1], &x);
            let total = res.max(clip);
            let gate = reduced.as_ref().map_or(f64::INFINITY, |c| c.2);
            if total <= (gate * 4.0).max(1e-9 * grad_scale) {
                best = Some((mu, beta, total));
            }
        }
    }
    // eliminating the bound rows fails when their implied multipliers clip
    // hard (all coordinates railed); the full stationarity system is the
    // fallback
    if best.as_ref().map_or(true, |c| c.2 > 1e-7 * grad_scale) {
        if let Some(candidate) = full_system_nnls(params, &cone_active, &g, grads, n, act_tol) {
            if best.as_ref().map_or(true, |c| candidate.2 < c.2) {
                best = Some(candidate);
            }
        }
    }

    best.map(|(mu, beta, _)| (mu, beta))
        .unwrap_or(([0.0; 2], alloc::vec![0.0; n + 1]))
}

/// Nonnegative least squares on the complete stationarity system, one
/// column per active constraint.
fn full_system_nnls(
    params: &SpParameters,
    cone_active: &[usize],
    g: &[f64],
    grads: [&alloc::vec::Vec<f64>; 2],
    n: usize,
    act_tol: f64,
) -> Option<([f64; 2], Vec<f64>, f64)> {
    let g_active: Vec<usize> = (0..=n).filter(|&j| g[j] <= act_tol).collect();
    let cols = cone_active.len() + g_active.len();
    if cols == 0 {
        return None;
    }
    let rows = 1 + n;
    let mut a = alloc::vec![0.0; rows * cols];
    let mut rhs = alloc::vec![0.0; rows];
    rhs[0] = 1.0;
    for (c, &i) in cone_active.iter().enumerate() {
        a[c] = params.r[i];
        for row in 0..n {
            a[(row + 1) * cols + c] = grads[i][row];
        }
    }
    for (c0, &j) in g_active.iter().enumerate() {
        let c = cone_active.len() + c0;
        if j < n {
            a[(j + 1) * cols + c] = -1.0;
        } else {
            for row in 0..n {
                a[(row + 1) * cols + c] = 1.0;
            }
        }
    }
    let (x, res) = linalg::nnls(&a, &rhs, rows, cols).ok()?;
    let mut mu = [0.0; 2];
    let mut beta = alloc::vec![0.0; n + 1];
    for (c, &i) in cone_active.iter().enumerate() {
        mu[i] = x[c];
    }
    for (c0, &j) in g_active.iter().enumerate() {
        beta[j] = x[cone_active.len() + c0];
    }
    Some((mu, beta, res))
}
