//! Adaptive parameter control: trace the efficient frontier by stepping the
//! scalarization reference point along a hyperplane segment.
//!
//! The reference points live on the segment between the projections of the
//! two single-objective anchor outcomes onto a hyperplane transversal to the
//! direction r. Each step length is chosen from the previous point's
//! multiplier so that consecutive frontier points are spaced a target
//! distance apart in objective space, and each subproblem is warm-started
//! from the first-order sensitivity prediction when the active set is
//! non-degenerate.

use alloc::vec::Vec;

use crate::math;
use crate::moo::{BiObjectiveProblem, FrontEntry, ObjectivePair, ParetoFront};
use crate::sensitivity::{classify_constraints, predict_solution, solve_sensitivity_system};
use crate::solver::{
    self, kkt_residual, Objective, SolveStatus, SolverConfig, SolverError, SpParameters, SpSolution,
    SpSolver,
};

/// The hyperplane { y : b' y = offset } restricting reference points.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Hyperplane {
    pub b: [f64; 2],
    /// Offset, restricted to {0, 1}.
    pub offset: f64,
}

impl Hyperplane {
    pub fn new(b: [f64; 2], offset: f64) -> Result<Self, ApcError> {
        if !(b[0].is_finite() && b[1].is_finite()) || (b[0] == 0.0 && b[1] == 0.0) {
            return Err(ApcError::InvalidConfig("hyperplane normal must be finite and nonzero"));
        }
        if offset != 0.0 && offset != 1.0 {
            return Err(ApcError::InvalidConfig("hyperplane offset must be 0 or 1"));
        }
        Ok(Self { b, offset })
    }
}

impl Default for Hyperplane {
    fn default() -> Self {
        Self { b: [0.0, 1.0], offset: 0.0 }
    }
}

#[derive(Debug, Clone)]
pub struct ApcConfig {
    /// Scalarization direction, componentwise positive for the solver.
    pub r: [f64; 2],
    /// Target spacing of consecutive frontier points in objective space;
    /// defaults to 1/50 of the anchor distance.
    pub alpha: Option<f64>,
    pub hyperplane: Hyperplane,
    /// Initialization bound; defaults to [`compute_m1_bound`].
    pub m1: Option<f64>,
    pub solver: SolverConfig,
    pub max_front_points: usize,
    /// Relative tolerance of the segment membership test.
    pub segment_tol: f64,
}

impl Default for ApcConfig {
    fn default() -> Self {
        Self {
            r: [1.0, 1.0],
            alpha: None,
            hyperplane: Hyperplane::default(),
            m1: None,
            solver: SolverConfig::default(),
            max_front_points: 200,
            segment_tol: 1e-9,
        }
    }
}

impl ApcConfig {
    pub fn validate(&self) -> Result<(), ApcError> {
        if !(self.r[0] > 0.0) || self.r[1] < 0.0 || !self.r.iter().all(|x| x.is_finite()) {
            return Err(ApcError::InvalidConfig("direction requires r1 > 0 and r2 >= 0"));
        }
        let br = self.hyperplane.b[0] * self.r[0] + self.hyperplane.b[1] * self.r[1];
        if br == 0.0 {
            return Err(ApcError::InvalidConfig("hyperplane normal must not be orthogonal to r"));
        }
        if let Some(alpha) = self.alpha {
            if !(alpha > 0.0) || !alpha.is_finite() {
                return Err(ApcError::InvalidConfig("alpha must be positive"));
            }
        }
        if let Some(m1) = self.m1 {
            if !m1.is_finite() {
                return Err(ApcError::InvalidConfig("m1 must be finite"));
            }
        }
        if self.max_front_points < 2 {
            return Err(ApcError::InvalidConfig("need at least two front points"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApcError {
    InvalidConfig(&'static str),
    Solver(SolverError),
    /// The step rule failed repeatedly (first-order model predicts no
    /// objective movement) and the retry budget is exhausted.
    StepFailed,
}

impl core::fmt::Display for ApcError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ApcError::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            ApcError::Solver(e) => write!(f, "solver error: {e}"),
            ApcError::StepFailed => write!(f, "parameter step failed after retries"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ApcError {}

impl From<SolverError> for ApcError {
    fn from(e: SolverError) -> Self {
        ApcError::Solver(e)
    }
}

/// Certified initialization bound: strictly larger than
/// max f2 - min f1 * r2/r1 over the feasible set.
pub fn compute_m1_bound(problem: &dyn BiObjectiveProblem, r: [f64; 2]) -> f64 {
    let b = problem.objective_bounds();
    b.f2_max - b.f1_min * (r[1] / r[0]) + 1.0
}

/// Project an outcome onto the hyperplane along r:
/// t = (b' f - offset) / (b' r), a = f - t r, so that b' a = offset.
pub fn project_to_hyperplane(
    f_val: &ObjectivePair,
    hyperplane: &Hyperplane,
    r: [f64; 2],
) -> (f64, [f64; 2]) {
    let b = hyperplane.b;
    let br = b[0] * r[0] + b[1] * r[1];
    debug_assert!(br != 0.0);
    let t = (b[0] * f_val.f1 + b[1] * f_val.f2 - hyperplane.offset) / br;
    (t, [f_val.f1 - t * r[0], f_val.f2 - t * r[1]])
}

/// Reference-point update: a + (alpha / ||v + (-mu' v) r||) v.
pub fn apc_step(
    a_l: [f64; 2],
    mu_l: [f64; 2],
    v: [f64; 2],
    alpha: f64,
    r: [f64; 2],
) -> Result<[f64; 2], ApcError> {
    let mv = -(mu_l[0] * v[0] + mu_l[1] * v[1]);
    let denom = math::norm2([v[0] + mv * r[0], v[1] + mv * r[1]]);
    if denom <= f64::EPSILON * math::norm2(v).max(1.0) {
        return Err(ApcError::StepFailed);
    }
    let s = alpha / denom;
    Ok([a_l[0] + s * v[0], a_l[1] + s * v[1]])
}

/// Segment coordinate of `a` on { a1 + rho v : rho in [0, 1] }, or `None`
/// when `a` leaves the segment (the loop-termination signal). `tol` is
/// relative to ||v|| and bounds the orthogonal residual.
pub fn in_segment(a: [f64; 2], a1: [f64; 2], v: [f64; 2], tol: f64) -> Option<f64> {
    let (rho, orth) = segment_coordinates(a, a1, v);
    let vn = math::norm2(v);
    if orth > tol * vn {
        return None;
    }
    if rho < -tol || rho > 1.0 + tol {
        return None;
    }
    Some(rho.clamp(0.0, 1.0))
}

fn segment_coordinates(a: [f64; 2], a1: [f64; 2], v: [f64; 2]) -> (f64, f64) {
    let d = [a[0] - a1[0], a[1] - a1[1]];
    let vv = v[0] * v[0] + v[1] * v[1];
    debug_assert!(vv > 0.0);
    let rho = (d[0] * v[0] + d[1] * v[1]) / vv;
    let orth = math::norm2([d[0] - rho * v[0], d[1] - rho * v[1]]);
    (rho, orth)
}

/// Anchor data fixing the hyperplane segment of one run.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Anchors {
    pub m1: f64,
    /// Minimizer of f1, found through the initialization subproblem.
    pub p1: Vec<f64>,
    pub f1_point: ObjectivePair,
    pub t1: f64,
    pub a1: [f64; 2],
    /// Minimizer of f2.
    pub p_end: Vec<f64>,
    pub end_point: ObjectivePair,
    pub t_end: f64,
    pub a_end: [f64; 2],
    /// Segment direction a_end - a1.
    pub v: [f64; 2],
    /// Set when the two anchors coincide and the front is a single point.
    pub collapsed: bool,
}

/// Per-point metadata kept in the traced front.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FrontMeta {
    /// Reference point of the subproblem this entry solved.
    pub a: [f64; 2],
    pub solution: SpSolution,
}

/// A subproblem whose result was kept out of the front, with the reference
/// point it was solved at and the residual it reached.
#[derive(Debug, Clone, Copy)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FlaggedPoint {
    pub a: [f64; 2],
    pub kkt_residual: f64,
}

/// Outcome of one frontier run.
#[derive(Debug, Clone)]
pub struct ApcRun {
    pub front: ParetoFront<FrontMeta>,
    pub anchors: Anchors,
    /// Spacing target actually used.
    pub alpha: f64,
    /// Subproblems excluded from the front (residual above tolerance or
    /// unusable multipliers).
    pub flagged: Vec<FlaggedPoint>,
    pub collapsed: bool,
    pub sp_solves: usize,
    /// Solves warm-started from the sensitivity prediction.
    pub warm_starts: usize,
}

impl ApcRun {
    /// Distances between consecutive front points in objective space.
    pub fn spacing(&self) -> Vec<f64> {
        let pairs = self.front.objective_pairs();
        pairs.windows(2).map(|w| w[0].distance(&w[1])).collect()
    }
}

/// Solve the two anchor subproblems and fix the segment.
pub fn anchor_points(
    problem: &dyn BiObjectiveProblem,
    config: &ApcConfig,
) -> Result<Anchors, ApcError> {
    config.validate()?;
    let mut solver = SpSolver::new(config.solver);
    let m1 = config.m1.unwrap_or_else(|| compute_m1_bound(problem, config.r));

    // with the bound m1, the second cone constraint of SP((0, m1)') can
    // never be active, so this subproblem minimizes f1
    let params1 = SpParameters::new([0.0, m1], config.r)?;
    let sol1 = solver.solve_sp(problem, &params1, None)?;
    let f1_point = problem.objectives(&sol1.p);
    let (t1, a1) = project_to_hyperplane(&f1_point, &config.hyperplane, config.r);

    let p_end = solver.solve_min_objective(problem, Objective::F2)?;
    let end_point = problem.objectives(&p_end);
    let (t_end, a_end) = project_to_hyperplane(&end_point, &config.hyperplane, config.r);

    let v = [a_end[0] - a1[0], a_end[1] - a1[1]];
    let scale = 1.0f64
        .max(math::abs(a1[0]))
        .max(math::abs(a1[1]))
        .max(math::abs(a_end[0]))
        .max(math::abs(a_end[1]));
    let collapsed = math::norm2(v) <= 1e-12 * scale;

    Ok(Anchors {
        m1,
        p1: sol1.p.clone(),
        f1_point,
        t1,
        a1,
        p_end,
        end_point,
        t_end,
        a_end,
        v,
        collapsed,
    })
}

/// Build the solution record of the f1 anchor under its hyperplane
/// parameters; the subproblem at a1 shares the minimal solution and the
/// multiplier of the initialization subproblem.
fn anchor_solution(
    problem: &dyn BiObjectiveProblem,
    config: &ApcConfig,
    anchors: &Anchors,
    sol1: SpSolution,
) -> (SpParameters, SpSolution) {
    let params = SpParameters { a: anchors.a1, r: config.r };
    let mut s = SpSolution { t: anchors.t1, ..sol1 };
    s.kkt_residual = kkt_residual(problem, &params, &s);
    s.status = if s.kkt_residual <= config.solver.kkt_tol {
        SolveStatus::Converged
    } else {
        SolveStatus::MaxIter
    };
    (params, s)
}

/// Synthesize the solution record of the f2 anchor: multipliers recovered
/// at its own reference point.
fn end_solution(
    problem: &dyn BiObjectiveProblem,
    config: &ApcConfig,
    anchors: &Anchors,
) -> (SpParameters, SpSolution) {
    let params = SpParameters { a: anchors.a_end, r: config.r };
    let scale = solver::problem_scale(&params, problem.budget());
    let (mu, beta) =
        solver::recover_multipliers(problem, &params, anchors.t_end, &anchors.p_end, scale, &config.solver);
    let mut s = SpSolution {
        t: anchors.t_end,
        p: anchors.p_end.clone(),
        mu,
        beta,
        kkt_residual: 0.0,
        status: SolveStatus::Converged,
    };
    s.kkt_residual = kkt_residual(problem, &params, &s);
    if s.kkt_residual > config.solver.kkt_tol {
        s.status = SolveStatus::MaxIter;
    }
    (params, s)
}

/// Trace the efficient frontier.
pub fn run_apc(problem: &dyn BiObjectiveProblem, config: &ApcConfig) -> Result<ApcRun, ApcError> {
    config.validate()?;
    let mut solver = SpSolver::new(config.solver);
    let m1 = config.m1.unwrap_or_else(|| compute_m1_bound(problem, config.r));

    let params_tilde = SpParameters::new([0.0, m1], config.r)?;
    let sol_tilde = solver.solve_sp(problem, &params_tilde, None)?;
    let f1_point = problem.objectives(&sol_tilde.p);
    let (t1, a1) = project_to_hyperplane(&f1_point, &config.hyperplane, config.r);

    let p_end = solver.solve_min_objective(problem, Objective::F2)?;
    let end_point = problem.objectives(&p_end);
    let (t_end, a_end) = project_to_hyperplane(&end_point, &config.hyperplane, config.r);
    let v = [a_end[0] - a1[0], a_end[1] - a1[1]];
    let scale = 1.0f64
        .max(math::abs(a1[0]))
        .max(math::abs(a1[1]))
        .max(math::abs(a_end[0]))
        .max(math::abs(a_end[1]));
    let collapsed = math::norm2(v) <= 1e-12 * scale;

    let anchors = Anchors {
        m1,
        p1: sol_tilde.p.clone(),
        f1_point,
        t1,
        a1,
        p_end,
        end_point,
        t_end,
        a_end,
        v,
        collapsed,
    };
    let mut sp_solves = 2;
    let mut warm_starts = 0;
    let mut flagged: Vec<FlaggedPoint> = Vec::new();

    let (params_end, sol_end) = end_solution(problem, config, &anchors);
    if collapsed {
        let entry = FrontEntry {
            decision: anchors.p_end.clone(),
            objectives: anchors.end_point,
            meta: FrontMeta { a: params_end.a, solution: sol_end },
        };
        return Ok(ApcRun {
            front: ParetoFront::from_entries(alloc::vec![entry]),
            anchors,
            alpha: config.alpha.unwrap_or(0.0),
            flagged,
            collapsed,
            sp_solves,
            warm_starts,
        });
    }

    let alpha = config
        .alpha
        .unwrap_or_else(|| anchors.f1_point.distance(&anchors.end_point) / 50.0);

    let (params1, sol1) = anchor_solution(problem, config, &anchors, sol_tilde);
    let class_tol = 1e-6 * solver::problem_scale(&params1, problem.budget());

    let mut entries: Vec<FrontEntry<FrontMeta>> = Vec::new();
    if sol1.status == SolveStatus::Converged {
        entries.push(FrontEntry {
            decision: sol1.p.clone(),
            objectives: anchors.f1_point,
            meta: FrontMeta { a: params1.a, solution: sol1.clone() },
        });
    } else {
        flagged.push(FlaggedPoint { a: params1.a, kkt_residual: sol1.kkt_residual });
    }

    let mut mu_cur = normalized_mu(sol1.mu, config.r).unwrap_or([1.0 / config.r[0], 0.0]);
    let mut prev: Option<(SpParameters, SpSolution)> = Some((params1, sol1));
    let mut a_cur = a1;
    let mut rho_cur = 0.0f64;
    let mut retries = 0usize;
    let mut alpha_cur = alpha;

    while entries.len() + 1 < config.max_front_points {
        let a_next = match apc_step(a_cur, mu_cur, v, alpha_cur, config.r) {
            Ok(a) => a,
            Err(_) => {
                // the first-order model predicts no movement; retry with a
                // halved raw segment step before giving up
                retries += 1;
                if retries > 5 {
                    break;
                }
                alpha_cur *= 0.5;
                let s = alpha_cur / math::norm2(v);
                [a_cur[0] + s * v[0], a_cur[1] + s * v[1]]
            }
        };
        let Some(rho) = in_segment(a_next, a1, v, config.segment_tol) else {
            // overshoot: the final step lands on the segment end, which is
            // the f2 anchor appended below
            break;
        };
        if rho >= 1.0 - 1e-12 {
            break;
        }
        let s_step = rho - rho_cur;
        if s_step <= 1e-15 {
            retries += 1;
            if retries > 5 {
                break;
            }
            continue;
        }

        let params_next = SpParameters { a: a_next, r: config.r };
        let warm = prev.as_ref().and_then(|(params_prev, sol_prev)| {
            let part = classify_constraints(sol_prev, params_prev, problem, class_tol);
            if part.is_degenerate() {
                return None;
            }
            solve_sensitivity_system(sol_prev, &part, v, problem, params_prev)
                .ok()
                .map(|derivs| predict_solution(sol_prev, &derivs, s_step).p)
        });
        if warm.is_some() {
            warm_starts += 1;
        }
        let sol_next = solver.solve_sp(problem, &params_next, warm.as_deref())?;
        sp_solves += 1;

        if sol_next.status == SolveStatus::Converged {
            if let Some(mu) = normalized_mu(sol_next.mu, config.r) {
                mu_cur = mu;
                entries.push(FrontEntry {
                    decision: sol_next.p.clone(),
                    objectives: problem.objectives(&sol_next.p),
                    meta: FrontMeta { a: a_next, solution: sol_next.clone() },
                });
                prev = Some((params_next, sol_next));
                retries = 0;
                alpha_cur = alpha;
            } else {
                flagged.push(FlaggedPoint { a: a_next, kkt_residual: sol_next.kkt_residual });
            }
        } else {
            // keep the previous multiplier and continue along the segment
            flagged.push(FlaggedPoint { a: a_next, kkt_residual: sol_next.kkt_residual });
        }
        a_cur = a_next;
        rho_cur = rho;
    }

    if sol_end.status != SolveStatus::Converged {
        flagged.push(FlaggedPoint { a: params_end.a, kkt_residual: sol_end.kkt_residual });
    }
    entries.push(FrontEntry {
        decision: anchors.p_end.clone(),
        objectives: anchors.end_point,
        meta: FrontMeta { a: params_end.a, solution: sol_end },
    });

    Ok(ApcRun {
        front: ParetoFront::from_entries(entries),
        anchors,
        alpha,
        flagged,
        collapsed,
        sp_solves,
        warm_starts,
    })
}

/// Renormalize a recovered multiplier so mu' r = 1 exactly; rejects
/// multipliers more than 1% off, which marks the point as flagged.
fn normalized_mu(mu: [f64; 2], r: [f64; 2]) -> Option<[f64; 2]> {
    let mr = mu[0] * r[0] + mu[1] * r[1];
    if math::abs(mr - 1.0) > 0.01 || mr <= 0.0 {
        return None;
    }
    Some([mu[0] / mr, mu[1] / mr])
}
