//! Core vocabulary of bi-objective minimization.
//!
//! Both objectives are minimized and ordered by the cone K = R²₊: an outcome
//! dominates another when it is componentwise no worse and strictly better
//! somewhere. The frontier of a problem is the set of nondominated outcomes.

use alloc::vec::Vec;

use crate::math;

/// One point in objective space.
///
/// `f1` is the negated throughput contribution (bits/s/Hz, net of the priced
/// interference cost) and `f2` the total transmit power in watts. Fronts
/// admit only finite pairs with nonnegative `f2`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ObjectivePair {
    pub f1: f64,
    pub f2: f64,
}

impl ObjectivePair {
    pub fn new(f1: f64, f2: f64) -> Self {
        Self { f1, f2 }
    }

    pub fn as_array(&self) -> [f64; 2] {
        [self.f1, self.f2]
    }

    pub fn is_finite(&self) -> bool {
        self.f1.is_finite() && self.f2.is_finite()
    }

    /// Euclidean distance in objective space.
    pub fn distance(&self, other: &Self) -> f64 {
        math::norm2([self.f1 - other.f1, self.f2 - other.f2])
    }
}

/// Componentwise dominance with respect to K = R²₊.
///
/// True iff `y1 <= y2` componentwise and `y1 != y2`. Comparison is exact;
/// tolerance-aware variants belong in test oracles, not here.
pub fn dominates(y1: &ObjectivePair, y2: &ObjectivePair) -> bool {
    y1.f1 <= y2.f1 && y1.f2 <= y2.f2 && (y1.f1 < y2.f1 || y1.f2 < y2.f2)
}

/// Indices of the nondominated points of `points`, in input order.
///
/// A point survives iff no other point dominates it and no earlier point is
/// an exact duplicate (ties are kept once, first occurrence).
pub fn nondominated_indices(points: &[ObjectivePair]) -> Vec<usize> {
    let n = points.len();
    if n == 0 {
        return Vec::new();
    }
    // Sort by (f1, f2, index); a point is dominated iff some point in an
    // earlier f1-class has f2 <= its own, or an equal-f1 point has f2 < its
    // own. Duplicates keep the smallest original index.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|&i, &j| {
        points[i]
            .f1
            .partial_cmp(&points[j].f1)
            .unwrap()
            .then(points[i].f2.partial_cmp(&points[j].f2).unwrap())
            .then(i.cmp(&j))
    });

    let mut keep = alloc::vec![false; n];
    let mut prefix_min_f2 = f64::INFINITY; // over strictly smaller f1
    let mut run_start = 0;
    while run_start < n {
        let f1 = points[order[run_start]].f1;
        let mut run_end = run_start;
        while run_end < n && points[order[run_end]].f1 == f1 {
            run_end += 1;
        }
        let mut run_min_f2 = f64::INFINITY;
        let mut last_kept: Option<ObjectivePair> = None;
        for &idx in &order[run_start..run_end] {
            let p = points[idx];
            let dominated = prefix_min_f2 <= p.f2 || run_min_f2 < p.f2;
            let duplicate = last_kept.map_or(false, |q| q == p);
            if !dominated && !duplicate {
                keep[idx] = true;
                last_kept = Some(p);
            }
            if p.f2 < run_min_f2 {
                run_min_f2 = p.f2;
            }
        }
        if run_min_f2 < prefix_min_f2 {
            prefix_min_f2 = run_min_f2;
        }
        run_start = run_end;
    }
    (0..n).filter(|&i| keep[i]).collect()
}

/// Nondominated subset of `points`, stable order among survivors.
pub fn filter_nondominated(points: &[ObjectivePair]) -> Vec<ObjectivePair> {
    nondominated_indices(points)
        .into_iter()
        .map(|i| points[i])
        .collect()
}

/// Certified objective bounds over the feasible set, used to size the
/// initialization reference point. `f1_min` is a lower bound on the first
/// objective, `f2_max` an upper bound on the second; neither needs to be
/// tight.
#[derive(Debug, Clone, Copy)]
pub struct ObjectiveBounds {
    pub f1_min: f64,
    pub f2_max: f64,
}

/// A bi-objective minimization problem over the power simplex-box
/// D = { p >= 0, sum(p) <= budget }.
///
/// The constraint family is fixed by construction: `dimension()` + 1 values,
/// the coordinate nonnegativity constraints g_j(p) = p_j followed by the
/// budget constraint g_{N+1}(p) = budget - sum(p). Objective evaluators and
/// their derivatives are supplied by the implementor; constraint evaluators
/// derive from `budget()`.
pub trait BiObjectiveProblem {
    /// Length N of the decision vector.
    fn dimension(&self) -> usize;

    /// Total budget of the simplex-box constraint set.
    fn budget(&self) -> f64;

    /// Objective values at `p`.
    fn objectives(&self, p: &[f64]) -> ObjectivePair;

    /// Gradients of both objectives at `p`.
    fn objective_gradients(&self, p: &[f64]) -> (Vec<f64>, Vec<f64>);

    /// Dense N x N Hessians of both objectives at `p`, row-major.
    fn objective_hessians(&self, p: &[f64]) -> (Vec<f64>, Vec<f64>);

    /// Certified bounds used for initialization.
    fn objective_bounds(&self) -> ObjectiveBounds;

    /// The N+1 constraint values g(p): nonnegativity then budget slack.
    fn constraints(&self, p: &[f64]) -> Vec<f64> {
        let n = self.dimension();
        debug_assert_eq!(p.len(), n);
        let mut g = Vec::with_capacity(n + 1);
        g.extend_from_slice(p);
        g.push(self.budget() - p.iter().sum::<f64>());
        g
    }

    /// Row-major (N+1) x N constraint Jacobian.
    fn constraint_gradients(&self, p: &[f64]) -> Vec<f64> {
        let n = self.dimension();
        debug_assert_eq!(p.len(), n);
        let mut jac = alloc::vec![0.0; (n + 1) * n];
        for j in 0..n {
            jac[j * n + j] = 1.0;
        }
        for k in 0..n {
            jac[n * n + k] = -1.0;
        }
        jac
    }
}

/// One traced frontier point: decision vector, outcome and solve metadata.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FrontEntry<M> {
    pub decision: Vec<f64>,
    pub objectives: ObjectivePair,
    pub meta: M,
}

/// An approximation of the efficient set: nondominated entries sorted by
/// ascending `f2`. The constructor enforces both invariants, dropping
/// violating entries (duplicates kept once).
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ParetoFront<M> {
    entries: Vec<FrontEntry<M>>,
    dropped: usize,
}

impl<M> ParetoFront<M> {
    pub fn from_entries(mut raw: Vec<FrontEntry<M>>) -> Self {
        let pairs: Vec<ObjectivePair> = raw.iter().map(|e| e.objectives).collect();
        let keep = nondominated_indices(&pairs);
        let dropped = raw.len() - keep.len();
        let mut flags = alloc::vec![false; raw.len()];
        for i in keep {
            flags[i] = true;
        }
        let mut entries: Vec<FrontEntry<M>> = Vec::with_capacity(raw.len() - dropped);
        for (i, e) in raw.drain(..).enumerate() {
            if flags[i] {
                entries.push(e);
            }
        }
        entries.sort_by(|a, b| a.objectives.f2.partial_cmp(&b.objectives.f2).unwrap());
        Self { entries, dropped }
    }

    pub fn entries(&self) -> &[FrontEntry<M>] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries discarded by the constructor for violating nondominance.
    pub fn dropped(&self) -> usize {
        self.dropped
    }

    pub fn objective_pairs(&self) -> Vec<ObjectivePair> {
        self.entries.iter().map(|e| e.objectives).collect()
    }
}
