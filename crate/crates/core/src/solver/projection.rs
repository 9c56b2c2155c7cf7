//! Exact projection onto the power simplex-box { p >= 0, sum(p) <= budget }.

use alloc::vec::Vec;

/// Project `p` in place. Sort-based, O(N log N), exact up to rounding.
///
/// If the nonnegative clamp already satisfies the budget it is the
/// projection; otherwise the budget is active and the projection equals the
/// projection onto the simplex { p >= 0, sum(p) = budget }.
pub fn project_simplex_box(p: &mut [f64], budget: f64) {
    debug_assert!(budget >= 0.0);
    for x in p.iter_mut() {
        if !(*x > 0.0) {
            *x = 0.0;
        }
    }
    let total: f64 = p.iter().sum();
    if total <= budget {
        return;
    }
    // water level theta with sum(max(p - theta, 0)) = budget
    let mut sorted: Vec<f64> = p.to_vec();
    sorted.sort_unstable_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, &v) in sorted.iter().enumerate() {
        cumsum += v;
        let cand = (cumsum - budget) / (k + 1) as f64;
        if v - cand > 0.0 {
            theta = cand;
        } else {
            break;
        }
    }
    for x in p.iter_mut() {
        *x = (*x - theta).max(0.0);
    }
}
