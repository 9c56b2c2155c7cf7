//! Small dense linear algebra: LU solves and nonnegative least squares.
//!
//! The systems in this crate stay tiny (at most a few hundred unknowns), so
//! plain partial-pivoting elimination is enough. Matrices are row-major.

use alloc::vec::Vec;

use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinalgError {
    /// Pivot below tolerance; the system is rank-deficient at working precision.
    Singular,
    /// Inconsistent dimensions.
    Shape,
}

impl core::fmt::Display for LinalgError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            LinalgError::Singular => write!(f, "singular linear system"),
            LinalgError::Shape => write!(f, "inconsistent matrix dimensions"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for LinalgError {}

/// Solve the square system `a * x = b` in place via LU with partial pivoting.
/// `a` is row-major n x n and is destroyed.
pub fn solve_in_place(a: &mut [f64], b: &mut [f64]) -> Result<(), LinalgError> {
    let n = b.len();
    if a.len() != n * n {
        return Err(LinalgError::Shape);
    }
    let scale = a
        .iter()
        .fold(0.0f64, |m, &x| if math::abs(x) > m { math::abs(x) } else { m })
        .max(1.0);
    for col in 0..n {
        // pivot
        let mut piv = col;
        let mut best = math::abs(a[col * n + col]);
        for row in col + 1..n {
            let v = math::abs(a[row * n + col]);
            if v > best {
                best = v;
                piv = row;
            }
        }
        if best <= f64::EPSILON * scale * (n as f64) {
            return Err(LinalgError::Singular);
        }
        if piv != col {
            for k in 0..n {
                a.swap(col * n + k, piv * n + k);
            }
            b.swap(col, piv);
        }
        let d = a[col * n + col];
        for row in col + 1..n {
            let factor = a[row * n + col] / d;
            if factor == 0.0 {
                continue;
            }
            a[row * n + col] = 0.0;
            for k in col + 1..n {
                a[row * n + k] -= factor * a[col * n + k];
            }
            b[row] -= factor * b[col];
        }
    }
    for col in (0..n).rev() {
        let mut acc = b[col];
        for k in col + 1..n {
            acc -= a[col * n + k] * b[k];
        }
        b[col] = acc / a[col * n + col];
    }
    Ok(())
}

/// Solve `a * x = b` without destroying the inputs.
pub fn solve(a: &[f64], b: &[f64]) -> Result<Vec<f64>, LinalgError> {
    let mut a = a.to_vec();
    let mut x = b.to_vec();
    solve_in_place(&mut a, &mut x)?;
    Ok(x)
}

/// Unconstrained least squares `min ||a x - b||` by normal equations with a
/// tiny Tikhonov floor. `a` is row-major m x n.
fn lstsq(a: &[f64], b: &[f64], m: usize, n: usize) -> Result<Vec<f64>, LinalgError> {
    if a.len() != m * n || b.len() != m {
        return Err(LinalgError::Shape);
    }
    let mut ata = alloc::vec![0.0; n * n];
    let mut atb = alloc::vec![0.0; n];
    for row in 0..m {
        let r = &a[row * n..(row + 1) * n];
        for i in 0..n {
            atb[i] += r[i] * b[row];
            for j in i..n {
                ata[i * n + j] += r[i] * r[j];
            }
        }
    }
    let trace: f64 = (0..n).map(|i| ata[i * n + i]).sum();
    let ridge = (trace / n.max(1) as f64) * 1e-14;
    for i in 0..n {
        ata[i * n + i] += ridge;
        for j in 0..i {
            ata[i * n + j] = ata[j * n + i];
        }
    }
    let mut x = atb;
    solve_in_place(&mut ata, &mut x)?;
    Ok(x)
}

/// Nonnegative least squares `min ||a x - b||  s.t.  x >= 0` by the
/// active-set method of Lawson and Hanson. Columns are normalized to unit
/// length internally; heterogeneous column scales otherwise wreck the
/// normal equations. Returns the solution and the residual two-norm.
pub fn nnls(a: &[f64], b: &[f64], m: usize, n: usize) -> Result<(Vec<f64>, f64), LinalgError> {
    if a.len() != m * n || b.len() != m {
        return Err(LinalgError::Shape);
    }
    let mut col_norm = alloc::vec![1.0; n];
    for j in 0..n {
        let mut s = 0.0;
        for row in 0..m {
            s += a[row * n + j] * a[row * n + j];
        }
        if s > 0.0 {
            col_norm[j] = math::sqrt(s);
        }
    }
    let a_scaled: Vec<f64> = (0..m * n).map(|k| a[k] / col_norm[k % n]).collect();
    let (y, resid) = nnls_normalized(&a_scaled, b, m, n)?;
    let x = y.iter().zip(&col_norm).map(|(v, c)| v / c).collect();
    Ok((x, resid))
}

fn nnls_normalized(a: &[f64], b: &[f64], m: usize, n: usize) -> Result<(Vec<f64>, f64), LinalgError> {
    let mut x = alloc::vec![0.0; n];
    let mut passive: Vec<usize> = Vec::new();
    let mut in_passive = alloc::vec![false; n];

    let residual = |x: &[f64]| -> Vec<f64> {
        let mut r = b.to_vec();
        for row in 0..m {
            let mut acc = 0.0;
            for j in 0..n {
                acc += a[row * n + j] * x[j];
            }
            r[row] -= acc;
        }
        r
    };

    let grad_tol = {
        let mut atb_inf = 0.0f64;
        for j in 0..n {
            let mut acc = 0.0;
            for row in 0..m {
                acc += a[row * n + j] * b[row];
            }
            atb_inf = atb_inf.max(math::abs(acc));
        }
        (atb_inf * 1e-12).max(1e-300)
    };

    for _outer in 0..3 * n.max(4) {
        let r = residual(&x);
        // gradient of 1/2||r||^2 w.r.t. x is -A^T r; pick the most negative
        let mut best_j = None;
        let mut best_w = grad_tol;
        for j in 0..n {
            if in_passive[j] {
                continue;
            }
            let mut w = 0.0;
            for row in 0..m {
                w += a[row * n + j] * r[row];
            }
            if w > best_w {
                best_w = w;
                best_j = Some(j);
            }
        }
        let Some(j_new) = best_j else { break };
        passive.push(j_new);
        in_passive[j_new] = true;

        // inner loop: restrict to passive set, step back on sign violations
        for _inner in 0..3 * n.max(4) {
            let k = passive.len();
            let mut sub = alloc::vec![0.0; m * k];
            for row in 0..m {
                for (c, &j) in passive.iter().enumerate() {
                    sub[row * k + c] = a[row * n + j];
                }
            }
            let z = lstsq(&sub, b, m, k)?;
            if z.iter().all(|&v| v > 0.0) {
                for (c, &j) in passive.iter().enumerate() {
                    x[j] = z[c];
                }
                break;
            }
            // shrink toward the boundary
            let mut alpha = 1.0f64;
            for (c, &j) in passive.iter().enumerate() {
                if z[c] <= 0.0 {
                    let denom = x[j] - z[c];
                    if denom > 0.0 {
                        alpha = alpha.min(x[j] / denom);
                    }
                }
            }
            for (c, &j) in passive.iter().enumerate() {
                x[j] += alpha * (z[c] - x[j]);
            }
            let mut c = 0;
            while c < passive.len() {
                let j = passive[c];
                if x[j] <= 1e-14 * (1.0 + math::abs(x[j])) || x[j] <= 0.0 {
                    x[j] = 0.0;
                    in_passive[j] = false;
                    passive.swap_remove(c);
                } else {
                    c += 1;
                }
            }
            if passive.is_empty() {
                break;
            }
        }
    }

    let r = residual(&x);
    Ok((x, math::norm(&r)))
}
