//! Dense symmetric linear algebra on small fixed-size matrices.
//!
//! Everything the fitter and the sloppiness analysis need fits in stack
//! arrays: 2x2 and 3x3 normal equations, 4x4 damped steps, 7x7 Hessians.
//! The eigen solver is a cyclic Jacobi rotation scheme, which keeps high
//! relative accuracy on strongly graded matrices; that matters because the
//! whole point of the spectrum here is that it spans many decades.

use crate::error::{Error, Result};
use crate::num::Scalar;

/// Eigenvalues in descending order; `vectors[k]` is the unit eigenvector
/// belonging to `values[k]`.
#[derive(Debug, Clone)]
pub struct SymEigen<T, const N: usize> {
    pub values: [T; N],
    pub vectors: [[T; N]; N],
}

pub fn frobenius<T: Scalar, const N: usize>(a: &[[T; N]; N]) -> T {
    let mut sum = T::zero();
    for row in a {
        for &x in row {
            sum += x * x;
        }
    }
    sum.sqrt()
}

fn off_diagonal_mass<T: Scalar, const N: usize>(a: &[[T; N]; N]) -> T {
    let mut sum = T::zero();
    for i in 0..N {
        for j in (i + 1)..N {
            sum += a[i][j] * a[i][j];
        }
    }
    (sum + sum).sqrt()
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Sweeps run until the off-diagonal Frobenius mass drops below
/// 1e-13 * ||a||_F. The input's upper triangle is used; symmetry checks are
/// the caller's concern.
pub fn jacobi_eigen<T: Scalar, const N: usize>(a: &[[T; N]; N]) -> Result<SymEigen<T, N>> {
    let mut m = *a;
    let mut q = [[T::zero(); N]; N];
    for (i, row) in q.iter_mut().enumerate() {
        row[i] = T::one();
    }

    let scale = frobenius(&m);
    let tol = T::from64(1e-13) * scale;
    let mut converged = scale == T::zero();
    for _sweep in 0..100 {
        if off_diagonal_mass(&m) <= tol {
            converged = true;
            break;
        }
        for p in 0..N - 1 {
            for q_idx in (p + 1)..N {
                rotate(&mut m, &mut q, p, q_idx);
            }
        }
    }
    if !converged && off_diagonal_mass(&m) > tol {
        return Err(Error::EigenStalled);
    }

    let mut order: [usize; N] = [0; N];
    for (i, o) in order.iter_mut().enumerate() {
        *o = i;
    }
    order.sort_by(|&i, &j| m[j][j].partial_cmp(&m[i][i]).expect("finite eigenvalues"));

    let mut values = [T::zero(); N];
    let mut vectors = [[T::zero(); N]; N];
    for (k, &i) in order.iter().enumerate() {
        values[k] = m[i][i];
        for r in 0..N {
            vectors[k][r] = q[r][i];
        }
    }
    Ok(SymEigen { values, vectors })
}

/// One Jacobi rotation zeroing m[p][q], with the eigenvector accumulator
/// updated in step. Uses the tau form of the updates for stability.
fn rotate<T: Scalar, const N: usize>(m: &mut [[T; N]; N], q: &mut [[T; N]; N], p: usize, j: usize) {
    let apq = m[p][j];
    if apq == T::zero() {
        return;
    }
    let theta = (m[j][j] - m[p][p]) / (T::from64(2.0) * apq);
    let t = if theta.abs() > T::from64(1e100) {
        (T::from64(2.0) * theta).recip()
    } else {
        let sign = if theta >= T::zero() { T::one() } else { -T::one() };
        sign / (theta.abs() + (theta * theta + T::one()).sqrt())
    };
    let c = (t * t + T::one()).sqrt().recip();
    let s = t * c;
    let tau = s / (T::one() + c);

    let app = m[p][p];
    let ajj = m[j][j];
    m[p][p] = app - t * apq;
    m[j][j] = ajj + t * apq;
    m[p][j] = T::zero();
    m[j][p] = T::zero();
    for r in 0..N {
        if r != p && r != j {
            let arp = m[r][p];
            let arj = m[r][j];
            m[r][p] = arp - s * (arj + tau * arp);
            m[p][r] = m[r][p];
            m[r][j] = arj + s * (arp - tau * arj);
            m[j][r] = m[r][j];
        }
        let qrp = q[r][p];
        let qrj = q[r][j];
        q[r][p] = c * qrp - s * qrj;
        q[r][j] = s * qrp + c * qrj;
    }
}

/// Solve a*x = b for a symmetric positive definite matrix. Returns None
/// when a pivot is non-positive or non-finite, i.e. a is not numerically
/// positive definite.
pub fn cholesky_solve<T: Scalar, const N: usize>(a: &[[T; N]; N], b: &[T; N]) -> Option<[T; N]> {
    let mut l = [[T::zero(); N]; N];
    for i in 0..N {
        for j in 0..=i {
            let mut sum = a[i][j];
            for k in 0..j {
                sum -= l[i][k] * l[j][k];
            }
            if i == j {
                if !(sum > T::zero()) || !sum.is_finite() {
                    return None;
                }
                l[i][j] = sum.sqrt();
            } else {
                l[i][j] = sum / l[j][j];
            }
        }
    }

    let mut y = [T::zero(); N];
    for i in 0..N {
        let mut sum = b[i];
        for k in 0..i {
            sum -= l[i][k] * y[k];
        }
        y[i] = sum / l[i][i];
    }
    let mut x = [T::zero(); N];
    for i in (0..N).rev() {
        let mut sum = y[i];
        for k in (i + 1)..N {
            sum -= l[k][i] * x[k];
        }
        x[i] = sum / l[i][i];
    }
    if x.iter().all(|v| v.is_finite()) {
        Some(x)
    } else {
        None
    }
}

/// Ratio of the extreme eigenvalues of a symmetric positive semidefinite
/// matrix; infinite when the smallest is not positive.
pub fn condition_number<T: Scalar, const N: usize>(a: &[[T; N]; N]) -> Result<T> {
    let eig = jacobi_eigen(a)?;
    let max = eig.values[0];
    let min = eig.values[N - 1];
    if min <= T::zero() {
        Ok(T::infinity())
    } else {
        Ok(max / min)
    }
}
