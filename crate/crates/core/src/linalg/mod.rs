//! Dense eigensolvers and small factorization helpers.

mod general;
mod symmetric;

pub use general::{general_eigen, GeneralEigen};
pub use symmetric::{symmetric_eigen, SymmetricEigen};

use ndarray::{Array1, Array2, ArrayView2, Axis};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Orthonormalize the columns of `a` by modified Gram-Schmidt with one
/// reorthogonalization pass. Fails if the columns are numerically dependent.
pub fn orthonormalize_columns<T: Scalar>(a: ArrayView2<'_, T>) -> Result<Array2<T>> {
    // Work on rows of the transpose so each vector is contiguous.
    let mut q = a.t().to_owned();
    let d = q.nrows();
    for j in 0..d {
        for _pass in 0..2 {
            for k in 0..j {
                let (done, mut rest) = q.view_mut().split_at(Axis(0), j);
                let qk = done.row(k);
                let mut qj = rest.row_mut(0);
                let proj = qk.dot(&qj);
                qj.scaled_add(-proj, &qk);
            }
        }
        let mut qj = q.row_mut(j);
        let norm = qj.dot(&qj).sqrt();
        if !(norm > T::c(1e3) * T::epsilon()) {
            return Err(Error::numerical("column orthonormalization", norm.f64()));
        }
        qj.mapv_inplace(|x| x / norm);
    }
    Ok(q.reversed_axes())
}

/// Pseudo-inverse of a symmetric positive semi-definite matrix.
///
/// Keeps at most `rank` leading eigencomponents and drops any eigenvalue
/// below `rel_tol` times the largest. Returns the inverse and the number of
/// components kept.
pub fn psd_pinv<T: Scalar>(a: &Array2<T>, rank: usize, rel_tol: T) -> Result<(Array2<T>, usize)> {
    let n = a.nrows();
    let eig = symmetric_eigen(a)?;
    let top = eig.values[n - 1].max(T::zero());
    let mut out = Array2::<T>::zeros((n, n));
    let mut kept = 0;
    for idx in (0..n).rev() {
        if kept == rank {
            break;
        }
        let lam = eig.values[idx];
        if !(lam > rel_tol * top) || lam <= T::zero() {
            break;
        }
        let v = eig.vectors.column(idx);
        let inv = T::one() / lam;
        for i in 0..n {
            let vi = v[i] * inv;
            for j in 0..n {
                out[[i, j]] += vi * v[j];
            }
        }
        kept += 1;
    }
    Ok((out, kept))
}

/// Least-squares coefficients for `x b = y` through a pseudo-inverse of the
/// normal equations. The flag is true when `x` is rank deficient.
pub fn least_squares<T: Scalar>(x: &Array2<T>, y: &Array2<T>) -> Result<(Array2<T>, bool)> {
    if x.nrows() != y.nrows() {
        return Err(Error::invalid_input(format!(
            "design has {} rows but target has {}",
            x.nrows(),
            y.nrows()
        )));
    }
    let p = x.ncols();
    // Column scaling keeps the normal matrix well conditioned.
    let scale: Array1<T> = x
        .axis_iter(Axis(1))
        .map(|c| {
            let s = c.dot(&c).sqrt();
            if s > T::zero() {
                s
            } else {
                T::one()
            }
        })
        .collect();
    let xs = x / &scale;
    let gram = xs.t().dot(&xs);
    let (ginv, kept) = psd_pinv(&gram, p, T::c(1e-12).max(T::epsilon() * T::c(100.0)))?;
    let mut b = ginv.dot(&xs.t().dot(y));
    for (mut row, s) in b.axis_iter_mut(Axis(0)).zip(scale.iter()) {
        row.mapv_inplace(|v| v / *s);
    }
    Ok((b, kept < p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    #[test]
    fn orthonormalize_small() {
        let a = array![[1.0, 1.0], [0.0, 1.0], [1.0, 0.0]];
        let q = orthonormalize_columns(a.view()).unwrap();
        let g = q.t().dot(&q);
        assert_abs_diff_eq!(g[[0, 0]], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(g[[1, 1]], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(g[[0, 1]], 0.0, epsilon = 1e-14);
        // first column keeps its direction
        assert_abs_diff_eq!(q[[0, 0]], 0.5f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn orthonormalize_rejects_dependent_columns() {
        let a = array![[1.0, 2.0], [1.0, 2.0]];
        assert!(orthonormalize_columns(a.view()).is_err());
    }

    #[test]
    fn pinv_of_diagonal_with_truncation() {
        let a = array![[4.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 0.0]];
        let (inv, kept) = psd_pinv(&a, 3, 1e-12).unwrap();
        assert_eq!(kept, 2);
        assert_abs_diff_eq!(inv[[0, 0]], 0.25, epsilon = 1e-14);
        assert_abs_diff_eq!(inv[[1, 1]], 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(inv[[2, 2]], 0.0, epsilon = 1e-14);
        let (inv1, kept1) = psd_pinv(&a, 1, 1e-12).unwrap();
        assert_eq!(kept1, 1);
        assert_abs_diff_eq!(inv1[[1, 1]], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn least_squares_exact_line() {
        let x = array![[1.0, 0.0], [1.0, 1.0], [1.0, 2.0]];
        let y = array![[1.0], [3.0], [5.0]];
        let (b, deficient) = least_squares(&x, &y).unwrap();
        assert!(!deficient);
        assert_abs_diff_eq!(b[[0, 0]], 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(b[[1, 0]], 2.0, epsilon = 1e-10);
    }

    #[test]
    fn least_squares_flags_duplicate_columns() {
        let x = array![[1.0, 0.0, 0.0], [1.0, 1.0, 1.0], [1.0, 2.0, 2.0]];
        let y = array![[1.0], [3.0], [5.0]];
        let (b, deficient) = least_squares(&x, &y).unwrap();
        assert!(deficient);
        let fit = x.dot(&b);
        for (f, t) in fit.iter().zip(y.iter()) {
            assert_abs_diff_eq!(f, t, epsilon = 1e-9);
        }
    }
}
