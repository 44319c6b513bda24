// Householder tridiagonalization followed by the implicit QL algorithm.
// Port of the EISPACK tred2/tql2 pair as it appears in JAMA.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

const MAX_QL_ITER: usize = 300;

/// Eigenpairs of a real symmetric matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<T> {
    pub values: Array1<T>,
    /// Orthonormal eigenvectors stored as columns.
    pub vectors: Array2<T>,
}

/// Full eigendecomposition of a symmetric matrix.
///
/// Only the lower triangle is read.
pub fn symmetric_eigen<T: Scalar>(a: &Array2<T>) -> Result<SymmetricEigen<T>> {
    let n = a.nrows();
    if n == 0 || a.ncols() != n {
        return Err(Error::invalid_input(format!(
            "symmetric eigensolver needs a non-empty square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid_input("matrix has non-finite entries"));
    }
    let mut v = a.clone();
    for i in 0..n {
        for j in (i + 1)..n {
            v[[i, j]] = v[[j, i]];
        }
    }
    let mut d = Array1::<T>::zeros(n);
    let mut e = Array1::<T>::zeros(n);
    if n == 1 {
        d[0] = v[[0, 0]];
        v[[0, 0]] = T::one();
        return Ok(SymmetricEigen {
            values: d,
            vectors: v,
        });
    }
    tred2(&mut v, &mut d, &mut e);
    tql2(&mut v, &mut d, &mut e)?;
    Ok(SymmetricEigen {
        values: d,
        vectors: v,
    })
}

fn tred2<T: Scalar>(v: &mut Array2<T>, d: &mut Array1<T>, e: &mut Array1<T>) {
    let n = d.len();
    let zero = T::zero();
    for j in 0..n {
        d[j] = v[[n - 1, j]];
    }

    for i in (1..n).rev() {
        let mut scale = zero;
        let mut h = zero;
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == zero {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[[i - 1, j]];
                v[[i, j]] = zero;
                v[[j, i]] = zero;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > zero {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for j in 0..i {
                e[j] = zero;
            }

            for j in 0..i {
                f = d[j];
                v[[j, i]] = f;
                g = e[j] + v[[j, j]] * f;
                for k in (j + 1)..i {
                    g += v[[k, j]] * d[k];
                    e[k] += v[[k, j]] * f;
                }
                e[j] = g;
            }
            f = zero;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    let upd = f * e[k] + g * d[k];
                    v[[k, j]] -= upd;
                }
                d[j] = v[[i - 1, j]];
                v[[i, j]] = zero;
            }
        }
        d[i] = h;
    }

    for i in 0..(n - 1) {
        v[[n - 1, i]] = v[[i, i]];
        v[[i, i]] = T::one();
        let h = d[i + 1];
        if h != zero {
            for k in 0..=i {
                d[k] = v[[k, i + 1]] / h;
            }
            for j in 0..=i {
                let mut g = zero;
                for k in 0..=i {
                    g += v[[k, i + 1]] * v[[k, j]];
                }
                for k in 0..=i {
                    let upd = g * d[k];
                    v[[k, j]] -= upd;
                }
            }
        }
        for k in 0..=i {
            v[[k, i + 1]] = zero;
        }
    }
    for j in 0..n {
        d[j] = v[[n - 1, j]];
        v[[n - 1, j]] = zero;
    }
    v[[n - 1, n - 1]] = T::one();
    e[0] = zero;
}

fn tql2<T: Scalar>(v: &mut Array2<T>, d: &mut Array1<T>, e: &mut Array1<T>) -> Result<()> {
    let n = d.len();
    let zero = T::zero();
    let one = T::one();
    let two = T::c(2.0);
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = zero;

    let mut f = zero;
    let mut tst1 = zero;
    let eps = T::epsilon();
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }

        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_ITER {
                    return Err(Error::numerical("symmetric QL iteration", e[l].abs().f64()));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(one);
                if p < zero {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for i in (l + 2)..n {
                    d[i] -= h;
                }
                f += h;

                p = d[m];
                let mut c = one;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = zero;
                let mut s2 = zero;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);

                    for k in 0..n {
                        let vk1 = v[[k, i + 1]];
                        let vk = v[[k, i]];
                        v[[k, i + 1]] = s * vk + c * vk1;
                        v[[k, i]] = c * vk - s * vk1;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;

                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = zero;
    }

    for i in 0..(n - 1) {
        let mut k = i;
        let mut p = d[i];
        for j in (i + 1)..n {
            if d[j] < p {
                k = j;
                p = d[j];
            }
        }
        if k != i {
            d[k] = d[i];
            d[i] = p;
            for j in 0..n {
                v.swap([j, i], [j, k]);
            }
        }
    }
    Ok(())
}
