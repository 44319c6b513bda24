// Orthogonal Hessenberg reduction and the shifted double-QR iteration for
// real nonsymmetric matrices (EISPACK orthes/hqr2 by way of JAMA).

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

const MAX_QR_ITER: usize = 1000;

/// Eigenpairs of a real square matrix.
///
/// For a complex pair at indices `k, k + 1` with `im[k] > 0`, columns `k`
/// and `k + 1` of `vectors` hold the real and imaginary parts of the
/// eigenvector for `re[k] + i im[k]`. Eigenvectors are not normalized.
#[derive(Debug, Clone)]
pub struct GeneralEigen<T> {
    pub re: Array1<T>,
    pub im: Array1<T>,
    pub vectors: Array2<T>,
}

pub fn general_eigen<T: Scalar>(a: &Array2<T>) -> Result<GeneralEigen<T>> {
    let n = a.nrows();
    if n == 0 || a.ncols() != n {
        return Err(Error::invalid_input(format!(
            "eigensolver needs a non-empty square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid_input("matrix has non-finite entries"));
    }
    let mut h = a.clone();
    let mut v = Array2::<T>::zeros((n, n));
    let mut d = Array1::<T>::zeros(n);
    let mut e = Array1::<T>::zeros(n);
    orthes(&mut h, &mut v);
    hqr2(&mut h, &mut v, &mut d, &mut e)?;
    Ok(GeneralEigen {
        re: d,
        im: e,
        vectors: v,
    })
}

fn orthes<T: Scalar>(h: &mut Array2<T>, v: &mut Array2<T>) {
    let n = h.nrows();
    let zero = T::zero();
    let high = n - 1;
    let mut ort = vec![zero; n];

    for m in 1..high {
        let mut scale = zero;
        for i in m..=high {
            scale += h[[i, m - 1]].abs();
        }
        if scale != zero {
            let mut hh = zero;
            for i in (m..=high).rev() {
                ort[i] = h[[i, m - 1]] / scale;
                hh += ort[i] * ort[i];
            }
            let mut g = hh.sqrt();
            if ort[m] > zero {
                g = -g;
            }
            hh -= ort[m] * g;
            ort[m] -= g;

            for j in m..n {
                let mut f = zero;
                for i in (m..=high).rev() {
                    f += ort[i] * h[[i, j]];
                }
                f /= hh;
                for i in m..=high {
                    h[[i, j]] -= f * ort[i];
                }
            }

            for i in 0..=high {
                let mut f = zero;
                for j in (m..=high).rev() {
                    f += ort[j] * h[[i, j]];
                }
                f /= hh;
                for j in m..=high {
                    h[[i, j]] -= f * ort[j];
                }
            }
            ort[m] *= scale;
            h[[m, m - 1]] = scale * g;
        }
    }

    v.fill(zero);
    for i in 0..n {
        v[[i, i]] = T::one();
    }

    for m in (1..high).rev() {
        if h[[m, m - 1]] != zero {
            for i in (m + 1)..=high {
                ort[i] = h[[i, m - 1]];
            }
            for j in m..=high {
                let mut g = zero;
                for i in m..=high {
                    g += ort[i] * v[[i, j]];
                }
                g = (g / ort[m]) / h[[m, m - 1]];
                for i in m..=high {
                    v[[i, j]] += g * ort[i];
                }
            }
        }
    }
}

fn cdiv<T: Scalar>(xr: T, xi: T, yr: T, yi: T) -> (T, T) {
    if yr.abs() > yi.abs() {
        let r = yi / yr;
        let d = yr + r * yi;
        ((xr + r * xi) / d, (xi - r * xr) / d)
    } else {
        let r = yr / yi;
        let d = yi + r * yr;
        ((r * xr + xi) / d, (r * xi - xr) / d)
    }
}

fn hqr2<T: Scalar>(
    hm: &mut Array2<T>,
    vm: &mut Array2<T>,
    d: &mut Array1<T>,
    e: &mut Array1<T>,
) -> Result<()> {
    // Signed indices keep the loop bounds identical to the reference algorithm.
    macro_rules! h {
        ($i:expr, $j:expr) => {
            hm[[($i) as usize, ($j) as usize]]
        };
    }
    macro_rules! v {
        ($i:expr, $j:expr) => {
            vm[[($i) as usize, ($j) as usize]]
        };
    }
    macro_rules! d {
        ($i:expr) => {
            d[($i) as usize]
        };
    }
    macro_rules! e {
        ($i:expr) => {
            e[($i) as usize]
        };
    }

    let zero = T::zero();
    let one = T::one();
    let two = T::c(2.0);
    let nn = hm.nrows() as isize;
    let mut n = nn - 1;
    let low: isize = 0;
    let high = nn - 1;
    let eps = T::epsilon();
    let mut exshift = zero;
    let (mut p, mut q, mut r, mut s, mut z) = (zero, zero, zero, zero, zero);
    let (mut t, mut w, mut x, mut y);

    let mut norm = zero;
    for i in 0..nn {
        for j in (i - 1).max(0)..nn {
            norm += h!(i, j).abs();
        }
    }

    let mut iter = 0usize;
    while n >= low {
        let mut l = n;
        while l > low {
            s = h!(l - 1, l - 1).abs() + h!(l, l).abs();
            if s == zero {
                s = norm;
            }
            if h!(l, l - 1).abs() < eps * s {
                break;
            }
            l -= 1;
        }

        if l == n {
            h!(n, n) += exshift;
            d!(n) = h!(n, n);
            e!(n) = zero;
            n -= 1;
            iter = 0;
        } else if l == n - 1 {
            w = h!(n, n - 1) * h!(n - 1, n);
            p = (h!(n - 1, n - 1) - h!(n, n)) / two;
            q = p * p + w;
            z = q.abs().sqrt();
            h!(n, n) += exshift;
            h!(n - 1, n - 1) += exshift;
            x = h!(n, n);

            if q >= zero {
                z = if p >= zero { p + z } else { p - z };
                d!(n - 1) = x + z;
                d!(n) = d!(n - 1);
                if z != zero {
                    d!(n) = x - w / z;
                }
                e!(n - 1) = zero;
                e!(n) = zero;
                x = h!(n, n - 1);
                s = x.abs() + z.abs();
                p = x / s;
                q = z / s;
                r = (p * p + q * q).sqrt();
                p /= r;
                q /= r;

                for j in (n - 1)..nn {
                    z = h!(n - 1, j);
                    h!(n - 1, j) = q * z + p * h!(n, j);
                    h!(n, j) = q * h!(n, j) - p * z;
                }
                for i in 0..=n {
                    z = h!(i, n - 1);
                    h!(i, n - 1) = q * z + p * h!(i, n);
                    h!(i, n) = q * h!(i, n) - p * z;
                }
                for i in low..=high {
                    z = v!(i, n - 1);
                    v!(i, n - 1) = q * z + p * v!(i, n);
                    v!(i, n) = q * v!(i, n) - p * z;
                }
            } else {
                d!(n - 1) = x + p;
                d!(n) = x + p;
                e!(n - 1) = z;
                e!(n) = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            x = h!(n, n);
            y = zero;
            w = zero;
            if l < n {
                y = h!(n - 1, n - 1);
                w = h!(n, n - 1) * h!(n - 1, n);
            }

            // Wilkinson's ad hoc shift
            if iter == 10 {
                exshift += x;
                for i in low..=n {
                    h!(i, i) -= x;
                }
                s = h!(n, n - 1).abs() + h!(n - 1, n - 2).abs();
                x = T::c(0.75) * s;
                y = x;
                w = T::c(-0.4375) * s * s;
            }

            // MATLAB's ad hoc shift
            if iter == 30 {
                s = (y - x) / two;
                s = s * s + w;
                if s > zero {
                    s = s.sqrt();
                    if y < x {
                        s = -s;
                    }
                    s = x - w / ((y - x) / two + s);
                    for i in low..=n {
                        h!(i, i) -= s;
                    }
                    exshift += s;
                    x = T::c(0.964);
                    y = x;
                    w = x;
                }
            }

            iter += 1;
            if iter > MAX_QR_ITER {
                return Err(Error::numerical(
                    "Hessenberg QR iteration",
                    h!(n, n - 1).abs().f64(),
                ));
            }

            let mut m = n - 2;
            while m >= l {
                z = h!(m, m);
                r = x - z;
                s = y - z;
                p = (r * s - w) / h!(m + 1, m) + h!(m, m + 1);
                q = h!(m + 1, m + 1) - z - r - s;
                r = h!(m + 2, m + 1);
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                if h!(m, m - 1).abs() * (q.abs() + r.abs())
                    < eps * (p.abs() * (h!(m - 1, m - 1).abs() + z.abs() + h!(m + 1, m + 1).abs()))
                {
                    break;
                }
                m -= 1;
            }

            for i in (m + 2)..=n {
                h!(i, i - 2) = zero;
                if i > m + 2 {
                    h!(i, i - 3) = zero;
                }
            }

            let mut k = m;
            while k < n {
                let notlast = k != n - 1;
                if k != m {
                    p = h!(k, k - 1);
                    q = h!(k + 1, k - 1);
                    r = if notlast { h!(k + 2, k - 1) } else { zero };
                    x = p.abs() + q.abs() + r.abs();
                    if x == zero {
                        k += 1;
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }

                s = (p * p + q * q + r * r).sqrt();
                if p < zero {
                    s = -s;
                }
                if s != zero {
                    if k != m {
                        h!(k, k - 1) = -s * x;
                    } else if l != m {
                        h!(k, k - 1) = -h!(k, k - 1);
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;

                    for j in k..nn {
                        p = h!(k, j) + q * h!(k + 1, j);
                        if notlast {
                            p += r * h!(k + 2, j);
                            h!(k + 2, j) -= p * z;
                        }
                        h!(k, j) -= p * x;
                        h!(k + 1, j) -= p * y;
                    }

                    for i in 0..=n.min(k + 3) {
                        p = x * h!(i, k) + y * h!(i, k + 1);
                        if notlast {
                            p += z * h!(i, k + 2);
                            h!(i, k + 2) -= p * r;
                        }
                        h!(i, k) -= p;
                        h!(i, k + 1) -= p * q;
                    }

                    for i in low..=high {
                        p = x * v!(i, k) + y * v!(i, k + 1);
                        if notlast {
                            p += z * v!(i, k + 2);
                            v!(i, k + 2) -= p * r;
                        }
                        v!(i, k) -= p;
                        v!(i, k + 1) -= p * q;
                    }
                }
                k += 1;
            }
        }
    }

    if norm == zero {
        return Ok(());
    }

    // Back-substitute for the eigenvectors of the quasi-triangular form.
    n = nn - 1;
    while n >= 0 {
        p = d!(n);
        q = e!(n);

        if q == zero {
            let mut l = n;
            h!(n, n) = one;
            let mut i = n - 1;
            while i >= 0 {
                w = h!(i, i) - p;
                r = zero;
                for j in l..=n {
                    r += h!(i, j) * h!(j, n);
                }
                if e!(i) < zero {
                    z = w;
                    s = r;
                } else {
                    l = i;
                    if e!(i) == zero {
                        h!(i, n) = if w != zero { -r / w } else { -r / (eps * norm) };
                    } else {
                        x = h!(i, i + 1);
                        y = h!(i + 1, i);
                        q = (d!(i) - p) * (d!(i) - p) + e!(i) * e!(i);
                        t = (x * s - z * r) / q;
                        h!(i, n) = t;
                        h!(i + 1, n) = if x.abs() > z.abs() {
                            (-r - w * t) / x
                        } else {
                            (-s - y * t) / z
                        };
                    }

                    t = h!(i, n).abs();
                    if (eps * t) * t > one {
                        for j in i..=n {
                            h!(j, n) /= t;
                        }
                    }
                }
                i -= 1;
            }
        } else if q < zero {
            let mut l = n - 1;

            if h!(n, n - 1).abs() > h!(n - 1, n).abs() {
                h!(n - 1, n - 1) = q / h!(n, n - 1);
                h!(n - 1, n) = -(h!(n, n) - p) / h!(n, n - 1);
            } else {
                let (cr, ci) = cdiv(zero, -h!(n - 1, n), h!(n - 1, n - 1) - p, q);
                h!(n - 1, n - 1) = cr;
                h!(n - 1, n) = ci;
            }
            h!(n, n - 1) = zero;
            h!(n, n) = one;
            let mut i = n - 2;
            while i >= 0 {
                let mut ra = zero;
                let mut sa = zero;
                for j in l..=n {
                    ra += h!(i, j) * h!(j, n - 1);
                    sa += h!(i, j) * h!(j, n);
                }
                w = h!(i, i) - p;

                if e!(i) < zero {
                    z = w;
                    r = ra;
                    s = sa;
                } else {
                    l = i;
                    if e!(i) == zero {
                        let (cr, ci) = cdiv(-ra, -sa, w, q);
                        h!(i, n - 1) = cr;
                        h!(i, n) = ci;
                    } else {
                        x = h!(i, i + 1);
                        y = h!(i + 1, i);
                        let mut vr = (d!(i) - p) * (d!(i) - p) + e!(i) * e!(i) - q * q;
                        let vi = (d!(i) - p) * two * q;
                        if vr == zero && vi == zero {
                            vr = eps * norm * (w.abs() + q.abs() + x.abs() + y.abs() + z.abs());
                        }
                        let (cr, ci) =
                            cdiv(x * r - z * ra + q * sa, x * s - z * sa - q * ra, vr, vi);
                        h!(i, n - 1) = cr;
                        h!(i, n) = ci;
                        if x.abs() > z.abs() + q.abs() {
                            h!(i + 1, n - 1) = (-ra - w * h!(i, n - 1) + q * h!(i, n)) / x;
                            h!(i + 1, n) = (-sa - w * h!(i, n) - q * h!(i, n - 1)) / x;
                        } else {
                            let (cr, ci) = cdiv(-r - y * h!(i, n - 1), -s - y * h!(i, n), z, q);
                            h!(i + 1, n - 1) = cr;
                            h!(i + 1, n) = ci;
                        }
                    }

                    t = h!(i, n - 1).abs().max(h!(i, n).abs());
                    if (eps * t) * t > one {
                        for j in i..=n {
                            h!(j, n - 1) /= t;
                            h!(j, n) /= t;
                        }
                    }
                }
                i -= 1;
            }
        }
        n -= 1;
    }

    // Back-transform to eigenvectors of the original matrix.
    let mut j = nn - 1;
    while j >= low {
        for i in low..=high {
            z = zero;
            for k in low..=j.min(high) {
                z += v!(i, k) * h!(k, j);
            }
            v!(i, j) = z;
        }
        j -= 1;
    }
    Ok(())
}
