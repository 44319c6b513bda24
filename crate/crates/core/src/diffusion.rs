//! Stationary distributions, diffusion distances and spectral embeddings.

use std::cmp::Ordering;

use ndarray::{Array1, Array2, Axis};
use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernels::{DiffusionOperator, DistanceKind, DistanceMatrix};
use crate::linalg::{general_eigen, symmetric_eigen};
use crate::scalar::Scalar;

pub const POWER_TOL: f64 = 1e-13;
pub const POWER_MAX_ITER: usize = 100_000;
pub const DEFAULT_L_MAX: usize = 15;
/// Relative imaginary part below which an eigenvalue is treated as real.
pub const IMAG_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct StationaryDistribution<T> {
    pub phi0: Array1<T>,
}

/// Leading eigenpairs sorted by descending modulus.
#[derive(Debug, Clone)]
pub struct Eigensystem<T> {
    pub values: Vec<Complex<T>>,
    /// One column per eigenvalue, normalized so that `Σ φ₀ |ψ|² = 1`.
    pub vectors: Array2<Complex<T>>,
    pub is_real: Vec<bool>,
}

#[derive(Debug, Clone)]
pub struct Embedding<T> {
    pub coordinates: Array2<T>,
    /// Eigenvalue behind each coordinate column.
    pub eigenvalues: Vec<Complex<T>>,
    pub t: u32,
    pub source: String,
    /// True if any column came from a genuinely complex eigenpair.
    pub complex: bool,
}

impl<T: Scalar> Embedding<T> {
    pub fn dim(&self) -> usize {
        self.coordinates.ncols()
    }
}

/// How many nontrivial coordinates to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truncation {
    SpectralGap { l_max: usize },
    Fixed(usize),
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation::SpectralGap {
            l_max: DEFAULT_L_MAX,
        }
    }
}

/// Left Perron vector of `K` by power iteration on `Kᵀ`, started from the
/// uniform distribution.
pub fn stationary_distribution<T: Scalar>(
    k: &DiffusionOperator<T>,
) -> Result<StationaryDistribution<T>> {
    let n = k.n();
    let tol = T::c(POWER_TOL).max(T::c(8.0) * T::epsilon());
    let mut p = Array1::from_elem(n, T::one() / T::from_usize_lossy(n));
    let mut residual = T::infinity();
    for _ in 0..POWER_MAX_ITER {
        let mut q = p.dot(&k.matrix);
        let s = q.sum();
        q /= s;
        residual = q
            .iter()
            .zip(p.iter())
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs()));
        p = q;
        if residual < tol {
            if let Some((i, v)) = p.iter().enumerate().find(|(_, v)| !(**v > T::zero())) {
                return Err(Error::DegenerateDistribution {
                    index: i,
                    value: v.f64(),
                });
            }
            return Ok(StationaryDistribution { phi0: p });
        }
    }
    Err(Error::numerical(
        "stationary distribution power iteration",
        residual.f64(),
    ))
}

/// `Kᵗ` by binary exponentiation.
pub fn matrix_power<T: Scalar>(k: &DiffusionOperator<T>, t: u32) -> Result<Array2<T>> {
    if t == 0 {
        return Err(Error::invalid_config("diffusion time must be >= 1"));
    }
    let mut base = k.matrix.clone();
    let mut acc: Option<Array2<T>> = None;
    let mut e = t;
    loop {
        if e & 1 == 1 {
            acc = Some(match acc {
                None => base.clone(),
                Some(a) => a.dot(&base),
            });
        }
        e >>= 1;
        if e == 0 {
            break;
        }
        base = base.dot(&base);
    }
    Ok(acc.expect("t >= 1"))
}

/// `d_t(i,j)² = Σ_l (Kᵗ[i,l] - Kᵗ[j,l])² / φ₀(l)`.
pub fn diffusion_distance<T: Scalar>(
    k: &DiffusionOperator<T>,
    t: u32,
    phi: &StationaryDistribution<T>,
) -> Result<DistanceMatrix<T>> {
    let kt = matrix_power(k, t)?;
    distance_from_power(&kt, phi, DistanceKind::Diffusion)
}

pub(crate) fn distance_from_power<T: Scalar>(
    kt: &Array2<T>,
    phi: &StationaryDistribution<T>,
    kind: DistanceKind,
) -> Result<DistanceMatrix<T>> {
    let n = kt.nrows();
    if phi.phi0.len() != n {
        return Err(Error::invalid_input(format!(
            "stationary distribution has length {}, operator is {n}x{n}",
            phi.phi0.len()
        )));
    }
    let floor = T::c(1e-300);
    if let Some((i, v)) = phi.phi0.iter().enumerate().find(|(_, v)| !(**v > floor)) {
        return Err(Error::DegenerateDistribution {
            index: i,
            value: v.f64(),
        });
    }
    let w: Array1<T> = phi.phi0.mapv(|p| T::one() / p);
    let mut values = Array2::<T>::zeros((n, n));
    values
        .axis_iter_mut(Axis(0))
        .into_par_iter()
        .enumerate()
        .for_each(|(i, mut row)| {
            let ri = kt.row(i);
            for j in 0..n {
                if j == i {
                    continue;
                }
                let rj = kt.row(j);
                let mut s = T::zero();
                for l in 0..n {
                    let d = ri[l] - rj[l];
                    s += d * d * w[l];
                }
                row[j] = s.sqrt();
            }
        });
    Ok(DistanceMatrix { values, kind })
}

fn modulus_order<T: Scalar>(a: &Complex<T>, b: &Complex<T>) -> Ordering {
    b.norm()
        .partial_cmp(&a.norm())
        .unwrap_or(Ordering::Equal)
        .then(b.re.partial_cmp(&a.re).unwrap_or(Ordering::Equal))
        .then(b.im.partial_cmp(&a.im).unwrap_or(Ordering::Equal))
}

/// Top `p` eigenpairs of `K`.
///
/// Operators carrying their normalization diagonal were built from a
/// symmetric affinity and go through the symmetric conjugation
/// `S^{1/2} K S^{-1/2}`; all others use the general real solver.
pub fn spectral_decompose<T: Scalar>(k: &DiffusionOperator<T>, p: usize) -> Result<Eigensystem<T>> {
    let n = k.n();
    if p == 0 || p > n {
        return Err(Error::invalid_config(format!(
            "requested {p} eigenpairs of a {n}x{n} operator"
        )));
    }
    match &k.normalization {
        Some(q) => decompose_reversible(k, q, p),
        None => decompose_general(k, p),
    }
}

fn decompose_reversible<T: Scalar>(
    k: &DiffusionOperator<T>,
    q: &Array1<T>,
    p: usize,
) -> Result<Eigensystem<T>> {
    let n = k.n();
    // Row sums s = 1/q; S^{1/2} K S^{-1/2} has entries K_ij sqrt(s_i / s_j).
    let sqrt_s: Array1<T> = q.mapv(|v| (T::one() / v).sqrt());
    let mut a = Array2::<T>::zeros((n, n));
    for i in 0..n {
        for j in 0..=i {
            let v = k.matrix[[i, j]] * sqrt_s[i] / sqrt_s[j];
            a[[i, j]] = v;
            a[[j, i]] = v;
        }
    }
    let eig = symmetric_eigen(&a)?;
    // φ₀ ∝ s exactly for a reversible chain.
    let total: T = sqrt_s.iter().map(|x| *x * *x).sum();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| {
        eig.values[y]
            .abs()
            .partial_cmp(&eig.values[x].abs())
            .unwrap_or(Ordering::Equal)
            .then(
                eig.values[y]
                    .partial_cmp(&eig.values[x])
                    .unwrap_or(Ordering::Equal),
            )
            .then(x.cmp(&y))
    });
    let mut values = Vec::with_capacity(p);
    let mut vectors = Array2::<Complex<T>>::zeros((n, p));
    for (c, &idx) in order.iter().take(p).enumerate() {
        values.push(Complex::new(eig.values[idx], T::zero()));
        // ψ = S^{-1/2} u scaled so that Σ φ₀ ψ² = 1.
        let scale = total.sqrt();
        let mut col: Vec<T> = (0..n)
            .map(|i| eig.vectors[[i, idx]] / sqrt_s[i] * scale)
            .collect();
        fix_sign(&mut col);
        for i in 0..n {
            vectors[[i, c]] = Complex::new(col[i], T::zero());
        }
    }
    Ok(Eigensystem {
        values,
        vectors,
        is_real: vec![true; p],
    })
}

fn fix_sign<T: Scalar>(col: &mut [T]) {
    let big = col.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let thresh = big * T::c(1e-10);
    if let Some(first) = col.iter().find(|v| v.abs() > thresh) {
        if *first < T::zero() {
            col.iter_mut().for_each(|v| *v = -*v);
        }
    }
}

fn decompose_general<T: Scalar>(k: &DiffusionOperator<T>, p: usize) -> Result<Eigensystem<T>> {
    let n = k.n();
    let phi = stationary_distribution(k)?;
    let eig = general_eigen(&k.matrix)?;

    // Expand the JAMA layout into complex eigenvectors.
    let mut comps: Vec<(Complex<T>, Vec<Complex<T>>, bool)> = Vec::with_capacity(n);
    let mut c = 0;
    while c < n {
        let (re, im) = (eig.re[c], eig.im[c]);
        if im == T::zero() {
            let v = (0..n)
                .map(|i| Complex::new(eig.vectors[[i, c]], T::zero()))
                .collect();
            comps.push((Complex::new(re, T::zero()), v, true));
            c += 1;
            continue;
        }
        let lam = Complex::new(re, im);
        if im.abs() <= T::c(IMAG_TOL) * lam.norm() {
            // Nearly real pair: both halves span an approximate invariant subspace.
            for col in [c, c + 1] {
                let v = (0..n)
                    .map(|i| Complex::new(eig.vectors[[i, col]], T::zero()))
                    .collect();
                comps.push((Complex::new(re, T::zero()), v, true));
            }
        } else {
            let v: Vec<Complex<T>> = (0..n)
                .map(|i| Complex::new(eig.vectors[[i, c]], eig.vectors[[i, c + 1]]))
                .collect();
            let vc = v.iter().map(|z| z.conj()).collect();
            comps.push((lam, v, false));
            comps.push((lam.conj(), vc, false));
        }
        c += 2;
    }
    comps.sort_by(|a, b| modulus_order(&a.0, &b.0));

    let mut values = Vec::with_capacity(p);
    let mut is_real = Vec::with_capacity(p);
    let mut vectors = Array2::<Complex<T>>::zeros((n, p));
    for (col, (lam, mut v, real)) in comps.into_iter().take(p).enumerate() {
        let norm2: T = v
            .iter()
            .zip(phi.phi0.iter())
            .map(|(z, w)| z.norm_sqr() * *w)
            .sum();
        if !(norm2 > T::zero()) {
            return Err(Error::numerical("eigenvector normalization", 0.0));
        }
        let inv = T::one() / norm2.sqrt();
        // Rotate so the first significant entry is real and positive.
        let big = v.iter().fold(T::zero(), |m, z| m.max(z.norm()));
        if let Some(first) = v.iter().find(|z| z.norm() > big * T::c(1e-10)).copied() {
            let phase = first.conj() / first.norm();
            v.iter_mut().for_each(|z| *z *= phase);
        }
        for (i, z) in v.into_iter().enumerate() {
            vectors[[i, col]] = z * inv;
        }
        values.push(lam);
        is_real.push(real);
    }
    Ok(Eigensystem {
        values,
        vectors,
        is_real,
    })
}

/// `Ψ_t(i) = [λ₁ᵗψ₁(i), …, λ_Lᵗψ_L(i)]`, skipping the trivial pair.
///
/// A complex eigenpair contributes the real part of `λᵗψ` in its own column;
/// its conjugate partner, when also kept, contributes the imaginary part.
pub fn embed<T: Scalar>(
    e: &Eigensystem<T>,
    t: u32,
    l: usize,
    source: &str,
) -> Result<Embedding<T>> {
    let p = e.values.len();
    if l == 0 || l + 1 > p {
        return Err(Error::invalid_config(format!(
            "embedding dimension must be in 1..={}, got {l}",
            p.saturating_sub(1)
        )));
    }
    if t == 0 {
        return Err(Error::invalid_config("diffusion time must be >= 1"));
    }
    let n = e.vectors.nrows();
    let mut coordinates = Array2::<T>::zeros((n, l));
    let mut eigenvalues = Vec::with_capacity(l);
    let mut complex = false;
    let mut col = 0;
    while col < l {
        let comp = col + 1;
        let lam = e.values[comp];
        let lt = lam.powu(t);
        if e.is_real[comp] {
            for i in 0..n {
                coordinates[[i, col]] = lt.re * e.vectors[[i, comp]].re;
            }
            eigenvalues.push(lam);
            col += 1;
        } else {
            complex = true;
            for i in 0..n {
                coordinates[[i, col]] = (lt * e.vectors[[i, comp]]).re;
            }
            eigenvalues.push(lam);
            col += 1;
            if col < l && comp + 1 < p && !e.is_real[comp + 1] {
                for i in 0..n {
                    coordinates[[i, col]] = (lt * e.vectors[[i, comp]]).im;
                }
                eigenvalues.push(e.values[comp + 1]);
                col += 1;
            }
        }
    }
    Ok(Embedding {
        coordinates,
        eigenvalues,
        t,
        source: source.to_string(),
        complex,
    })
}

/// Position of the largest drop `|λ_l| - |λ_{l+1}|` for `l` in
/// `1..=min(P-2, l_max)`, earliest on ties. `λ₀` is the first entry.
pub fn spectral_gap<T: Scalar>(moduli: &[T], l_max: usize) -> usize {
    let p = moduli.len();
    if p < 3 {
        return 1;
    }
    let hi = (p - 2).min(l_max.max(1));
    let mut best = 1;
    let mut best_gap = T::neg_infinity();
    for l in 1..=hi {
        let g = moduli[l].abs() - moduli[l + 1].abs();
        if g > best_gap {
            best_gap = g;
            best = l;
        }
    }
    best
}

pub fn eigen_moduli<T: Scalar>(e: &Eigensystem<T>) -> Vec<T> {
    e.values.iter().map(|z| z.norm()).collect()
}

/// Decompose and embed under a truncation policy.
pub fn diffusion_embedding<T: Scalar>(
    k: &DiffusionOperator<T>,
    t: u32,
    truncation: Truncation,
    source: &str,
) -> Result<Embedding<T>> {
    let n = k.n();
    let p = match truncation {
        Truncation::Fixed(l) => l + 1,
        Truncation::SpectralGap { l_max } => l_max + 2,
    }
    .min(n);
    let eig = spectral_decompose(k, p)?;
    let l = match truncation {
        Truncation::Fixed(l) => l,
        Truncation::SpectralGap { l_max } => spectral_gap(&eigen_moduli(&eig), l_max),
    };
    embed(&eig, t, l.min(p - 1), source)
}
