//! Pairwise metrics, Gaussian affinities and Markov normalization.

use std::fmt;

use ndarray::{Array1, Array2, ArrayView1, Axis};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::psd_pinv;
use crate::scalar::Scalar;

/// N observations of one sensor, one row per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix<T> {
    data: Array2<T>,
    sensor_id: String,
}

impl<T: Scalar> SampleMatrix<T> {
    pub fn new(data: Array2<T>, sensor_id: impl Into<String>) -> Result<Self> {
        let sensor_id = sensor_id.into();
        if data.nrows() < 2 || data.ncols() < 1 {
            return Err(Error::invalid_input(format!(
                "sensor {sensor_id}: need at least 2 samples and 1 feature, got {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::invalid_input(format!(
                "sensor {sensor_id}: non-finite value at row {}, column {}",
                pos / data.ncols(),
                pos % data.ncols()
            )));
        }
        Ok(Self { data, sensor_id })
    }

    pub fn data(&self) -> &Array2<T> {
        &self.data
    }

    pub fn sensor_id(&self) -> &str {
        &self.sensor_id
    }

    pub fn n_samples(&self) -> usize {
        self.data.nrows()
    }

    pub fn dim(&self) -> usize {
        self.data.ncols()
    }

    pub fn into_data(self) -> Array2<T> {
        self.data
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DistanceKind {
    Euclidean,
    Mahalanobis,
    Diffusion,
    Ad,
    Common,
}

impl DistanceKind {
    pub fn tag(self) -> &'static str {
        match self {
            DistanceKind::Euclidean => "euclidean",
            DistanceKind::Mahalanobis => "mahalanobis",
            DistanceKind::Diffusion => "diffusion",
            DistanceKind::Ad => "ad",
            DistanceKind::Common => "common",
        }
    }
}

impl fmt::Display for DistanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Symmetric, nonnegative N×N matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix<T> {
    pub values: Array2<T>,
    pub kind: DistanceKind,
}

impl<T: Scalar> DistanceMatrix<T> {
    /// Wraps `values` after checking shape, symmetry (1e-10), sign and diagonal.
    pub fn new(values: Array2<T>, kind: DistanceKind) -> Result<Self> {
        let n = values.nrows();
        if values.ncols() != n || n == 0 {
            return Err(Error::invalid_input(format!(
                "distance matrix must be square, got {}x{}",
                n,
                values.ncols()
            )));
        }
        let tol = T::c(1e-10);
        for i in 0..n {
            if values[[i, i]] != T::zero() {
                return Err(Error::invalid_input(format!("nonzero diagonal at {i}")));
            }
            for j in 0..n {
                let v = values[[i, j]];
                if !v.is_finite() || v < T::zero() {
                    return Err(Error::invalid_input(format!(
                        "invalid distance {v} at ({i}, {j})"
                    )));
                }
                if (v - values[[j, i]]).abs() > tol * (T::one() + v.abs()) {
                    return Err(Error::invalid_input(format!("asymmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Self { values, kind })
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AffinityMatrix<T> {
    pub values: Array2<T>,
    pub epsilon: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    SingleSensor,
    Alternating,
    Common,
}

impl Provenance {
    pub fn tag(self) -> &'static str {
        match self {
            Provenance::SingleSensor => "single_sensor",
            Provenance::Alternating => "alternating",
            Provenance::Common => "common",
        }
    }
}

/// Row-stochastic Markov matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionOperator<T> {
    pub matrix: Array2<T>,
    /// Reciprocal row sums of the source affinity; `None` when the operator
    /// was not built by normalizing a symmetric affinity.
    pub normalization: Option<Array1<T>>,
    pub provenance: Provenance,
}

impl<T: Scalar> DiffusionOperator<T> {
    /// Wraps an arbitrary row-stochastic matrix (row sums within 1e-10).
    pub fn from_matrix(matrix: Array2<T>, provenance: Provenance) -> Result<Self> {
        let n = matrix.nrows();
        if matrix.ncols() != n || n == 0 {
            return Err(Error::invalid_input(format!(
                "operator must be square, got {}x{}",
                n,
                matrix.ncols()
            )));
        }
        let tol = T::c(1e-10).max(T::c(10.0) * T::epsilon() * T::from_usize_lossy(n));
        for (i, row) in matrix.rows().into_iter().enumerate() {
            if row.iter().any(|x| !x.is_finite() || *x < T::zero()) {
                return Err(Error::invalid_input(format!(
                    "row {i} has a negative or non-finite entry"
                )));
            }
            let s: T = row.sum();
            if (s - T::one()).abs() > tol {
                return Err(Error::invalid_input(format!("row {i} sums to {s}, not 1")));
            }
        }
        Ok(Self {
            matrix,
            normalization: None,
            provenance,
        })
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }
}

/// How much ridge to add to each local covariance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shrinkage {
    /// Add `λ I`.
    Absolute(f64),
    /// Add `c · trace(C) / D · I`.
    TraceRelative(f64),
}

impl Default for Shrinkage {
    fn default() -> Self {
        Shrinkage::TraceRelative(1e-3)
    }
}

/// Per-sample inverse local covariances.
#[derive(Debug, Clone)]
pub struct LocalCovarianceSet<T> {
    pub inverses: Vec<Array2<T>>,
    pub k_nn: usize,
    pub shrinkage: Shrinkage,
    pub rank: usize,
}

impl<T: Scalar> LocalCovarianceSet<T> {
    /// Set with the same inverse covariance at every sample.
    pub fn uniform(inverse: Array2<T>, n: usize) -> Self {
        let d = inverse.nrows();
        Self {
            inverses: vec![inverse; n],
            k_nn: 0,
            shrinkage: Shrinkage::Absolute(0.0),
            rank: d,
        }
    }
}

fn check_finite<T: Scalar>(x: &Array2<T>) -> Result<()> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::invalid_input("non-finite value in sample matrix"))
    }
}

fn sq_dist<T: Scalar>(a: ArrayView1<'_, T>, b: ArrayView1<'_, T>) -> T {
    let mut s = T::zero();
    for (x, y) in a.iter().zip(b.iter()) {
        let d = *x - *y;
        s += d * d;
    }
    s
}

/// ℓ2 distances between all pairs of rows.
pub fn euclidean_distance_matrix<T: Scalar>(x: &SampleMatrix<T>) -> Result<DistanceMatrix<T>> {
    check_finite(x.data())?;
    let data = x.data();
    let n = data.nrows();
    let mut values = Array2::<T>::zeros((n, n));
    values
        .axis_iter_mut(Axis(0))
        .into_par_iter()
        .enumerate()
        .for_each(|(i, mut row)| {
            let xi = data.row(i);
            for j in 0..n {
                if j != i {
                    row[j] = sq_dist(xi, data.row(j)).sqrt();
                }
            }
        });
    Ok(DistanceMatrix {
        values,
        kind: DistanceKind::Euclidean,
    })
}

/// Indices of the `k` nearest other rows to row `i`, ties by index.
fn nearest<T: Scalar>(data: &Array2<T>, i: usize, k: usize) -> Vec<usize> {
    let xi = data.row(i);
    let mut d: Vec<(T, usize)> = (0..data.nrows())
        .filter(|&j| j != i)
        .map(|j| (sq_dist(xi, data.row(j)), j))
        .collect();
    d.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    d.truncate(k);
    d.into_iter().map(|(_, j)| j).collect()
}

/// Inverse covariance of each sample's `k_nn` nearest neighbours.
///
/// The neighbourhood excludes the sample itself. Covariances are normalized
/// by `k_nn - 1`, ridged according to `shrinkage`, and pseudo-inverted keeping
/// the top `rank` eigencomponents.
pub fn local_covariances<T: Scalar>(
    x: &SampleMatrix<T>,
    k_nn: usize,
    shrinkage: Shrinkage,
    rank: usize,
) -> Result<LocalCovarianceSet<T>> {
    let data = x.data();
    let (n, d) = data.dim();
    if k_nn < 2 || k_nn >= n {
        return Err(Error::invalid_config(format!(
            "k_nn must satisfy 2 <= k_nn < N = {n}, got {k_nn}"
        )));
    }
    if rank > d || rank == 0 {
        return Err(Error::invalid_config(format!(
            "covariance rank must be in 1..={d}, got {rank}"
        )));
    }
    let lam = match shrinkage {
        Shrinkage::Absolute(v) | Shrinkage::TraceRelative(v) if !(v >= 0.0) => {
            return Err(Error::invalid_config(format!(
                "shrinkage must be >= 0, got {v}"
            )))
        }
        s => s,
    };
    check_finite(data)?;

    let inverses: Result<Vec<Array2<T>>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let nb = nearest(data, i, k_nn);
            let mut mean = Array1::<T>::zeros(d);
            for &j in &nb {
                mean += &data.row(j);
            }
            mean /= T::from_usize_lossy(k_nn);
            let mut cov = Array2::<T>::zeros((d, d));
            for &j in &nb {
                let c = &data.row(j) - &mean;
                for a in 0..d {
                    for b in 0..=a {
                        cov[[a, b]] += c[a] * c[b];
                    }
                }
            }
            let denom = T::from_usize_lossy(k_nn - 1);
            for a in 0..d {
                for b in 0..=a {
                    let v = cov[[a, b]] / denom;
                    cov[[a, b]] = v;
                    cov[[b, a]] = v;
                }
            }
            let ridge = match lam {
                Shrinkage::Absolute(v) => T::c(v),
                Shrinkage::TraceRelative(c) => T::c(c) * cov.diag().sum() / T::from_usize_lossy(d),
            };
            for a in 0..d {
                cov[[a, a]] += ridge;
            }
            let (inv, _) = psd_pinv(&cov, rank, T::c(1e-13).max(T::epsilon()))?;
            Ok(inv)
        })
        .collect();
    Ok(LocalCovarianceSet {
        inverses: inverses?,
        k_nn,
        shrinkage,
        rank,
    })
}

/// Two-sided local Mahalanobis distance
/// `sqrt((x_i - x_j)ᵀ (C_i⁻¹ + C_j⁻¹) (x_i - x_j) / 2)`.
pub fn mahalanobis_distance_matrix<T: Scalar>(
    x: &SampleMatrix<T>,
    c: &LocalCovarianceSet<T>,
) -> Result<DistanceMatrix<T>> {
    let data = x.data();
    let (n, d) = data.dim();
    if c.inverses.len() != n || c.inverses.iter().any(|m| m.dim() != (d, d)) {
        return Err(Error::invalid_input(format!(
            "covariance set does not match {n} samples of dimension {d}"
        )));
    }
    check_finite(data)?;
    // q[i][j] = Δᵀ C_i⁻¹ Δ, evaluated row by row.
    let mut q = Array2::<T>::zeros((n, n));
    q.axis_iter_mut(Axis(0))
        .into_par_iter()
        .enumerate()
        .for_each(|(i, mut row)| {
            let diff = data - &data.row(i);
            let cd = diff.dot(&c.inverses[i]);
            for j in 0..n {
                row[j] = cd.row(j).dot(&diff.row(j));
            }
        });
    let mut values = Array2::<T>::zeros((n, n));
    let half = T::c(0.5);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = ((q[[i, j]] + q[[j, i]]) * half).max(T::zero()).sqrt();
            values[[i, j]] = v;
            values[[j, i]] = v;
        }
    }
    Ok(DistanceMatrix {
        values,
        kind: DistanceKind::Mahalanobis,
    })
}

fn median_sorted<T: Scalar>(v: &mut [T]) -> T {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = v.len();
    if m % 2 == 1 {
        v[m / 2]
    } else {
        (v[m / 2 - 1] + v[m / 2]) * T::c(0.5)
    }
}

/// `multiplier` times the median of the squared distances over pairs `i < j`.
pub fn median_scale<T: Scalar>(d: &DistanceMatrix<T>, multiplier: f64) -> Result<T> {
    let mut sq = upper_triangle(d);
    sq.iter_mut().for_each(|v| *v = *v * *v);
    scale_from(sq, multiplier)
}

/// Same heuristic on the unsquared distances, for the unsquared union kernel.
pub fn median_scale_unsquared<T: Scalar>(d: &DistanceMatrix<T>, multiplier: f64) -> Result<T> {
    scale_from(upper_triangle(d), multiplier)
}

fn upper_triangle<T: Scalar>(d: &DistanceMatrix<T>) -> Vec<T> {
    let n = d.n();
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            out.push(d.values[[i, j]]);
        }
    }
    out
}

fn scale_from<T: Scalar>(mut v: Vec<T>, multiplier: f64) -> Result<T> {
    if !(multiplier > 0.0) || !multiplier.is_finite() {
        return Err(Error::invalid_config(format!(
            "scale multiplier must be positive, got {multiplier}"
        )));
    }
    if v.is_empty() {
        return Err(Error::invalid_input(
            "need at least two samples for a kernel scale",
        ));
    }
    if v.iter().all(|x| *x == T::zero()) {
        return Err(Error::DegenerateScale);
    }
    let med = median_sorted(&mut v);
    if med == T::zero() {
        return Err(Error::DegenerateScale);
    }
    Ok(T::c(multiplier) * med)
}

/// `W[i][j] = exp(-D[i][j]² / ε)`.
pub fn gaussian_affinity<T: Scalar>(
    d: &DistanceMatrix<T>,
    epsilon: T,
) -> Result<AffinityMatrix<T>> {
    affinity_with(d, epsilon, true)
}

/// `W[i][j] = exp(-D[i][j] / ε)`.
pub fn gaussian_affinity_unsquared<T: Scalar>(
    d: &DistanceMatrix<T>,
    epsilon: T,
) -> Result<AffinityMatrix<T>> {
    affinity_with(d, epsilon, false)
}

fn affinity_with<T: Scalar>(
    d: &DistanceMatrix<T>,
    epsilon: T,
    squared: bool,
) -> Result<AffinityMatrix<T>> {
    if !(epsilon > T::zero()) || !epsilon.is_finite() {
        return Err(Error::invalid_config(format!(
            "kernel scale must be positive, got {epsilon}"
        )));
    }
    let values = d.values.mapv(|v| {
        let a = if squared { v * v } else { v };
        (-a / epsilon).exp()
    });
    Ok(AffinityMatrix { values, epsilon })
}

/// `K = Q W` with `Q = diag(1 / row sums)`.
pub fn row_normalize<T: Scalar>(
    w: &AffinityMatrix<T>,
    provenance: Provenance,
) -> DiffusionOperator<T> {
    let q: Array1<T> = w
        .values
        .rows()
        .into_iter()
        .map(|r| T::one() / r.sum())
        .collect();
    let mut matrix = w.values.clone();
    for (mut row, qi) in matrix.rows_mut().into_iter().zip(q.iter()) {
        row.mapv_inplace(|v| v * *qi);
    }
    DiffusionOperator {
        matrix,
        normalization: Some(q),
        provenance,
    }
}
