//! Scoring embeddings against ground truth.

use std::f64::consts::TAU;

use ndarray::{Array1, Array2};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::kernels::DistanceMatrix;
use crate::linalg::least_squares;
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct RecoveryScore {
    pub variable_id: String,
    pub r_squared: f64,
    /// (1 + L) × targets, intercept first.
    pub coefficients: Array2<f64>,
    pub rank_deficient: bool,
}

fn design<T: Scalar>(coords: &Array2<T>) -> Array2<f64> {
    let (n, l) = coords.dim();
    let mut x = Array2::<f64>::ones((n, l + 1));
    for i in 0..n {
        for j in 0..l {
            x[[i, j + 1]] = coords[[i, j]].f64();
        }
    }
    x
}

fn pooled_r2<T: Scalar>(coords: &Array2<T>, y: Array2<f64>, id: &str) -> Result<RecoveryScore> {
    if coords.nrows() != y.nrows() {
        return Err(Error::invalid_input(format!(
            "embedding has {} rows but {id} has {} values",
            coords.nrows(),
            y.nrows()
        )));
    }
    let x = design(coords);
    let (b, rank_deficient) = least_squares(&x, &y)?;
    let fit = x.dot(&b);
    let mut sse = 0.0;
    let mut sst = 0.0;
    for (c, col) in y.columns().into_iter().enumerate() {
        let mean = col.mean().unwrap_or(0.0);
        for (i, v) in col.iter().enumerate() {
            sse += (v - fit[[i, c]]).powi(2);
            sst += (v - mean).powi(2);
        }
    }
    if !(sst > 0.0) {
        return Err(Error::invalid_input(format!("{id} is constant")));
    }
    Ok(RecoveryScore {
        variable_id: id.to_string(),
        r_squared: (1.0 - sse / sst).clamp(0.0, 1.0),
        coefficients: b,
        rank_deficient,
    })
}

/// OLS of (cos θ, sin θ) on the coordinates plus an intercept; R² pooled
/// over both targets.
pub fn angle_recovery_r2<T: Scalar>(
    coords: &Array2<T>,
    angle: &Array1<f64>,
    id: &str,
) -> Result<RecoveryScore> {
    let y = Array2::from_shape_fn((angle.len(), 2), |(i, c)| {
        if c == 0 {
            angle[i].cos()
        } else {
            angle[i].sin()
        }
    });
    pooled_r2(coords, y, id)
}

/// OLS of a scalar target on the coordinates plus an intercept.
pub fn scalar_recovery_r2<T: Scalar>(
    coords: &Array2<T>,
    target: &Array1<f64>,
    id: &str,
) -> Result<RecoveryScore> {
    let y = target.clone().insert_axis(ndarray::Axis(1));
    pooled_r2(coords, y, id)
}

/// Equal-width bins of [0, 2π).
pub fn quantize_angle(angle: &Array1<f64>, bins: usize) -> Vec<usize> {
    angle
        .iter()
        .map(|a| {
            let b = (a.rem_euclid(TAU) / TAU * bins as f64).floor() as usize;
            b.min(bins - 1)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnnConfig {
    pub k: usize,
    pub repeats: usize,
    pub train_fraction: f64,
    pub seed: u64,
}

impl Default for KnnConfig {
    fn default() -> Self {
        Self {
            k: 7,
            repeats: 10,
            train_fraction: 0.75,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationReport {
    pub classes: Vec<usize>,
    /// Mean per-class error over the repeats in which the class was tested.
    pub per_class_error: Vec<f64>,
    /// Mean over repeats of the prior-weighted error.
    pub total_error: f64,
    pub total_std: f64,
    pub repeat_errors: Vec<f64>,
    pub train_fraction: f64,
    pub k: usize,
}

/// k-NN vote. Ties go to the class with the smallest mean neighbour
/// distance, then to the smallest class id.
pub fn knn_predict<T: Scalar>(
    train: &Array2<T>,
    train_labels: &[usize],
    test: &Array2<T>,
    k: usize,
) -> Result<Vec<usize>> {
    if k == 0 {
        return Err(Error::invalid_config("k must be >= 1"));
    }
    if train.nrows() != train_labels.len() || train.nrows() == 0 {
        return Err(Error::invalid_input(
            "training coordinates and labels disagree",
        ));
    }
    if train.ncols() != test.ncols() {
        return Err(Error::invalid_input("train and test dimensions differ"));
    }
    let k = k.min(train.nrows());
    let n_classes = train_labels.iter().max().map_or(0, |m| m + 1);
    let mut out = Vec::with_capacity(test.nrows());
    let mut dists: Vec<(f64, usize)> = Vec::with_capacity(train.nrows());
    for q in test.rows() {
        dists.clear();
        for (j, r) in train.rows().into_iter().enumerate() {
            let mut s = 0.0;
            for (a, b) in q.iter().zip(r.iter()) {
                let d = a.f64() - b.f64();
                s += d * d;
            }
            dists.push((s.sqrt(), j));
        }
        dists.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut votes = vec![0usize; n_classes];
        let mut dsum = vec![0.0f64; n_classes];
        for &(d, j) in &dists[..k] {
            votes[train_labels[j]] += 1;
            dsum[train_labels[j]] += d;
        }
        let best = (0..n_classes)
            .filter(|&c| votes[c] > 0)
            .min_by(|&a, &b| {
                votes[b]
                    .cmp(&votes[a])
                    .then((dsum[a] / votes[a] as f64).total_cmp(&(dsum[b] / votes[b] as f64)))
                    .then(a.cmp(&b))
            })
            .expect("k >= 1");
        out.push(best);
    }
    Ok(out)
}

/// Repeated random train/test splits scored by k-NN.
pub fn knn_classify<T: Scalar>(
    coords: &Array2<T>,
    labels: &[usize],
    cfg: &KnnConfig,
) -> Result<ClassificationReport> {
    let n = coords.nrows();
    if labels.len() != n {
        return Err(Error::invalid_input(format!(
            "{} labels for {n} samples",
            labels.len()
        )));
    }
    if cfg.repeats == 0 || !(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0) {
        return Err(Error::invalid_config(
            "need repeats >= 1 and 0 < train fraction < 1",
        ));
    }
    let mut classes: Vec<usize> = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::invalid_input("labels must cover at least 2 classes"));
    }
    let n_train = ((n as f64) * cfg.train_fraction).round() as usize;
    if n_train == 0 || n_train >= n {
        return Err(Error::InvalidSplit(format!(
            "{n} samples cannot be split at {}",
            cfg.train_fraction
        )));
    }
    let n_classes = classes[classes.len() - 1] + 1;
    let mut class_err_sum = vec![0.0; n_classes];
    let mut class_err_cnt = vec![0usize; n_classes];
    let mut repeat_errors = Vec::with_capacity(cfg.repeats);

    for r in 0..cfg.repeats {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(r as u64);
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut rng);
        let (tr, te) = idx.split_at(n_train);
        let tr_labels: Vec<usize> = tr.iter().map(|&i| labels[i]).collect();
        for &c in &classes {
            if !tr_labels.contains(&c) {
                return Err(Error::InvalidSplit(format!(
                    "class {c} has no training samples in repeat {r}"
                )));
            }
        }
        let train = coords.select(ndarray::Axis(0), tr);
        let test = coords.select(ndarray::Axis(0), te);
        let pred = knn_predict(&train, &tr_labels, &test, cfg.k)?;
        let mut wrong = vec![0usize; n_classes];
        let mut count = vec![0usize; n_classes];
        for (p, &i) in pred.iter().zip(te.iter()) {
            count[labels[i]] += 1;
            if *p != labels[i] {
                wrong[labels[i]] += 1;
            }
        }
        let mut total = 0.0;
        for &c in &classes {
            if count[c] > 0 {
                let e = wrong[c] as f64 / count[c] as f64;
                class_err_sum[c] += e;
                class_err_cnt[c] += 1;
                total += e * count[c] as f64 / te.len() as f64;
            }
        }
        repeat_errors.push(total);
    }
    let mean = repeat_errors.iter().sum::<f64>() / repeat_errors.len() as f64;
    let var = repeat_errors
        .iter()
        .map(|e| (e - mean).powi(2))
        .sum::<f64>()
        / repeat_errors.len() as f64;
    Ok(ClassificationReport {
        per_class_error: classes
            .iter()
            .map(|&c| {
                if class_err_cnt[c] > 0 {
                    class_err_sum[c] / class_err_cnt[c] as f64
                } else {
                    0.0
                }
            })
            .collect(),
        classes,
        total_error: mean,
        total_std: var.sqrt(),
        repeat_errors,
        train_fraction: cfg.train_fraction,
        k: cfg.k,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TripleSampling {
    /// Exhaustive when N ≤ 60, otherwise 10⁵ random triples.
    Auto {
        seed: u64,
    },
    Exhaustive,
    Random {
        count: usize,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub n: usize,
    pub max_diagonal: f64,
    pub max_asymmetry: f64,
    pub asymmetry_at: Option<(usize, usize)>,
    pub min_entry: f64,
    pub min_entry_at: Option<(usize, usize)>,
    /// Largest `d(i,k) - d(i,j) - d(j,k)` over the checked triples.
    pub max_triangle_violation: f64,
    pub triangle_at: Option<(usize, usize, usize)>,
    pub triples_checked: u64,
}

impl MetricReport {
    /// Largest violation of any axiom.
    pub fn worst_violation(&self) -> f64 {
        self.max_diagonal
            .max(self.max_asymmetry)
            .max((-self.min_entry).max(0.0))
            .max(self.max_triangle_violation.max(0.0))
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.worst_violation() <= tol
    }
}

pub fn check_metric_properties<T: Scalar>(
    d: &DistanceMatrix<T>,
    sampling: TripleSampling,
) -> MetricReport {
    let n = d.n();
    let v = |i: usize, j: usize| d.values[[i, j]].f64();
    let mut rep = MetricReport {
        n,
        max_diagonal: 0.0,
        max_asymmetry: 0.0,
        asymmetry_at: None,
        min_entry: f64::INFINITY,
        min_entry_at: None,
        max_triangle_violation: f64::NEG_INFINITY,
        triangle_at: None,
        triples_checked: 0,
    };
    for i in 0..n {
        rep.max_diagonal = rep.max_diagonal.max(v(i, i).abs());
        for j in 0..n {
            let a = (v(i, j) - v(j, i)).abs();
            if a > rep.max_asymmetry {
                rep.max_asymmetry = a;
                rep.asymmetry_at = Some((i, j));
            }
            if v(i, j) < rep.min_entry {
                rep.min_entry = v(i, j);
                rep.min_entry_at = Some((i, j));
            }
        }
    }
    let check = |i: usize, j: usize, k: usize, rep: &mut MetricReport| {
        let viol = v(i, k) - v(i, j) - v(j, k);
        if viol > rep.max_triangle_violation {
            rep.max_triangle_violation = viol;
            rep.triangle_at = Some((i, j, k));
        }
        rep.triples_checked += 1;
    };
    let exhaustive = match sampling {
        TripleSampling::Exhaustive => true,
        TripleSampling::Auto { .. } => n <= 60,
        TripleSampling::Random { .. } => false,
    };
    if exhaustive {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    check(i, j, k, &mut rep);
                }
            }
        }
    } else if n > 0 {
        let (count, seed) = match sampling {
            TripleSampling::Random { count, seed } => (count, seed),
            TripleSampling::Auto { seed } => (100_000, seed),
            TripleSampling::Exhaustive => unreachable!(),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..count {
            let (i, j, k) = (
                rng.random_range(0..n),
                rng.random_range(0..n),
                rng.random_range(0..n),
            );
            check(i, j, k, &mut rep);
        }
    }
    if rep.triples_checked == 0 {
        rep.max_triangle_violation = 0.0;
    }
    rep
}
