//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use manifuse::fusion::MultimodalDataset;
use manifuse::kernels::SampleMatrix;

pub fn gaussian(n: usize, d: usize, seed: u64) -> Array2<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Array2::from_shape_fn((n, d), |_| rng.sample::<f64, _>(StandardNormal))
}

/// Three sensors that share one latent coordinate and each add two private ones.
pub fn random_dataset(n: usize, seed: u64) -> MultimodalDataset<f64> {
    let z = gaussian(n, 4, seed);
    let sensors = (0..3)
        .map(|m| {
            let x = Array2::from_shape_fn((n, 3), |(i, c)| match c {
                0 => z[[i, 0]],
                1 => z[[i, 1 + m]],
                _ => z[[i, 1 + (m + 1) % 3]] * 0.5,
            });
            SampleMatrix::new(x, format!("s{m}")).unwrap()
        })
        .collect();
    MultimodalDataset::new(sensors, None).unwrap()
}

pub fn naive_matmul(a: &Array2<f64>, b: &Array2<f64>) -> Array2<f64> {
    let (n, k) = a.dim();
    let m = b.ncols();
    let mut c = Array2::zeros((n, m));
    for i in 0..n {
        for j in 0..m {
            let mut s = 0.0;
            for l in 0..k {
                s += a[[i, l]] * b[[l, j]];
            }
            c[[i, j]] = s;
        }
    }
    c
}

pub fn naive_power(k: &Array2<f64>, t: u32) -> Array2<f64> {
    let mut p = k.clone();
    for _ in 1..t {
        p = naive_matmul(&p, k);
    }
    p
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
pub fn solve(mut a: Array2<f64>, mut b: Array1<f64>) -> Array1<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[[i, col]].abs().total_cmp(&a[[j, col]].abs()))
            .unwrap();
        if piv != col {
            for c in 0..n {
                a.swap([col, c], [piv, c]);
            }
            b.swap(col, piv);
        }
        for r in col + 1..n {
            let f = a[[r, col]] / a[[col, col]];
            if f != 0.0 {
                for c in col..n {
                    a[[r, c]] -= f * a[[col, c]];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = Array1::zeros(n);
    for r in (0..n).rev() {
        let mut s = b[r];
        for c in r + 1..n {
            s -= a[[r, c]] * x[c];
        }
        x[r] = s / a[[r, r]];
    }
    x
}

/// Left eigenvector of a row-stochastic `K` for eigenvalue 1, normalized to
/// sum 1: `(Kᵀ − I) φ = 0` with the last equation replaced by `Σφ = 1`.
pub fn dense_stationary(k: &Array2<f64>) -> Array1<f64> {
    let n = k.nrows();
    let mut a = Array2::from_shape_fn((n, n), |(i, j)| k[[j, i]] - if i == j { 1.0 } else { 0.0 });
    a.row_mut(n - 1).fill(1.0);
    let mut b = Array1::zeros(n);
    b[n - 1] = 1.0;
    let mut x = solve(a.clone(), b.clone());
    // Two rounds of iterative refinement bring the solve to working precision.
    for _ in 0..2 {
        let r = &b - &a.dot(&x);
        x = x + solve(a.clone(), r);
    }
    x
}

/// Diffusion distance built by scaling the columns of `Kᵗ` by `φ₀^{-1/2}`
/// and taking Euclidean row distances.
pub fn scaled_row_distance(kt: &Array2<f64>, phi: &Array1<f64>) -> Array2<f64> {
    let n = kt.nrows();
    let m = Array2::from_shape_fn((n, n), |(i, l)| kt[[i, l]] / phi[l].sqrt());
    Array2::from_shape_fn((n, n), |(i, j)| {
        let mut s = 0.0;
        for l in 0..n {
            let d = m[[i, l]] - m[[j, l]];
            s += d * d;
        }
        s.sqrt()
    })
}

pub fn max_abs_diff(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
