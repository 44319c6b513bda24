//! Alternating diffusion between two sensors.

use crate::diffusion::{distance_from_power, matrix_power, stationary_distribution};
use crate::error::{Error, Result, StageContext};
use crate::kernels::{DiffusionOperator, DistanceKind, DistanceMatrix, Provenance};
use crate::scalar::Scalar;

/// `K^(m) K^(n)` for an ordered sensor pair.
#[derive(Debug, Clone)]
pub struct AdOperator<T> {
    pub operator: DiffusionOperator<T>,
    pub pair: (usize, usize),
}

pub fn ad_operator<T: Scalar>(
    k_m: &DiffusionOperator<T>,
    k_n: &DiffusionOperator<T>,
    pair: (usize, usize),
) -> Result<AdOperator<T>> {
    if k_m.n() != k_n.n() {
        return Err(Error::invalid_input(format!(
            "sensor {} has {} samples but sensor {} has {}",
            pair.0 + 1,
            k_m.n(),
            pair.1 + 1,
            k_n.n()
        )));
    }
    let matrix = k_m.matrix.dot(&k_n.matrix);
    Ok(AdOperator {
        operator: DiffusionOperator {
            matrix,
            normalization: None,
            provenance: Provenance::Alternating,
        },
        pair,
    })
}

/// Diffusion distance of the `t`-th power of the AD operator, weighted by
/// that operator's own stationary distribution.
pub fn ad_distance<T: Scalar>(a: &AdOperator<T>, t: u32) -> Result<DistanceMatrix<T>> {
    let ctx = || format!("alternating pair ({}, {})", a.pair.0 + 1, a.pair.1 + 1);
    let phi = stationary_distribution(&a.operator).stage(ctx)?;
    let at = matrix_power(&a.operator, t).stage(ctx)?;
    distance_from_power(&at, &phi, DistanceKind::Ad).stage(ctx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffusion::diffusion_distance;
    use approx::assert_abs_diff_eq;
    use ndarray::{array, Array2};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn stochastic(n: usize, seed: u64) -> DiffusionOperator<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = Array2::from_shape_fn((n, n), |_| rng.random::<f64>() + 0.05);
        for mut r in m.rows_mut() {
            let s = r.sum();
            r /= s;
        }
        DiffusionOperator::from_matrix(m, Provenance::SingleSensor).unwrap()
    }

    #[test]
    fn identity_partner_is_neutral() {
        let k = stochastic(4, 1);
        let id = DiffusionOperator::from_matrix(Array2::eye(4), Provenance::SingleSensor).unwrap();
        let a = ad_operator(&k, &id, (0, 1)).unwrap();
        assert_eq!(a.operator.matrix, k.matrix);
        assert_eq!(a.pair, (0, 1));
    }

    #[test]
    fn two_by_two_product() {
        let a = DiffusionOperator::from_matrix(
            array![[0.5, 0.5], [0.5, 0.5]],
            Provenance::SingleSensor,
        )
        .unwrap();
        let b = DiffusionOperator::from_matrix(Array2::eye(2), Provenance::SingleSensor).unwrap();
        let ad = ad_operator(&a, &b, (0, 1)).unwrap();
        assert_eq!(ad.operator.matrix, array![[0.5, 0.5], [0.5, 0.5]]);
    }

    #[test]
    fn product_matches_naive_loop() {
        let a = stochastic(3, 2);
        let b = stochastic(3, 3);
        let ad = ad_operator(&a, &b, (0, 1)).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let mut s = 0.0;
                for l in 0..3 {
                    s += a.matrix[[i, l]] * b.matrix[[l, j]];
                }
                assert_abs_diff_eq!(ad.operator.matrix[[i, j]], s, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn size_mismatch() {
        let e = ad_operator(&stochastic(3, 1), &stochastic(4, 1), (0, 1)).unwrap_err();
        assert!(matches!(e, Error::InvalidInput(_)));
    }

    #[test]
    fn same_sensor_collapses_to_squared_operator() {
        let k = stochastic(6, 4);
        let ad = ad_operator(&k, &k, (0, 0)).unwrap();
        let d_ad = ad_distance(&ad, 1).unwrap();
        let k2 = DiffusionOperator::from_matrix(k.matrix.dot(&k.matrix), Provenance::Alternating)
            .unwrap();
        let phi = stationary_distribution(&k2).unwrap();
        let d = diffusion_distance(&k2, 1, &phi).unwrap();
        assert_eq!(d_ad.kind, DistanceKind::Ad);
        for (x, y) in d_ad.values.iter().zip(d.values.iter()) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
    }

    #[test]
    fn order_matters_but_both_are_stochastic() {
        let a = stochastic(5, 5);
        let b = stochastic(5, 6);
        let ab = ad_operator(&a, &b, (0, 1)).unwrap();
        let ba = ad_operator(&b, &a, (1, 0)).unwrap();
        assert!(ab.operator.matrix != ba.operator.matrix);
        for m in [&ab.operator.matrix, &ba.operator.matrix] {
            for r in m.rows() {
                assert_abs_diff_eq!(r.sum(), 1.0, epsilon = 1e-12);
            }
        }
    }
}
