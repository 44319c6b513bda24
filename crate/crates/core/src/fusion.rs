//! Common-graph fusion, the Mahalanobis union, and the concatenation and
//! multiplication baselines.

use std::collections::BTreeMap;

use ndarray::{concatenate, Array2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::alternating::{ad_distance, ad_operator, AdOperator};
use crate::diffusion::{
    diffusion_embedding, eigen_moduli, embed, spectral_decompose, spectral_gap, Embedding,
    Truncation,
};
use crate::error::{Error, Result, StageContext};
use crate::kernels::{
    euclidean_distance_matrix, gaussian_affinity, gaussian_affinity_unsquared, local_covariances,
    mahalanobis_distance_matrix, median_scale, median_scale_unsquared, row_normalize,
    DiffusionOperator, DistanceKind, DistanceMatrix, Provenance, SampleMatrix, Shrinkage,
};
use crate::linalg::orthonormalize_columns;
use crate::scalar::Scalar;
use crate::synthetic::ToyGroundTruth;

/// Binary K×M table: entry (k, m) is 1 when sensor m observes variable k.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SensitivityTable {
    s: Array2<u8>,
}

impl SensitivityTable {
    pub fn new(s: Array2<u8>) -> Result<Self> {
        if s.nrows() == 0 || s.ncols() < 2 {
            return Err(Error::invalid_config(format!(
                "sensitivity table must have at least one variable and two sensors, got {}x{}",
                s.nrows(),
                s.ncols()
            )));
        }
        if s.iter().any(|v| *v > 1) {
            return Err(Error::invalid_config(
                "sensitivity table entries must be 0 or 1",
            ));
        }
        for (k, row) in s.rows().into_iter().enumerate() {
            let seen: u32 = row.iter().map(|v| *v as u32).sum();
            if seen < 2 {
                return Err(Error::invalid_config(format!(
                    "common variable {k} is observed by {seen} sensor(s); at least 2 required"
                )));
            }
        }
        Ok(Self { s })
    }

    /// The three-arrow table: θ¹ in sensors 1 and 3, θ² in 1 and 2, θ³ in 2 and 3.
    pub fn toy() -> Self {
        let st = ndarray::array![[1u8, 1, 0], [0, 1, 1], [1, 0, 1]];
        Self {
            s: st.t().to_owned(),
        }
    }

    pub fn matrix(&self) -> &Array2<u8> {
        &self.s
    }

    pub fn n_variables(&self) -> usize {
        self.s.nrows()
    }

    pub fn n_sensors(&self) -> usize {
        self.s.ncols()
    }

    pub fn observes(&self, variable: usize, sensor: usize) -> bool {
        self.s[[variable, sensor]] == 1
    }
}

/// M aligned sensors sharing the same N samples.
#[derive(Debug, Clone)]
pub struct MultimodalDataset<T> {
    pub sensors: Vec<SampleMatrix<T>>,
    pub ground_truth: Option<ToyGroundTruth>,
}

impl<T: Scalar> MultimodalDataset<T> {
    pub fn new(
        sensors: Vec<SampleMatrix<T>>,
        ground_truth: Option<ToyGroundTruth>,
    ) -> Result<Self> {
        if sensors.len() < 2 {
            return Err(Error::invalid_input(format!(
                "fusion needs at least 2 sensors, got {}",
                sensors.len()
            )));
        }
        let n = sensors[0].n_samples();
        for s in &sensors {
            if s.n_samples() != n {
                return Err(Error::invalid_input(format!(
                    "sensor {} has {} samples, expected {n}",
                    s.sensor_id(),
                    s.n_samples()
                )));
            }
        }
        Ok(Self {
            sensors,
            ground_truth,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.sensors[0].n_samples()
    }

    pub fn n_sensors(&self) -> usize {
        self.sensors.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnionVariant {
    DistanceSum,
    MahalanobisUnion,
}

/// Whether the common kernel exponentiates `d²/ε` or `d/ε`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnionExponent {
    Squared,
    Unsquared,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SensorMetric {
    Euclidean,
    Mahalanobis,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MahalanobisConfig {
    pub k_nn: usize,
    pub shrinkage: Shrinkage,
    /// Defaults to `min(D, k_nn - 1)`.
    pub rank: Option<usize>,
}

impl Default for MahalanobisConfig {
    fn default() -> Self {
        Self {
            k_nn: 16,
            shrinkage: Shrinkage::default(),
            rank: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FusionConfig {
    pub t: u32,
    /// One multiplier for every sensor, or one per sensor.
    pub sensor_multipliers: Vec<f64>,
    pub union_multiplier: f64,
    pub sensor_metric: SensorMetric,
    pub pair_truncation: Truncation,
    pub final_truncation: Truncation,
    pub union: UnionVariant,
    pub union_exponent: UnionExponent,
    pub projection_dim: Option<usize>,
    pub mahalanobis: MahalanobisConfig,
    pub seed: u64,
}

impl Default for FusionConfig {
    fn default() -> Self {
        Self {
            t: 1,
            sensor_multipliers: vec![1.0],
            union_multiplier: 1.0,
            sensor_metric: SensorMetric::Euclidean,
            pair_truncation: Truncation::default(),
            final_truncation: Truncation::Fixed(15),
            union: UnionVariant::DistanceSum,
            union_exponent: UnionExponent::Squared,
            projection_dim: None,
            mahalanobis: MahalanobisConfig::default(),
            seed: 42,
        }
    }
}

impl FusionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.t == 0 {
            return Err(Error::invalid_config("diffusion time t must be >= 1"));
        }
        if self.sensor_multipliers.is_empty()
            || self
                .sensor_multipliers
                .iter()
                .any(|m| !(*m > 0.0) || !m.is_finite())
        {
            return Err(Error::invalid_config(
                "sensor scale multipliers must be positive",
            ));
        }
        if !(self.union_multiplier > 0.0) || !self.union_multiplier.is_finite() {
            return Err(Error::invalid_config(
                "union scale multiplier must be positive",
            ));
        }
        for tr in [self.pair_truncation, self.final_truncation] {
            match tr {
                Truncation::Fixed(0) | Truncation::SpectralGap { l_max: 0 } => {
                    return Err(Error::invalid_config("embedding dimension must be >= 1"))
                }
                _ => {}
            }
        }
        if self.projection_dim == Some(0) {
            return Err(Error::invalid_config("projection dimension must be >= 1"));
        }
        if self.mahalanobis.k_nn < 2 {
            return Err(Error::invalid_config("k_nn must be >= 2"));
        }
        Ok(())
    }

    /// Scale multiplier for sensor `sensor` of `m`.
    pub fn multiplier(&self, sensor: usize, m: usize) -> Result<f64> {
        match self.sensor_multipliers.len() {
            1 => Ok(self.sensor_multipliers[0]),
            len if len == m => Ok(self.sensor_multipliers[sensor]),
            len => Err(Error::invalid_config(format!(
                "{len} sensor multipliers given for {m} sensors"
            ))),
        }
    }
}

/// Single-sensor Markov operator: metric, median scale, Gaussian kernel,
/// row normalization.
pub fn sensor_operator<T: Scalar>(
    s: &SampleMatrix<T>,
    multiplier: f64,
    metric: SensorMetric,
    maha: &MahalanobisConfig,
) -> Result<DiffusionOperator<T>> {
    let d = match metric {
        SensorMetric::Euclidean => euclidean_distance_matrix(s)?,
        SensorMetric::Mahalanobis => {
            let rank = maha.rank.unwrap_or(s.dim().min(maha.k_nn - 1));
            let c = local_covariances(s, maha.k_nn, maha.shrinkage, rank)?;
            mahalanobis_distance_matrix(s, &c)?
        }
    };
    let eps = median_scale(&d, multiplier)?;
    let w = gaussian_affinity(&d, eps)?;
    Ok(row_normalize(&w, Provenance::SingleSensor))
}

pub fn sensor_operators<T: Scalar>(
    data: &MultimodalDataset<T>,
    cfg: &FusionConfig,
) -> Result<Vec<DiffusionOperator<T>>> {
    cfg.validate()?;
    let m = data.n_sensors();
    (0..m)
        .into_par_iter()
        .map(|i| {
            let mult = cfg.multiplier(i, m)?;
            sensor_operator(&data.sensors[i], mult, cfg.sensor_metric, &cfg.mahalanobis)
                .stage(|| format!("sensor {}", i + 1))
        })
        .collect()
}

/// All M(M−1) ordered alternating-diffusion operators, keyed by 0-based pair.
pub fn ad_operators<T: Scalar>(
    ops: &[DiffusionOperator<T>],
) -> Result<BTreeMap<(usize, usize), AdOperator<T>>> {
    let pairs = ordered_pairs(ops.len());
    let built: Result<Vec<_>> = pairs
        .par_iter()
        .map(|&(a, b)| {
            ad_operator(&ops[a], &ops[b], (a, b))
                .stage(|| format!("pair ({}, {})", a + 1, b + 1))
                .map(|op| ((a, b), op))
        })
        .collect();
    Ok(built?.into_iter().collect())
}

pub fn ordered_pairs(m: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(m * m.saturating_sub(1));
    for a in 0..m {
        for b in 0..m {
            if a != b {
                out.push((a, b));
            }
        }
    }
    out
}

/// Sum of the AD distances over every ordered pair of `m` sensors.
pub fn union_distance_sum<T: Scalar>(
    pair_distances: &BTreeMap<(usize, usize), DistanceMatrix<T>>,
    m: usize,
) -> Result<DistanceMatrix<T>> {
    if m < 2 {
        return Err(Error::invalid_input("union needs at least 2 sensors"));
    }
    let mut acc: Option<Array2<T>> = None;
    for pair in ordered_pairs(m) {
        let d = pair_distances.get(&pair).ok_or_else(|| {
            Error::invalid_input(format!(
                "missing distance for pair ({}, {})",
                pair.0 + 1,
                pair.1 + 1
            ))
        })?;
        match &mut acc {
            None => acc = Some(d.values.clone()),
            Some(a) => {
                if a.dim() != d.values.dim() {
                    return Err(Error::invalid_input(format!(
                        "pair ({}, {}) has shape {:?}, expected {:?}",
                        pair.0 + 1,
                        pair.1 + 1,
                        d.values.dim(),
                        a.dim()
                    )));
                }
                *a += &d.values;
            }
        }
    }
    Ok(DistanceMatrix {
        values: acc.expect("m >= 2"),
        kind: DistanceKind::Common,
    })
}

/// Gaussian kernel on the union distance, row normalized.
pub fn common_kernel<T: Scalar>(
    d_union: &DistanceMatrix<T>,
    epsilon_u: T,
    exponent: UnionExponent,
) -> Result<DiffusionOperator<T>> {
    let w = match exponent {
        UnionExponent::Squared => gaussian_affinity(d_union, epsilon_u)?,
        UnionExponent::Unsquared => gaussian_affinity_unsquared(d_union, epsilon_u)?,
    };
    Ok(row_normalize(&w, Provenance::Common))
}

/// Union distance under the configured variant.
pub fn union_distance<T: Scalar>(
    data: &MultimodalDataset<T>,
    cfg: &FusionConfig,
) -> Result<DistanceMatrix<T>> {
    let ops = sensor_operators(data, cfg)?;
    let ads = ad_operators(&ops)?;
    match cfg.union {
        UnionVariant::DistanceSum => {
            let dists: Result<Vec<_>> = ads
                .par_iter()
                .map(|(pair, a)| ad_distance(a, cfg.t).map(|d| (*pair, d)))
                .collect();
            let dists: BTreeMap<_, _> = dists?.into_iter().collect();
            union_distance_sum(&dists, data.n_sensors())
        }
        UnionVariant::MahalanobisUnion => mahalanobis_union(&ads, data.n_sensors(), cfg),
    }
}

/// Embedding of the common diffusion operator.
pub fn common_graph<T: Scalar>(
    data: &MultimodalDataset<T>,
    cfg: &FusionConfig,
) -> Result<Embedding<T>> {
    let d = union_distance(data, cfg)?;
    let source = match cfg.union {
        UnionVariant::DistanceSum => "common-graph",
        UnionVariant::MahalanobisUnion => "common-graph-mahalanobis",
    };
    embed_union(&d, cfg, source)
}

/// Re-kernelize a union distance and embed it.
pub fn embed_union<T: Scalar>(
    d: &DistanceMatrix<T>,
    cfg: &FusionConfig,
    source: &str,
) -> Result<Embedding<T>> {
    let eps = match cfg.union_exponent {
        UnionExponent::Squared => median_scale(d, cfg.union_multiplier),
        UnionExponent::Unsquared => median_scale_unsquared(d, cfg.union_multiplier),
    }
    .stage(|| "union kernel scale".to_string())?;
    let k = common_kernel(d, eps, cfg.union_exponent)?;
    diffusion_embedding(&k, cfg.t, cfg.final_truncation, source)
        .stage(|| "common embedding".to_string())
}

/// Concatenate spectrally truncated per-pair AD embeddings and measure a
/// locally whitened distance between the concatenated vectors.
pub fn mahalanobis_union<T: Scalar>(
    ads: &BTreeMap<(usize, usize), AdOperator<T>>,
    m: usize,
    cfg: &FusionConfig,
) -> Result<DistanceMatrix<T>> {
    let pairs = ordered_pairs(m);
    for p in &pairs {
        if !ads.contains_key(p) {
            return Err(Error::invalid_input(format!(
                "missing AD operator for pair ({}, {})",
                p.0 + 1,
                p.1 + 1
            )));
        }
    }
    let blocks: Result<Vec<Array2<T>>> = pairs
        .par_iter()
        .map(|p| {
            let a = &ads[p];
            pair_embedding(a, cfg.t, cfg.pair_truncation)
                .map(|e| e.coordinates)
                .stage(|| format!("pair ({}, {})", p.0 + 1, p.1 + 1))
        })
        .collect();
    let blocks = blocks?;
    let views: Vec<_> = blocks.iter().map(|b| b.view()).collect();
    let mut x = concatenate(Axis(1), &views)
        .map_err(|e| Error::invalid_input(format!("cannot concatenate pair embeddings: {e}")))?;

    if let Some(r) = cfg.projection_dim {
        if r < x.ncols() {
            x = x.dot(&projection(x.ncols(), r, cfg.seed)?);
        }
    }
    let n = x.nrows();
    let dim = x.ncols();
    let concat = SampleMatrix::new(x, "union")?;
    let k_nn = cfg.mahalanobis.k_nn.min(n - 1);
    let rank = cfg.mahalanobis.rank.unwrap_or(dim.min(k_nn - 1)).min(dim);
    let c = local_covariances(&concat, k_nn, cfg.mahalanobis.shrinkage, rank)?;
    let mut d = mahalanobis_distance_matrix(&concat, &c)?;
    d.kind = DistanceKind::Common;
    Ok(d)
}

fn projection<T: Scalar>(from: usize, to: usize, seed: u64) -> Result<Array2<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0x5052_4f4a);
    let g = Array2::from_shape_fn((from, to), |_| T::c(rng.sample::<f64, _>(StandardNormal)));
    orthonormalize_columns(g.view())
}

/// Embedding of one AD operator.
pub fn pair_embedding<T: Scalar>(
    a: &AdOperator<T>,
    t: u32,
    truncation: Truncation,
) -> Result<Embedding<T>> {
    let source = format!("ad:{}-{}", a.pair.0 + 1, a.pair.1 + 1);
    let n = a.operator.n();
    match truncation {
        Truncation::Fixed(l) => {
            let e = spectral_decompose(&a.operator, (l + 1).min(n))?;
            embed(&e, t, l.min(n - 1), &source)
        }
        Truncation::SpectralGap { l_max } => {
            let e = spectral_decompose(&a.operator, (l_max + 2).min(n))?;
            let l = spectral_gap(&eigen_moduli(&e), l_max);
            embed(&e, t, l, &source)
        }
    }
}

/// Diffusion map of a single sensor using the first scale multiplier.
pub fn diffusion_map<T: Scalar>(s: &SampleMatrix<T>, cfg: &FusionConfig) -> Result<Embedding<T>> {
    cfg.validate()?;
    let k = sensor_operator(
        s,
        cfg.sensor_multipliers[0],
        cfg.sensor_metric,
        &cfg.mahalanobis,
    )?;
    diffusion_embedding(
        &k,
        cfg.t,
        cfg.final_truncation,
        &format!("dm:{}", s.sensor_id()),
    )
}

/// Diffusion map of sensor `i` (0-based) with its own scale multiplier.
pub fn sensor_diffusion_map<T: Scalar>(
    data: &MultimodalDataset<T>,
    i: usize,
    cfg: &FusionConfig,
) -> Result<Embedding<T>> {
    cfg.validate()?;
    let s = data
        .sensors
        .get(i)
        .ok_or_else(|| Error::invalid_config(format!("no sensor {}", i + 1)))?;
    let mult = cfg.multiplier(i, data.n_sensors())?;
    let k = sensor_operator(s, mult, cfg.sensor_metric, &cfg.mahalanobis)
        .stage(|| format!("sensor {}", i + 1))?;
    diffusion_embedding(
        &k,
        cfg.t,
        cfg.final_truncation,
        &format!("dm:{}", s.sensor_id()),
    )
}

/// AD embedding of the ordered pair `(a, b)` (0-based).
pub fn alternating_embedding<T: Scalar>(
    data: &MultimodalDataset<T>,
    pair: (usize, usize),
    cfg: &FusionConfig,
) -> Result<Embedding<T>> {
    let m = data.n_sensors();
    if pair.0 >= m || pair.1 >= m || pair.0 == pair.1 {
        return Err(Error::invalid_config(format!(
            "invalid sensor pair ({}, {}) for {m} sensors",
            pair.0 + 1,
            pair.1 + 1
        )));
    }
    let ops = sensor_operators(data, cfg)?;
    let a = ad_operator(&ops[pair.0], &ops[pair.1], pair)?;
    pair_embedding(&a, cfg.t, cfg.pair_truncation)
        .stage(|| format!("pair ({}, {})", pair.0 + 1, pair.1 + 1))
}

/// Diffusion map of the per-sample concatenation of all sensors.
///
/// Each sensor block is divided by the square root of its median squared
/// pairwise distance so that no sensor dominates by scale alone.
pub fn concatenation_baseline<T: Scalar>(
    data: &MultimodalDataset<T>,
    cfg: &FusionConfig,
) -> Result<Embedding<T>> {
    cfg.validate()?;
    let blocks: Result<Vec<Array2<T>>> = data
        .sensors
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let d = euclidean_distance_matrix(s)?;
            let scale = median_scale(&d, 1.0)
                .stage(|| format!("sensor {}", i + 1))?
                .sqrt();
            Ok(s.data().mapv(|v| v / scale))
        })
        .collect();
    let blocks = blocks?;
    let views: Vec<_> = blocks.iter().map(|b| b.view()).collect();
    let x = concatenate(Axis(1), &views)
        .map_err(|e| Error::invalid_input(format!("cannot concatenate sensors: {e}")))?;
    let s = SampleMatrix::new(x, "concat")?;
    let k = sensor_operator(
        &s,
        cfg.sensor_multipliers[0],
        cfg.sensor_metric,
        &cfg.mahalanobis,
    )?;
    diffusion_embedding(&k, cfg.t, cfg.final_truncation, "concat")
}

/// Diffusion map of `K^(1) K^(2) ⋯ K^(M)`.
pub fn multiplication_baseline<T: Scalar>(
    data: &MultimodalDataset<T>,
    cfg: &FusionConfig,
) -> Result<Embedding<T>> {
    let ops = sensor_operators(data, cfg)?;
    let mut prod = ops[0].matrix.clone();
    for op in &ops[1..] {
        prod = prod.dot(&op.matrix);
    }
    let k = DiffusionOperator {
        matrix: prod,
        normalization: None,
        provenance: Provenance::Alternating,
    };
    diffusion_embedding(&k, cfg.t, cfg.final_truncation, "mult")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    fn dist(v: Array2<f64>) -> DistanceMatrix<f64> {
        DistanceMatrix {
            values: v,
            kind: DistanceKind::Ad,
        }
    }

    #[test]
    fn toy_table() {
        let t = SensitivityTable::toy();
        assert_eq!(t.matrix().t(), array![[1u8, 1, 0], [0, 1, 1], [1, 0, 1]]);
        for k in 0..3 {
            assert_eq!(t.matrix().row(k).iter().map(|v| *v as u32).sum::<u32>(), 2);
        }
        assert!(t.observes(0, 0) && t.observes(0, 2) && !t.observes(0, 1));
    }

    #[test]
    fn table_rejects_unshared_variable() {
        assert!(SensitivityTable::new(array![[1u8, 0, 0]]).is_err());
        assert!(SensitivityTable::new(array![[1u8, 2]]).is_err());
        assert!(SensitivityTable::new(array![[1u8, 1]]).is_ok());
    }

    #[test]
    fn two_sensor_union_is_both_orders() {
        let a = array![[0.0, 1.0], [1.0, 0.0]];
        let b = array![[0.0, 2.5], [2.5, 0.0]];
        let mut map = BTreeMap::new();
        map.insert((0, 1), dist(a));
        map.insert((1, 0), dist(b));
        let u = union_distance_sum(&map, 2).unwrap();
        assert_eq!(u.values[[0, 1]], 3.5);
        assert_eq!(u.kind, DistanceKind::Common);
    }

    #[test]
    fn missing_pair_is_an_error() {
        let mut map = BTreeMap::new();
        map.insert((0, 1), dist(Array2::zeros((2, 2))));
        assert!(matches!(
            union_distance_sum(&map, 2),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn zero_union_gives_uniform_kernel() {
        let d = DistanceMatrix {
            values: Array2::<f64>::zeros((4, 4)),
            kind: DistanceKind::Common,
        };
        let k = common_kernel(&d, 1.0, UnionExponent::Squared).unwrap();
        assert!(k.matrix.iter().all(|v| (*v - 0.25).abs() < 1e-15));
        assert!(common_kernel(&d, 0.0, UnionExponent::Squared).is_err());
    }

    #[test]
    fn single_pair_at_scale_gives_inverse_e() {
        let d = DistanceMatrix {
            values: array![[0.0, 2.0], [2.0, 0.0]],
            kind: DistanceKind::Common,
        };
        let eps = 4.0;
        let w = gaussian_affinity(&d, eps).unwrap();
        assert_abs_diff_eq!(w.values[[0, 1]], (-1.0f64).exp(), epsilon = 1e-15);
        let k = common_kernel(&d, eps, UnionExponent::Squared).unwrap();
        let e = (-1.0f64).exp();
        assert_abs_diff_eq!(k.matrix[[0, 1]], e / (1.0 + e), epsilon = 1e-15);
        let ku = common_kernel(&d, 2.0, UnionExponent::Unsquared).unwrap();
        assert_abs_diff_eq!(ku.matrix[[0, 1]], e / (1.0 + e), epsilon = 1e-15);
    }

    #[test]
    fn config_validation() {
        let mut c = FusionConfig::default();
        assert!(c.validate().is_ok());
        c.t = 0;
        assert!(c.validate().is_err());
        let c = FusionConfig {
            union_multiplier: -1.0,
            ..FusionConfig::default()
        };
        assert!(c.validate().is_err());
        let c = FusionConfig {
            sensor_multipliers: vec![1.0, 2.0],
            ..FusionConfig::default()
        };
        assert!(c.multiplier(0, 3).is_err());
        assert_eq!(c.multiplier(1, 2).unwrap(), 2.0);
    }

    #[test]
    fn pairs_are_ordered_and_complete() {
        assert_eq!(
            ordered_pairs(3),
            vec![(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)]
        );
    }

    #[test]
    fn dataset_rejects_mismatched_sensors() {
        let a = SampleMatrix::new(Array2::<f64>::zeros((3, 2)), "a").unwrap();
        let b = SampleMatrix::new(Array2::<f64>::zeros((4, 2)), "b").unwrap();
        assert!(MultimodalDataset::new(vec![a.clone(), b], None).is_err());
        assert!(MultimodalDataset::new(vec![a], None).is_err());
    }
}
