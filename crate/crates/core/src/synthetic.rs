//! The rotating-arrows benchmark and the frequency-modulated noise sensor.

use std::f64::consts::{PI, TAU};

use ndarray::{Array1, Array2, Axis};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fusion::{MultimodalDataset, SensitivityTable};
use crate::kernels::SampleMatrix;
use crate::linalg::orthonormalize_columns;
use crate::scalar::Scalar;

pub const IMAGE_HEIGHT: usize = 36;
pub const IMAGE_WIDTH: usize = 96;
pub const CHANNELS: usize = 3;
const CELL_WIDTH: usize = 32;
const BASIS_STREAM: u64 = 0xBA51_5000;

pub type Rgb = [f64; 3];

pub const RED: Rgb = [1.0, 0.0, 0.0];
pub const GREEN: Rgb = [0.0, 1.0, 0.0];
pub const BLUE: Rgb = [0.0, 0.0, 1.0];
pub const ORANGE: Rgb = [1.0, 0.5, 0.0];
pub const PURPLE: Rgb = [0.5, 0.0, 1.0];
pub const GRAY: Rgb = [0.5, 0.5, 0.5];

pub const COMMON_COLORS: [Rgb; 3] = [RED, GREEN, BLUE];
pub const NUISANCE_COLORS: [Rgb; 3] = [ORANGE, PURPLE, GRAY];

#[derive(Debug, Clone, PartialEq)]
pub struct ToyConfig {
    pub n: usize,
    pub image_height: usize,
    pub image_width: usize,
    pub channels: usize,
    pub d_proj: usize,
    pub seed: u64,
    pub arrow_length: f64,
    pub arrow_thickness: f64,
    pub sensitivity: SensitivityTable,
    pub include_noise_sensor: bool,
    pub noise_rate: f64,
    pub noise_window: usize,
    /// Generator stream of each hidden angle: θ¹, θ², θ³, n¹, n², n³.
    pub angle_streams: [u64; 6],
}

impl Default for ToyConfig {
    fn default() -> Self {
        Self {
            n: 500,
            image_height: IMAGE_HEIGHT,
            image_width: IMAGE_WIDTH,
            channels: CHANNELS,
            d_proj: 200,
            seed: 42,
            arrow_length: 14.0,
            arrow_thickness: 10.0,
            sensitivity: SensitivityTable::toy(),
            include_noise_sensor: false,
            noise_rate: 100.0,
            noise_window: 64,
            angle_streams: [0, 1, 2, 3, 4, 5],
        }
    }
}

impl ToyConfig {
    pub fn image_len(&self) -> usize {
        self.image_height * self.image_width * self.channels
    }

    pub fn validate(&self) -> Result<()> {
        if (self.image_height, self.image_width, self.channels)
            != (IMAGE_HEIGHT, IMAGE_WIDTH, CHANNELS)
        {
            return Err(Error::invalid_config(format!(
                "image must be {IMAGE_HEIGHT}x{IMAGE_WIDTH}x{CHANNELS}"
            )));
        }
        if self.n < 2 {
            return Err(Error::invalid_config(format!(
                "n must be >= 2, got {}",
                self.n
            )));
        }
        let j = self.image_len();
        if self.d_proj == 0 || self.d_proj > j {
            return Err(Error::invalid_config(format!(
                "d_proj must satisfy 1 <= d_proj <= J = {j}, got {}",
                self.d_proj
            )));
        }
        if !(self.arrow_length > 0.0 && self.arrow_length.is_finite()) {
            return Err(Error::invalid_config("arrow length must be positive"));
        }
        if !(self.arrow_thickness > 0.0 && self.arrow_thickness.is_finite()) {
            return Err(Error::invalid_config("arrow thickness must be positive"));
        }
        if !(self.noise_rate > 0.0 && self.noise_rate.is_finite()) {
            return Err(Error::invalid_config("noise sample rate must be positive"));
        }
        if self.noise_window == 0 {
            return Err(Error::invalid_config("noise window must be >= 1 sample"));
        }
        let s = &self.sensitivity;
        if s.n_variables() != 3 || s.n_sensors() != 3 {
            return Err(Error::invalid_config(
                "the arrow toy needs a 3x3 sensitivity table",
            ));
        }
        for m in 0..3 {
            let seen = (0..3).filter(|&k| s.observes(k, m)).count();
            if seen != 2 {
                return Err(Error::invalid_config(format!(
                    "sensor {} observes {seen} common angles; each sensor draws exactly 2",
                    m + 1
                )));
            }
        }
        Ok(())
    }
}

/// Which hidden variable an arrow shows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variable {
    Common(usize),
    Nuisance(usize),
}

impl Variable {
    pub fn name(self) -> String {
        match self {
            Variable::Common(k) => format!("theta{}", k + 1),
            Variable::Nuisance(m) => format!("n{}", m + 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ToyGroundTruth {
    /// N×3 common angles θ¹..θ³ in [0, 2π).
    pub common: Array2<f64>,
    /// N×3 sensor-specific angles n¹..n³ in [0, 2π).
    pub nuisance: Array2<f64>,
    pub sensitivity: SensitivityTable,
    /// Left-to-right arrows drawn by each sensor.
    pub assignment: Vec<[Variable; 3]>,
    /// Mean instantaneous frequency of the noise sensor in each window.
    pub noise_frequency: Option<Array1<f64>>,
}

impl ToyGroundTruth {
    pub fn angle(&self, v: Variable) -> Array1<f64> {
        match v {
            Variable::Common(k) => self.common.column(k).to_owned(),
            Variable::Nuisance(m) => self.nuisance.column(m).to_owned(),
        }
    }

    /// Named ground-truth columns in a fixed order.
    pub fn columns(&self) -> Vec<(String, Array1<f64>)> {
        let mut out = Vec::new();
        for k in 0..3 {
            out.push((Variable::Common(k).name(), self.angle(Variable::Common(k))));
        }
        for m in 0..3 {
            out.push((
                Variable::Nuisance(m).name(),
                self.angle(Variable::Nuisance(m)),
            ));
        }
        if let Some(phi) = &self.noise_frequency {
            out.push(("noise_freq".to_string(), phi.clone()));
        }
        out
    }
}

/// Uniform angle in [0, 2π) for sample `i` of stream `stream`.
///
/// Every draw is addressed by (seed, stream, sample) so streams are
/// independent and any sample can be regenerated on its own.
pub fn angle_draw(seed: u64, stream: u64, i: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.set_word_pos(2 * i as u128);
    let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    let a = u * TAU;
    if a >= TAU {
        0.0
    } else {
        a
    }
}

/// Six independent uniform angle streams: columns θ¹, θ², θ³, n¹, n², n³.
pub fn sample_angles(n: usize, seed: u64, streams: &[u64; 6]) -> Array2<f64> {
    let mut out = Array2::<f64>::zeros((n, 6));
    out.axis_iter_mut(Axis(0))
        .into_par_iter()
        .enumerate()
        .for_each(|(i, mut row)| {
            for v in 0..6 {
                row[v] = angle_draw(seed, streams[v], i);
            }
        });
    out
}

fn coverage(px: f64, py: f64, angle: f64, length: f64, thickness: f64) -> f64 {
    let (dx, dy) = (angle.cos(), -angle.sin());
    let t = (px * dx + py * dy).clamp(0.0, length);
    let d = (px - t * dx).hypot(py - t * dy);
    (thickness / 2.0 + 0.5 - d).clamp(0.0, 1.0)
}

/// Renders three arrows, one per 32-pixel cell, into a column-stacked
/// vector: pixel (row, col, channel) sits at `row + H (col + W channel)`.
pub fn render_snapshot(angles: [f64; 3], colors: [Rgb; 3], cfg: &ToyConfig) -> Array1<f64> {
    let (h, w) = (IMAGE_HEIGHT, IMAGE_WIDTH);
    let mut img = Array1::<f64>::zeros(h * w * CHANNELS);
    let cy = h as f64 / 2.0;
    for (cell, (&angle, color)) in angles.iter().zip(colors.iter()).enumerate() {
        let cx = (cell * CELL_WIDTH) as f64 + CELL_WIDTH as f64 / 2.0;
        for col in cell * CELL_WIDTH..(cell + 1) * CELL_WIDTH {
            for row in 0..h {
                let px = col as f64 + 0.5 - cx;
                let py = row as f64 + 0.5 - cy;
                let c = coverage(px, py, angle, cfg.arrow_length, cfg.arrow_thickness);
                if c > 0.0 {
                    for ch in 0..CHANNELS {
                        img[row + h * (col + w * ch)] = c * color[ch];
                    }
                }
            }
        }
    }
    img
}

/// J×D matrix with orthonormal columns from a seeded Gaussian draw.
pub fn random_projection_basis(j: usize, d: usize, seed: u64) -> Result<Array2<f64>> {
    if d == 0 || d > j {
        return Err(Error::invalid_config(format!(
            "projection dimension must satisfy 1 <= D <= J = {j}, got {d}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(BASIS_STREAM);
    let g = Array2::from_shape_fn((j, d), |_| rng.sample::<f64, _>(StandardNormal));
    orthonormalize_columns(g.view())
}

/// `s_i = Bᵀ r_i` for every image row, summed in pixel order.
pub fn observe(images: &Array2<f64>, basis: &Array2<f64>) -> Result<Array2<f64>> {
    if images.ncols() != basis.nrows() {
        return Err(Error::invalid_input(format!(
            "images have length {}, basis has {} rows",
            images.ncols(),
            basis.nrows()
        )));
    }
    let d = basis.ncols();
    let mut out = Array2::<f64>::zeros((images.nrows(), d));
    out.axis_iter_mut(Axis(0))
        .into_par_iter()
        .zip(images.axis_iter(Axis(0)))
        .for_each(|(mut o, img)| {
            // Exact zeros contribute nothing, so skipping them keeps the sum bit-identical.
            for (p, &v) in img.iter().enumerate() {
                if v != 0.0 {
                    let b = basis.row(p);
                    for k in 0..d {
                        o[k] += v * b[k];
                    }
                }
            }
        });
    Ok(out)
}

/// Instantaneous frequency `φ(τ) = 1/2 + 1/4 sin(2πτ / 5120)`.
pub fn noise_frequency(tau: f64) -> f64 {
    0.5 + 0.25 * (2.0 * PI * tau / 5120.0).sin()
}

/// `n(t) = sin(2π ∫₀ᵗ φ)` sampled at `rate_hz`, integrated by the trapezoid
/// rule, and cut into `n` consecutive windows of `window` samples.
///
/// Returns the windows and the mean of `φ` over each window.
pub fn noise_sensor_signal(
    n: usize,
    window: usize,
    rate_hz: f64,
) -> Result<(Array2<f64>, Array1<f64>)> {
    if !(rate_hz > 0.0) || !rate_hz.is_finite() {
        return Err(Error::invalid_config(format!(
            "sample rate must be positive, got {rate_hz}"
        )));
    }
    if window == 0 {
        return Err(Error::invalid_config("window must be >= 1 sample"));
    }
    let total = n * window;
    let dt = 1.0 / rate_hz;
    let mut signal = Array2::<f64>::zeros((n, window));
    let mut freq = Array1::<f64>::zeros(n);
    let mut integral = 0.0;
    let mut prev = noise_frequency(0.0);
    for k in 0..total {
        let phi = noise_frequency(k as f64 * dt);
        if k > 0 {
            integral += 0.5 * (prev + phi) * dt;
        }
        prev = phi;
        signal[[k / window, k % window]] = (TAU * integral).sin();
        freq[k / window] += phi;
    }
    freq /= window as f64;
    Ok((signal, freq))
}

/// Arrows drawn by each sensor: its two common angles, starting from the
/// one whose index matches the sensor and wrapping around, then its own
/// nuisance angle.
pub fn sensor_assignment(s: &SensitivityTable) -> Vec<[Variable; 3]> {
    let k = s.n_variables();
    (0..s.n_sensors())
        .map(|m| {
            let mut seen: Vec<usize> = (0..k).filter(|&v| s.observes(v, m)).collect();
            seen.sort_by_key(|&v| (v + k - m % k) % k);
            [
                Variable::Common(seen[0]),
                Variable::Common(seen[1]),
                Variable::Nuisance(m),
            ]
        })
        .collect()
}

fn color_of(v: Variable) -> Rgb {
    match v {
        Variable::Common(k) => COMMON_COLORS[k],
        Variable::Nuisance(m) => NUISANCE_COLORS[m],
    }
}

/// Rendered images of one sensor, N×J.
pub fn render_sensor(truth: &ToyGroundTruth, sensor: usize, cfg: &ToyConfig) -> Array2<f64> {
    let vars = truth.assignment[sensor];
    let colors = [color_of(vars[0]), color_of(vars[1]), color_of(vars[2])];
    let angles: Vec<Array1<f64>> = vars.iter().map(|v| truth.angle(*v)).collect();
    let n = truth.common.nrows();
    let mut images = Array2::<f64>::zeros((n, cfg.image_len()));
    images
        .axis_iter_mut(Axis(0))
        .into_par_iter()
        .enumerate()
        .for_each(|(i, mut row)| {
            row.assign(&render_snapshot(
                [angles[0][i], angles[1][i], angles[2][i]],
                colors,
                cfg,
            ));
        });
    images
}

/// Builds the three arrow sensors (plus the noise sensor when requested).
pub fn generate_toy_dataset<T: Scalar>(cfg: &ToyConfig) -> Result<MultimodalDataset<T>> {
    cfg.validate()?;
    let angles = sample_angles(cfg.n, cfg.seed, &cfg.angle_streams);
    let mut truth = ToyGroundTruth {
        common: angles.slice(ndarray::s![.., 0..3]).to_owned(),
        nuisance: angles.slice(ndarray::s![.., 3..6]).to_owned(),
        sensitivity: cfg.sensitivity.clone(),
        assignment: sensor_assignment(&cfg.sensitivity),
        noise_frequency: None,
    };
    let basis = random_projection_basis(cfg.image_len(), cfg.d_proj, cfg.seed)?;
    let mut sensors = Vec::with_capacity(4);
    for m in 0..3 {
        let images = render_sensor(&truth, m, cfg);
        let obs = observe(&images, &basis)?;
        sensors.push(SampleMatrix::new(
            obs.mapv(T::c),
            format!("sensor{}", m + 1),
        )?);
    }
    if cfg.include_noise_sensor {
        let (sig, freq) = noise_sensor_signal(cfg.n, cfg.noise_window, cfg.noise_rate)?;
        sensors.push(SampleMatrix::new(sig.mapv(T::c), "noise")?);
        truth.noise_frequency = Some(freq);
    }
    MultimodalDataset::new(sensors, Some(truth))
}

/// Two arrow sensors sharing one angle: sensor 1 draws (θ, n¹), sensor 2
/// draws (θ, n²), third cell blank.
///
/// Returns the dataset and an N×3 matrix of the angles θ, n¹, n².
pub fn generate_two_sensor_dataset<T: Scalar>(
    cfg: &ToyConfig,
) -> Result<(MultimodalDataset<T>, Array2<f64>)> {
    cfg.validate()?;
    let all = sample_angles(cfg.n, cfg.seed, &cfg.angle_streams);
    let angles = ndarray::stack![Axis(1), all.column(0), all.column(3), all.column(4)];
    let basis = random_projection_basis(cfg.image_len(), cfg.d_proj, cfg.seed)?;
    let blank = [0.0; 3];
    let mut sensors = Vec::with_capacity(2);
    for (m, nuisance_color) in [ORANGE, PURPLE].into_iter().enumerate() {
        let mut images = Array2::<f64>::zeros((cfg.n, cfg.image_len()));
        images
            .axis_iter_mut(Axis(0))
            .into_par_iter()
            .enumerate()
            .for_each(|(i, mut row)| {
                let a = [angles[[i, 0]], angles[[i, m + 1]], 0.0];
                row.assign(&render_snapshot(a, [RED, nuisance_color, blank], cfg));
            });
        let obs = observe(&images, &basis)?;
        sensors.push(SampleMatrix::new(
            obs.mapv(T::c),
            format!("sensor{}", m + 1),
        )?);
    }
    Ok((MultimodalDataset::new(sensors, None)?, angles))
}
