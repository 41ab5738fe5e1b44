//! Tactile-shell force calibration.
//!
//! Eight photointerrupters read the displacement of a spring-suspended
//! reflector plate. A linear map `C` (3 x 9, the last column a bias) takes
//! the readings back to the force on the shell and is fitted by least
//! squares against reference forces.

use alloc::vec::Vec;

use libm::{cos, sin, sqrt};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::CalibrationError;
use crate::lstsq::{self, Matrix};

pub const CHANNELS: usize = 8;
/// Readings plus the bias term.
pub const FEATURES: usize = CHANNELS + 1;

/// Paired sensor readings and reference force.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationSample {
    pub readings: [f64; CHANNELS],
    pub force: [f64; 3],
}

/// Linear forward model from shell force to photointerrupter counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorForwardModel {
    /// Unit displacement direction each channel responds to.
    pub sensitivity: [[f64; 3]; CHANNELS],
    /// Counts per metre of displacement along `sensitivity`.
    pub gain: [f64; CHANNELS],
    /// Rest reading [counts].
    pub offset: [f64; CHANNELS],
    /// Plate compliance per axis [m/N].
    pub compliance: [f64; 3],
    /// Reading noise standard deviation [counts].
    pub noise_sigma: f64,
}

impl SensorForwardModel {
    /// Four flat reflectors see only `z`; two tilted about `y` by `beta`
    /// see `x` and `z`; two tilted about `x` see `y` and `z`.
    pub fn with_tilt(beta: f64) -> Self {
        let (s, c) = (sin(beta), cos(beta));
        Self {
            sensitivity: [
                [0.0, 0.0, 1.0],
                [0.0, 0.0, 1.0],
                [0.0, 0.0, 1.0],
                [0.0, 0.0, 1.0],
                [s, 0.0, c],
                [-s, 0.0, c],
                [0.0, s, c],
                [0.0, -s, c],
            ],
            gain: [1.0e5; CHANNELS],
            offset: [512.0, 498.0, 530.0, 505.0, 470.0, 521.0, 489.0, 515.0],
            compliance: [2.0e-3, 2.0e-3, 1.0e-3],
            noise_sigma: 10.0,
        }
    }

    pub fn noiseless(mut self) -> Self {
        self.noise_sigma = 0.0;
        self
    }

    pub fn validate(&self) -> Result<(), CalibrationError> {
        for s in &self.sensitivity {
            let n = sqrt(s.iter().map(|x| x * x).sum());
            if (n - 1.0).abs() > 1e-12 {
                return Err(CalibrationError::InvalidModel("sensitivity vectors must be unit length"));
            }
        }
        if !self.compliance.iter().all(|c| c.is_finite() && *c > 0.0) {
            return Err(CalibrationError::InvalidModel("compliance must be positive"));
        }
        if !self.gain.iter().chain(&self.offset).all(|g| g.is_finite()) {
            return Err(CalibrationError::InvalidModel("gain and offset must be finite"));
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(CalibrationError::InvalidModel("noise_sigma must be non-negative"));
        }
        Ok(())
    }

    /// Counts per newton, `gain_j * s_j . (compliance o e_axis)`.
    pub fn response(&self) -> [[f64; 3]; CHANNELS] {
        let mut a = [[0.0; 3]; CHANNELS];
        for (j, row) in a.iter_mut().enumerate() {
            for (k, v) in row.iter_mut().enumerate() {
                *v = self.gain[j] * self.sensitivity[j][k] * self.compliance[k];
            }
        }
        a
    }

    /// Noise-free readings for a force.
    pub fn readings(&self, force: [f64; 3]) -> [f64; CHANNELS] {
        let a = self.response();
        let mut out = self.offset;
        for (j, r) in out.iter_mut().enumerate() {
            *r += (0..3).map(|k| a[j][k] * force[k]).sum::<f64>();
        }
        out
    }

    /// Per-axis force error that reading noise alone leaves in an unbiased
    /// linear estimate: `sigma * sqrt(diag((A^T A)^-1))`.
    pub fn force_noise_equivalent(&self) -> [f64; 3] {
        let a = self.response();
        let mut ata = [[0.0; 3]; 3];
        for row in &a {
            for i in 0..3 {
                for j in 0..3 {
                    ata[i][j] += row[i] * row[j];
                }
            }
        }
        let inv = invert3(&ata);
        [0, 1, 2].map(|i| self.noise_sigma * sqrt(inv[i][i]))
    }

    /// Least-squares decoder of the noise-free forward model: the `C` that
    /// maps `[readings; 1]` back to force with the offsets removed.
    pub fn ideal_decoder(&self) -> [[f64; FEATURES]; 3] {
        let a = self.response();
        let mut ata = [[0.0; 3]; 3];
        for row in &a {
            for i in 0..3 {
                for j in 0..3 {
                    ata[i][j] += row[i] * row[j];
                }
            }
        }
        let inv = invert3(&ata);
        let mut c = [[0.0; FEATURES]; 3];
        for k in 0..3 {
            for j in 0..CHANNELS {
                c[k][j] = (0..3).map(|i| inv[k][i] * a[j][i]).sum();
            }
            c[k][CHANNELS] = -(0..CHANNELS).map(|j| c[k][j] * self.offset[j]).sum::<f64>();
        }
        c
    }

    /// Rescale `noise_sigma` so the mean force-equivalent noise is `target` [N].
    pub fn with_force_noise(mut self, target: f64) -> Self {
        self.noise_sigma = 1.0;
        let eq = self.force_noise_equivalent();
        let mean = (eq[0] + eq[1] + eq[2]) / 3.0;
        self.noise_sigma = target / mean;
        self
    }
}

impl Default for SensorForwardModel {
    fn default() -> Self {
        Self::with_tilt(core::f64::consts::FRAC_PI_4)
    }
}

fn invert3(m: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let cof = |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
    let c = [
        [cof(1, 2, 1, 2), -cof(1, 2, 0, 2), cof(1, 2, 0, 1)],
        [-cof(0, 2, 1, 2), cof(0, 2, 0, 2), -cof(0, 2, 0, 1)],
        [cof(0, 1, 1, 2), -cof(0, 1, 0, 2), cof(0, 1, 0, 1)],
    ];
    let det = m[0][0] * c[0][0] + m[0][1] * c[0][1] + m[0][2] * c[0][2];
    let mut inv = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            inv[i][j] = c[j][i] / det;
        }
    }
    inv
}

/// Readings for each force under the forward model, with seeded Gaussian
/// reading noise.
pub fn synth_dataset(model: &SensorForwardModel, forces: &[[f64; 3]], seed: u64) -> Vec<CalibrationSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, model.noise_sigma).expect("validated noise sigma");
    forces
        .iter()
        .map(|&force| {
            let mut readings = model.readings(force);
            if model.noise_sigma > 0.0 {
                readings.iter_mut().for_each(|r| *r += noise.sample(&mut rng));
            }
            CalibrationSample { readings, force }
        })
        .collect()
}

/// Readings spread uniformly by `spread` counts about `centre`, labelled
/// with the forces an exact linear map `c` assigns them.
///
/// Forward-model data without noise only spans a rank-4 subspace of the
/// augmented readings, so exact-recovery checks need this construction.
pub fn synth_linear_dataset(
    c: &[[f64; FEATURES]; 3],
    centre: &[f64; CHANNELS],
    spread: f64,
    count: usize,
    seed: u64,
) -> Vec<CalibrationSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let readings = centre.map(|m| m + spread * rng.random_range(-1.0..=1.0));
            let force = c.map(|row| row[..CHANNELS].iter().zip(&readings).map(|(a, r)| a * r).sum::<f64>() + row[CHANNELS]);
            CalibrationSample { readings, force }
        })
        .collect()
}

/// Uniform random forces in `[-amplitude, amplitude]` per axis.
pub fn random_forces(count: usize, amplitude: [f64; 3], seed: u64) -> Vec<[f64; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| amplitude.map(|a| if a > 0.0 { rng.random_range(-a..=a) } else { 0.0 }))
        .collect()
}

/// Fitted readings-to-force map.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationModel {
    /// Row `k` maps `[readings; 1]` to force component `k`.
    pub c: [[f64; FEATURES]; 3],
    /// Training RMS error per axis [N].
    pub rms: [f64; 3],
    pub n_train: usize,
}

impl CalibrationModel {
    pub fn zero() -> Self {
        Self { c: [[0.0; FEATURES]; 3], rms: [0.0; 3], n_train: 0 }
    }
}

/// Least-squares fit of `C` minimising `sum ||C [r; 1] - f||^2`.
pub fn fit(data: &[CalibrationSample]) -> Result<CalibrationModel, CalibrationError> {
    let m = data.len();
    let degenerate = |rank| CalibrationError::DegenerateExcitation { rank, needed: FEATURES, samples: m };
    if m < FEATURES {
        return Err(degenerate(m));
    }
    let mut a = Matrix::zeros(m, FEATURES);
    let mut b = Matrix::zeros(m, 3);
    for (i, s) in data.iter().enumerate() {
        for (j, r) in s.readings.iter().enumerate() {
            a.set(i, j, *r);
        }
        a.set(i, CHANNELS, 1.0);
        for k in 0..3 {
            b.set(i, k, s.force[k]);
        }
    }
    let x = lstsq::solve(&a, &b).map_err(|e| degenerate(e.rank))?;
    let mut model = CalibrationModel::zero();
    for k in 0..3 {
        for j in 0..FEATURES {
            model.c[k][j] = x.get(j, k);
        }
    }
    model.n_train = m;
    model.rms = rms_error(&model, data)?;
    Ok(model)
}

/// `C [readings; 1]`.
pub fn apply(model: &CalibrationModel, readings: &[f64; CHANNELS]) -> [f64; 3] {
    model.c.map(|row| row[..CHANNELS].iter().zip(readings).map(|(c, r)| c * r).sum::<f64>() + row[CHANNELS])
}

/// Per-axis root-mean-square prediction error.
pub fn rms_error(model: &CalibrationModel, data: &[CalibrationSample]) -> Result<[f64; 3], CalibrationError> {
    if data.is_empty() {
        return Err(CalibrationError::Empty);
    }
    let mut acc = [0.0; 3];
    for s in data {
        let p = apply(model, &s.readings);
        for k in 0..3 {
            let e = p[k] - s.force[k];
            acc[k] += e * e;
        }
    }
    Ok(acc.map(|x| sqrt(x / data.len() as f64)))
}
