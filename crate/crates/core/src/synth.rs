//! Synthetic Poisson data for round-trip tests.
//!
//! Random numbers come from ChaCha20 (`rand_chacha::ChaCha20Rng`) seeded with
//! `seed_from_u64(seed)`; sample `i` of a scan, or cell `4·a + b` of a
//! tomography grid, draws from stream `i` (`set_stream(i)`), so every value
//! depends only on `(seed, index)` and not on evaluation order.
//!
//! Poisson variates use sequential inversion below a mean of 30 and
//! Hörmann's transformed rejection (PTRS) above.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;
use thiserror::Error;

use crate::inference::{CoincidenceScan, InferenceError, ScanPoint};
use crate::optics::{pattern_curve, Channel, ModelError, PatternModel, PatternParams};
use crate::oracle::Plane;
use crate::tomography::{expected_counts, DensityMatrix2Q, TomoCounts, TomographyError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("invalid noise spec: {0}")]
    InvalidNoise(String),
    #[error("invalid request: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Scan(#[from] InferenceError),
    #[error(transparent)]
    Tomography(#[from] TomographyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub seed: u64,
    /// Counts/s added everywhere.
    pub background_rate: f64,
    /// Counts/s per unit pattern value.
    pub rate_scale: f64,
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<(), SynthError> {
        for (name, v) in [("background_rate", self.background_rate), ("rate_scale", self.rate_scale)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(SynthError::InvalidNoise(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        Ok(())
    }
}

/// Forward models available to the generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SynthModel {
    Interference,
    Image,
    MzH,
    MzV,
}

impl SynthModel {
    pub fn pattern(self) -> PatternModel {
        match self {
            SynthModel::Interference => PatternModel::Interference,
            SynthModel::Image => PatternModel::Image,
            SynthModel::MzH => PatternModel::Sorter(Channel::H),
            SynthModel::MzV => PatternModel::Sorter(Channel::V),
        }
    }

    pub fn plane(self) -> Plane {
        match self {
            SynthModel::Image => Plane::Image,
            _ => Plane::Focal,
        }
    }
}

/// Default counting time per scan point (s).
pub const DEFAULT_T_ACCUM: f64 = 30.0;
/// Default expected counts at the pattern maximum.
pub const DEFAULT_PEAK_COUNTS: f64 = 200.0;

/// `rate_scale` giving `peak_counts` expected counts at the pattern maximum
/// (sampled densely over the range of `xs`) after `t_accum` seconds.
pub fn calibrate_rate_scale(
    model: SynthModel,
    p: &PatternParams,
    xs: &[f64],
    peak_counts: f64,
    t_accum: f64,
) -> Result<f64, SynthError> {
    if xs.is_empty() || !(t_accum > 0.0) || !(peak_counts >= 0.0) {
        return Err(SynthError::InvalidInput("need points, t_accum > 0 and peak_counts >= 0".into()));
    }
    let (lo, hi) = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let dense: Vec<f64> = (0..4001).map(|i| lo + (hi - lo) * i as f64 / 4000.0).chain(xs.iter().cloned()).collect();
    let bare = PatternParams { background: 0.0, ..*p };
    let peak = pattern_curve(model.pattern(), &dense, &bare).into_iter().fold(0.0, f64::max);
    if !(peak > 0.0) {
        return Err(SynthError::InvalidInput("pattern vanishes over the scan range".into()));
    }
    Ok(peak_counts / (t_accum * peak))
}

fn stream_rng(seed: u64, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Poisson variate with the given mean.
pub fn poisson<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> u64 {
    if !(mean > 0.0) {
        return 0;
    }
    if mean < 30.0 {
        let mut k = 0u64;
        let mut p = (-mean).exp();
        let mut cdf = p;
        let u: f64 = rng.random();
        while u > cdf {
            k += 1;
            p *= mean / k as f64;
            cdf += p;
            if p == 0.0 && cdf < u {
                // rounding left the tail short of u
                break;
            }
        }
        return k;
    }
    let slam = mean.sqrt();
    let loglam = mean.ln();
    let b = 0.931 + 2.53 * slam;
    let a = -0.059 + 0.02483 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let vr = 0.9277 - 3.6224 / (b - 2.0);
    loop {
        let u: f64 = rng.random::<f64>() - 0.5;
        let v: f64 = rng.random();
        let us = 0.5 - u.abs();
        let k = ((2.0 * a / us + b) * u + mean + 0.43).floor();
        if us >= 0.07 && v <= vr {
            return k as u64;
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        if v.ln() + inv_alpha.ln() - (a / (us * us) + b).ln() <= -mean + k * loglam - ln_gamma(k + 1.0) {
            return k as u64;
        }
    }
}

/// Poisson coincidence scan around the closed-form pattern.
pub fn gen_pattern_data(
    model: SynthModel,
    p: &PatternParams,
    xs: &[f64],
    t_accum: f64,
    noise: &NoiseSpec,
) -> Result<CoincidenceScan, SynthError> {
    p.validate()?;
    noise.validate()?;
    if xs.is_empty() {
        return Err(SynthError::InvalidInput("no scan positions".into()));
    }
    if !(t_accum.is_finite() && t_accum > 0.0) {
        return Err(SynthError::InvalidInput(format!("t_accum {t_accum} must be > 0")));
    }
    let values = pattern_curve(model.pattern(), xs, p);
    let points: Vec<ScanPoint> = xs
        .par_iter()
        .zip(values.par_iter())
        .enumerate()
        .map(|(i, (&x, &v))| {
            let mean = t_accum * (noise.rate_scale * v + noise.background_rate);
            let mut rng = stream_rng(noise.seed, i as u64);
            ScanPoint { x, counts: poisson(&mut rng, mean), t_accum }
        })
        .collect();
    Ok(CoincidenceScan::new(points, model.plane(), Some(p.theta))?)
}

/// Poisson draws around [`expected_counts`], plus `background_rate` per cell;
/// `rate_scale` is unused.
pub fn gen_tomo_counts(rho: &DensityMatrix2Q, total: f64, noise: &NoiseSpec) -> Result<TomoCounts, SynthError> {
    noise.validate()?;
    let expected = expected_counts(rho, total)?;
    let mut counts = [[0u64; 4]; 4];
    for (a, row) in expected.iter().enumerate() {
        for (b, &mean) in row.iter().enumerate() {
            let mut rng = stream_rng(noise.seed, (4 * a + b) as u64);
            counts[a][b] = poisson(&mut rng, mean + noise.background_rate);
        }
    }
    Ok(TomoCounts { counts })
}
