//! Random instance generators.
//!
//! Randomness comes from ChaCha8 streams. Stream 0 of a seed drives the
//! dictionary and stream 1 the observation, so both can be regenerated
//! independently from the same seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{norm_sq, Dictionary, Weights};

const DICT_STREAM: u64 = 0;
const OBS_STREAM: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DictKind {
    /// i.i.d. standard normal entries.
    Gaussian,
    /// i.i.d. entries uniform on `[0, 1]`.
    Uniform,
    /// Shifted copies of a Gaussian bump.
    Toeplitz,
}

impl DictKind {
    pub fn name(self) -> &'static str {
        match self {
            DictKind::Gaussian => "gaussian",
            DictKind::Uniform => "uniform",
            DictKind::Toeplitz => "toeplitz",
        }
    }
}

impl std::str::FromStr for DictKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" => Ok(DictKind::Gaussian),
            "uniform" => Ok(DictKind::Uniform),
            "toeplitz" => Ok(DictKind::Toeplitz),
            other => Err(Error::InvalidArgument(format!("unknown dictionary kind {other:?}"))),
        }
    }
}

/// SplitMix64 finalizer, used to derive per-trial seeds from the master seed.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of trial `trial` under `master_seed`.
pub fn trial_seed(master_seed: u64, trial: u64) -> u64 {
    splitmix64(master_seed ^ trial)
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Default Toeplitz bump width, `m / 20`.
pub fn default_toeplitz_width(m: usize) -> f64 {
    m as f64 / 20.0
}

/// Draws an `m × n` dictionary with unit-norm columns.
pub fn gen_dictionary(kind: DictKind, m: usize, n: usize, seed: u64) -> Result<Dictionary> {
    gen_dictionary_with_width(kind, m, n, seed, default_toeplitz_width(m))
}

/// As [`gen_dictionary`] with an explicit Toeplitz bump width `σ`.
pub fn gen_dictionary_with_width(kind: DictKind, m: usize, n: usize, seed: u64, width: f64) -> Result<Dictionary> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidArgument(format!(
            "dictionary dimensions must be positive, got {m} x {n}"
        )));
    }
    let mut r = rng(seed, DICT_STREAM);
    let data: Vec<f64> = match kind {
        DictKind::Gaussian => (0..m * n).map(|_| StandardNormal.sample(&mut r)).collect(),
        DictKind::Uniform => {
            let u = Uniform::new_inclusive(0.0, 1.0).expect("valid range");
            (0..m * n).map(|_| u.sample(&mut r)).collect()
        }
        DictKind::Toeplitz => {
            if !(width > 0.0) {
                return Err(Error::InvalidArgument(format!("Toeplitz width must be positive, got {width}")));
            }
            let mut data = Vec::with_capacity(m * n);
            for j in 0..n {
                // centers equally spaced over [1, m]
                let mu = if n == 1 {
                    0.5 * (1.0 + m as f64)
                } else {
                    1.0 + (m as f64 - 1.0) * j as f64 / (n as f64 - 1.0)
                };
                data.extend((1..=m).map(|i| (-(i as f64 - mu).powi(2) / (2.0 * width * width)).exp()));
            }
            data
        }
    };
    Dictionary::from_col_major(m, n, data)
}

/// Observation drawn uniformly on the unit sphere of `R^m`.
pub fn gen_observation(m: usize, seed: u64) -> Result<Vec<f64>> {
    if m == 0 {
        return Err(Error::InvalidArgument("observation dimension must be positive".into()));
    }
    let mut r = rng(seed, OBS_STREAM);
    loop {
        let mut y: Vec<f64> = (0..m).map(|_| StandardNormal.sample(&mut r)).collect();
        let norm = norm_sq(&y).sqrt();
        if norm > 0.0 {
            y.iter_mut().for_each(|v| *v /= norm);
            return Ok(y);
        }
    }
}

/// OSCAR weights `w_k = β₁ + β₂ (n − k)` with `w_1 = 1` and `w_n = w_last`.
pub fn oscar_weights(n: usize, w_last: f64) -> Result<Weights> {
    if !(w_last > 0.0 && w_last <= 1.0) {
        return Err(Error::InvalidArgument(format!("OSCAR w_last must lie in (0, 1], got {w_last}")));
    }
    if n < 2 {
        return Err(Error::InvalidArgument(format!("OSCAR weights need n >= 2, got {n}")));
    }
    let beta1 = w_last;
    let beta2 = (1.0 - w_last) / (n as f64 - 1.0);
    let mut w: Vec<f64> = (1..=n).map(|k| beta1 + beta2 * (n - k) as f64).collect();
    // pin the endpoints against roundoff
    w[0] = 1.0;
    w[n - 1] = w_last;
    Weights::new(w)
}

/// The three OSCAR sequences used throughout the experiments, by smallest
/// weight: OSCAR-1 = 0.9, OSCAR-2 = 0.1, OSCAR-3 = 1e-3.
pub const OSCAR_W_LAST: [f64; 3] = [0.9, 0.1, 1e-3];
