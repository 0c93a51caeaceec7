use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::metrics::SYMBOLS;
use crate::error::{Error, Result};

const NARMA_ORDER: usize = 10;
const NARMA_RESTARTS: u64 = 64;

/// NARMA10 input and target. `y[k]` is the system output produced after
/// consuming `u[k]`, so it is predictable from `u[..=k]`. History before
/// `k = 0` is zero. A diverging realization (`|y| > 10`) is discarded and
/// the series redrawn from the next random stream.
pub fn narma10_generate(len: usize, seed: u64) -> Result<(Vec<f64>, Vec<f64>)> {
    for attempt in 0..NARMA_RESTARTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempt);
        let u: Vec<f64> = (0..len).map(|_| rng.random_range(0.0..0.5)).collect();
        if let Some(y) = narma10_response(&u) {
            return Ok((u, y));
        }
    }
    Err(Error::Stability { step: len })
}

/// Target series for a given input, or `None` on divergence.
pub fn narma10_response(u: &[f64]) -> Option<Vec<f64>> {
    let mut y = Vec::with_capacity(u.len());
    let mut prev = 0.0;
    for k in 0..u.len() {
        let sum: f64 = y[k.saturating_sub(NARMA_ORDER)..k].iter().sum();
        let lagged = if k + 1 >= NARMA_ORDER { u[k + 1 - NARMA_ORDER] } else { 0.0 };
        let next = 0.3 * prev + 0.05 * prev * sum + 1.5 * lagged * u[k] + 0.1;
        if !(next.abs() <= 10.0) {
            return None;
        }
        y.push(next);
        prev = next;
    }
    Some(y)
}

const CHANNEL_TAPS: [(isize, f64); 10] = [
    (2, 0.08),
    (1, -0.12),
    (0, 1.0),
    (-1, 0.18),
    (-2, -0.1),
    (-3, 0.091),
    (-4, -0.05),
    (-5, 0.04),
    (-6, 0.03),
    (-7, 0.01),
];

const SYMBOL_STREAM: u64 = 1;
const NOISE_STREAM: u64 = 2;

/// Noise-free channel output and the transmitted symbols. `d[k]` is the
/// symbol at time `k`; `clean[k]` mixes symbols `k - 7 ..= k + 2`.
pub fn channel_eq_clean(len: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(SYMBOL_STREAM);
    // 7 symbols of history before k = 0 and 2 of look-ahead past the end
    let padded: Vec<f64> = (0..len + 9).map(|_| SYMBOLS[rng.random_range(0..4)]).collect();
    let clean = (0..len)
        .map(|k| {
            let q: f64 = CHANNEL_TAPS
                .iter()
                .map(|&(off, c)| c * padded[(k as isize + 7 + off) as usize])
                .sum();
            q + 0.036 * q * q - 0.011 * q * q * q
        })
        .collect();
    (clean, padded[7..7 + len].to_vec())
}

/// Received signal and transmitted symbols at `snr_db`, with SNR measured
/// against the mean power of the noise-free output. The noise realization
/// depends only on the seed, so sweeps over SNR share it. An infinite SNR
/// gives the noise-free channel.
pub fn channel_eq_generate(len: usize, snr_db: f64, seed: u64) -> Result<(Vec<f64>, Vec<f64>)> {
    if snr_db.is_nan() {
        return Err(Error::Config("SNR is NaN".into()));
    }
    let (clean, d) = channel_eq_clean(len, seed);
    if snr_db == f64::INFINITY || len == 0 {
        return Ok((clean, d));
    }
    let power = clean.iter().map(|v| v * v).sum::<f64>() / len as f64;
    let sigma = (power / 10f64.powf(snr_db / 10.0)).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(NOISE_STREAM);
    let u = clean
        .iter()
        .map(|c| {
            let z: f64 = StandardNormal.sample(&mut rng);
            c + sigma * z
        })
        .collect();
    Ok((u, d))
}

/// Reads one value per line (blank lines skipped) and normalizes to zero
/// mean and unit variance.
pub fn santafe_load(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let input_err = |line: usize, msg: String| Error::Input {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut raw = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let v: f64 = t
            .parse()
            .map_err(|_| input_err(idx + 1, format!("`{t}` is not a number")))?;
        if !v.is_finite() {
            return Err(input_err(idx + 1, format!("`{t}` is not finite")));
        }
        raw.push(v);
    }
    if raw.is_empty() {
        return Err(input_err(0, "series is empty".into()));
    }
    let n = raw.len() as f64;
    let mean = raw.iter().sum::<f64>() / n;
    let std = (raw.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    if !(std > 0.0) {
        return Err(input_err(0, "series is constant".into()));
    }
    Ok(raw.iter().map(|v| (v - mean) / std).collect())
}

pub fn santafe_write(path: &Path, series: &[f64]) -> Result<()> {
    let mut out = String::new();
    for v in series {
        let _ = writeln!(out, "{v}");
    }
    std::fs::write(path, out).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
