//! Deterministic test signals and seeded Gaussian noise.
//!
//! Sample `i` (0-based) of a length-`n` signal sits at `t_i = (i + 0.5) / n`.
//! The named signals are rescaled to unit peak amplitude (`max |g| = 1`).
//!
//! * `heavysine`: `4 sin(4 pi t) - sgn(t - 0.3) - sgn(0.72 - t)`.
//! * `blocks`: `sum_j h_j K(t - t_j)` with `K(x) = 1` for `x >= 0` and `0`
//!   otherwise, jumps at `t_j = 0.10, 0.13, 0.15, 0.23, 0.25, 0.40, 0.44, 0.65,
//!   0.76, 0.78, 0.81` with heights `h_j = 4, -5, 3, -4, 5, -4.2, 2.1, 4.3,
//!   -3.1, 2.1, -4.2`.
//! * `pw_smooth`: a piecewise smooth stand-in with four jumps, see
//!   [`pw_smooth_value`].
//!
//! Randomness comes from `ChaCha8Rng::seed_from_u64(seed)`; normal variates use
//! the `rand_distr` ziggurat sampler for `StandardNormal`.

use std::f64::consts::PI;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::model::{validate_order, Partition, Signal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SignalKind {
    HeavySine,
    Blocks,
    PwSmooth,
}

impl FromStr for SignalKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "heavysine" => Ok(Self::HeavySine),
            "blocks" => Ok(Self::Blocks),
            "pw_smooth" => Ok(Self::PwSmooth),
            other => Err(Error::InvalidParameter(format!("unknown signal kind {other:?}"))),
        }
    }
}

const BLOCKS_T: [f64; 11] = [0.10, 0.13, 0.15, 0.23, 0.25, 0.40, 0.44, 0.65, 0.76, 0.78, 0.81];
const BLOCKS_H: [f64; 11] = [4.0, -5.0, 3.0, -4.0, 5.0, -4.2, 2.1, 4.3, -3.1, 2.1, -4.2];
const HEAVYSINE_T: [f64; 2] = [0.3, 0.72];
const PW_SMOOTH_T: [f64; 4] = [0.2, 0.45, 0.6, 0.8];

fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn heavysine_value(t: f64) -> f64 {
    4.0 * (4.0 * PI * t).sin() - sgn(t - 0.3) - sgn(0.72 - t)
}

fn blocks_value(t: f64) -> f64 {
    BLOCKS_T
        .iter()
        .zip(BLOCKS_H)
        .filter(|(tj, _)| t >= **tj)
        .map(|(_, h)| h)
        .sum()
}

/// Piecewise smooth stand-in signal on `[0, 1]`:
///
/// | interval      | value                         |
/// |---------------|-------------------------------|
/// | `[0, 0.2)`    | `0.5 + 10 t^2`                |
/// | `[0.2, 0.45)` | `-1 + 0.8 sin(8 pi t)`        |
/// | `[0.45, 0.6)` | `1.5`                         |
/// | `[0.6, 0.8)`  | `-0.5 + 6 (t - 0.6)`          |
/// | `[0.8, 1]`    | `-1.5 + 0.5 cos(6 pi t)`      |
pub fn pw_smooth_value(t: f64) -> f64 {
    if t < 0.2 {
        0.5 + 10.0 * t * t
    } else if t < 0.45 {
        -1.0 + 0.8 * (8.0 * PI * t).sin()
    } else if t < 0.6 {
        1.5
    } else if t < 0.8 {
        -0.5 + 6.0 * (t - 0.6)
    } else {
        -1.5 + 0.5 * (6.0 * PI * t).cos()
    }
}

fn abscissa(i: usize, n: usize) -> f64 {
    (i as f64 + 0.5) / n as f64
}

fn breakpoints(kind: SignalKind) -> &'static [f64] {
    match kind {
        SignalKind::HeavySine => &HEAVYSINE_T,
        SignalKind::Blocks => &BLOCKS_T,
        SignalKind::PwSmooth => &PW_SMOOTH_T,
    }
}

/// `n` samples of a named test signal.
pub fn generate(kind: SignalKind, n: usize) -> Result<Signal> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 samples, got {n}")));
    }
    let value = match kind {
        SignalKind::HeavySine => heavysine_value,
        SignalKind::Blocks => blocks_value,
        SignalKind::PwSmooth => pw_smooth_value,
    };
    let raw: Vec<f64> = (0..n).map(|i| value(abscissa(i, n))).collect();
    let peak = raw.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Signal::new(raw.into_iter().map(|v| v / peak).collect())
}

/// Ground-truth segmentation of a named signal: a new segment starts at the
/// first sample at or after each breakpoint.
pub fn true_partition(kind: SignalKind, n: usize) -> Result<Partition> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 samples, got {n}")));
    }
    let mut starts: Vec<usize> = breakpoints(kind)
        .iter()
        .filter_map(|&tb| (0..n).find(|&i| abscissa(i, n) >= tb).map(|i| i + 1))
        .filter(|&s| s >= 2)
        .collect();
    starts.dedup();
    Partition::from_starts(&starts, n)
}

/// Random piecewise polynomial of degree `k - 1` with jump probability `p`
/// per sample. On a segment of length `h` the polynomial
/// `sum_j X_j / (j + 1)^2 t^(j-1)`, `j = 1..=k`, `X_j ~ U[-1, 1]`, is sampled
/// at `t = 0, p, .., (h - 1) p`.
pub fn random_pw_poly(n: usize, p: f64, k: usize, seed: u64) -> Result<(Signal, Partition)> {
    if n == 0 {
        return Err(Error::EmptySignal);
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!("jump probability must be in (0, 1), got {p}")));
    }
    validate_order(k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut lengths = vec![1usize];
    for _ in 1..n {
        if rng.random::<f64>() < p {
            lengths.push(1);
        } else {
            *lengths.last_mut().expect("non-empty") += 1;
        }
    }

    let mut samples = Vec::with_capacity(n);
    for &h in &lengths {
        let coeffs: Vec<f64> = (1..=k)
            .map(|j| rng.random_range(-1.0..=1.0) / ((j + 1) * (j + 1)) as f64)
            .collect();
        for step in 0..h {
            let t = step as f64 * p;
            samples.push(coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c));
        }
    }
    Ok((Signal::new(samples)?, Partition::from_lengths(&lengths)?))
}

/// Adds i.i.d. Gaussian noise with standard deviation `eta * |g|_1 / N`.
pub fn add_noise(g: &Signal, eta: f64, seed: u64) -> Result<Signal> {
    if !(eta >= 0.0 && eta.is_finite()) {
        return Err(Error::InvalidParameter(format!("noise level must be non-negative, got {eta}")));
    }
    if eta == 0.0 {
        return Ok(g.clone());
    }
    let l1: f64 = g.as_slice().iter().map(|v| v.abs()).sum();
    if l1 == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let sigma = eta * l1 / g.len() as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let out = g
        .as_slice()
        .iter()
        .map(|v| v + sigma * rng.sample::<f64, _>(StandardNormal))
        .collect();
    Signal::new(out)
}
