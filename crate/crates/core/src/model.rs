//! Domain types and direct evaluation of the segmentation functional.
//!
//! Public indices are 1-based and inclusive: a [`Segment`] `{ left: 1, right: 3 }`
//! covers the first three samples. [`Segment::range`] is the only place where
//! they are turned into 0-based slice ranges.

use std::ops::Range;

use crate::error::{Error, Result};

/// Largest supported order `k`.
pub const MAX_ORDER: usize = 16;

/// A finite, non-empty sequence of samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal(Vec<f64>);

impl Signal {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySignal);
        }
        if let Some((index, &value)) = samples.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFiniteSample {
                index: index + 1,
                value,
            });
        }
        Ok(Self(samples))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Sample at 1-based position `index`.
    pub fn at(&self, index: usize) -> f64 {
        self.0[index - 1]
    }

    /// Samples of a segment.
    pub fn segment(&self, seg: Segment) -> &[f64] {
        &self.0[seg.range()]
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for Signal {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for Signal {
    type Error = Error;

    fn try_from(samples: Vec<f64>) -> Result<Self> {
        Self::new(samples)
    }
}

/// Discrete interval `[left, right]`, 1-based and inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Segment {
    pub left: usize,
    pub right: usize,
}

impl Segment {
    pub fn new(left: usize, right: usize) -> Self {
        Self { left, right }
    }

    pub fn len(&self) -> usize {
        self.right + 1 - self.left
    }

    pub fn is_empty(&self) -> bool {
        self.right < self.left
    }

    /// 0-based half-open range for slicing.
    pub fn range(&self) -> Range<usize> {
        self.left - 1..self.right
    }
}

/// Ordered cover of `1..=N` by contiguous segments.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    segments: Vec<Segment>,
}

impl Partition {
    /// Validates that `segments` tile `1..=n` left to right.
    pub fn new(segments: Vec<Segment>, n: usize) -> Result<Self> {
        let mut next = 1;
        for (i, seg) in segments.iter().enumerate() {
            if seg.left != next {
                return Err(Error::InvalidPartition(format!(
                    "segment {} starts at {} but {} was expected",
                    i + 1,
                    seg.left,
                    next
                )));
            }
            if seg.right < seg.left {
                return Err(Error::InvalidPartition(format!(
                    "segment {} is empty ({}..{})",
                    i + 1,
                    seg.left,
                    seg.right
                )));
            }
            next = seg.right + 1;
        }
        if next != n + 1 || n == 0 {
            return Err(Error::InvalidPartition(format!(
                "segments cover 1..{} but the signal has length {}",
                next - 1,
                n
            )));
        }
        Ok(Self { segments })
    }

    /// Builds a partition from segment lengths.
    pub fn from_lengths(lengths: &[usize]) -> Result<Self> {
        let mut segments = Vec::with_capacity(lengths.len());
        let mut left = 1;
        for &len in lengths {
            if len == 0 {
                return Err(Error::InvalidPartition("zero-length segment".into()));
            }
            segments.push(Segment::new(left, left + len - 1));
            left += len;
        }
        Self::new(segments, left - 1)
    }

    /// Builds a partition from the 1-based start indices of every segment but the first.
    pub fn from_starts(starts: &[usize], n: usize) -> Result<Self> {
        let mut segments = Vec::with_capacity(starts.len() + 1);
        let mut left = 1;
        for &s in starts {
            if s <= left || s > n {
                return Err(Error::InvalidPartition(format!(
                    "segment start {s} is not increasing within 2..={n}"
                )));
            }
            segments.push(Segment::new(left, s - 1));
            left = s;
        }
        segments.push(Segment::new(left, n));
        Self::new(segments, n)
    }

    pub fn single(n: usize) -> Self {
        Self {
            segments: vec![Segment::new(1, n)],
        }
    }

    pub fn singletons(n: usize) -> Self {
        Self {
            segments: (1..=n).map(|i| Segment::new(i, i)).collect(),
        }
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Number of segments, `|I|`.
    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Length of the covered domain.
    pub fn domain_len(&self) -> usize {
        self.segments.last().map_or(0, |s| s.right)
    }

    /// Start indices of all segments except the first.
    pub fn starts(&self) -> Vec<usize> {
        self.segments.iter().skip(1).map(|s| s.left).collect()
    }

    /// Segment label (0-based) of every sample.
    pub fn labels(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.domain_len());
        for (i, seg) in self.segments.iter().enumerate() {
            out.extend(std::iter::repeat_n(i, seg.len()));
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = &Segment> {
        self.segments.iter()
    }
}

/// Order `k`, elasticity `beta` and segment penalty `gamma`.
///
/// `beta = f64::INFINITY` selects the Potts model: every segment is fitted by a
/// polynomial of degree at most `k - 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub k: usize,
    pub beta: f64,
    pub gamma: f64,
}

impl ModelParams {
    pub fn new(k: usize, beta: f64, gamma: f64) -> Result<Self> {
        let p = Self { k, beta, gamma };
        p.validate()?;
        Ok(p)
    }

    pub fn potts(k: usize, gamma: f64) -> Result<Self> {
        Self::new(k, f64::INFINITY, gamma)
    }

    pub fn validate(&self) -> Result<()> {
        validate_order(self.k)?;
        validate_beta(self.beta)?;
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gamma must be positive and finite, got {}",
                self.gamma
            )));
        }
        Ok(())
    }

    pub fn is_potts(&self) -> bool {
        self.beta == f64::INFINITY
    }

    /// Weight `beta^(2k)` of the smoothness term.
    pub fn smoothness_weight(&self) -> f64 {
        self.beta.powi(2 * self.k as i32)
    }
}

pub(crate) fn validate_order(k: usize) -> Result<()> {
    if k == 0 || k > MAX_ORDER {
        return Err(Error::InvalidParameter(format!(
            "order k must be in 1..={MAX_ORDER}, got {k}"
        )));
    }
    Ok(())
}

pub(crate) fn validate_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && !beta.is_nan() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "beta must be positive or infinite, got {beta}"
        )))
    }
}

/// Result of a global minimization.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub partition: Partition,
    pub estimate: Signal,
    /// Optimal functional value.
    pub energy: f64,
    /// Number of incremental error updates performed.
    pub num_error_updates: u64,
}

/// Coefficients of the k-th order difference stencil, i.e. the k-fold
/// convolution of `(-1, 1)` with itself.
pub fn difference_stencil(k: usize) -> Result<Vec<f64>> {
    validate_order(k)?;
    let mut coeffs: Vec<i64> = vec![1];
    for _ in 0..k {
        let mut next = vec![0i64; coeffs.len() + 1];
        for (i, &c) in coeffs.iter().enumerate() {
            next[i] -= c;
            next[i + 1] += c;
        }
        coeffs = next;
    }
    Ok(coeffs.into_iter().map(|c| c as f64).collect())
}

/// k-th order finite differences of `v`; the output has `v.len() - k` entries.
pub fn kth_difference(v: &[f64], k: usize) -> Result<Vec<f64>> {
    let stencil = difference_stencil(k)?;
    if v.len() <= k {
        return Err(Error::IntervalTooShort { len: v.len(), k });
    }
    Ok(v.windows(k + 1)
        .map(|w| w.iter().zip(&stencil).map(|(x, c)| x * c).sum())
        .collect())
}

/// Evaluates data, smoothness and complexity terms for a given estimate and
/// partition. In Potts mode the smoothness term is skipped; `u` is assumed to
/// be piecewise polynomial.
pub fn functional_value(f: &Signal, u: &Signal, part: &Partition, params: &ModelParams) -> Result<f64> {
    params.validate()?;
    if f.len() != u.len() {
        return Err(Error::LengthMismatch {
            expected: f.len(),
            actual: u.len(),
        });
    }
    Partition::new(part.segments().to_vec(), f.len())?;

    let data: f64 = f
        .as_slice()
        .iter()
        .zip(u.as_slice())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();

    let mut smooth = 0.0;
    if !params.is_potts() {
        for seg in part.iter() {
            if seg.len() > params.k {
                let d = kth_difference(u.segment(*seg), params.k)?;
                smooth += d.iter().map(|x| x * x).sum::<f64>();
            }
        }
        smooth *= params.smoothness_weight();
    }

    Ok(data + smooth + params.gamma * part.len() as f64)
}
