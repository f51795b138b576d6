//! Reconstruction and segmentation quality measures.

use crate::error::{Error, Result};
use crate::model::{Partition, Signal};

/// Relative error `|u - g|_2 / |g|_2`.
pub fn rel_l2_error(u: &Signal, g: &Signal) -> Result<f64> {
    if u.len() != g.len() {
        return Err(Error::LengthMismatch {
            expected: g.len(),
            actual: u.len(),
        });
    }
    let norm = g.norm_sq().sqrt();
    if norm == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let diff: f64 = u
        .as_slice()
        .iter()
        .zip(g.as_slice())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(diff.sqrt() / norm)
}

fn pairs(n: usize) -> f64 {
    let n = n as f64;
    n * (n - 1.0) / 2.0
}

/// Rand index: fraction of sample pairs on which both partitions agree
/// (together in both, or separated in both).
///
/// Overlaps of contiguous segments are counted with a single merge pass.
pub fn rand_index(a: &Partition, b: &Partition) -> Result<f64> {
    let n = a.domain_len();
    if b.domain_len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: b.domain_len(),
        });
    }
    if n < 2 {
        return Err(Error::InvalidParameter("rand index needs at least two samples".into()));
    }

    let together_a: f64 = a.iter().map(|s| pairs(s.len())).sum();
    let together_b: f64 = b.iter().map(|s| pairs(s.len())).sum();

    let mut together_both = 0.0;
    let (sa, sb) = (a.segments(), b.segments());
    let (mut i, mut j) = (0, 0);
    while i < sa.len() && j < sb.len() {
        let lo = sa[i].left.max(sb[j].left);
        let hi = sa[i].right.min(sb[j].right);
        if hi >= lo {
            together_both += pairs(hi + 1 - lo);
        }
        if sa[i].right <= sb[j].right {
            i += 1;
        } else {
            j += 1;
        }
    }

    let total = pairs(n);
    let disagree = together_a + together_b - 2.0 * together_both;
    Ok((total - disagree) / total)
}
