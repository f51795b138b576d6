//! Slow reference implementations for testing.
//!
//! Nothing here is used by [`crate::dp::solve`]. [`eps_dense`] builds the full
//! least-squares system and orthogonalizes it with Householder reflections, so
//! it shares no elimination code with the incremental engine.
//! [`eps_moments`] is the cumulative-moment method that is known to lose
//! accuracy for higher orders; it exists to demonstrate that loss.

use crate::error::{Error, Result};
use crate::model::{difference_stencil, validate_beta, validate_order, ModelParams, Partition, Signal, SolveResult};
use crate::reconstruct::reconstruct;

/// Largest signal accepted by [`solve_exhaustive`].
pub const MAX_EXHAUSTIVE_LEN: usize = 15;

/// Highest order accepted by [`Moments`].
pub const MAX_MOMENT_ORDER: usize = 4;

fn check_interval(f: &Signal, l: usize, r: usize) -> Result<()> {
    if l == 0 || l > r {
        return Err(Error::IndexOutOfRange { index: l, len: f.len() });
    }
    if r > f.len() {
        return Err(Error::IndexOutOfRange { index: r, len: f.len() });
    }
    Ok(())
}

/// Residual sum of squares of the dense least-squares problem `min |A x - y|`,
/// via Householder QR. `a` is row-major with `cols` columns.
fn householder_residual(mut a: Vec<f64>, cols: usize, mut y: Vec<f64>) -> f64 {
    let rows = y.len();
    debug_assert_eq!(a.len(), rows * cols);
    for j in 0..cols.min(rows) {
        let norm = (j..rows).map(|i| a[i * cols + j].powi(2)).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if a[j * cols + j] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (j..rows).map(|i| a[i * cols + j]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for c in j..cols {
            let dot: f64 = (j..rows).map(|i| v[i - j] * a[i * cols + c]).sum();
            let scale = 2.0 * dot / vnorm2;
            for i in j..rows {
                a[i * cols + c] -= scale * v[i - j];
            }
        }
        let dot: f64 = (j..rows).map(|i| v[i - j] * y[i]).sum();
        let scale = 2.0 * dot / vnorm2;
        for i in j..rows {
            y[i] -= scale * v[i - j];
        }
    }
    y[cols.min(rows)..].iter().map(|x| x * x).sum()
}

/// Approximation error `E^{l:r}` (1-based, inclusive) by a dense solve.
///
/// `beta = f64::INFINITY` gives the polynomial error of degree `k - 1`. The
/// polynomial basis uses abscissas rescaled to `[-1, 1]`.
pub fn eps_dense(f: &Signal, l: usize, r: usize, k: usize, beta: f64) -> Result<f64> {
    validate_order(k)?;
    validate_beta(beta)?;
    check_interval(f, l, r)?;
    let data = &f.as_slice()[l - 1..r];
    let m = data.len();
    if m <= k {
        return Ok(0.0);
    }

    if beta.is_infinite() {
        let half = (m as f64 - 1.0) / 2.0;
        let mut a = Vec::with_capacity(m * k);
        for i in 0..m {
            let t = (i as f64 - half) / half;
            let mut p = 1.0;
            for _ in 0..k {
                a.push(p);
                p *= t;
            }
        }
        Ok(householder_residual(a, k, data.to_vec()))
    } else {
        let stencil = difference_stencil(k)?;
        let scale = beta.powi(k as i32);
        let rows = 2 * m - k;
        let mut a = vec![0.0; rows * m];
        for i in 0..m {
            a[i * m + i] = 1.0;
        }
        for d in 0..m - k {
            for (t, c) in stencil.iter().enumerate() {
                a[(m + d) * m + d + t] = scale * c;
            }
        }
        let mut y = data.to_vec();
        y.resize(rows, 0.0);
        Ok(householder_residual(a, m, y))
    }
}

/// Cumulative sums of `n^j` and `n^j f_n` over absolute abscissas `n = 1..=N`.
#[derive(Debug, Clone)]
pub struct Moments {
    k: usize,
    /// `pow[j][n] = sum_{i <= n} i^j`, `j < 2k - 1`.
    pow: Vec<Vec<f64>>,
    /// `wf[j][n] = sum_{i <= n} i^j f_i`, `j < k`.
    wf: Vec<Vec<f64>>,
    sq: Vec<f64>,
}

impl Moments {
    pub fn new(f: &Signal, k: usize) -> Result<Self> {
        validate_order(k)?;
        if k > MAX_MOMENT_ORDER {
            return Err(Error::InvalidParameter(format!("moment method supports k <= {MAX_MOMENT_ORDER}, got {k}")));
        }
        let n = f.len();
        let mut pow = vec![vec![0.0; n + 1]; 2 * k - 1];
        let mut wf = vec![vec![0.0; n + 1]; k];
        let mut sq = vec![0.0; n + 1];
        for i in 1..=n {
            let x = i as f64;
            let fi = f.at(i);
            let mut p = 1.0;
            for (j, col) in pow.iter_mut().enumerate() {
                col[i] = col[i - 1] + p;
                if j < k {
                    wf[j][i] = wf[j][i - 1] + p * fi;
                }
                p *= x;
            }
            sq[i] = sq[i - 1] + fi * fi;
        }
        Ok(Self { k, pow, wf, sq })
    }

    /// `E^{l:r}` from the closed-form solution of the normal equations,
    /// `sum f^2 - b^T adj(M) b / det(M)`. May be negative through rounding.
    pub fn eps(&self, l: usize, r: usize) -> Result<f64> {
        let k = self.k;
        let n = self.sq.len() - 1;
        if l == 0 || l > r || r > n {
            return Err(Error::IndexOutOfRange { index: r, len: n });
        }
        if r + 1 - l <= k {
            return Ok(0.0);
        }
        let range = |v: &Vec<f64>| v[r] - v[l - 1];
        let m: Vec<Vec<f64>> = (0..k)
            .map(|i| (0..k).map(|j| range(&self.pow[i + j])).collect())
            .collect();
        let b: Vec<f64> = (0..k).map(|i| range(&self.wf[i])).collect();

        let det = determinant(&m);
        if det == 0.0 || !det.is_finite() {
            return Err(Error::SingularSystem { left: l, right: r });
        }
        let mut quad = 0.0;
        for i in 0..k {
            for j in 0..k {
                quad += b[i] * cofactor(&m, j, i) * b[j];
            }
        }
        Ok(range(&self.sq) - quad / det)
    }
}

fn minor(m: &[Vec<f64>], row: usize, col: usize) -> Vec<Vec<f64>> {
    m.iter()
        .enumerate()
        .filter(|(i, _)| *i != row)
        .map(|(_, r)| r.iter().enumerate().filter(|(j, _)| *j != col).map(|(_, v)| *v).collect())
        .collect()
}

/// Laplace expansion along the first row.
fn determinant(m: &[Vec<f64>]) -> f64 {
    match m.len() {
        0 => 1.0,
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        n => (0..n).map(|j| m[0][j] * cofactor(m, 0, j)).sum(),
    }
}

fn cofactor(m: &[Vec<f64>], row: usize, col: usize) -> f64 {
    let sign = if (row + col).is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * determinant(&minor(m, row, col))
}

/// Polynomial error `E^{l:r}` from precomputed moments.
pub fn eps_moments(f: &Signal, l: usize, r: usize, k: usize) -> Result<f64> {
    check_interval(f, l, r)?;
    Moments::new(f, k)?.eps(l, r)
}

/// Global minimizer by enumerating all `2^(N-1)` partitions.
///
/// Ties go to the lexicographically smallest list of segment starts.
pub fn solve_exhaustive(f: &Signal, params: &ModelParams) -> Result<SolveResult> {
    params.validate()?;
    let n = f.len();
    if n > MAX_EXHAUSTIVE_LEN {
        return Err(Error::TooLong {
            len: n,
            max: MAX_EXHAUSTIVE_LEN,
        });
    }

    let mut eps = vec![vec![0.0; n + 1]; n + 1];
    for l in 1..=n {
        for r in l..=n {
            eps[l][r] = eps_dense(f, l, r, params.k, params.beta)?;
        }
    }

    let mut best: Option<(f64, Vec<usize>)> = None;
    for mask in 0u32..(1u32 << (n - 1)) {
        // bit i set: a segment starts at i + 2
        let starts: Vec<usize> = (0..n - 1).filter(|i| mask >> i & 1 == 1).map(|i| i + 2).collect();
        let mut energy = 0.0;
        let mut left = 1;
        for &s in starts.iter().chain(std::iter::once(&(n + 1))) {
            energy += eps[left][s - 1] + params.gamma;
            left = s;
        }
        let better = match &best {
            None => true,
            Some((e, st)) => energy < *e || (energy == *e && starts < *st),
        };
        if better {
            best = Some((energy, starts));
        }
    }

    let (energy, starts) = best.expect("at least one partition");
    let partition = Partition::from_starts(&starts, n)?;
    let estimate = reconstruct(f, &partition, params)?;
    Ok(SolveResult {
        partition,
        estimate,
        energy,
        num_error_updates: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(v: &[f64]) -> Signal {
        Signal::new(v.to_vec()).unwrap()
    }

    #[test]
    fn dense_worked_examples() {
        let f = sig(&[0.0, 1.0, 0.0]);
        assert!((eps_dense(&f, 1, 3, 2, 1.0).unwrap() - 4.0 / 7.0).abs() < 1e-14);
        let g = sig(&[-1.0, -1.0, 1.0, 1.0]);
        assert!((eps_dense(&g, 1, 4, 2, f64::INFINITY).unwrap() - 0.8).abs() < 1e-14);
        assert_eq!(eps_dense(&g, 2, 3, 2, 1.0).unwrap(), 0.0);
        assert!(eps_dense(&g, 3, 2, 2, 1.0).is_err());
        assert!(eps_dense(&g, 1, 5, 2, 1.0).is_err());
    }

    #[test]
    fn moments_order_one_is_mean_identity() {
        let vals: Vec<f64> = (0..1000).map(|i| ((i * 37 % 101) as f64).sin() * 3.0 + 1.0).collect();
        let f = sig(&vals);
        let mom = Moments::new(&f, 1).unwrap();
        for (l, r) in [(1, 1000), (10, 20), (500, 999), (998, 1000)] {
            let s: f64 = vals[l - 1..r].iter().sum();
            let s2: f64 = vals[l - 1..r].iter().map(|x| x * x).sum();
            let closed = s2 - s * s / (r + 1 - l) as f64;
            let dense = eps_dense(&f, l, r, 1, f64::INFINITY).unwrap();
            let m = mom.eps(l, r).unwrap();
            assert!((m - closed).abs() <= 1e-8 * closed.max(1.0));
            assert!((m - dense).abs() <= 1e-8 * dense.max(1.0));
        }
    }

    #[test]
    fn moments_constant_signal() {
        let f = sig(&[1.5; 50]);
        for (l, r) in [(1, 50), (3, 40), (47, 50)] {
            assert!(eps_moments(&f, l, r, 2).unwrap().abs() < 1e-8);
        }
    }

    #[test]
    fn exhaustive_small_cases() {
        let one = solve_exhaustive(&sig(&[4.0]), &ModelParams::new(2, 1.0, 0.7).unwrap()).unwrap();
        assert_eq!(one.energy, 0.7);
        assert_eq!(one.partition, Partition::single(1));

        // 4 partitions of (0,1,0): gamma + 4/7 for one segment, 2 gamma for two
        let f = sig(&[0.0, 1.0, 0.0]);
        let res = solve_exhaustive(&f, &ModelParams::new(2, 1.0, 0.5).unwrap()).unwrap();
        assert!((res.energy - 1.0).abs() < 1e-14);
        assert_eq!(res.partition.len(), 2);
        // ties between {1,2},{3} and {1},{2,3}: smallest starts list wins
        assert_eq!(res.partition.starts(), vec![2]);

        let long = sig(&[0.0; 16]);
        assert!(matches!(
            solve_exhaustive(&long, &ModelParams::potts(1, 1.0).unwrap()),
            Err(Error::TooLong { .. })
        ));
    }
}
