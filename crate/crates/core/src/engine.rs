//! Incremental interval approximation errors.
//!
//! For a fixed interval start `l`, the error `E^{l:r}` of the best smoothing
//! spline (finite `beta`) or best polynomial of degree `< k` (Potts) is
//! advanced from `r` to `r + 1` in `O(k)` by rotating one new sample into a
//! short window of the transformed right-hand side `q = Q^T y`. The Givens
//! rotations that realize the incremental QR factorization depend only on the
//! interval length, so they are computed once into a [`RotationTable`] and
//! shared by every interval start.
//!
//! Spline mode factors the stacked system `[I; beta^k D_k]` where `D_k` is
//! the k-th difference matrix. Growing the interval by one sample appends a
//! unit row/column and one difference row, which is eliminated against the
//! last `k + 1` rows of the banded triangular factor.
//!
//! Potts mode factors the Vandermonde matrix with rows `(1, n, .., n^{k-1})`
//! in local abscissas `n = 1, 2, ..`; each new row is eliminated against the
//! `k x k` triangular factor.

use crate::error::{Error, Result};
use crate::model::{difference_stencil, validate_beta, validate_order, ModelParams, Signal, MAX_ORDER};

/// A planar rotation stored as `(cos, sin)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation {
    pub c: f64,
    pub s: f64,
}

impl Rotation {
    pub const IDENTITY: Rotation = Rotation { c: 1.0, s: 0.0 };

    /// Rotation that zeroes `target` against `pivot`.
    ///
    /// `rho = sign(pivot) * hypot(pivot, target)` with `sign(0) = +1`; a zero
    /// pair gives the identity.
    pub fn eliminating(pivot: f64, target: f64) -> Self {
        if pivot == 0.0 && target == 0.0 {
            return Self::IDENTITY;
        }
        let r = pivot.hypot(target);
        let rho = if pivot < 0.0 { -r } else { r };
        Self {
            c: pivot / rho,
            s: target / rho,
        }
    }

    /// Applies the rotation to a (pivot, target) pair of entries.
    #[inline]
    pub fn apply(&self, pivot: &mut f64, target: &mut f64) {
        let p = *pivot;
        let t = *target;
        *pivot = self.c * p + self.s * t;
        *target = -self.s * p + self.c * t;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TableMode {
    Spline { k: usize, beta: f64 },
    Poly { k: usize },
}

impl TableMode {
    pub fn order(&self) -> usize {
        match *self {
            TableMode::Spline { k, .. } | TableMode::Poly { k } => k,
        }
    }

    pub fn is_poly(&self) -> bool {
        matches!(self, TableMode::Poly { .. })
    }
}

/// Data-independent rotation coefficients for intervals up to `max_length`.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationTable {
    mode: TableMode,
    max_length: usize,
    /// Rotations per extension step: `k + 1` (spline) or `k` (poly).
    width: usize,
    /// Poly mode only: rotations that bring interval lengths `2..=k` into
    /// triangular form; length `m` uses `m - 1` of them.
    startup: Vec<Rotation>,
    /// Rotations for interval lengths `k + 1 ..= max_length`, `width` each.
    steps: Vec<Rotation>,
}

impl RotationTable {
    /// Table for the smoothing-spline error of order `k` with elasticity `beta`.
    pub fn spline(k: usize, beta: f64, max_length: usize) -> Result<Self> {
        validate_order(k)?;
        validate_beta(beta)?;
        if !beta.is_finite() {
            return Err(Error::InvalidParameter(
                "spline tables need a finite beta; use RotationTable::poly".into(),
            ));
        }
        validate_length(max_length)?;

        let mut band = BandFactor::new(k, beta)?;
        let mut steps = Vec::with_capacity(max_length.saturating_sub(k) * (k + 1));
        for _ in 0..max_length {
            band.push_column(None, &mut steps);
            band.forget_finished_rows();
        }
        Ok(Self {
            mode: TableMode::Spline { k, beta },
            max_length,
            width: k + 1,
            startup: Vec::new(),
            steps,
        })
    }

    /// Table for the polynomial (Potts) error of order `k`.
    pub fn poly(k: usize, max_length: usize) -> Result<Self> {
        validate_order(k)?;
        validate_length(max_length)?;

        let mut tri = TriFactor::new(k);
        let mut startup = Vec::with_capacity(k * (k - 1) / 2);
        let mut steps = Vec::with_capacity(max_length.saturating_sub(k) * k);
        for _ in 0..max_length {
            let out = if tri.rows < k { &mut startup } else { &mut steps };
            tri.push_row(None, out);
        }
        Ok(Self {
            mode: TableMode::Poly { k },
            max_length,
            width: k,
            startup,
            steps,
        })
    }

    /// Spline or Potts table matching `params`.
    pub fn for_params(params: &ModelParams, max_length: usize) -> Result<Self> {
        params.validate()?;
        if params.is_potts() {
            Self::poly(params.k, max_length)
        } else {
            Self::spline(params.k, params.beta, max_length)
        }
    }

    pub fn mode(&self) -> TableMode {
        self.mode
    }

    pub fn order(&self) -> usize {
        self.mode.order()
    }

    pub fn max_length(&self) -> usize {
        self.max_length
    }

    /// Number of extension-step rotations, `(N - k)(k + 1)` for splines and
    /// `(N - k) k` for polynomials.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Rotations that grow an interval to length `len`.
    ///
    /// Empty for `len <= k` in spline mode; the startup rotations in poly mode.
    pub fn rotations_for(&self, len: usize) -> &[Rotation] {
        let k = self.order();
        if len <= k {
            if self.mode.is_poly() && len >= 2 {
                let off = (len - 1) * (len - 2) / 2;
                &self.startup[off..off + len - 1]
            } else {
                &[]
            }
        } else {
            let off = (len - k - 1) * self.width;
            &self.steps[off..off + self.width]
        }
    }

    pub fn startup_rotations(&self) -> &[Rotation] {
        &self.startup
    }

    pub fn step_rotations(&self) -> &[Rotation] {
        &self.steps
    }
}

fn validate_length(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidParameter("max_length must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// Upper-triangular banded factor of `[I; beta^k D_k]`, grown one column at a
/// time. Row `p` stores the entries of columns `p ..= p + k`.
#[derive(Debug, Clone)]
pub(crate) struct BandFactor {
    k: usize,
    diff_row: Vec<f64>,
    /// Flattened rows with stride `k + 1`.
    rows: Vec<f64>,
    /// Number of columns pushed so far.
    cols: usize,
    /// Rows before this index were dropped by `forget_finished_rows`.
    first_row: usize,
}

impl BandFactor {
    pub(crate) fn new(k: usize, beta: f64) -> Result<Self> {
        let scale = beta.powi(k as i32);
        let diff_row = difference_stencil(k)?.into_iter().map(|c| c * scale).collect();
        Ok(Self {
            k,
            diff_row,
            rows: Vec::new(),
            cols: 0,
            first_row: 0,
        })
    }

    fn row_mut(&mut self, p: usize) -> &mut [f64] {
        let w = self.k + 1;
        let off = (p - self.first_row) * w;
        &mut self.rows[off..off + w]
    }

    /// Entry of row `p` (0-based) in column `p + t`.
    pub(crate) fn entry(&self, p: usize, t: usize) -> f64 {
        self.rows[(p - self.first_row) * (self.k + 1) + t]
    }

    /// Appends a column with its unit row and, once more than `k` columns
    /// exist, eliminates the new difference row. Rotations are taken from
    /// `given` when present and computed otherwise; they are appended to `out`.
    pub(crate) fn push_column(&mut self, given: Option<&[Rotation]>, out: &mut Vec<Rotation>) {
        let k = self.k;
        let w = k + 1;
        let new_col = self.cols;
        self.rows.extend(std::iter::once(1.0).chain(std::iter::repeat_n(0.0, k)));
        self.cols += 1;
        if self.cols <= k {
            return;
        }

        // difference row over columns base..=new_col
        let base = new_col - k;
        let mut x = [0.0; MAX_ORDER + 1];
        x[..w].copy_from_slice(&self.diff_row);
        for j in 0..w {
            let p = base + j;
            let rot = match given {
                Some(g) => g[j],
                None => Rotation::eliminating(self.entry(p, 0), x[j]),
            };
            let row = self.row_mut(p);
            // columns p ..= new_col
            for t in 0..w - j {
                rot.apply(&mut row[t], &mut x[j + t]);
            }
            x[j] = 0.0;
            out.push(rot);
        }
    }

    /// Drops rows that no future column can touch.
    pub(crate) fn forget_finished_rows(&mut self) {
        let keep_from = (self.cols + 1).saturating_sub(self.k + 1);
        if keep_from > self.first_row + 64 {
            let drop = keep_from - self.first_row;
            self.rows.drain(..drop * (self.k + 1));
            self.first_row = keep_from;
        }
    }

    /// Solves `R v = rhs` by banded back-substitution; needs every row.
    pub(crate) fn back_substitute(&self, rhs: &[f64]) -> Vec<f64> {
        debug_assert_eq!(self.first_row, 0);
        let n = self.cols;
        let mut v = vec![0.0; n];
        for p in (0..n).rev() {
            let mut acc = rhs[p];
            for t in 1..=self.k.min(n - 1 - p) {
                acc -= self.entry(p, t) * v[p + t];
            }
            v[p] = acc / self.entry(p, 0);
        }
        v
    }
}

/// `k x k` upper-triangular factor of the local Vandermonde matrix, grown one
/// row at a time.
#[derive(Debug, Clone)]
pub(crate) struct TriFactor {
    k: usize,
    /// Row-major `k x k`.
    r: Vec<f64>,
    /// Rows pushed so far.
    rows: usize,
}

impl TriFactor {
    pub(crate) fn new(k: usize) -> Self {
        Self {
            k,
            r: vec![0.0; k * k],
            rows: 0,
        }
    }

    /// Appends the Vandermonde row of the next local abscissa.
    pub(crate) fn push_row(&mut self, given: Option<&[Rotation]>, out: &mut Vec<Rotation>) {
        let k = self.k;
        self.rows += 1;
        let x = self.rows as f64;
        let mut v = [0.0; MAX_ORDER];
        let mut pw = 1.0;
        for e in v.iter_mut().take(k) {
            *e = pw;
            pw *= x;
        }
        let pivots = (self.rows - 1).min(k);
        for j in 0..pivots {
            let rot = match given {
                Some(g) => g[j],
                None => Rotation::eliminating(self.r[j * k + j], v[j]),
            };
            for c in j..k {
                rot.apply(&mut self.r[j * k + c], &mut v[c]);
            }
            v[j] = 0.0;
            out.push(rot);
        }
        if self.rows <= k {
            let m = self.rows - 1;
            self.r[m * k + m..m * k + k].copy_from_slice(&v[m..k]);
        }
    }

    pub(crate) fn get(&self, i: usize, j: usize) -> f64 {
        self.r[i * self.k + j]
    }
}

/// Running state of `E^{l:r}` for one interval start.
///
/// Holds at most `k` transformed right-hand side entries: the last `k` in
/// spline mode, the first `k` in Potts mode. Every rotated-out entry is
/// squared into `eps` and discarded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorState {
    left: usize,
    right: usize,
    live: usize,
    window: [f64; MAX_ORDER],
    eps: f64,
}

impl ErrorState {
    /// State for the one-sample interval `[left, left]`.
    pub fn new(left: usize, first_sample: f64) -> Self {
        let mut window = [0.0; MAX_ORDER];
        window[0] = first_sample;
        Self {
            left,
            right: left,
            live: 1,
            window,
            eps: 0.0,
        }
    }

    pub fn left(&self) -> usize {
        self.left
    }

    pub fn right(&self) -> usize {
        self.right
    }

    pub fn len(&self) -> usize {
        self.right + 1 - self.left
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Current error `E^{left:right}`.
    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Live window entries.
    pub fn window(&self) -> &[f64] {
        &self.window[..self.live]
    }

    /// Moves the right end one sample further; `next_sample` must be
    /// `f_{right+1}`. Returns the new error.
    pub fn extend(&mut self, next_sample: f64, table: &RotationTable) -> Result<f64> {
        let new_len = self.len() + 1;
        if new_len > table.max_length() {
            return Err(Error::TableExhausted {
                needed: new_len,
                max_length: table.max_length(),
            });
        }
        let k = table.order();
        let rots = table.rotations_for(new_len);
        match table.mode() {
            TableMode::Spline { .. } => {
                if new_len <= k {
                    self.window[self.live] = next_sample;
                    self.live += 1;
                } else {
                    // window holds q for the last k rows; rotate in the new
                    // unit row and eliminate the difference row
                    let mut buf = [0.0; MAX_ORDER + 1];
                    buf[..k].copy_from_slice(&self.window[..k]);
                    buf[k] = next_sample;
                    let mut resid = 0.0;
                    for (j, rot) in rots.iter().enumerate() {
                        rot.apply(&mut buf[j], &mut resid);
                    }
                    self.eps += resid * resid;
                    self.window[..k].copy_from_slice(&buf[1..=k]);
                }
            }
            TableMode::Poly { .. } => {
                let mut x = next_sample;
                for (j, rot) in rots.iter().enumerate() {
                    rot.apply(&mut self.window[j], &mut x);
                }
                if new_len <= k {
                    self.window[self.live] = x;
                    self.live += 1;
                } else {
                    self.eps += x * x;
                }
            }
        }
        self.right += 1;
        Ok(self.eps)
    }
}

/// Binds a rotation table to a signal for bounds-checked state handling.
#[derive(Debug, Clone, Copy)]
pub struct ErrorEngine<'a> {
    table: &'a RotationTable,
    f: &'a [f64],
}

impl<'a> ErrorEngine<'a> {
    pub fn new(table: &'a RotationTable, f: &'a Signal) -> Result<Self> {
        Self::from_slice(table, f.as_slice())
    }

    pub(crate) fn from_slice(table: &'a RotationTable, f: &'a [f64]) -> Result<Self> {
        if table.max_length() < f.len() {
            return Err(Error::TableExhausted {
                needed: f.len(),
                max_length: table.max_length(),
            });
        }
        Ok(Self { table, f })
    }

    pub fn table(&self) -> &RotationTable {
        self.table
    }

    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }

    /// Starts an interval at the 1-based index `l`.
    pub fn init_state(&self, l: usize) -> Result<ErrorState> {
        if l == 0 || l > self.f.len() {
            return Err(Error::IndexOutOfRange {
                index: l,
                len: self.f.len(),
            });
        }
        Ok(ErrorState::new(l, self.f[l - 1]))
    }

    /// Extends `state` by the next sample of the bound signal.
    pub fn extend(&self, state: &mut ErrorState) -> Result<f64> {
        let next = state.right() + 1;
        if next > self.f.len() {
            return Err(Error::IndexOutOfRange {
                index: next,
                len: self.f.len(),
            });
        }
        state.extend(self.f[next - 1], self.table)
    }

    /// `E^{l:r}` for `r = l ..= N`.
    pub fn errors_from(&self, l: usize) -> Result<Vec<f64>> {
        let mut st = self.init_state(l)?;
        let mut out = Vec::with_capacity(self.f.len() + 1 - l);
        out.push(0.0);
        while st.right() < self.f.len() {
            out.push(self.extend(&mut st)?);
        }
        Ok(out)
    }

    /// Single error `E^{l:r}`.
    pub fn error(&self, l: usize, r: usize) -> Result<f64> {
        if r < l || r > self.f.len() {
            return Err(Error::IndexOutOfRange {
                index: r,
                len: self.f.len(),
            });
        }
        let mut st = self.init_state(l)?;
        while st.right() < r {
            self.extend(&mut st)?;
        }
        Ok(st.eps())
    }
}
