//! Bellman recursion over prefix energies with pruning and backtracking.
//!
//! `P*_r = min_l { E^{l:r} + gamma + P*_{l-1} }`, `P*_0 = 0`. Candidate left
//! bounds are kept in a singly linked list, newest (largest `l`) first, each
//! with its own [`ErrorState`] that is advanced lazily to the current `r`.
//!
//! Two pruning rules are available:
//!
//! * bound pruning: once `E^{l:r} + gamma > P_r` for the current best `P_r`,
//!   every older candidate is worse at this `r` because `E^{l':r}` grows as
//!   `l'` decreases; the candidate loop stops.
//! * inequality pruning: when `P*_{l-1} + E^{l:s} >= P*_s`, the start `l` can
//!   never be an optimal last segment for any `r >= s` and is dropped for good.

use std::str::FromStr;

use crate::engine::{ErrorEngine, ErrorState, RotationTable, TableMode};
use crate::error::{Error, Result};
use crate::model::{ModelParams, Partition, Segment, Signal, SolveResult};
use crate::reconstruct::reconstruct_with;

/// Which pruning rules the forward pass applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Pruning {
    #[default]
    Both,
    /// Bound pruning only (break out of the candidate loop).
    AmpOnly,
    /// Inequality pruning only (drop candidates permanently).
    KfOnly,
    None,
}

impl Pruning {
    pub const ALL: [Pruning; 4] = [Pruning::Both, Pruning::AmpOnly, Pruning::KfOnly, Pruning::None];

    fn bound(self) -> bool {
        matches!(self, Pruning::Both | Pruning::AmpOnly)
    }

    fn inequality(self) -> bool {
        matches!(self, Pruning::Both | Pruning::KfOnly)
    }
}

impl FromStr for Pruning {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "both" => Ok(Pruning::Both),
            "amp" | "amp_only" => Ok(Pruning::AmpOnly),
            "kf" | "kf_only" => Ok(Pruning::KfOnly),
            "none" => Ok(Pruning::None),
            other => Err(Error::InvalidParameter(format!("unknown pruning mode {other:?}"))),
        }
    }
}

/// Output of the forward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct DpState {
    /// `best[r] = P*_r` for `r = 0..=N`.
    pub best: Vec<f64>,
    /// `jumps[r - 1] = J_r`: the optimal last segment of `[1, r]` starts at `J_r + 1`.
    pub jumps: Vec<usize>,
    pub num_error_updates: u64,
}

const NIL: usize = usize::MAX;

/// Runs the forward pass for `f` with the rotations in `table`.
pub fn forward(f: &Signal, gamma: f64, table: &RotationTable, pruning: Pruning) -> Result<DpState> {
    let n = f.len();
    let engine = ErrorEngine::new(table, f)?;
    let mut best = vec![0.0; n + 1];
    let mut jumps = vec![0usize; n];
    let mut updates: u64 = 0;

    best[1] = gamma;
    let mut whole = engine.init_state(1)?;

    // candidate arena indexed by left bound; next[l] points to the next older live start
    let mut states: Vec<Option<ErrorState>> = vec![None; n + 2];
    let mut next = vec![NIL; n + 2];
    let mut head = NIL;
    if n >= 2 {
        states[2] = Some(engine.init_state(2)?);
        head = 2;
    }

    for r in 2..=n {
        let e_whole = engine.extend(&mut whole)?;
        updates += 1;
        best[r] = e_whole + gamma;
        jumps[r - 1] = 0;

        let mut prev = NIL;
        let mut cur = head;
        while cur != NIL {
            let l = cur;
            let st = states[l].as_mut().expect("live candidate has a state");
            let mut dropped = false;
            while st.right() < r {
                let e = engine.extend(st)?;
                updates += 1;
                if pruning.inequality() && best[l - 1] + e >= best[st.right()] {
                    dropped = true;
                    break;
                }
            }
            if dropped {
                states[l] = None;
                let after = next[l];
                if prev == NIL {
                    head = after;
                } else {
                    next[prev] = after;
                }
                cur = after;
                continue;
            }

            let e = st.eps();
            let b = best[l - 1] + gamma + e;
            if b <= best[r] {
                best[r] = b;
                jumps[r - 1] = l - 1;
            }
            if pruning.bound() && e + gamma > best[r] {
                break;
            }
            prev = cur;
            cur = next[l];
        }

        if r < n {
            states[r + 1] = Some(engine.init_state(r + 1)?);
            next[r + 1] = head;
            head = r + 1;
        }
    }

    Ok(DpState {
        best,
        jumps,
        num_error_updates: updates,
    })
}

/// Recovers the partition encoded by `jumps` (`jumps[r - 1] = J_r`).
pub fn backtrack(jumps: &[usize]) -> Result<Partition> {
    let n = jumps.len();
    let mut segs = Vec::new();
    let mut r = n;
    while r > 0 {
        let j = jumps[r - 1];
        if j >= r {
            return Err(Error::MalformedJumps(r));
        }
        segs.push(Segment::new(j + 1, r));
        r = j;
    }
    segs.reverse();
    Partition::new(segs, n)
}

/// Solver bound to one order and elasticity; reuses its rotation table for
/// every signal up to `max_length` and every `gamma`.
#[derive(Debug, Clone)]
pub struct Solver {
    table: RotationTable,
}

impl Solver {
    pub fn new(k: usize, beta: f64, max_length: usize) -> Result<Self> {
        let probe = ModelParams::new(k, beta, 1.0)?;
        Ok(Self {
            table: RotationTable::for_params(&probe, max_length)?,
        })
    }

    pub fn table(&self) -> &RotationTable {
        &self.table
    }

    pub fn params(&self, gamma: f64) -> Result<ModelParams> {
        let (k, beta) = match self.table.mode() {
            TableMode::Spline { k, beta } => (k, beta),
            TableMode::Poly { k } => (k, f64::INFINITY),
        };
        ModelParams::new(k, beta, gamma)
    }

    pub fn solve(&self, f: &Signal, gamma: f64, pruning: Pruning) -> Result<SolveResult> {
        self.params(gamma)?;
        let dp = forward(f, gamma, &self.table, pruning)?;
        let partition = backtrack(&dp.jumps)?;
        let estimate = reconstruct_with(f, &partition, &self.table)?;
        Ok(SolveResult {
            partition,
            estimate,
            energy: dp.best[f.len()],
            num_error_updates: dp.num_error_updates,
        })
    }
}

/// Global minimizer of the Mumford-Shah (finite `beta`) or Potts functional.
pub fn solve(f: &Signal, params: &ModelParams, pruning: Pruning) -> Result<SolveResult> {
    params.validate()?;
    Solver::new(params.k, params.beta, f.len())?.solve(f, params.gamma, pruning)
}
