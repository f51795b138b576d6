//! Restricted minimizers on the segments of a fixed partition.

use crate::engine::{BandFactor, RotationTable, TableMode, TriFactor};
use crate::error::{Error, Result};
use crate::model::{kth_difference, validate_beta, validate_order, ModelParams, Partition, Signal};

/// Discrete smoothing spline `argmin_v |v - f|^2 + beta^(2k) |D_k v|^2`.
pub fn fit_segment_spline(f: &[f64], k: usize, beta: f64) -> Result<Vec<f64>> {
    validate_order(k)?;
    validate_beta(beta)?;
    if f.is_empty() {
        return Err(Error::EmptySignal);
    }
    if f.len() <= k {
        return Ok(f.to_vec());
    }
    let table = RotationTable::spline(k, beta, f.len())?;
    fit_spline_with(&table, f)
}

/// Least-squares polynomial of degree `k - 1` evaluated on the segment.
pub fn fit_segment_poly(f: &[f64], k: usize) -> Result<Vec<f64>> {
    validate_order(k)?;
    if f.is_empty() {
        return Err(Error::EmptySignal);
    }
    if f.len() <= k {
        return Ok(f.to_vec());
    }
    let table = RotationTable::poly(k, f.len())?;
    fit_poly_with(&table, f)
}

/// Fits one segment, reusing the rotations of `table`.
pub fn fit_segment_with(table: &RotationTable, f: &[f64]) -> Result<Vec<f64>> {
    if f.is_empty() {
        return Err(Error::EmptySignal);
    }
    if f.len() > table.max_length() {
        return Err(Error::TableExhausted {
            needed: f.len(),
            max_length: table.max_length(),
        });
    }
    if f.len() <= table.order() {
        return Ok(f.to_vec());
    }
    match table.mode() {
        TableMode::Spline { .. } => fit_spline_with(table, f),
        TableMode::Poly { .. } => fit_poly_with(table, f),
    }
}

fn fit_spline_with(table: &RotationTable, f: &[f64]) -> Result<Vec<f64>> {
    let TableMode::Spline { k, beta } = table.mode() else {
        return Err(Error::ModeMismatch);
    };
    let mut band = BandFactor::new(k, beta)?;
    let mut q = Vec::with_capacity(f.len());
    let mut scratch = Vec::with_capacity(k + 1);
    for (i, &fi) in f.iter().enumerate() {
        let len = i + 1;
        let rots = table.rotations_for(len);
        scratch.clear();
        band.push_column(Some(rots), &mut scratch);
        q.push(fi);
        if len > k {
            let base = len - 1 - k;
            let mut resid = 0.0;
            for (j, rot) in rots.iter().enumerate() {
                rot.apply(&mut q[base + j], &mut resid);
            }
        }
    }
    Ok(band.back_substitute(&q))
}

fn fit_poly_with(table: &RotationTable, f: &[f64]) -> Result<Vec<f64>> {
    let TableMode::Poly { k } = table.mode() else {
        return Err(Error::ModeMismatch);
    };
    let mut tri = TriFactor::new(k);
    let mut q = vec![0.0; k];
    let mut scratch = Vec::with_capacity(k);
    for (i, &fi) in f.iter().enumerate() {
        let len = i + 1;
        let rots = table.rotations_for(len);
        scratch.clear();
        tri.push_row(Some(rots), &mut scratch);
        let mut x = fi;
        for (j, rot) in rots.iter().enumerate() {
            rot.apply(&mut q[j], &mut x);
        }
        if len <= k {
            q[len - 1] = x;
        }
    }

    // coefficients in local abscissas 1, 2, ..
    let mut coef = vec![0.0; k];
    for i in (0..k).rev() {
        let mut acc = q[i];
        for j in i + 1..k {
            acc -= tri.get(i, j) * coef[j];
        }
        coef[i] = acc / tri.get(i, i);
    }
    Ok((1..=f.len())
        .map(|n| {
            let x = n as f64;
            coef.iter().rev().fold(0.0, |acc, c| acc * x + c)
        })
        .collect())
}

/// Concatenated per-segment minimizers for `part`.
pub fn reconstruct(f: &Signal, part: &Partition, params: &ModelParams) -> Result<Signal> {
    params.validate()?;
    Partition::new(part.segments().to_vec(), f.len())?;
    let longest = part.iter().map(|s| s.len()).max().unwrap_or(1);
    let table = RotationTable::for_params(params, longest)?;
    reconstruct_with(f, part, &table)
}

pub(crate) fn reconstruct_with(f: &Signal, part: &Partition, table: &RotationTable) -> Result<Signal> {
    let mut out = Vec::with_capacity(f.len());
    for seg in part.iter() {
        out.extend(fit_segment_with(table, f.segment(*seg))?);
    }
    Signal::new(out)
}

/// Objective of a single-segment fit: `|v - f|^2 + beta^(2k) |D_k v|^2`
/// (the smoothness term is dropped for infinite `beta`).
pub fn segment_objective(f: &[f64], v: &[f64], k: usize, beta: f64) -> Result<f64> {
    if f.len() != v.len() {
        return Err(Error::LengthMismatch {
            expected: f.len(),
            actual: v.len(),
        });
    }
    let data: f64 = f.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum();
    if beta.is_infinite() || v.len() <= k {
        return Ok(data);
    }
    let d = kth_difference(v, k)?;
    Ok(data + beta.powi(2 * k as i32) * d.iter().map(|x| x * x).sum::<f64>())
}
