use crate::block::{ComplexBlock, C64};
use crate::error::{Error, Result};

use super::NormParams;

/// `sqrt(sum |y|^2 / sum |y|^4)`, the scale minimizing the row's CM cost.
/// A zero row maps to 1 (no-op).
pub fn norm_param(row: &[C64]) -> f64 {
    let (s2, s4) = row.iter().fold((0.0, 0.0), |(a, b), z| {
        let m = z.norm_sqr();
        (a + m, b + m * m)
    });
    if s4 > 0.0 {
        (s2 / s4).sqrt()
    } else {
        1.0
    }
}

pub fn norm_params(block: &ComplexBlock, p: usize, q: usize) -> Result<NormParams> {
    if p >= q || q >= block.rows() {
        return Err(Error::IndexOutOfRange(format!(
            "row pair ({p}, {q}) invalid for {} rows",
            block.rows()
        )));
    }
    Ok(NormParams {
        p,
        q,
        lambda_p: norm_param(block.row(p)),
        lambda_q: norm_param(block.row(q)),
    })
}

pub fn apply_norm(params: &NormParams, block: &mut ComplexBlock) -> Result<()> {
    let (row_p, row_q) = block.two_rows_mut(params.p, params.q)?;
    row_p.iter_mut().for_each(|z| *z *= params.lambda_p);
    row_q.iter_mut().for_each(|z| *z *= params.lambda_q);
    Ok(())
}

/// Multiplies row `i` by `scales[i]` (a full diagonal `D`).
pub fn scale_rows(block: &mut ComplexBlock, scales: &[f64]) -> Result<()> {
    if scales.len() != block.rows() {
        return Err(Error::DimensionMismatch(format!(
            "{} scales for {} rows",
            scales.len(),
            block.rows()
        )));
    }
    for (i, &s) in scales.iter().enumerate() {
        block.row_mut(i).iter_mut().for_each(|z| *z *= s);
    }
    Ok(())
}
