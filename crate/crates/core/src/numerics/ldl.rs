use super::{identity_minus, FloatMatrix};
use crate::{Error, Result};

/// `S = (I − A)^{-T} Δ (I − A)^{-1}` with `A` strictly block upper
/// triangular and `Δ` block diagonal for an ordered partition.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockLdl {
    pub a: FloatMatrix,
    pub delta: FloatMatrix,
}

impl BlockLdl {
    pub fn reconstruct(&self) -> Result<FloatMatrix> {
        let m = identity_minus(&self.a);
        let inv = m
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Singular("I - A".into()))?;
        Ok(inv.transpose() * &self.delta * inv)
    }
}

/// Block regression of each block on all earlier ones:
/// `A_{P,W} = S_{PP}^{-1} S_{PW}` and `Δ_{WW} = S_{WW} − S_{WP} A_{P,W}`.
pub fn block_ldl(s: &FloatMatrix, blocks: &[Vec<usize>]) -> Result<BlockLdl> {
    let n = s.nrows();
    if s.ncols() != n {
        return Err(Error::InvalidArgument("block_ldl needs a square matrix".into()));
    }
    let mut seen = vec![false; n];
    for &i in blocks.iter().flatten() {
        if i >= n || seen[i] {
            return Err(Error::InvalidArgument("blocks do not partition the index set".into()));
        }
        seen[i] = true;
    }
    if seen.iter().any(|&x| !x) {
        return Err(Error::InvalidArgument("blocks do not cover the index set".into()));
    }
    let mut a = FloatMatrix::zeros(n, n);
    let mut delta = FloatMatrix::zeros(n, n);
    let mut prev: Vec<usize> = Vec::new();
    for w in blocks {
        let s_ww = s.select_rows(w).select_columns(w);
        let d = if prev.is_empty() {
            s_ww
        } else {
            let s_pp = s.select_rows(&prev).select_columns(&prev);
            let s_pw = s.select_rows(&prev).select_columns(w);
            let chol = s_pp
                .cholesky()
                .ok_or_else(|| Error::NotPositiveDefinite("leading block in block-LDL".into()))?;
            let x = chol.solve(&s_pw);
            for (r, &p) in prev.iter().enumerate() {
                for (c, &q) in w.iter().enumerate() {
                    a[(p, q)] = x[(r, c)];
                }
            }
            s_ww - s_pw.transpose() * x
        };
        if d.clone().cholesky().is_none() {
            return Err(Error::NotPositiveDefinite("pivot block in block-LDL".into()));
        }
        for (r, &p) in w.iter().enumerate() {
            for (c, &q) in w.iter().enumerate() {
                delta[(p, q)] = d[(r, c)];
            }
        }
        prev.extend_from_slice(w);
    }
    Ok(BlockLdl { a, delta })
}
