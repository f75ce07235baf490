use serde::{Deserialize, Serialize};

use super::dense::{DenseTensor, MultiIndex};
use crate::error::{Result, VtcpError};

/// A symmetric tensor stored by its distinct entries.
///
/// `distinct[r]` is the value at the `r`-th non-decreasing multi-index in lexicographic
/// order, e.g. `(0,0), (0,1), (1,1)` for order 2, dimension 2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymTensor {
    order: usize,
    dim: usize,
    distinct: Vec<f64>,
}

/// Non-decreasing multi-indices of the given order, in lexicographic order.
pub fn distinct_indices(order: usize, dim: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if dim == 0 {
        return out;
    }
    let mut idx = vec![0usize; order];
    loop {
        out.push(idx.clone());
        // rightmost slot that can still grow
        let Some(slot) = (0..order).rev().find(|&s| idx[s] + 1 < dim) else {
            break;
        };
        let v = idx[slot] + 1;
        for s in idx.iter_mut().skip(slot) {
            *s = v;
        }
    }
    out
}

pub fn distinct_count(order: usize, dim: usize) -> usize {
    // C(n + p - 1, p)
    let mut c: u128 = 1;
    for i in 0..order as u128 {
        c = c * (dim as u128 + i) / (i + 1);
    }
    c as usize
}

impl SymTensor {
    pub fn new(order: usize, dim: usize, distinct: Vec<f64>) -> Result<Self> {
        if order == 0 || dim == 0 {
            return Err(VtcpError::InvalidTensor(
                "symmetric tensor needs positive order and dimension".into(),
            ));
        }
        let expected = distinct_count(order, dim);
        if distinct.len() != expected {
            return Err(VtcpError::InvalidTensor(format!(
                "symmetric tensor of order {order} dimension {dim} has {expected} distinct entries, got {}",
                distinct.len()
            )));
        }
        if distinct.iter().any(|v| !v.is_finite()) {
            return Err(VtcpError::InvalidTensor("non-finite symmetric entry".into()));
        }
        Ok(SymTensor {
            order,
            dim,
            distinct,
        })
    }

    /// Compresses a dense tensor, failing unless it is exactly symmetric.
    pub fn from_dense(t: &DenseTensor) -> Result<Self> {
        if !t.is_symmetric() {
            return Err(VtcpError::InvalidTensor("tensor is not symmetric".into()));
        }
        let distinct = distinct_indices(t.order(), t.dim())
            .iter()
            .map(|idx| t.get(idx))
            .collect();
        Self::new(t.order(), t.dim(), distinct)
    }

    /// The rank-one tensor `x ⊗ ... ⊗ x` with `order` factors.
    pub fn outer_power(x: &[f64], order: usize) -> Result<Self> {
        let distinct = distinct_indices(order, x.len())
            .iter()
            .map(|idx| idx.iter().map(|&i| x[i]).product())
            .collect();
        Self::new(order, x.len(), distinct)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn distinct(&self) -> &[f64] {
        &self.distinct
    }

    fn position(&self, sorted: &[usize]) -> usize {
        // rank of a non-decreasing multi-index among all non-decreasing ones
        let mut rank = 0;
        let mut lo = 0;
        for (slot, &v) in sorted.iter().enumerate() {
            let remaining = self.order - slot - 1;
            for smaller in lo..v {
                rank += distinct_count(remaining, self.dim - smaller);
            }
            lo = v;
        }
        rank
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        let mut sorted = idx.to_vec();
        sorted.sort_unstable();
        self.distinct[self.position(&sorted)]
    }

    /// Principal diagonal `z_{i...i}`.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim)
            .map(|i| self.distinct[self.position(&vec![i; self.order])])
            .collect()
    }

    pub fn to_dense(&self) -> DenseTensor {
        let mut entries = Vec::with_capacity(self.dim.pow(self.order as u32));
        let mut it = MultiIndex::new(self.order, self.dim);
        let mut sorted = vec![0; self.order];
        while let Some(idx) = it.next_index() {
            sorted.copy_from_slice(idx);
            sorted.sort_unstable();
            entries.push(self.distinct[self.position(&sorted)]);
        }
        DenseTensor::new(self.order, self.dim, entries).expect("validated symmetric tensor")
    }

    pub fn scaled(&self, c: f64) -> SymTensor {
        SymTensor {
            order: self.order,
            dim: self.dim,
            distinct: self.distinct.iter().map(|v| v * c).collect(),
        }
    }
}
