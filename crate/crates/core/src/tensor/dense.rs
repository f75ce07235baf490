use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::sym::SymTensor;
use crate::error::{check_dims, Result, VtcpError};

/// An order-`m`, dimension-`n` real tensor stored densely in row-major order.
///
/// The multi-index `(i1, ..., im)` (zero based) lives at `sum_k i_k * n^(m-k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTensor", into = "RawTensor")]
pub struct DenseTensor {
    order: usize,
    dim: usize,
    entries: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawTensor {
    order: usize,
    dim: usize,
    entries: Vec<f64>,
}

impl TryFrom<RawTensor> for DenseTensor {
    type Error = VtcpError;
    fn try_from(raw: RawTensor) -> Result<Self> {
        DenseTensor::new(raw.order, raw.dim, raw.entries)
    }
}

impl From<DenseTensor> for RawTensor {
    fn from(t: DenseTensor) -> Self {
        RawTensor {
            order: t.order,
            dim: t.dim,
            entries: t.entries,
        }
    }
}

pub(crate) fn checked_len(order: usize, dim: usize) -> Result<usize> {
    dim.checked_pow(order as u32)
        .ok_or_else(|| VtcpError::InvalidTensor(format!("{dim}^{order} entries overflow")))
}

/// Odometer over all multi-indices of `order` slots, each in `0..dim`, in row-major order.
#[derive(Debug, Clone)]
pub(crate) struct MultiIndex {
    idx: Vec<usize>,
    dim: usize,
    started: bool,
    done: bool,
}

impl MultiIndex {
    pub(crate) fn new(order: usize, dim: usize) -> Self {
        MultiIndex {
            idx: vec![0; order],
            dim,
            started: false,
            done: dim == 0,
        }
    }

    /// Advances to the next multi-index; returns `None` once exhausted.
    pub(crate) fn next_index(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.idx);
        }
        for slot in (0..self.idx.len()).rev() {
            self.idx[slot] += 1;
            if self.idx[slot] < self.dim {
                return Some(&self.idx);
            }
            self.idx[slot] = 0;
        }
        self.done = true;
        None
    }
}

impl DenseTensor {
    pub fn new(order: usize, dim: usize, entries: Vec<f64>) -> Result<Self> {
        if order == 0 || dim == 0 {
            return Err(VtcpError::InvalidTensor(format!(
                "order and dimension must be positive (got order {order}, dim {dim})"
            )));
        }
        let len = checked_len(order, dim)?;
        if entries.len() != len {
            return Err(VtcpError::InvalidTensor(format!(
                "expected {len} entries for order {order} dimension {dim}, got {}",
                entries.len()
            )));
        }
        if let Some(pos) = entries.iter().position(|v| !v.is_finite()) {
            return Err(VtcpError::InvalidTensor(format!(
                "entry {pos} is not finite ({})",
                entries[pos]
            )));
        }
        Ok(DenseTensor {
            order,
            dim,
            entries,
        })
    }

    pub fn zeros(order: usize, dim: usize) -> Result<Self> {
        let len = checked_len(order, dim)?;
        Self::new(order, dim, vec![0.0; len])
    }

    /// Builds a tensor by evaluating `f` at every multi-index.
    pub fn from_fn(order: usize, dim: usize, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let mut entries = Vec::with_capacity(checked_len(order, dim)?);
        let mut it = MultiIndex::new(order, dim);
        while let Some(idx) = it.next_index() {
            entries.push(f(idx));
        }
        Self::new(order, dim, entries)
    }

    /// The delta tensor: 1 where all indices coincide, 0 elsewhere.
    pub fn unit(order: usize, dim: usize) -> Result<Self> {
        Self::diagonal(order, &vec![1.0; dim])
    }

    /// Tensor whose only nonzero entries are `a_{i...i} = diag[i]`.
    pub fn diagonal(order: usize, diag: &[f64]) -> Result<Self> {
        let mut t = Self::zeros(order, diag.len())?;
        for (i, &d) in diag.iter().enumerate() {
            let f = t.diagonal_position(i);
            t.entries[f] = d;
        }
        Self::new(order, diag.len(), t.entries)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<f64> {
        self.entries
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.order);
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.order];
        for slot in (0..self.order).rev() {
            idx[slot] = flat % self.dim;
            flat /= self.dim;
        }
        idx
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.entries[self.flat_index(idx)]
    }

    fn diagonal_position(&self, i: usize) -> usize {
        // (i, i, ..., i) = i * (n^(m-1) + ... + n + 1)
        (0..self.order).fold(0, |acc, _| acc * self.dim + i)
    }

    /// Principal diagonal `a_{i...i}`.
    pub fn diagonal_entries(&self) -> Vec<f64> {
        (0..self.dim)
            .map(|i| self.entries[self.diagonal_position(i)])
            .collect()
    }

    /// Iterates `(multi-index, value)` over every entry.
    pub fn for_each_entry(&self, mut f: impl FnMut(&[usize], f64)) {
        let mut it = MultiIndex::new(self.order, self.dim);
        let mut flat = 0;
        while let Some(idx) = it.next_index() {
            f(idx, self.entries[flat]);
            flat += 1;
        }
    }

    fn block_len(&self) -> usize {
        self.entries.len() / self.dim
    }

    /// Row `i`: the entries `a_{i, *, ..., *}` as a flat slice.
    pub fn row(&self, i: usize) -> &[f64] {
        let b = self.block_len();
        &self.entries[i * b..(i + 1) * b]
    }

    /// `A x^(m-1)`: contracts every trailing mode with `x`.
    pub fn power_apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dims("power_apply vector", self.dim, x.len())?;
        let n = self.dim;
        let mut out = Vec::with_capacity(n);
        let mut buf = Vec::with_capacity(self.block_len());
        for i in 0..n {
            buf.clear();
            buf.extend_from_slice(self.row(i));
            // contract the last mode repeatedly
            for _ in 1..self.order {
                let len = buf.len() / n;
                for j in 0..len {
                    let chunk = &buf[j * n..(j + 1) * n];
                    let s: f64 = chunk.iter().zip(x).map(|(a, b)| a * b).sum();
                    buf[j] = s;
                }
                buf.truncate(len);
            }
            out.push(buf[0]);
        }
        Ok(out)
    }

    /// Jacobian of `x -> A x^(m-1)`.
    pub fn power_jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        check_dims("power_jacobian vector", self.dim, x.len())?;
        let n = self.dim;
        let m = self.order;
        let mut jac = DMatrix::zeros(n, n);
        if m < 2 {
            return Ok(jac);
        }
        let mut prefix = vec![1.0; m];
        let mut suffix = vec![1.0; m + 1];
        self.for_each_entry(|idx, a| {
            if a == 0.0 {
                return;
            }
            // prefix[k] = prod_{1 <= l < k} x_{i_l}, suffix[k] = prod_{l >= k} x_{i_l}
            prefix[1] = 1.0;
            for k in 2..m {
                prefix[k] = prefix[k - 1] * x[idx[k - 1]];
            }
            suffix[m] = 1.0;
            for k in (1..m).rev() {
                suffix[k] = suffix[k + 1] * x[idx[k]];
            }
            for k in 1..m {
                jac[(idx[0], idx[k])] += a * prefix[k] * suffix[k + 1];
            }
        });
        Ok(jac)
    }

    /// Generalized product `A . B` of an order-`m` tensor with an order-`k` tensor,
    /// giving order `(m-1)(k-1) + 1`.
    pub fn shao_product(&self, other: &DenseTensor) -> Result<DenseTensor> {
        check_dims("shao_product dimension", self.dim, other.dim)?;
        if self.order < 2 {
            return Err(VtcpError::InvalidTensor(
                "left factor of the generalized product needs order >= 2".into(),
            ));
        }
        let n = self.dim;
        let m = self.order;
        let k = other.order;
        if k == 1 {
            return DenseTensor::new(1, n, self.power_apply(&other.entries)?);
        }
        let out_order = (m - 1) * (k - 1) + 1;
        let tail = other.block_len(); // n^(k-1) choices of each alpha_j
        let alphas = checked_len(m - 1, tail)?;
        let mut entries = Vec::with_capacity(checked_len(out_order, n)?);
        let mut alpha = vec![0usize; m - 1];
        for i in 0..n {
            let row = self.row(i);
            for combo in 0..alphas {
                let mut c = combo;
                for slot in (0..m - 1).rev() {
                    alpha[slot] = c % tail;
                    c /= tail;
                }
                let mut sum = 0.0;
                let mut inner = MultiIndex::new(m - 1, n);
                let mut flat = 0;
                while let Some(js) = inner.next_index() {
                    let a = row[flat];
                    flat += 1;
                    if a == 0.0 {
                        continue;
                    }
                    let mut prod = a;
                    for (slot, &j) in js.iter().enumerate() {
                        prod *= other.entries[j * tail + alpha[slot]];
                        if prod == 0.0 {
                            break;
                        }
                    }
                    sum += prod;
                }
                entries.push(sum);
            }
        }
        DenseTensor::new(out_order, n, entries)
    }

    /// `(A B)_i = sum a_{i i2...im} b_{i2...im}` for an order-`(m-1)` tensor `B`.
    pub fn contract_trailing(&self, other: &DenseTensor) -> Result<Vec<f64>> {
        check_dims("contraction dimension", self.dim, other.dim)?;
        if other.order + 1 != self.order {
            return Err(VtcpError::Dimension(format!(
                "contraction needs order {} operand, got {}",
                self.order - 1,
                other.order
            )));
        }
        Ok((0..self.dim)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(&other.entries)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    /// `A Z` for a symmetric tensor `Z` of order `m - 1`.
    pub fn sym_apply(&self, z: &SymTensor) -> Result<Vec<f64>> {
        if self.order < 2 {
            return Err(VtcpError::Dimension(
                "sym_apply needs a tensor of order >= 2".into(),
            ));
        }
        if z.order() + 1 != self.order {
            return Err(VtcpError::Dimension(format!(
                "sym_apply needs a symmetric tensor of order {}, got {}",
                self.order - 1,
                z.order()
            )));
        }
        check_dims("sym_apply dimension", self.dim, z.dim())?;
        self.contract_trailing(&z.to_dense())
    }

    /// True iff every entry is invariant under permutation of its indices.
    pub fn is_symmetric(&self) -> bool {
        if self.order <= 1 {
            return true;
        }
        let mut sorted = vec![0; self.order];
        let mut ok = true;
        self.for_each_entry(|idx, v| {
            if !ok {
                return;
            }
            sorted.copy_from_slice(idx);
            sorted.sort_unstable();
            if self.get(&sorted) != v {
                ok = false;
            }
        });
        ok
    }

    fn same_shape(&self, other: &DenseTensor) -> Result<()> {
        if self.order != other.order || self.dim != other.dim {
            return Err(VtcpError::Dimension(format!(
                "tensor shapes differ: order {} dim {} vs order {} dim {}",
                self.order, self.dim, other.order, other.dim
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &DenseTensor) -> Result<DenseTensor> {
        self.same_shape(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        DenseTensor::new(self.order, self.dim, entries)
    }

    pub fn scaled(&self, c: f64) -> DenseTensor {
        DenseTensor {
            order: self.order,
            dim: self.dim,
            entries: self.entries.iter().map(|a| a * c).collect(),
        }
    }

    /// Multiplies row `i` by `weights[i]`, i.e. the product `D . A` with `D = diag(weights)`.
    pub fn row_scaled(&self, weights: &[f64]) -> Result<DenseTensor> {
        check_dims("row scaling", self.dim, weights.len())?;
        let b = self.block_len();
        let entries = self
            .entries
            .iter()
            .enumerate()
            .map(|(f, a)| a * weights[f / b])
            .collect();
        DenseTensor::new(self.order, self.dim, entries)
    }

    /// Largest absolute entry difference against a tensor of the same shape.
    pub fn max_abs_diff(&self, other: &DenseTensor) -> Result<f64> {
        self.same_shape(other)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&a| a == 0.0)
    }
}
