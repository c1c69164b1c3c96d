//! Sparse order-N, dimension-I real tensors and the multilinear evaluations
//! built on them.
//!
//! A tensor is stored as a coordinate list sorted lexicographically by index
//! tuple. Indices are 0-based. Entries that are not stored are exactly zero.
//!
//! For a tensor `A` of order `N` and a vector `x` of length `I`:
//!
//! ```text
//! (A x^{N-1})_i = sum_{i2..iN} a[i, i2, .., iN] * x[i2] * .. * x[iN]
//! A x^N         = x . (A x^{N-1})
//! ```
//!
//! Only the trailing `N - 1` modes are contracted and no symmetrization is
//! applied, so non-symmetric tensors behave exactly as written.

use std::collections::BTreeMap;

use crate::error::{check_len, Error, Result};

/// Dense materialization is refused above this many entries.
pub const DENSE_LIMIT: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    order: usize,
    dim: usize,
    // Flattened index tuples, `order` per entry, sorted lexicographically.
    indices: Vec<usize>,
    values: Vec<f64>,
}

/// Row-major square matrix, used for Jacobians of `x -> A x^{N-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        DenseMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    fn add_at(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] += v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// `y = M^T v`.
    pub fn transpose_mul(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (i, vi) in v.iter().enumerate() {
            if *vi == 0.0 {
                continue;
            }
            for (o, m) in out.iter_mut().zip(self.row(i)) {
                *o += vi * m;
            }
        }
        out
    }
}

fn validate_shape(order: usize, dim: usize) -> Result<()> {
    if order < 2 {
        return Err(Error::InvalidShape(format!("order must be at least 2, got {order}")));
    }
    if dim < 1 {
        return Err(Error::InvalidShape("dimension must be at least 1".into()));
    }
    Ok(())
}

impl Tensor {
    /// Builds a tensor from `(index tuple, value)` pairs.
    ///
    /// Index tuples must have length `order`, lie in `[0, dim)` and be
    /// distinct. Duplicates are rejected rather than summed.
    pub fn new(order: usize, dim: usize, entries: Vec<(Vec<usize>, f64)>) -> Result<Self> {
        validate_shape(order, dim)?;
        let mut map: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        for (index, value) in entries {
            if index.len() != order {
                return Err(Error::InvalidShape(format!(
                    "index {index:?} has length {}, expected {order}",
                    index.len()
                )));
            }
            if index.iter().any(|&k| k >= dim) {
                return Err(Error::IndexOutOfRange { index, dim });
            }
            if !value.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "entry {index:?} has non-finite value {value}"
                )));
            }
            if map.contains_key(&index) {
                return Err(Error::DuplicateEntry(index));
            }
            map.insert(index, value);
        }
        Ok(Self::from_sorted_map(order, dim, map))
    }

    fn from_sorted_map(order: usize, dim: usize, map: BTreeMap<Vec<usize>, f64>) -> Self {
        let mut indices = Vec::with_capacity(map.len() * order);
        let mut values = Vec::with_capacity(map.len());
        for (index, value) in map {
            indices.extend_from_slice(&index);
            values.push(value);
        }
        Tensor {
            order,
            dim,
            indices,
            values,
        }
    }

    pub fn zeros(order: usize, dim: usize) -> Result<Self> {
        validate_shape(order, dim)?;
        Ok(Tensor {
            order,
            dim,
            indices: Vec::new(),
            values: Vec::new(),
        })
    }

    /// Diagonal tensor with `a[i, i, .., i] = 1`.
    pub fn identity(order: usize, dim: usize) -> Result<Self> {
        Self::diagonal(order, &vec![1.0; dim])
    }

    pub fn diagonal(order: usize, diag: &[f64]) -> Result<Self> {
        let entries = diag.iter().enumerate().map(|(i, &v)| (vec![i; order], v)).collect();
        Self::new(order, diag.len(), entries)
    }

    /// Order-2 tensor with `a[i, j] = rows[i][j]`; zeros are not stored.
    pub fn from_matrix(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            check_len(dim, row.len())?;
            for (j, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    entries.push((vec![i, j], v));
                }
            }
        }
        Self::new(2, dim, entries)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn same_shape(&self, other: &Tensor) -> bool {
        self.order == other.order && self.dim == other.dim
    }

    pub(crate) fn check_shape(&self, other: &Tensor) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch {
                order_a: self.order,
                dim_a: self.dim,
                order_b: other.order,
                dim_b: other.dim,
            })
        }
    }

    /// Stored entries in lexicographic index order.
    pub fn entries(&self) -> impl Iterator<Item = (&[usize], f64)> + '_ {
        self.indices.chunks_exact(self.order).zip(self.values.iter().copied())
    }

    /// Value at `index`; unspecified entries are zero.
    pub fn get(&self, index: &[usize]) -> f64 {
        self.position(index).map_or(0.0, |p| self.values[p])
    }

    fn position(&self, index: &[usize]) -> Option<usize> {
        let n = self.values.len();
        let (mut lo, mut hi) = (0, n);
        while lo < hi {
            let mid = (lo + hi) / 2;
            let probe = &self.indices[mid * self.order..(mid + 1) * self.order];
            match probe.cmp(index) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    /// `A x^{N-1}`.
    pub fn contract_to_vector(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim, x.len())?;
        let mut out = vec![0.0; self.dim];
        for (index, value) in self.entries() {
            let mut term = value;
            for &k in &index[1..] {
                term *= x[k];
            }
            out[index[0]] += term;
        }
        Ok(out)
    }

    /// `A x^N`, computed as `x . (A x^{N-1})`.
    pub fn contract_to_scalar(&self, x: &[f64]) -> Result<f64> {
        let ax = self.contract_to_vector(x)?;
        Ok(dot(x, &ax))
    }

    /// Jacobian of `x -> A x^{N-1}`, summing the derivative over every
    /// trailing slot.
    pub fn jacobian(&self, x: &[f64]) -> Result<DenseMatrix> {
        check_len(self.dim, x.len())?;
        let mut jac = DenseMatrix::zeros(self.dim);
        let tail = self.order - 1;
        for (index, value) in self.entries() {
            let rest = &index[1..];
            for slot in 0..tail {
                let mut term = value;
                for (m, &k) in rest.iter().enumerate() {
                    if m != slot {
                        term *= x[k];
                    }
                }
                jac.add_at(index[0], rest[slot], term);
            }
        }
        Ok(jac)
    }

    /// `A x^{N-1}` together with its Jacobian.
    pub fn contract_with_jacobian(&self, x: &[f64]) -> Result<(Vec<f64>, DenseMatrix)> {
        Ok((self.contract_to_vector(x)?, self.jacobian(x)?))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `<A, B>`: sum of products of aligned entries.
    pub fn scalar_product(&self, other: &Tensor) -> Result<f64> {
        self.check_shape(other)?;
        let mut i = 0;
        let mut j = 0;
        let mut acc = 0.0;
        let ord = self.order;
        while i < self.nnz() && j < other.nnz() {
            let a = &self.indices[i * ord..(i + 1) * ord];
            let b = &other.indices[j * ord..(j + 1) * ord];
            match a.cmp(b) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += self.values[i] * other.values[j];
                    i += 1;
                    j += 1;
                }
            }
        }
        Ok(acc)
    }

    /// `sum_k c_k T_k` over same-shaped tensors. Exact zeros are dropped.
    pub fn linear_combination(order: usize, dim: usize, terms: &[(f64, &Tensor)]) -> Result<Tensor> {
        validate_shape(order, dim)?;
        let mut map: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        for (c, t) in terms {
            if t.order != order || t.dim != dim {
                return Err(Error::ShapeMismatch {
                    order_a: order,
                    dim_a: dim,
                    order_b: t.order,
                    dim_b: t.dim,
                });
            }
            if *c == 0.0 {
                continue;
            }
            for (index, value) in t.entries() {
                *map.entry(index.to_vec()).or_insert(0.0) += c * value;
            }
        }
        map.retain(|_, v| *v != 0.0);
        Ok(Self::from_sorted_map(order, dim, map))
    }

    pub fn add(&self, other: &Tensor) -> Result<Tensor> {
        Self::linear_combination(self.order, self.dim, &[(1.0, self), (1.0, other)])
    }

    pub fn sub(&self, other: &Tensor) -> Result<Tensor> {
        Self::linear_combination(self.order, self.dim, &[(1.0, self), (-1.0, other)])
    }

    pub fn scale(&self, c: f64) -> Tensor {
        Tensor {
            order: self.order,
            dim: self.dim,
            indices: self.indices.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// Number of entries a dense materialization would hold.
    pub fn dense_len(&self) -> u128 {
        (self.dim as u128).saturating_pow(self.order as u32)
    }

    /// Row-major dense materialization (`a[i1, .., iN]` at
    /// `i1 * I^{N-1} + .. + iN`). Refused above [`DENSE_LIMIT`] entries.
    pub fn to_dense(&self) -> Result<Vec<f64>> {
        let len = self.dense_len();
        if len > DENSE_LIMIT {
            return Err(Error::TooLarge(len));
        }
        let mut out = vec![0.0; len as usize];
        for (index, value) in self.entries() {
            let flat = index.iter().fold(0usize, |acc, &k| acc * self.dim + k);
            out[flat] = value;
        }
        Ok(out)
    }

    /// Dense tensor from row-major values (inverse of [`Tensor::to_dense`]).
    pub fn from_dense(order: usize, dim: usize, values: &[f64]) -> Result<Tensor> {
        validate_shape(order, dim)?;
        let len = (dim as u128).saturating_pow(order as u32);
        if len > DENSE_LIMIT {
            return Err(Error::TooLarge(len));
        }
        check_len(len as usize, values.len())?;
        let mut entries = Vec::new();
        for (flat, &v) in values.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            let mut index = vec![0; order];
            let mut rem = flat;
            for slot in (0..order).rev() {
                index[slot] = rem % dim;
                rem /= dim;
            }
            entries.push((index, v));
        }
        Tensor::new(order, dim, entries)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
