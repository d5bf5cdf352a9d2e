//! Dense order-d tensors stored in α order (mode 1 fastest-varying).
//!
//! Multi-indices and mode ids are 1-based at the API boundary. The entry
//! `(i_1, …, i_d)` lives at linear position
//! `m = i_1 + (i_2 - 1) I_1 + … + (i_d - 1) I_1 ⋯ I_{d-1}`,
//! so regrouping trailing modes into one linear index never moves data.

mod products;

pub(crate) use products::dot;
pub use products::{
    canonical_basis, contract, flatten, inner, mode_product, norm, outer, permute, unflatten,
};

use std::fmt;

use crate::error::{Error, Result};
use crate::settings::check_alloc;

/// Mode extents `(I_1, …, I_d)`. Order 0 is reserved for scalars.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Shape {
    dims: Vec<usize>,
    total: usize,
}

impl Shape {
    /// Builds a shape of order ≥ 1 with every extent ≥ 1.
    pub fn new(dims: impl Into<Vec<usize>>) -> Result<Self> {
        let dims = dims.into();
        if dims.is_empty() {
            return Err(Error::arg("shape must have at least one mode"));
        }
        Self::with_dims(dims)
    }

    /// The order-0 shape of a scalar (one entry).
    pub fn scalar() -> Self {
        Self {
            dims: Vec::new(),
            total: 1,
        }
    }

    /// Like [`Shape::new`] but an empty dimension list yields the scalar shape.
    pub fn with_dims(dims: impl Into<Vec<usize>>) -> Result<Self> {
        let dims = dims.into();
        let mut total: usize = 1;
        for (k, &extent) in dims.iter().enumerate() {
            if extent == 0 {
                return Err(Error::arg(format!("mode {} has zero extent", k + 1)));
            }
            total = total.checked_mul(extent).ok_or_else(|| {
                Error::arg(format!("total size of shape {dims:?} overflows usize"))
            })?;
        }
        Ok(Self { dims, total })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    /// L = I_1 ⋯ I_d.
    pub fn total_size(&self) -> usize {
        self.total
    }

    /// α strides: stride of mode k is I_1 ⋯ I_{k-1}.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = Vec::with_capacity(self.dims.len());
        let mut acc = 1;
        for &extent in &self.dims {
            strides.push(acc);
            acc *= extent;
        }
        strides
    }

    /// Shape with the modes of `self` followed by the modes of `other`.
    pub fn concat(&self, other: &Shape) -> Result<Shape> {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Shape::with_dims(dims)
    }

    /// Validated zero-based storage offset of a 1-based multi-index.
    pub(crate) fn offset_of(&self, index: &[usize]) -> Result<usize> {
        if index.len() != self.dims.len() {
            return Err(Error::dim(format!(
                "multi-index of length {} used with order-{} shape {:?}",
                index.len(),
                self.dims.len(),
                self.dims
            )));
        }
        let mut offset = 0;
        let mut stride = 1;
        for (k, (&i, &extent)) in index.iter().zip(&self.dims).enumerate() {
            if i == 0 || i > extent {
                return Err(Error::Index {
                    mode: Some(k + 1),
                    index: i,
                    extent,
                });
            }
            offset += (i - 1) * stride;
            stride *= extent;
        }
        Ok(offset)
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dims.is_empty() {
            return f.write_str("scalar");
        }
        let parts: Vec<String> = self.dims.iter().map(usize::to_string).collect();
        f.write_str(&parts.join("x"))
    }
}

/// A 1-based subscript vector `(i_1, …, i_d)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(indices: impl Into<Vec<usize>>) -> Self {
        Self(indices.into())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Checks `1 <= i_k <= I_k` for every mode.
    pub fn validate(&self, shape: &Shape) -> Result<()> {
        shape.offset_of(&self.0).map(|_| ())
    }
}

impl From<Vec<usize>> for MultiIndex {
    fn from(v: Vec<usize>) -> Self {
        Self(v)
    }
}

impl From<&[usize]> for MultiIndex {
    fn from(v: &[usize]) -> Self {
        Self(v.to_vec())
    }
}

/// α(i): the 1-based linear position of a multi-index.
pub fn linear_index(index: &MultiIndex, shape: &Shape) -> Result<usize> {
    shape.offset_of(index.as_slice()).map(|o| o + 1)
}

/// α⁻¹(m) by successive division.
pub fn inverse_linear_index(m: usize, shape: &Shape) -> Result<MultiIndex> {
    let total = shape.total_size();
    if m == 0 || m > total {
        return Err(Error::Index {
            mode: None,
            index: m,
            extent: total,
        });
    }
    let mut rest = m - 1;
    let indices = shape
        .dims()
        .iter()
        .map(|&extent| {
            let i = rest % extent;
            rest /= extent;
            i + 1
        })
        .collect();
    Ok(MultiIndex(indices))
}

/// The matrix T whose m-th row is α⁻¹(m).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexTable {
    shape: Shape,
    entries: Vec<usize>,
}

impl IndexTable {
    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    /// Number of rows, L.
    pub fn len(&self) -> usize {
        self.shape.total_size()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row `m` (1-based) of the table.
    pub fn row(&self, m: usize) -> Result<&[usize]> {
        if m == 0 || m > self.len() {
            return Err(Error::Index {
                mode: None,
                index: m,
                extent: self.len(),
            });
        }
        let d = self.shape.order();
        Ok(&self.entries[(m - 1) * d..m * d])
    }

    pub fn rows(&self) -> impl Iterator<Item = &[usize]> {
        let d = self.shape.order();
        (0..self.len()).map(move |r| &self.entries[r * d..(r + 1) * d])
    }
}

/// Tabulates α⁻¹ over the whole Cartesian interval.
pub fn index_table(shape: &Shape) -> Result<IndexTable> {
    let d = shape.order();
    let total = shape.total_size();
    check_alloc((total as u128) * (d as u128), "index table")?;
    let mut entries = Vec::with_capacity(total * d);
    let mut idx = vec![1usize; d];
    for _ in 0..total {
        entries.extend_from_slice(&idx);
        advance_one_based(&mut idx, shape.dims());
    }
    Ok(IndexTable {
        shape: shape.clone(),
        entries,
    })
}

/// Odometer step in α order over 1-based indices.
pub(crate) fn advance_one_based(idx: &mut [usize], dims: &[usize]) {
    for (i, &extent) in idx.iter_mut().zip(dims) {
        if *i < extent {
            *i += 1;
            return;
        }
        *i = 1;
    }
}

/// Order-d array of f64 entries in α order.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    shape: Shape,
    data: Vec<f64>,
}

impl DenseTensor {
    pub fn zeros(shape: Shape) -> Result<Self> {
        check_alloc(
            shape.total_size() as u128,
            &format!("tensor of shape {shape}"),
        )?;
        let data = vec![0.0; shape.total_size()];
        Ok(Self { shape, data })
    }

    /// Wraps an α-ordered buffer. Rejects length mismatch and non-finite entries.
    pub fn from_vec(shape: Shape, data: Vec<f64>) -> Result<Self> {
        if data.len() != shape.total_size() {
            return Err(Error::dim(format!(
                "buffer of length {} does not match shape {shape} (L = {})",
                data.len(),
                shape.total_size()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::arg(format!(
                "non-finite entry at linear position {}",
                pos + 1
            )));
        }
        Ok(Self { shape, data })
    }

    /// Builds a tensor from a function of the 1-based multi-index.
    pub fn from_fn(shape: Shape, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        check_alloc(
            shape.total_size() as u128,
            &format!("tensor of shape {shape}"),
        )?;
        let mut idx = vec![1usize; shape.order()];
        let mut data = Vec::with_capacity(shape.total_size());
        for _ in 0..shape.total_size() {
            data.push(f(&idx));
            advance_one_based(&mut idx, shape.dims());
        }
        Self::from_vec(shape, data)
    }

    pub fn scalar(value: f64) -> Self {
        Self {
            shape: Shape::scalar(),
            data: vec![value],
        }
    }

    /// Internal constructor for library-produced buffers of known length.
    pub(crate) fn from_parts(shape: Shape, data: Vec<f64>) -> Self {
        debug_assert_eq!(shape.total_size(), data.len());
        Self { shape, data }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn dims(&self) -> &[usize] {
        self.shape.dims()
    }

    pub fn order(&self) -> usize {
        self.shape.order()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Entries in α order.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    /// Entry at a 1-based multi-index.
    pub fn get(&self, index: &[usize]) -> Result<f64> {
        Ok(self.data[self.shape.offset_of(index)?])
    }

    pub fn at(&self, index: &MultiIndex) -> Result<f64> {
        self.get(index.as_slice())
    }

    pub fn set(&mut self, index: &[usize], value: f64) -> Result<()> {
        if !value.is_finite() {
            return Err(Error::arg("refusing to store a non-finite value"));
        }
        let offset = self.shape.offset_of(index)?;
        self.data[offset] = value;
        Ok(())
    }

    /// Value of an order-0 tensor (or any single-entry tensor).
    pub fn scalar_value(&self) -> Result<f64> {
        if self.data.len() != 1 {
            return Err(Error::dim(format!(
                "tensor of shape {} is not a scalar",
                self.shape
            )));
        }
        Ok(self.data[0])
    }

    /// Reinterprets the buffer under another shape with the same L.
    pub fn reshape(self, shape: Shape) -> Result<Self> {
        if shape.total_size() != self.data.len() {
            return Err(Error::dim(format!(
                "cannot reshape {} (L = {}) into {shape} (L = {})",
                self.shape,
                self.data.len(),
                shape.total_size()
            )));
        }
        Ok(Self {
            shape,
            data: self.data,
        })
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            shape: self.shape.clone(),
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    /// `self += factor * other`.
    pub fn add_scaled(&mut self, factor: f64, other: &DenseTensor) -> Result<()> {
        self.require_same_shape(other)?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += factor * b;
        }
        Ok(())
    }

    pub fn sub(&self, other: &DenseTensor) -> Result<DenseTensor> {
        let mut out = self.clone();
        out.add_scaled(-1.0, other)?;
        Ok(out)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub(crate) fn require_same_shape(&self, other: &DenseTensor) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::dim(format!(
                "shapes differ: {} vs {}",
                self.shape, other.shape
            )));
        }
        Ok(())
    }
}
