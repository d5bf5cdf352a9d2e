use crate::error::{Error, Result};
use crate::tensor::{DenseTensor, Shape};

/// N tensors of a common shape, stored as one order-(d+1) tensor whose last
/// mode is the sample index. Sample `n` is therefore the contiguous slice
/// `[n·L, (n+1)·L)` of the buffer.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorDataset {
    sample_shape: Shape,
    samples: DenseTensor,
}

impl TensorDataset {
    /// Wraps an order-(d+1) tensor with the sample axis last.
    pub fn new(samples: DenseTensor) -> Result<Self> {
        if samples.order() < 2 {
            return Err(Error::dim(format!(
                "a dataset needs an order ≥ 2 tensor (sample axis last), got shape {}",
                samples.shape()
            )));
        }
        let dims = samples.dims();
        let sample_shape = Shape::new(dims[..dims.len() - 1].to_vec())?;
        Ok(Self {
            sample_shape,
            samples,
        })
    }

    pub fn from_samples(samples: &[DenseTensor]) -> Result<Self> {
        let first = samples
            .first()
            .ok_or_else(|| Error::arg("dataset must contain at least one sample"))?;
        let shape = first.shape().clone();
        if shape.order() == 0 {
            return Err(Error::dim("samples must have order ≥ 1"));
        }
        let mut data = Vec::with_capacity(shape.total_size() * samples.len());
        for (n, s) in samples.iter().enumerate() {
            if s.shape() != &shape {
                return Err(Error::dim(format!(
                    "sample {n} has shape {}, expected {shape}",
                    s.shape()
                )));
            }
            data.extend_from_slice(s.data());
        }
        let mut dims = shape.dims().to_vec();
        dims.push(samples.len());
        Self::new(DenseTensor::from_vec(Shape::new(dims)?, data)?)
    }

    pub fn sample_shape(&self) -> &Shape {
        &self.sample_shape
    }

    /// N.
    pub fn len(&self) -> usize {
        *self.samples.dims().last().expect("order ≥ 2")
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// L, entries per sample.
    pub fn sample_len(&self) -> usize {
        self.sample_shape.total_size()
    }

    pub fn tensor(&self) -> &DenseTensor {
        &self.samples
    }

    pub fn into_tensor(self) -> DenseTensor {
        self.samples
    }

    /// Entries of sample `n` (0-based) in α order.
    pub fn sample(&self, n: usize) -> &[f64] {
        let l = self.sample_len();
        &self.samples.data()[n * l..(n + 1) * l]
    }

    pub fn sample_tensor(&self, n: usize) -> DenseTensor {
        DenseTensor::from_parts(self.sample_shape.clone(), self.sample(n).to_vec())
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.samples.data().chunks_exact(self.sample_len())
    }

    pub fn mean(&self) -> DenseTensor {
        let l = self.sample_len();
        let mut acc = vec![0.0; l];
        for s in self.iter() {
            for (a, v) in acc.iter_mut().zip(s) {
                *a += v;
            }
        }
        let n = self.len() as f64;
        acc.iter_mut().for_each(|a| *a /= n);
        DenseTensor::from_parts(self.sample_shape.clone(), acc)
    }

    /// Copy with `center` subtracted from every sample.
    pub fn centered_by(&self, center: &DenseTensor) -> Result<TensorDataset> {
        if center.shape() != &self.sample_shape {
            return Err(Error::dim(format!(
                "center of shape {} for samples of shape {}",
                center.shape(),
                self.sample_shape
            )));
        }
        let mut data = self.samples.data().to_vec();
        for chunk in data.chunks_exact_mut(self.sample_len()) {
            for (v, c) in chunk.iter_mut().zip(center.data()) {
                *v -= c;
            }
        }
        Ok(TensorDataset {
            sample_shape: self.sample_shape.clone(),
            samples: DenseTensor::from_parts(self.samples.shape().clone(), data),
        })
    }

    /// Σ_n ‖X_n‖².
    pub fn energy(&self) -> f64 {
        self.samples.data().iter().map(|v| v * v).sum()
    }
}
