//! Seeded synthetic data for tests, benchmarks and the `verify` command.
//!
//! All generators draw from ChaCha8 seeded with a `u64`, so a seed fixes the
//! output bit-for-bit across platforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::TensorDataset;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::operator::SelfAdjointOperator;
use crate::tensor::{DenseTensor, Shape};

pub type SynthRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SynthRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries uniform in [-1, 1).
pub fn random_tensor<R: Rng + ?Sized>(rng: &mut R, shape: &Shape) -> Result<DenseTensor> {
    let data = (0..shape.total_size())
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    DenseTensor::from_vec(shape.clone(), data)
}

pub fn random_dataset<R: Rng + ?Sized>(
    rng: &mut R,
    sample_shape: &Shape,
    n: usize,
) -> Result<TensorDataset> {
    let samples = (0..n)
        .map(|_| random_tensor(rng, sample_shape))
        .collect::<Result<Vec<_>>>()?;
    TensorDataset::from_samples(&samples)
}

/// Entries uniform in [-1, 1).
pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Result<Matrix> {
    Matrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
}

/// `(B + Bᵀ)/2` for a uniform random B.
pub fn random_symmetric<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<Matrix> {
    let b = random_matrix(rng, n, n)?;
    Matrix::from_fn(n, n, |i, j| 0.5 * (b.get(i, j) + b.get(j, i)))
}

pub fn random_self_adjoint<R: Rng + ?Sized>(
    rng: &mut R,
    domain: &Shape,
) -> Result<SelfAdjointOperator> {
    let m = random_symmetric(rng, domain.total_size())?;
    SelfAdjointOperator::from_matrix(domain, &m)
}

/// Orthonormalizes `columns` in order, in place (modified Gram-Schmidt,
/// two passes). Fails if a column is numerically dependent on earlier ones.
fn orthonormalize(columns: &mut [Vec<f64>]) -> Result<()> {
    for k in 0..columns.len() {
        let (done, rest) = columns.split_at_mut(k);
        let v = &mut rest[0];
        let start: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        for _ in 0..2 {
            for q in done.iter() {
                let p: f64 = q.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(q).for_each(|(x, qv)| *x -= p * qv);
            }
        }
        let nv: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nv <= 1e-8 * start || nv == 0.0 {
            return Err(Error::arg("columns are numerically dependent"));
        }
        v.iter_mut().for_each(|x| *x /= nv);
    }
    Ok(())
}

/// Q factor of the QR decomposition of a random square matrix.
pub fn random_orthogonal<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<Matrix> {
    let mut cols: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    orthonormalize(&mut cols)?;
    Matrix::from_fn(n, n, |i, j| cols[j][i])
}

/// `count` pairwise orthonormal tensors of the given shape.
pub fn random_orthonormal_tensors<R: Rng + ?Sized>(
    rng: &mut R,
    shape: &Shape,
    count: usize,
) -> Result<Vec<DenseTensor>> {
    if count > shape.total_size() {
        return Err(Error::arg(format!(
            "{count} orthonormal tensors requested in a space of dimension {}",
            shape.total_size()
        )));
    }
    let mut cols: Vec<Vec<f64>> = (0..count)
        .map(|_| Ok(random_tensor(rng, shape)?.into_data()))
        .collect::<Result<_>>()?;
    orthonormalize(&mut cols)?;
    cols.into_iter()
        .map(|c| DenseTensor::from_vec(shape.clone(), c))
        .collect()
}

/// N samples drawn as random combinations of `rank` fixed random tensors, so
/// the span has dimension `rank` (almost surely, when `rank ≤ min(N, L)`).
pub fn planted_dataset<R: Rng + ?Sized>(
    rng: &mut R,
    sample_shape: &Shape,
    rank: usize,
    n: usize,
) -> Result<TensorDataset> {
    if rank == 0 || rank > sample_shape.total_size() {
        return Err(Error::arg(format!(
            "planted rank {rank} outside 1..={}",
            sample_shape.total_size()
        )));
    }
    let generators = random_orthonormal_tensors(rng, sample_shape, rank)?;
    let samples = (0..n)
        .map(|_| {
            let mut s = DenseTensor::zeros(sample_shape.clone())?;
            for g in &generators {
                s.add_scaled(rng.random_range(-1.0..1.0), g)?;
            }
            Ok(s)
        })
        .collect::<Result<Vec<_>>>()?;
    TensorDataset::from_samples(&samples)
}
