//! Seeded inputs shared by the benchmarks.

use tenpca_core::synth::{random_dataset, random_self_adjoint, random_symmetric, seeded};
use tenpca_core::{Matrix, SelfAdjointOperator, Shape, TensorDataset};

pub const SEED: u64 = 0x5eed;

/// Image-like samples of shape `side × side × 3`.
pub fn image_dataset(side: usize, samples: usize) -> TensorDataset {
    let shape = Shape::new(vec![side, side, 3]).unwrap();
    random_dataset(&mut seeded(SEED), &shape, samples).unwrap()
}

pub fn symmetric(n: usize) -> Matrix {
    random_symmetric(&mut seeded(SEED), n).unwrap()
}

pub fn operator(domain: &[usize]) -> SelfAdjointOperator {
    random_self_adjoint(&mut seeded(SEED), &Shape::new(domain.to_vec()).unwrap()).unwrap()
}
