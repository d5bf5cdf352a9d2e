//! Orthonormal basis of the span of N samples through the N×N Gram matrix
//! (the snapshot method).
//!
//! With `G = U Σ² Uᵀ` restricted to its r retained eigenpairs, the tensors
//! `Q_l = Σ_n X_n b[n, l]` with `b = U Σ⁻¹` are orthonormal and span the
//! same subspace as the samples.

use log::warn;

use crate::dataset::TensorDataset;
use crate::error::{Error, Result};
use crate::linalg::{sym_eig_with, Matrix, SymmetricEig};
use crate::operator::TensorBasis;
use crate::pca::{check_retained, Method, SubspaceModel};
use crate::settings::{check_alloc, Settings};
use crate::tensor::{dot, DenseTensor, Shape};

#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis {
    sample_shape: Shape,
    q: Vec<DenseTensor>,
    mixing: Matrix,
    spectrum: Vec<f64>,
    snapshot_eig: Option<SymmetricEig>,
}

impl SubspaceBasis {
    /// Reassembles a basis from its stored parts. `mixing` is N×r.
    pub fn from_parts(
        sample_shape: Shape,
        q: Vec<DenseTensor>,
        mixing: Matrix,
        spectrum: Vec<f64>,
    ) -> Result<Self> {
        if q.len() != spectrum.len() || mixing.cols() != spectrum.len() {
            return Err(Error::dim(format!(
                "{} tensors, {} singular values, mixing matrix {}x{}",
                q.len(),
                spectrum.len(),
                mixing.rows(),
                mixing.cols()
            )));
        }
        if let Some(t) = q.iter().find(|t| t.shape() != &sample_shape) {
            return Err(Error::dim(format!(
                "basis tensor of shape {} for samples of shape {sample_shape}",
                t.shape()
            )));
        }
        Ok(Self {
            sample_shape,
            q,
            mixing,
            spectrum,
            snapshot_eig: None,
        })
    }

    pub fn sample_shape(&self) -> &Shape {
        &self.sample_shape
    }

    /// r.
    pub fn rank(&self) -> usize {
        self.q.len()
    }

    /// N.
    pub fn samples(&self) -> usize {
        self.mixing.rows()
    }

    pub fn tensors(&self) -> &[DenseTensor] {
        &self.q
    }

    /// `b = U Σ⁻¹`, N×r.
    pub fn mixing(&self) -> &Matrix {
        &self.mixing
    }

    /// σ_1 ≥ … ≥ σ_r > 0.
    pub fn spectrum(&self) -> &[f64] {
        &self.spectrum
    }

    /// The full Gram eigendecomposition, present only for freshly built bases.
    pub fn snapshot_eig(&self) -> Option<&SymmetricEig> {
        self.snapshot_eig.as_ref()
    }

    /// `⟨X, Q_l⟩` for every l.
    pub fn project(&self, x: &DenseTensor) -> Result<Vec<f64>> {
        if x.shape() != &self.sample_shape {
            return Err(Error::dim(format!(
                "tensor of shape {} projected on a basis over {}",
                x.shape(),
                self.sample_shape
            )));
        }
        Ok(self.q.iter().map(|q| dot(x.data(), q.data())).collect())
    }

    /// The Q tensors as a basis with eigenvalues σ².
    pub fn to_tensor_basis(&self) -> Result<TensorBasis> {
        TensorBasis::new(
            self.sample_shape.clone(),
            self.spectrum.iter().map(|s| s * s).collect(),
            self.q.clone(),
        )
    }
}

/// `G[n, m] = ⟨X_n, X_m⟩`.
pub fn gram_matrix(x: &TensorDataset) -> Result<Matrix> {
    let n = x.len();
    let mut g = Matrix::zeros(n, n)?;
    for a in 0..n {
        for b in a..n {
            let v = dot(x.sample(a), x.sample(b));
            g.set(a, b, v);
            g.set(b, a, v);
        }
    }
    Ok(g)
}

pub fn subspace_basis(x: &TensorDataset) -> Result<SubspaceBasis> {
    subspace_basis_with(x, &Settings::default())
}

pub fn subspace_basis_with(x: &TensorDataset, settings: &Settings) -> Result<SubspaceBasis> {
    let g = gram_matrix(x)?;
    let eig = sym_eig_with(&g, settings)?;
    let lambda_max = eig.eigenvalues.first().copied().unwrap_or(0.0);
    if lambda_max <= 0.0 {
        return Err(Error::arg(
            "every sample is zero; the spanned subspace is empty",
        ));
    }
    let r = eig
        .eigenvalues
        .iter()
        .take_while(|&&l| l > settings.eps_rank * lambda_max)
        .count();
    if r < x.len() {
        warn!(
            "dropped {} of {} snapshot components below the rank cut",
            x.len() - r,
            x.len()
        );
    }
    let sigma: Vec<f64> = eig.eigenvalues[..r].iter().map(|l| l.sqrt()).collect();
    let mixing = Matrix::from_fn(x.len(), r, |n, l| eig.eigenvectors.get(n, l) / sigma[l])?;

    check_alloc(
        (r as u128) * (x.sample_len() as u128),
        "subspace basis tensors",
    )?;
    let q = (0..r)
        .map(|l| {
            let mut acc = vec![0.0; x.sample_len()];
            for (n, s) in x.iter().enumerate() {
                let w = mixing.get(n, l);
                for (a, v) in acc.iter_mut().zip(s) {
                    *a += w * v;
                }
            }
            DenseTensor::from_vec(x.sample_shape().clone(), acc)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(SubspaceBasis {
        sample_shape: x.sample_shape().clone(),
        q,
        mixing,
        spectrum: sigma,
        snapshot_eig: Some(eig),
    })
}

/// Keeps the `m` leading Q tensors; sample n is represented by `⟨X_n, Q_l⟩`,
/// which equals `U[n, l] σ_l` when `x` is the dataset the basis came from.
pub fn project_subspace(x: &TensorDataset, b: &SubspaceBasis, m: usize) -> Result<SubspaceModel> {
    if x.sample_shape() != b.sample_shape() {
        return Err(Error::dim(format!(
            "samples of shape {} against a basis over {}",
            x.sample_shape(),
            b.sample_shape()
        )));
    }
    check_retained(m, b.rank())?;
    SubspaceModel::fit(
        Method::Subspace,
        x,
        b.q[..m].to_vec(),
        b.spectrum[..m].to_vec(),
        b.spectrum[m..].to_vec(),
        None,
        None,
    )
}
