//! Rank-1 orthonormal basis from mode-wise contractions, and the SVD of the
//! coefficient matrix it induces.
//!
//! For each mode k the dataset is contracted with itself over every index
//! except `i_k`, giving a symmetric `I_k×I_k` matrix `A^k = U^k Σ^k U^kᵀ`.
//! The L tensors `U^1[:, j_1] ∘ … ∘ U^d[:, j_d]` are orthonormal, and the
//! coefficients of sample n against them form row n of `D`.

use crate::dataset::TensorDataset;
use crate::error::{Error, Result};
use crate::linalg::{svd_with, sym_eig_with, Matrix, Svd};
use crate::pca::{check_retained, Method, SubspaceModel};
use crate::settings::Settings;
use crate::tensor::{inverse_linear_index, mode_product, outer, DenseTensor, Shape};

#[derive(Debug, Clone, PartialEq)]
pub struct Rank1Basis {
    sample_shape: Shape,
    factors: Vec<Matrix>,
    mode_spectra: Vec<Vec<f64>>,
}

impl Rank1Basis {
    /// `factors[k]` is `I_k×I_k` with orthonormal columns; `mode_spectra[k]`
    /// has `I_k` entries.
    pub fn new(
        sample_shape: Shape,
        factors: Vec<Matrix>,
        mode_spectra: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let d = sample_shape.order();
        if factors.len() != d || mode_spectra.len() != d {
            return Err(Error::dim(format!(
                "{} factors and {} spectra for an order-{d} shape",
                factors.len(),
                mode_spectra.len()
            )));
        }
        for (k, (u, s)) in factors.iter().zip(&mode_spectra).enumerate() {
            let ik = sample_shape.dims()[k];
            if u.rows() != ik || u.cols() != ik || s.len() != ik {
                return Err(Error::dim(format!(
                    "mode {}: factor {}x{} with {} eigenvalues, extent {ik}",
                    k + 1,
                    u.rows(),
                    u.cols(),
                    s.len()
                )));
            }
        }
        Ok(Self {
            sample_shape,
            factors,
            mode_spectra,
        })
    }

    pub fn sample_shape(&self) -> &Shape {
        &self.sample_shape
    }

    /// L, the number of induced basis tensors.
    pub fn len(&self) -> usize {
        self.sample_shape.total_size()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `U^k` for 1-based mode `k`.
    pub fn factor(&self, k: usize) -> &Matrix {
        &self.factors[k - 1]
    }

    pub fn factors(&self) -> &[Matrix] {
        &self.factors
    }

    pub fn mode_spectra(&self) -> &[Vec<f64>] {
        &self.mode_spectra
    }

    /// Largest `|U^kᵀU^k − I|` entry over all modes.
    pub fn orthonormality_defect(&self) -> f64 {
        self.factors
            .iter()
            .map(Matrix::orthonormality_defect)
            .fold(0.0, f64::max)
    }

    /// `Σ_j c[j] U^1[:, j_1] ∘ … ∘ U^d[:, j_d]` for a coefficient tensor `c`
    /// over the sample shape.
    pub fn synthesize(&self, c: &DenseTensor) -> Result<DenseTensor> {
        let mut t = c.clone();
        for (k, u) in self.factors.iter().enumerate() {
            t = mode_product(&t, k + 1, u, false)?;
        }
        Ok(t)
    }

    /// Coefficients `⟨X, element m⟩` for all m, as a tensor over the sample shape.
    pub fn analyze(&self, x: &DenseTensor) -> Result<DenseTensor> {
        let mut t = x.clone();
        for (k, u) in self.factors.iter().enumerate() {
            t = mode_product(&t, k + 1, u, true)?;
        }
        Ok(t)
    }
}

/// `A^k(i_k, j_k) = Σ X(…, i_k, …, n) X(…, j_k, …, n)` over every other index
/// and the samples. `k` is 1-based.
pub fn mode_operator(x: &TensorDataset, k: usize) -> Result<Matrix> {
    let dims = x.sample_shape().dims();
    if k == 0 || k > dims.len() {
        return Err(Error::arg(format!("mode {k} outside 1..={}", dims.len())));
    }
    let ik = dims[k - 1];
    let inner: usize = dims[..k - 1].iter().product();
    let outer_len = x.tensor().len() / (inner * ik);
    let data = x.tensor().data();
    let mut a = Matrix::zeros(ik, ik)?;
    for b in 0..outer_len {
        let block = &data[b * inner * ik..(b + 1) * inner * ik];
        for i in 0..ik {
            let fi = &block[i * inner..(i + 1) * inner];
            for j in i..ik {
                let fj = &block[j * inner..(j + 1) * inner];
                let s: f64 = fi.iter().zip(fj).map(|(p, q)| p * q).sum();
                a.set(i, j, a.get(i, j) + s);
            }
        }
    }
    for i in 0..ik {
        for j in 0..i {
            a.set(i, j, a.get(j, i));
        }
    }
    Ok(a)
}

pub fn rank1_basis(x: &TensorDataset) -> Result<Rank1Basis> {
    rank1_basis_with(x, &Settings::default())
}

/// Eigenvectors of every mode operator, descending eigenvalues.
pub fn rank1_basis_with(x: &TensorDataset, settings: &Settings) -> Result<Rank1Basis> {
    let d = x.sample_shape().order();
    let mut factors = Vec::with_capacity(d);
    let mut spectra = Vec::with_capacity(d);
    for k in 1..=d {
        let eig = sym_eig_with(&mode_operator(x, k)?, settings)?;
        factors.push(eig.eigenvectors);
        spectra.push(eig.eigenvalues);
    }
    Rank1Basis::new(x.sample_shape().clone(), factors, spectra)
}

/// Basis tensor `m` (1-based): the outer product of the factor columns
/// selected by `α⁻¹(m)`.
pub fn basis_element(b: &Rank1Basis, m: usize) -> Result<DenseTensor> {
    let j = inverse_linear_index(m, b.sample_shape())?;
    let mut acc = DenseTensor::scalar(1.0);
    for (k, &jk) in j.as_slice().iter().enumerate() {
        let u = &b.factors[k];
        let col = DenseTensor::from_vec(Shape::new(vec![u.rows()])?, u.column(jk - 1))?;
        acc = outer(&acc, &col)?;
    }
    Ok(acc)
}

/// Coefficient matrix `D[n, m] = ⟨X_n, element m⟩` and its SVD `D = Y Σ Zᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSvd {
    /// N×L.
    pub d: Matrix,
    /// `u` is Y (N×r), `v` is Z (L×r).
    pub svd: Svd,
}

impl CoefficientSvd {
    pub fn rank(&self) -> usize {
        self.svd.rank()
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.svd.singular_values
    }
}

pub fn coefficients(x: &TensorDataset, b: &Rank1Basis) -> Result<CoefficientSvd> {
    coefficients_with(x, b, &Settings::default())
}

/// Computes D as the multilinear transform `X ×_1 U^1ᵀ ⋯ ×_d U^dᵀ` without
/// forming the L basis tensors. Because the sample mode is last, the result
/// buffer is D in row-major order.
pub fn coefficients_with(
    x: &TensorDataset,
    b: &Rank1Basis,
    settings: &Settings,
) -> Result<CoefficientSvd> {
    if x.sample_shape() != b.sample_shape() {
        return Err(Error::dim(format!(
            "dataset samples of shape {} against a basis over {}",
            x.sample_shape(),
            b.sample_shape()
        )));
    }
    let mut t = x.tensor().clone();
    for (k, u) in b.factors.iter().enumerate() {
        t = mode_product(&t, k + 1, u, true)?;
    }
    let d = Matrix::from_row_major(x.len(), x.sample_len(), t.into_data())?;
    let svd = svd_with(&d, settings)?;
    Ok(CoefficientSvd { d, svd })
}

/// Keeps the `m` components of largest σ.
///
/// Retained tensor l is `W_l = Σ_m Z[m, l] element(m)` and sample n is
/// represented by `σ_l Y[n, l]`.
pub fn truncate_rank1(
    x: &TensorDataset,
    c: &CoefficientSvd,
    b: &Rank1Basis,
    m: usize,
) -> Result<SubspaceModel> {
    if x.sample_shape() != b.sample_shape() || c.d.rows() != x.len() || c.d.cols() != b.len() {
        return Err(Error::dim(format!(
            "dataset {}x{}, coefficients {}x{}, basis over {}",
            x.len(),
            x.sample_shape(),
            c.d.rows(),
            c.d.cols(),
            b.sample_shape()
        )));
    }
    check_retained(m, c.rank())?;
    let sigma = c.singular_values();
    let components = (0..m)
        .map(|l| {
            let z = DenseTensor::from_vec(b.sample_shape().clone(), c.svd.v.column(l))?;
            b.synthesize(&z)
        })
        .collect::<Result<Vec<_>>>()?;
    let coeffs = Matrix::from_fn(x.len(), m, |n, l| sigma[l] * c.svd.u.get(n, l))?;
    SubspaceModel::fit(
        Method::Rank1,
        x,
        components,
        sigma[..m].to_vec(),
        sigma[m..].to_vec(),
        Some(coeffs),
        None,
    )
}
