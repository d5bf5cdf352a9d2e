//! Self-adjoint order-2d tensor operators and their eigentensor bases.
//!
//! An operator `A[i, j]` over the domain shape `I = (I_1, …, I_d)` is stored
//! as an order-2d tensor of shape `(I, I)`. Because storage follows the α
//! map, the flattened `L×L` matrix `a(n, m) = A[α⁻¹(n), α⁻¹(m)]` shares its
//! buffer (column-major) with the operator, and the eigentensor problem
//! `A·U = λU` is the symmetric matrix problem `a·u = λu` with `U = unflatten(u)`.

use crate::dataset::TensorDataset;
use crate::error::{Error, Result};
use crate::linalg::{sym_eig_with, Matrix};
use crate::settings::{check_alloc, Settings};
use crate::tensor::{index_table, norm, outer, DenseTensor, Shape};

#[derive(Debug, Clone, PartialEq)]
pub struct SelfAdjointOperator {
    domain: Shape,
    entries: DenseTensor,
}

/// Splits an order-2d shape `(I, I)` into its domain `I`.
fn paired_domain(shape: &Shape) -> Result<Shape> {
    let dims = shape.dims();
    let d = dims.len() / 2;
    if dims.len() < 2 || !dims.len().is_multiple_of(2) || dims[..d] != dims[d..] {
        return Err(Error::dim(format!(
            "operator shape {shape} is not of the paired form (I, I)"
        )));
    }
    Shape::new(dims[..d].to_vec())
}

impl SelfAdjointOperator {
    /// Validates the paired shape and symmetry under default tolerances.
    pub fn new(entries: DenseTensor) -> Result<Self> {
        Self::new_with(entries, &Settings::default())
    }

    pub fn new_with(entries: DenseTensor, settings: &Settings) -> Result<Self> {
        let check = is_self_adjoint_with(&entries, settings)?;
        if !check.symmetric {
            return Err(Error::NotSelfAdjoint {
                asymmetry: check.max_asymmetry,
                tolerance: check.tolerance,
            });
        }
        Self::new_unchecked(entries)
    }

    /// Checks only the paired shape; symmetry is the caller's promise and is
    /// re-verified by [`eigentensor_basis`].
    pub fn new_unchecked(entries: DenseTensor) -> Result<Self> {
        let domain = paired_domain(entries.shape())?;
        Ok(Self { domain, entries })
    }

    /// `A[i, j] = δ_ij`.
    pub fn identity(domain: &Shape) -> Result<Self> {
        let l = domain.total_size();
        let m = Matrix::identity(l)?;
        Self::from_matrix(domain, &m)
    }

    /// Operator whose α-flattening is the `L×L` matrix `m`.
    pub fn from_matrix(domain: &Shape, m: &Matrix) -> Result<Self> {
        let l = domain.total_size();
        if m.rows() != l || m.cols() != l {
            return Err(Error::dim(format!(
                "{}x{} matrix for a domain of dimension {l}",
                m.rows(),
                m.cols()
            )));
        }
        let shape = domain.concat(domain)?;
        Self::new(DenseTensor::from_vec(shape, m.to_col_major())?)
    }

    pub fn domain(&self) -> &Shape {
        &self.domain
    }

    /// L, the domain dimension.
    pub fn dim(&self) -> usize {
        self.domain.total_size()
    }

    pub fn entries(&self) -> &DenseTensor {
        &self.entries
    }

    /// The `L×L` matrix `a(n, m)`.
    pub fn matrix(&self) -> Result<Matrix> {
        let l = self.dim();
        Matrix::from_col_major(l, l, self.entries.data())
    }

    pub fn frobenius(&self) -> f64 {
        norm(&self.entries)
    }
}

/// Outcome of a symmetry check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfAdjointness {
    pub symmetric: bool,
    pub max_asymmetry: f64,
    pub tolerance: f64,
}

pub fn is_self_adjoint(t: &DenseTensor) -> Result<SelfAdjointness> {
    is_self_adjoint_with(t, &Settings::default())
}

/// Compares `A[i, j]` with `A[j, i]` over the flattened matrix.
pub fn is_self_adjoint_with(t: &DenseTensor, settings: &Settings) -> Result<SelfAdjointness> {
    let domain = paired_domain(t.shape())?;
    let l = domain.total_size();
    let data = t.data();
    let mut worst: f64 = 0.0;
    for m in 0..l {
        for n in (m + 1)..l {
            worst = worst.max((data[n + l * m] - data[m + l * n]).abs());
        }
    }
    let tolerance = settings.sym_tol_rel * t.max_abs();
    Ok(SelfAdjointness {
        symmetric: worst <= tolerance,
        max_asymmetry: worst,
        tolerance,
    })
}

/// `Z[i] = Σ_j A[i, j] Y[j]`.
pub fn apply(a: &SelfAdjointOperator, y: &DenseTensor) -> Result<DenseTensor> {
    if y.shape() != a.domain() {
        return Err(Error::dim(format!(
            "operator on {} applied to a tensor of shape {}",
            a.domain(),
            y.shape()
        )));
    }
    let l = a.dim();
    let data = a.entries.data();
    let mut z = vec![0.0; l];
    for (m, &yv) in y.data().iter().enumerate() {
        if yv == 0.0 {
            continue;
        }
        let col = &data[m * l..(m + 1) * l];
        for (zv, av) in z.iter_mut().zip(col) {
            *zv += av * yv;
        }
    }
    Ok(DenseTensor::from_parts(a.domain.clone(), z))
}

/// Which mode group of an order-(p+q) tensor is summed out when forming a
/// Gram-type operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContractedGroup {
    /// `A[i, j] = X[k, i] X[k, j]` over the first `p` modes.
    Leading(usize),
    /// `A[i, j] = X[i, k] X[j, k]` over the last `q` modes.
    Trailing(usize),
}

/// `A[i, j] = Σ_n X[i, n] X[j, n]` for a dataset with samples along the last mode.
pub fn gram_operator(x: &TensorDataset) -> Result<SelfAdjointOperator> {
    gram_operator_of(x.tensor(), ContractedGroup::Trailing(1))
}

/// Nonnegative self-adjoint operator from contracting `x` with itself.
pub fn gram_operator_of(x: &DenseTensor, group: ContractedGroup) -> Result<SelfAdjointOperator> {
    let d = x.order();
    let (contracted, free_dims) = match group {
        ContractedGroup::Leading(p) if p >= 1 && p < d => (p, x.dims()[p..].to_vec()),
        ContractedGroup::Trailing(q) if q >= 1 && q < d => (q, x.dims()[..d - q].to_vec()),
        _ => {
            return Err(Error::dim(format!(
                "cannot contract {group:?} of an order-{d} tensor and leave free modes"
            )))
        }
    };
    let free = Shape::new(free_dims)?;
    let f = free.total_size();
    let k = x.len() / f;
    check_alloc((f as u128) * (f as u128), "Gram operator")?;
    let data = x.data();

    let mut upper = vec![0.0; f * f];
    match group {
        ContractedGroup::Trailing(_) => {
            for kk in 0..k {
                let col = &data[kk * f..(kk + 1) * f];
                for (i, &xi) in col.iter().enumerate() {
                    if xi == 0.0 {
                        continue;
                    }
                    let row = &mut upper[i * f..(i + 1) * f];
                    for (u, &xj) in row[i..].iter_mut().zip(&col[i..]) {
                        *u += xi * xj;
                    }
                }
            }
        }
        ContractedGroup::Leading(_) => {
            for i in 0..f {
                let ci = &data[i * k..(i + 1) * k];
                for j in i..f {
                    let cj = &data[j * k..(j + 1) * k];
                    upper[i * f + j] = ci.iter().zip(cj).map(|(a, b)| a * b).sum();
                }
            }
        }
    }
    let _ = contracted;
    let mut full = vec![0.0; f * f];
    for i in 0..f {
        for j in i..f {
            full[i + f * j] = upper[i * f + j];
            full[j + f * i] = upper[i * f + j];
        }
    }
    let shape = free.concat(&free)?;
    SelfAdjointOperator::new_unchecked(DenseTensor::from_parts(shape, full))
}

/// Divisor used for the sample covariance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    /// 1/N, the plain sample mean of `X_i X_j`.
    #[default]
    Population,
    /// 1/(N−1).
    Sample,
}

/// `R[i, j] = (1/N) Σ_n X[i, n] X[j, n]`, optionally after removing the mean.
pub fn covariance_operator(x: &TensorDataset, center: bool) -> Result<SelfAdjointOperator> {
    covariance_operator_with(x, center, Normalization::Population)
}

pub fn covariance_operator_with(
    x: &TensorDataset,
    center: bool,
    normalization: Normalization,
) -> Result<SelfAdjointOperator> {
    let n = x.len();
    if n == 0 {
        return Err(Error::arg("covariance of an empty dataset"));
    }
    let divisor = match normalization {
        Normalization::Population => n as f64,
        Normalization::Sample if n > 1 => (n - 1) as f64,
        Normalization::Sample => {
            return Err(Error::arg(
                "sample normalization needs at least two samples",
            ))
        }
    };
    let gram = if center {
        gram_operator(&x.centered_by(&x.mean())?)?
    } else {
        gram_operator(x)?
    };
    let scaled = gram.entries.scaled(1.0 / divisor);
    SelfAdjointOperator::new_unchecked(scaled)
}

/// `⟨V, A·V⟩ / ⟨V, V⟩`.
pub fn rayleigh_quotient(a: &SelfAdjointOperator, v: &DenseTensor) -> Result<f64> {
    let av = apply(a, v)?;
    let vv: f64 = v.data().iter().map(|x| x * x).sum();
    if vv == 0.0 {
        return Err(Error::arg("Rayleigh quotient of the zero tensor"));
    }
    let vav: f64 = v.data().iter().zip(av.data()).map(|(p, q)| p * q).sum();
    Ok(vav / vv)
}

/// Orthonormal eigentensors with descending eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorBasis {
    domain: Shape,
    eigenvalues: Vec<f64>,
    tensors: Vec<DenseTensor>,
}

impl TensorBasis {
    /// Requires one tensor of the domain shape per eigenvalue, eigenvalues
    /// non-increasing.
    pub fn new(domain: Shape, eigenvalues: Vec<f64>, tensors: Vec<DenseTensor>) -> Result<Self> {
        if eigenvalues.len() != tensors.len() {
            return Err(Error::dim(format!(
                "{} eigenvalues for {} tensors",
                eigenvalues.len(),
                tensors.len()
            )));
        }
        if let Some(t) = tensors.iter().find(|t| t.shape() != &domain) {
            return Err(Error::dim(format!(
                "basis tensor of shape {} in a basis over {domain}",
                t.shape()
            )));
        }
        if eigenvalues.iter().any(|v| !v.is_finite()) {
            return Err(Error::arg("non-finite eigenvalue"));
        }
        if eigenvalues.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::arg("eigenvalues must be in descending order"));
        }
        Ok(Self {
            domain,
            eigenvalues,
            tensors,
        })
    }

    pub fn domain(&self) -> &Shape {
        &self.domain
    }

    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn tensors(&self) -> &[DenseTensor] {
        &self.tensors
    }

    pub fn tensor(&self, l: usize) -> &DenseTensor {
        &self.tensors[l]
    }

    /// The leading `count` elements.
    pub fn truncated(&self, count: usize) -> Result<TensorBasis> {
        if count > self.len() {
            return Err(Error::arg(format!(
                "cannot keep {count} of {} basis elements",
                self.len()
            )));
        }
        TensorBasis::new(
            self.domain.clone(),
            self.eigenvalues[..count].to_vec(),
            self.tensors[..count].to_vec(),
        )
    }

    /// `max_{l,l'} |⟨U_l, U_l'⟩ − δ_ll'|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (a, ua) in self.tensors.iter().enumerate() {
            for (b, ub) in self.tensors.iter().enumerate().skip(a) {
                let dot: f64 = ua.data().iter().zip(ub.data()).map(|(p, q)| p * q).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    /// `Σ_l w_l U_l ∘ U_l` as an order-2d tensor.
    fn weighted_outer_sum(&self, weight: impl Fn(usize) -> f64) -> Result<DenseTensor> {
        let shape = self.domain.concat(&self.domain)?;
        let mut acc = DenseTensor::zeros(shape)?;
        for (l, u) in self.tensors.iter().enumerate() {
            acc.add_scaled(weight(l), &outer(u, u)?)?;
        }
        Ok(acc)
    }

    /// `Σ_l U_l ∘ U_l`, the orthogonal projector onto the span.
    pub fn projector(&self) -> Result<DenseTensor> {
        self.weighted_outer_sum(|_| 1.0)
    }

    /// `Σ_l λ_l U_l ∘ U_l`.
    pub fn spectral_sum(&self) -> Result<DenseTensor> {
        self.weighted_outer_sum(|l| self.eigenvalues[l])
    }
}

pub fn eigentensor_basis(a: &SelfAdjointOperator) -> Result<TensorBasis> {
    eigentensor_basis_with(a, &Settings::default())
}

/// Eigentensor basis of a self-adjoint operator.
///
/// 1. tabulate `T` with row n = α⁻¹(n);
/// 2. gather `a(n, m) = A[T(n), T(m)]`;
/// 3. solve the symmetric eigenproblem `a·u = λu`;
/// 4. scatter each eigenvector back through `T` to obtain `U[T(n)] = u(n)`.
pub fn eigentensor_basis_with(a: &SelfAdjointOperator, settings: &Settings) -> Result<TensorBasis> {
    let l = a.dim();
    if l > settings.eig_cap {
        return Err(Error::Capacity {
            what: format!(
                "eigentensor basis over {} (L = {l}, cap L <= {})",
                a.domain(),
                settings.eig_cap
            ),
            required_bytes: (l as u128) * (l as u128) * 8,
            cap_bytes: (settings.eig_cap as u128) * (settings.eig_cap as u128) * 8,
        });
    }
    check_alloc(3 * (l as u128) * (l as u128), "eigentensor basis workspace")?;

    let table = index_table(a.domain())?;
    let offsets: Vec<usize> = table
        .rows()
        .map(|row| a.domain().offset_of(row))
        .collect::<Result<_>>()?;

    let data = a.entries.data();
    let mut matrix = Matrix::zeros(l, l)?;
    for (n, &on) in offsets.iter().enumerate() {
        for (m, &om) in offsets.iter().enumerate() {
            matrix.set(n, m, data[on + l * om]);
        }
    }

    let eig = sym_eig_with(&matrix, settings)?;

    let tensors = (0..l)
        .map(|k| {
            let mut u = vec![0.0; l];
            for (n, &on) in offsets.iter().enumerate() {
                u[on] = eig.eigenvectors.get(n, k);
            }
            DenseTensor::from_parts(a.domain().clone(), u)
        })
        .collect();
    TensorBasis::new(a.domain().clone(), eig.eigenvalues, tensors)
}

/// `max_l ‖A·U_l − λ_l U_l‖ / ‖A‖_F`, evaluated with the tensor operator
/// directly rather than its flattened matrix.
pub fn eigentensor_residual(a: &SelfAdjointOperator, basis: &TensorBasis) -> Result<f64> {
    if basis.domain() != a.domain() {
        return Err(Error::dim(format!(
            "basis over {} checked against an operator on {}",
            basis.domain(),
            a.domain()
        )));
    }
    let scale = a.frobenius();
    let mut worst: f64 = 0.0;
    for (u, &lambda) in basis.tensors().iter().zip(basis.eigenvalues()) {
        let mut r = apply(a, u)?;
        r.add_scaled(-lambda, u)?;
        worst = worst.max(norm(&r));
    }
    Ok(if scale > 0.0 { worst / scale } else { worst })
}
