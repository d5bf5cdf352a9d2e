//! Projection, truncation, reconstruction and error accounting shared by the
//! three basis constructions.

use std::fmt;
use std::str::FromStr;

use crate::dataset::TensorDataset;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::operator::TensorBasis;
use crate::tensor::{dot, DenseTensor, Shape};

/// Which construction produced a model. Selects the predicted-error formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Eigentensors of a covariance operator; predicted error is the tail
    /// eigenvalue sum.
    SelfAdjoint,
    /// Rank-1 basis with the coefficient SVD; predicted error is the tail
    /// σ² sum over N.
    Rank1,
    /// Snapshot basis; predicted error is the tail σ² sum over N.
    Subspace,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::SelfAdjoint, Method::Rank1, Method::Subspace];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::SelfAdjoint => "selfadjoint",
            Method::Rank1 => "rank1",
            Method::Subspace => "subspace",
        }
    }

    pub(crate) fn tag(self) -> u8 {
        match self {
            Method::SelfAdjoint => 0,
            Method::Rank1 => 1,
            Method::Subspace => 2,
        }
    }

    pub(crate) fn from_tag(tag: u8) -> Option<Method> {
        Method::ALL.into_iter().find(|m| m.tag() == tag)
    }

    /// Mean squared error implied by the discarded part of the spectrum.
    pub fn predicted_error(self, tail: &[f64], samples: usize) -> f64 {
        match self {
            Method::SelfAdjoint => tail.iter().sum(),
            Method::Rank1 | Method::Subspace => {
                tail.iter().map(|s| s * s).sum::<f64>() / samples as f64
            }
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| {
                Error::arg(format!(
                    "unknown method '{s}' (selfadjoint, rank1, subspace)"
                ))
            })
    }
}

/// Measured against predicted truncation error.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    /// `‖X_n − X̂_n‖²` per sample.
    pub per_sample: Vec<f64>,
    /// Mean of `per_sample`.
    pub mean: f64,
    /// Tail-spectrum value for the producing method.
    pub predicted: f64,
    /// `|mean − predicted|` divided by the mean sample energy.
    pub relative_gap: f64,
    /// Mean of `‖X_n − μ‖²`, the normalizer for `relative_gap`.
    pub energy: f64,
}

impl ErrorReport {
    /// Gap bound for methods whose error identity applies.
    pub const IDENTITY_TOLERANCE: f64 = 1e-8;

    pub fn identity_holds(&self) -> bool {
        self.relative_gap <= Self::IDENTITY_TOLERANCE
    }

    /// Mean error relative to the mean sample energy.
    pub fn relative_error(&self) -> f64 {
        self.mean / self.energy
    }

    fn measure(per_sample: Vec<f64>, predicted: f64, energy: f64) -> ErrorReport {
        let mean = per_sample.iter().sum::<f64>() / per_sample.len() as f64;
        ErrorReport {
            relative_gap: (mean - predicted).abs() / energy,
            per_sample,
            mean,
            predicted,
            energy,
        }
    }
}

/// A truncated representation `X_n ≈ μ + Σ_l c[n, l] W_l`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceModel {
    method: Method,
    sample_shape: Shape,
    spectrum: Vec<f64>,
    tail: Vec<f64>,
    coefficients: Matrix,
    components: Vec<DenseTensor>,
    mean: Option<DenseTensor>,
    report: ErrorReport,
}

impl SubspaceModel {
    /// Builds a model and measures its error on `x`.
    ///
    /// `components` must be orthonormal. When `coefficients` is `None` they
    /// are computed as `⟨X_n − μ, W_l⟩`.
    pub(crate) fn fit(
        method: Method,
        x: &TensorDataset,
        components: Vec<DenseTensor>,
        spectrum: Vec<f64>,
        tail: Vec<f64>,
        coefficients: Option<Matrix>,
        mean: Option<DenseTensor>,
    ) -> Result<SubspaceModel> {
        let shape = x.sample_shape().clone();
        if let Some(w) = components.iter().find(|w| w.shape() != &shape) {
            return Err(Error::dim(format!(
                "component of shape {} for samples of shape {shape}",
                w.shape()
            )));
        }
        let centered = match &mean {
            Some(mu) => x.centered_by(mu)?,
            None => x.clone(),
        };
        let coefficients = match coefficients {
            Some(c) => c,
            None => Matrix::from_fn(x.len(), components.len(), |n, l| {
                dot(centered.sample(n), components[l].data())
            })?,
        };
        let mut model = SubspaceModel {
            method,
            sample_shape: shape,
            spectrum,
            tail,
            coefficients,
            components,
            mean,
            report: ErrorReport::measure(vec![0.0], 0.0, 1.0),
        };
        model.report = error_report(x, &model)?;
        Ok(model)
    }

    /// Reassembles a model from stored parts without re-measuring.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_parts(
        method: Method,
        sample_shape: Shape,
        spectrum: Vec<f64>,
        tail: Vec<f64>,
        coefficients: Matrix,
        components: Vec<DenseTensor>,
        mean: Option<DenseTensor>,
        report: ErrorReport,
    ) -> Result<SubspaceModel> {
        if coefficients.cols() != components.len() || spectrum.len() != components.len() {
            return Err(Error::dim(format!(
                "{} coefficient columns, {} spectrum values, {} components",
                coefficients.cols(),
                spectrum.len(),
                components.len()
            )));
        }
        if coefficients.rows() != report.per_sample.len() {
            return Err(Error::dim("coefficient rows do not match the error report"));
        }
        Ok(SubspaceModel {
            method,
            sample_shape,
            spectrum,
            tail,
            coefficients,
            components,
            mean,
            report,
        })
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn sample_shape(&self) -> &Shape {
        &self.sample_shape
    }

    /// M.
    pub fn retained(&self) -> usize {
        self.components.len()
    }

    /// N.
    pub fn samples(&self) -> usize {
        self.coefficients.rows()
    }

    /// Retained spectrum values: λ for the self-adjoint method, σ otherwise.
    pub fn spectrum(&self) -> &[f64] {
        &self.spectrum
    }

    /// Discarded spectrum values, same units as [`spectrum`](Self::spectrum).
    pub fn tail(&self) -> &[f64] {
        &self.tail
    }

    /// N×M.
    pub fn coefficients(&self) -> &Matrix {
        &self.coefficients
    }

    pub fn components(&self) -> &[DenseTensor] {
        &self.components
    }

    pub fn mean(&self) -> Option<&DenseTensor> {
        self.mean.as_ref()
    }

    pub fn report(&self) -> &ErrorReport {
        &self.report
    }

    /// Turns a model fitted on `x − mean` into a model of `x` about `mean`.
    /// Reconstructions gain the mean back; the errors are unchanged.
    pub fn with_mean(mut self, x: &TensorDataset, mean: DenseTensor) -> Result<SubspaceModel> {
        if self.mean.is_some() {
            return Err(Error::arg("model already carries a mean"));
        }
        if mean.shape() != &self.sample_shape {
            return Err(Error::dim(format!(
                "mean of shape {} for samples of shape {}",
                mean.shape(),
                self.sample_shape
            )));
        }
        self.mean = Some(mean);
        self.report = error_report(x, &self)?;
        Ok(self)
    }

    pub fn predicted_error(&self) -> f64 {
        self.method.predicted_error(&self.tail, self.samples())
    }

    /// `X̂_n` (0-based sample index).
    pub fn reconstruct_sample(&self, n: usize) -> Result<DenseTensor> {
        if n >= self.samples() {
            return Err(Error::Index {
                mode: None,
                index: n + 1,
                extent: self.samples(),
            });
        }
        let mut out = match &self.mean {
            Some(mu) => mu.clone(),
            None => DenseTensor::zeros(self.sample_shape.clone())?,
        };
        for (l, w) in self.components.iter().enumerate() {
            out.add_scaled(self.coefficients.get(n, l), w)?;
        }
        Ok(out)
    }

    /// All reconstructions as a dataset.
    pub fn reconstruct_all(&self) -> Result<TensorDataset> {
        let samples = (0..self.samples())
            .map(|n| self.reconstruct_sample(n))
            .collect::<Result<Vec<_>>>()?;
        TensorDataset::from_samples(&samples)
    }

    /// Coefficients of an arbitrary tensor against the retained components.
    pub fn project(&self, x: &DenseTensor) -> Result<Vec<f64>> {
        if x.shape() != &self.sample_shape {
            return Err(Error::dim(format!(
                "tensor of shape {} for a model over {}",
                x.shape(),
                self.sample_shape
            )));
        }
        let centered = match &self.mean {
            Some(mu) => x.sub(mu)?,
            None => x.clone(),
        };
        Ok(self
            .components
            .iter()
            .map(|w| dot(centered.data(), w.data()))
            .collect())
    }
}

/// `d_l = ⟨X, U_l⟩`.
pub fn project(x: &DenseTensor, basis: &TensorBasis) -> Result<Vec<f64>> {
    if x.shape() != basis.domain() {
        return Err(Error::dim(format!(
            "tensor of shape {} projected on a basis over {}",
            x.shape(),
            basis.domain()
        )));
    }
    Ok(basis
        .tensors()
        .iter()
        .map(|u| dot(x.data(), u.data()))
        .collect())
}

/// `Σ_l d_l U_l` over the first `d.len()` basis elements.
pub fn reconstruct(d: &[f64], basis: &TensorBasis) -> Result<DenseTensor> {
    if d.len() > basis.len() {
        return Err(Error::dim(format!(
            "{} coefficients for a basis of {} elements",
            d.len(),
            basis.len()
        )));
    }
    let mut out = DenseTensor::zeros(basis.domain().clone())?;
    for (c, u) in d.iter().zip(basis.tensors()) {
        out.add_scaled(*c, u)?;
    }
    Ok(out)
}

pub(crate) fn check_retained(m: usize, available: usize) -> Result<()> {
    if m == 0 || m > available {
        return Err(Error::arg(format!(
            "retained count M = {m} must lie in 1..={available}"
        )));
    }
    Ok(())
}

/// Keeps the `m` leading eigentensors of a covariance basis.
pub fn pca_truncate(x: &TensorDataset, basis: &TensorBasis, m: usize) -> Result<SubspaceModel> {
    pca_truncate_centered(x, basis, m, None)
}

/// As [`pca_truncate`], with samples taken relative to `mean`. The basis must
/// then come from the centered covariance for the error identity to hold.
pub fn pca_truncate_centered(
    x: &TensorDataset,
    basis: &TensorBasis,
    m: usize,
    mean: Option<&DenseTensor>,
) -> Result<SubspaceModel> {
    if basis.domain() != x.sample_shape() {
        return Err(Error::dim(format!(
            "basis over {} for samples of shape {}",
            basis.domain(),
            x.sample_shape()
        )));
    }
    check_retained(m, basis.len())?;
    SubspaceModel::fit(
        Method::SelfAdjoint,
        x,
        basis.tensors()[..m].to_vec(),
        basis.eigenvalues()[..m].to_vec(),
        basis.eigenvalues()[m..].to_vec(),
        None,
        mean.cloned(),
    )
}

/// Measures `‖X_n − X̂_n‖²` for every sample using the model's coefficients
/// and compares the mean with the method's tail-spectrum prediction.
pub fn error_report(x: &TensorDataset, model: &SubspaceModel) -> Result<ErrorReport> {
    if x.sample_shape() != model.sample_shape() || x.len() != model.samples() {
        return Err(Error::dim(format!(
            "dataset of {} samples of shape {} against a model of {} samples over {}",
            x.len(),
            x.sample_shape(),
            model.samples(),
            model.sample_shape()
        )));
    }
    let mut per_sample = Vec::with_capacity(x.len());
    let mut energy = 0.0;
    for n in 0..x.len() {
        let xhat = model.reconstruct_sample(n)?;
        let mut err = 0.0;
        for (a, b) in x.sample(n).iter().zip(xhat.data()) {
            err += (a - b) * (a - b);
        }
        per_sample.push(err);
        energy += match model.mean() {
            Some(mu) => x
                .sample(n)
                .iter()
                .zip(mu.data())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>(),
            None => dot(x.sample(n), x.sample(n)),
        };
    }
    energy /= x.len() as f64;
    if energy == 0.0 {
        return Err(Error::arg(
            "dataset has zero energy; relative errors are undefined",
        ));
    }
    Ok(ErrorReport::measure(
        per_sample,
        model.predicted_error(),
        energy,
    ))
}
