//! Binary persistence. Every format starts with a four-byte magic, stores
//! integers and floats little-endian, and stores tensors and matrices in α
//! order (mode 1 fastest, so matrices are column-major).
//!
//! | magic  | contents |
//! |--------|----------|
//! | `TPT1` | u32 d, d×u64 dims, L×f64 entries |
//! | `TPB1` | u32 d, d×u64 dims, u64 r, r×f64 eigenvalues, r tensors |
//! | `TPR1` | u32 d, d×u64 dims, d factor matrices `I_k×I_k`, d spectra |
//! | `TPC1` | u64 N, u64 L, u64 r, D (N×L), r×f64 σ, Y (N×r), Z (L×r) |
//! | `TPS1` | u32 d, d×u64 dims, u64 N, u64 r, r×f64 σ, b (N×r), r tensors |
//! | `TPM1` | truncated model, see [`encode_model`] |

use std::path::Path;

use super::binary::{Reader, Writer};
use crate::error::{Error, Result};
use crate::linalg::Svd;
use crate::operator::TensorBasis;
use crate::pca::{ErrorReport, Method, SubspaceModel};
use crate::rank1::{CoefficientSvd, Rank1Basis};
use crate::subspace::SubspaceBasis;
use crate::tensor::{DenseTensor, Shape};

pub const TENSOR_MAGIC: &[u8; 4] = b"TPT1";
pub const BASIS_MAGIC: &[u8; 4] = b"TPB1";
pub const RANK1_MAGIC: &[u8; 4] = b"TPR1";
pub const COEFFICIENT_MAGIC: &[u8; 4] = b"TPC1";
pub const SUBSPACE_MAGIC: &[u8; 4] = b"TPS1";
pub const MODEL_MAGIC: &[u8; 4] = b"TPM1";

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

fn mul(r: &Reader<'_>, a: usize, b: usize) -> Result<usize> {
    a.checked_mul(b)
        .ok_or_else(|| r.error_at(r.offset(), "payload size overflows"))
}

fn read_tensors(r: &mut Reader<'_>, shape: &Shape, count: usize) -> Result<Vec<DenseTensor>> {
    mul(r, count, shape.total_size())?;
    (0..count)
        .map(|_| DenseTensor::from_vec(shape.clone(), r.f64s(shape.total_size())?))
        .collect()
}

pub fn encode_tensor(x: &DenseTensor) -> Vec<u8> {
    let mut w = Writer::new(TENSOR_MAGIC);
    w.shape(x.shape());
    w.f64s(x.data());
    w.finish()
}

pub fn decode_tensor(bytes: &[u8]) -> Result<DenseTensor> {
    let mut r = Reader::new(bytes, TENSOR_MAGIC)?;
    let shape = r.shape(true)?;
    let data = r.f64s(shape.total_size())?;
    r.finish()?;
    DenseTensor::from_vec(shape, data)
}

pub fn save_tensor(path: impl AsRef<Path>, x: &DenseTensor) -> Result<()> {
    write_file(path.as_ref(), &encode_tensor(x))
}

pub fn load_tensor(path: impl AsRef<Path>) -> Result<DenseTensor> {
    decode_tensor(&read_file(path.as_ref())?)
}

pub fn encode_basis(b: &TensorBasis) -> Vec<u8> {
    let mut w = Writer::new(BASIS_MAGIC);
    w.shape(b.domain());
    w.count(b.len());
    w.f64s(b.eigenvalues());
    for t in b.tensors() {
        w.f64s(t.data());
    }
    w.finish()
}

pub fn decode_basis(bytes: &[u8]) -> Result<TensorBasis> {
    let mut r = Reader::new(bytes, BASIS_MAGIC)?;
    let domain = r.shape(false)?;
    let count = r.count()?;
    let at = r.offset();
    let eigenvalues = r.f64s(count)?;
    if eigenvalues.windows(2).any(|w| w[1] > w[0]) {
        return Err(r.error_at(at, "eigenvalues are not in descending order"));
    }
    let tensors = read_tensors(&mut r, &domain, count)?;
    r.finish()?;
    TensorBasis::new(domain, eigenvalues, tensors)
}

pub fn save_basis(path: impl AsRef<Path>, b: &TensorBasis) -> Result<()> {
    write_file(path.as_ref(), &encode_basis(b))
}

pub fn load_basis(path: impl AsRef<Path>) -> Result<TensorBasis> {
    decode_basis(&read_file(path.as_ref())?)
}

pub fn encode_rank1(b: &Rank1Basis) -> Vec<u8> {
    let mut w = Writer::new(RANK1_MAGIC);
    w.shape(b.sample_shape());
    for u in b.factors() {
        w.matrix(u);
    }
    for s in b.mode_spectra() {
        w.f64s(s);
    }
    w.finish()
}

pub fn decode_rank1(bytes: &[u8]) -> Result<Rank1Basis> {
    let mut r = Reader::new(bytes, RANK1_MAGIC)?;
    let shape = r.shape(false)?;
    let factors = shape
        .dims()
        .iter()
        .map(|&ik| r.matrix(ik, ik))
        .collect::<Result<Vec<_>>>()?;
    let spectra = shape
        .dims()
        .iter()
        .map(|&ik| r.f64s(ik))
        .collect::<Result<Vec<_>>>()?;
    r.finish()?;
    Rank1Basis::new(shape, factors, spectra)
}

pub fn save_rank1(path: impl AsRef<Path>, b: &Rank1Basis) -> Result<()> {
    write_file(path.as_ref(), &encode_rank1(b))
}

pub fn load_rank1(path: impl AsRef<Path>) -> Result<Rank1Basis> {
    decode_rank1(&read_file(path.as_ref())?)
}

pub fn encode_coefficients(c: &CoefficientSvd) -> Vec<u8> {
    let mut w = Writer::new(COEFFICIENT_MAGIC);
    w.count(c.d.rows());
    w.count(c.d.cols());
    w.count(c.rank());
    w.matrix(&c.d);
    w.f64s(&c.svd.singular_values);
    w.matrix(&c.svd.u);
    w.matrix(&c.svd.v);
    w.finish()
}

pub fn decode_coefficients(bytes: &[u8]) -> Result<CoefficientSvd> {
    let mut r = Reader::new(bytes, COEFFICIENT_MAGIC)?;
    let n = r.count()?;
    let l = r.count()?;
    let rank = r.count()?;
    let d = r.matrix(n, l)?;
    let singular_values = r.f64s(rank)?;
    let u = r.matrix(n, rank)?;
    let v = r.matrix(l, rank)?;
    r.finish()?;
    Ok(CoefficientSvd {
        d,
        svd: Svd {
            u,
            singular_values,
            v,
        },
    })
}

pub fn save_coefficients(path: impl AsRef<Path>, c: &CoefficientSvd) -> Result<()> {
    write_file(path.as_ref(), &encode_coefficients(c))
}

pub fn load_coefficients(path: impl AsRef<Path>) -> Result<CoefficientSvd> {
    decode_coefficients(&read_file(path.as_ref())?)
}

pub fn encode_subspace(b: &SubspaceBasis) -> Vec<u8> {
    let mut w = Writer::new(SUBSPACE_MAGIC);
    w.shape(b.sample_shape());
    w.count(b.samples());
    w.count(b.rank());
    w.f64s(b.spectrum());
    w.matrix(b.mixing());
    for q in b.tensors() {
        w.f64s(q.data());
    }
    w.finish()
}

pub fn decode_subspace(bytes: &[u8]) -> Result<SubspaceBasis> {
    let mut r = Reader::new(bytes, SUBSPACE_MAGIC)?;
    let shape = r.shape(false)?;
    let n = r.count()?;
    let rank = r.count()?;
    let spectrum = r.f64s(rank)?;
    let mixing = r.matrix(n, rank)?;
    let q = read_tensors(&mut r, &shape, rank)?;
    r.finish()?;
    SubspaceBasis::from_parts(shape, q, mixing, spectrum)
}

pub fn save_subspace(path: impl AsRef<Path>, b: &SubspaceBasis) -> Result<()> {
    write_file(path.as_ref(), &encode_subspace(b))
}

pub fn load_subspace(path: impl AsRef<Path>) -> Result<SubspaceBasis> {
    decode_subspace(&read_file(path.as_ref())?)
}

/// `TPM1`: u32 method (0 selfadjoint, 1 rank1, 2 subspace), sample shape,
/// u64 N, u64 M, u64 tail length T, u32 mean flag, M×f64 spectrum, T×f64
/// tail, coefficients (N×M), M component tensors, the mean tensor if
/// flagged, N×f64 per-sample errors, then mean error, predicted error,
/// relative gap and energy.
pub fn encode_model(m: &SubspaceModel) -> Vec<u8> {
    let mut w = Writer::new(MODEL_MAGIC);
    w.u32(m.method().tag() as u32);
    w.shape(m.sample_shape());
    w.count(m.samples());
    w.count(m.retained());
    w.count(m.tail().len());
    w.u32(m.mean().is_some() as u32);
    w.f64s(m.spectrum());
    w.f64s(m.tail());
    w.matrix(m.coefficients());
    for c in m.components() {
        w.f64s(c.data());
    }
    if let Some(mu) = m.mean() {
        w.f64s(mu.data());
    }
    let rep = m.report();
    w.f64s(&rep.per_sample);
    w.f64s(&[rep.mean, rep.predicted, rep.relative_gap, rep.energy]);
    w.finish()
}

pub fn decode_model(bytes: &[u8]) -> Result<SubspaceModel> {
    let mut r = Reader::new(bytes, MODEL_MAGIC)?;
    let at = r.offset();
    let tag = r.u32()?;
    let method = u8::try_from(tag)
        .ok()
        .and_then(Method::from_tag)
        .ok_or_else(|| r.error_at(at, format!("unknown method tag {tag}")))?;
    let shape = r.shape(false)?;
    let n = r.count()?;
    let retained = r.count()?;
    let tail_len = r.count()?;
    let at = r.offset();
    let has_mean = match r.u32()? {
        0 => false,
        1 => true,
        other => return Err(r.error_at(at, format!("bad mean flag {other}"))),
    };
    let spectrum = r.f64s(retained)?;
    let tail = r.f64s(tail_len)?;
    let coefficients = r.matrix(n, retained)?;
    let components = read_tensors(&mut r, &shape, retained)?;
    let mean = if has_mean {
        Some(DenseTensor::from_vec(
            shape.clone(),
            r.f64s(shape.total_size())?,
        )?)
    } else {
        None
    };
    let per_sample = r.f64s(n)?;
    let summary = r.f64s(4)?;
    r.finish()?;
    let report = ErrorReport {
        per_sample,
        mean: summary[0],
        predicted: summary[1],
        relative_gap: summary[2],
        energy: summary[3],
    };
    SubspaceModel::from_parts(
        method,
        shape,
        spectrum,
        tail,
        coefficients,
        components,
        mean,
        report,
    )
}

pub fn save_model(path: impl AsRef<Path>, m: &SubspaceModel) -> Result<()> {
    write_file(path.as_ref(), &encode_model(m))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<SubspaceModel> {
    decode_model(&read_file(path.as_ref())?)
}

/// Any of the persisted objects, identified by magic.
#[derive(Debug, Clone, PartialEq)]
pub enum Stored {
    Tensor(DenseTensor),
    Basis(TensorBasis),
    Rank1(Rank1Basis),
    Coefficients(CoefficientSvd),
    Subspace(SubspaceBasis),
    Model(SubspaceModel),
}

impl Stored {
    pub fn kind(&self) -> &'static str {
        match self {
            Stored::Tensor(_) => "tensor",
            Stored::Basis(_) => "self-adjoint basis",
            Stored::Rank1(_) => "rank-1 basis",
            Stored::Coefficients(_) => "coefficient SVD",
            Stored::Subspace(_) => "subspace basis",
            Stored::Model(_) => "truncated model",
        }
    }
}

pub fn decode_any(bytes: &[u8]) -> Result<Stored> {
    let magic = bytes.get(..4).ok_or_else(|| Error::Format {
        offset: 0,
        msg: format!("file too short for a magic ({} bytes)", bytes.len()),
    })?;
    Ok(match magic {
        m if m == TENSOR_MAGIC => Stored::Tensor(decode_tensor(bytes)?),
        m if m == BASIS_MAGIC => Stored::Basis(decode_basis(bytes)?),
        m if m == RANK1_MAGIC => Stored::Rank1(decode_rank1(bytes)?),
        m if m == COEFFICIENT_MAGIC => Stored::Coefficients(decode_coefficients(bytes)?),
        m if m == SUBSPACE_MAGIC => Stored::Subspace(decode_subspace(bytes)?),
        m if m == MODEL_MAGIC => Stored::Model(decode_model(bytes)?),
        other => {
            return Err(Error::Format {
                offset: 0,
                msg: format!("unrecognized magic {:?}", String::from_utf8_lossy(other)),
            })
        }
    })
}

pub fn load_any(path: impl AsRef<Path>) -> Result<Stored> {
    decode_any(&read_file(path.as_ref())?)
}
