//! Little-endian primitives shared by the binary formats.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::settings::check_alloc;
use crate::tensor::Shape;

#[derive(Default)]
pub(crate) struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    pub fn new(magic: &[u8; 4]) -> Self {
        Self {
            buf: magic.to_vec(),
        }
    }

    pub fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn count(&mut self, v: usize) {
        self.u64(v as u64);
    }

    pub fn f64s(&mut self, values: &[f64]) {
        self.buf.reserve(values.len() * 8);
        for v in values {
            self.buf.extend_from_slice(&v.to_le_bytes());
        }
    }

    /// u32 order, then one u64 per extent.
    pub fn shape(&mut self, shape: &Shape) {
        self.u32(shape.order() as u32);
        for &d in shape.dims() {
            self.count(d);
        }
    }

    /// Column-major, which is the α order of a matrix.
    pub fn matrix(&mut self, m: &Matrix) {
        self.f64s(&m.to_col_major());
    }

    pub fn finish(self) -> Vec<u8> {
        self.buf
    }
}

pub(crate) struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    /// Checks the magic and positions the reader after it.
    pub fn new(bytes: &'a [u8], magic: &[u8; 4]) -> Result<Self> {
        let mut r = Self { bytes, pos: 0 };
        let found = r.take(4)?;
        if found != magic {
            return Err(Error::Format {
                offset: 0,
                msg: format!(
                    "bad magic {:?}, expected {}",
                    String::from_utf8_lossy(found),
                    String::from_utf8_lossy(magic)
                ),
            });
        }
        Ok(r)
    }

    fn fail(&self, offset: usize, msg: impl Into<String>) -> Error {
        Error::Format {
            offset: offset as u64,
            msg: msg.into(),
        }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let remaining = self.bytes.len() - self.pos;
        if n > remaining {
            return Err(self.fail(
                self.pos,
                format!("truncated: need {n} bytes, {remaining} remain"),
            ));
        }
        let out = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    pub fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(
            self.take(4)?.try_into().expect("4 bytes"),
        ))
    }

    pub fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(
            self.take(8)?.try_into().expect("8 bytes"),
        ))
    }

    /// A u64 count that must fit in `usize`.
    pub fn count(&mut self) -> Result<usize> {
        let at = self.pos;
        let v = self.u64()?;
        usize::try_from(v).map_err(|_| self.fail(at, format!("count {v} does not fit in memory")))
    }

    /// `count` finite f64 values.
    pub fn f64s(&mut self, count: usize) -> Result<Vec<f64>> {
        let remaining = (self.bytes.len() - self.pos) / 8;
        if count > remaining {
            return Err(self.fail(
                self.pos,
                format!("truncated: need {count} f64 values, {remaining} remain"),
            ));
        }
        check_alloc(count as u128, "decoded payload")?;
        let start = self.pos;
        let raw = self.take(count * 8)?;
        let mut out = Vec::with_capacity(count);
        for (k, chunk) in raw.chunks_exact(8).enumerate() {
            let v = f64::from_le_bytes(chunk.try_into().expect("8 bytes"));
            if !v.is_finite() {
                return Err(self.fail(start + 8 * k, format!("non-finite value {v}")));
            }
            out.push(v);
        }
        Ok(out)
    }

    /// Shape header; `allow_scalar` admits order 0.
    pub fn shape(&mut self, allow_scalar: bool) -> Result<Shape> {
        let at = self.pos;
        let d = self.u32()? as usize;
        if d == 0 && !allow_scalar {
            return Err(self.fail(at, "order 0 is not allowed here"));
        }
        let mut dims = Vec::with_capacity(d.min(64));
        for _ in 0..d {
            let at = self.pos;
            let v = self.count()?;
            if v == 0 {
                return Err(self.fail(at, "zero extent"));
            }
            dims.push(v);
        }
        Shape::with_dims(dims).map_err(|e| self.fail(at, e.to_string()))
    }

    pub fn matrix(&mut self, rows: usize, cols: usize) -> Result<Matrix> {
        let at = self.pos;
        let count = rows
            .checked_mul(cols)
            .ok_or_else(|| self.fail(at, "matrix size overflows"))?;
        let data = self.f64s(count)?;
        Matrix::from_col_major(rows, cols, &data)
    }

    pub fn offset(&self) -> usize {
        self.pos
    }

    pub fn error_at(&self, offset: usize, msg: impl Into<String>) -> Error {
        self.fail(offset, msg)
    }

    /// Rejects trailing bytes.
    pub fn finish(self) -> Result<()> {
        if self.pos != self.bytes.len() {
            return Err(self.fail(
                self.pos,
                format!("{} unexpected trailing bytes", self.bytes.len() - self.pos),
            ));
        }
        Ok(())
    }
}
