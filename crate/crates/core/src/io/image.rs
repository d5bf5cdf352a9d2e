//! RGB image ingestion (PNG and binary PPM) and PNG grid export.
//!
//! Images become order-3 tensors `H×W×3` (row, column, channel) with values
//! in [0, 1]; a directory becomes the order-4 dataset `H×W×3×N` in sorted
//! file-name order.

use std::io::Cursor;
use std::path::{Path, PathBuf};

use crate::dataset::TensorDataset;
use crate::error::{Error, Result};
use crate::settings::check_alloc;
use crate::tensor::{DenseTensor, Shape};

pub const CHANNELS: usize = 3;

/// Decoded raster, row-major with interleaved RGB, values in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct RgbImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<f64>,
}

impl RgbImage {
    pub fn get(&self, row: usize, col: usize, channel: usize) -> f64 {
        self.pixels[(row * self.width + col) * CHANNELS + channel]
    }

    /// `H×W×3` tensor.
    pub fn to_tensor(&self) -> Result<DenseTensor> {
        let shape = Shape::new(vec![self.height, self.width, CHANNELS])?;
        DenseTensor::from_fn(shape, |i| self.get(i[0] - 1, i[1] - 1, i[2] - 1))
    }
}

const PNG_SIGNATURE: &[u8] = b"\x89PNG\r\n\x1a\n";

/// Decodes PNG or P6 PPM by content.
pub fn decode_image(bytes: &[u8]) -> std::result::Result<RgbImage, String> {
    if bytes.starts_with(PNG_SIGNATURE) {
        decode_png(bytes)
    } else if bytes.starts_with(b"P6") {
        decode_ppm(bytes)
    } else {
        Err("neither a PNG nor a binary PPM (P6) file".into())
    }
}

pub fn load_image(path: impl AsRef<Path>) -> Result<RgbImage> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_image(&bytes).map_err(|msg| Error::Ingestion {
        path: path.to_path_buf(),
        msg,
    })
}

/// Palette and low bit depths are expanded; 16-bit samples are scaled by
/// 1/65535; gray is replicated to RGB; alpha is dropped.
pub fn decode_png(bytes: &[u8]) -> std::result::Result<RgbImage, String> {
    let mut decoder = png::Decoder::new(Cursor::new(bytes));
    decoder.set_transformations(png::Transformations::EXPAND);
    let mut reader = decoder.read_info().map_err(|e| e.to_string())?;
    let size = reader
        .output_buffer_size()
        .ok_or("image too large to decode")?;
    let mut buf = vec![0; size];
    let info = reader.next_frame(&mut buf).map_err(|e| e.to_string())?;
    let (width, height) = (info.width as usize, info.height as usize);
    let samples_per_pixel = match info.color_type {
        png::ColorType::Grayscale => 1,
        png::ColorType::GrayscaleAlpha => 2,
        png::ColorType::Rgb => 3,
        png::ColorType::Rgba => 4,
        png::ColorType::Indexed => return Err("palette was not expanded".into()),
    };
    let wide = match info.bit_depth {
        png::BitDepth::Eight => false,
        png::BitDepth::Sixteen => true,
        other => return Err(format!("unexpected bit depth {other:?} after expansion")),
    };
    let sample = |row: usize, k: usize| -> f64 {
        let line = &buf[row * info.line_size..(row + 1) * info.line_size];
        if wide {
            u16::from_be_bytes([line[2 * k], line[2 * k + 1]]) as f64 / 65535.0
        } else {
            line[k] as f64 / 255.0
        }
    };
    let mut pixels = Vec::with_capacity(width * height * CHANNELS);
    for row in 0..height {
        for col in 0..width {
            let base = col * samples_per_pixel;
            for ch in 0..CHANNELS {
                let k = if samples_per_pixel >= 3 {
                    base + ch
                } else {
                    base
                };
                pixels.push(sample(row, k));
            }
        }
    }
    Ok(RgbImage {
        width,
        height,
        pixels,
    })
}

/// Binary PPM: `P6`, width, height, maxval (whitespace separated, `#`
/// comments allowed), one whitespace byte, then the raster. Samples are one
/// byte when maxval < 256, otherwise two bytes big-endian.
pub fn decode_ppm(bytes: &[u8]) -> std::result::Result<RgbImage, String> {
    let mut pos = 2;
    let mut header = [0usize; 3];
    for (slot, name) in header.iter_mut().zip(["width", "height", "maxval"]) {
        loop {
            match bytes.get(pos) {
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                _ => break,
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        *slot = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| format!("bad PPM {name} at byte {start}"))?;
    }
    let [width, height, maxval] = header;
    if width == 0 || height == 0 || maxval == 0 || maxval > 65535 {
        return Err(format!("bad PPM header {width}x{height} maxval {maxval}"));
    }
    if !bytes.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(format!("missing whitespace after PPM header at byte {pos}"));
    }
    pos += 1;
    let bytes_per_sample = if maxval < 256 { 1 } else { 2 };
    let count = width
        .checked_mul(height)
        .and_then(|p| p.checked_mul(CHANNELS))
        .ok_or("PPM dimensions overflow")?;
    let raster = bytes
        .get(pos..)
        .filter(|r| r.len() >= count * bytes_per_sample)
        .ok_or_else(|| {
            format!(
                "PPM raster truncated: need {} bytes",
                count * bytes_per_sample
            )
        })?;
    let scale = maxval as f64;
    let pixels = (0..count)
        .map(|k| {
            let v = if bytes_per_sample == 1 {
                raster[k] as f64
            } else {
                u16::from_be_bytes([raster[2 * k], raster[2 * k + 1]]) as f64
            };
            (v / scale).min(1.0)
        })
        .collect();
    Ok(RgbImage {
        width,
        height,
        pixels,
    })
}

/// Source coordinate and weight for each destination coordinate, half-pixel
/// centered: `s = (x + 0.5)·S/D − 0.5` clamped to [0, S−1]; the result
/// blends `floor(s)` and the next sample (clamped) with weight `s − floor(s)`.
fn taps(src: usize, dst: usize) -> Vec<(usize, usize, f64)> {
    let ratio = src as f64 / dst as f64;
    (0..dst)
        .map(|x| {
            let s = ((x as f64 + 0.5) * ratio - 0.5).clamp(0.0, (src - 1) as f64);
            let x0 = s.floor() as usize;
            let x1 = (x0 + 1).min(src - 1);
            (x0, x1, s - x0 as f64)
        })
        .collect()
}

/// Separable bilinear resize: horizontal pass, then vertical.
pub fn resize_bilinear(img: &RgbImage, height: usize, width: usize) -> RgbImage {
    let horizontal = taps(img.width, width);
    let mut mid = vec![0.0; img.height * width * CHANNELS];
    for row in 0..img.height {
        for (x, &(x0, x1, t)) in horizontal.iter().enumerate() {
            for ch in 0..CHANNELS {
                let a = img.get(row, x0, ch);
                let b = img.get(row, x1, ch);
                mid[(row * width + x) * CHANNELS + ch] = a + t * (b - a);
            }
        }
    }
    let vertical = taps(img.height, height);
    let mut pixels = vec![0.0; height * width * CHANNELS];
    for (y, &(y0, y1, t)) in vertical.iter().enumerate() {
        for x in 0..width {
            for ch in 0..CHANNELS {
                let a = mid[(y0 * width + x) * CHANNELS + ch];
                let b = mid[(y1 * width + x) * CHANNELS + ch];
                pixels[(y * width + x) * CHANNELS + ch] = a + t * (b - a);
            }
        }
    }
    RgbImage {
        width,
        height,
        pixels,
    }
}

/// A directory of images to be resized to a common size.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageManifest {
    pub root: PathBuf,
    /// Sorted by file name.
    pub files: Vec<PathBuf>,
    pub height: usize,
    pub width: usize,
}

impl ImageManifest {
    /// Lists `*.png` and `*.ppm` files (case-insensitive, non-recursive).
    pub fn scan(root: impl AsRef<Path>, height: usize, width: usize) -> Result<Self> {
        let root = root.as_ref().to_path_buf();
        if height == 0 || width == 0 {
            return Err(Error::arg(format!(
                "target size {height}x{width} must be positive"
            )));
        }
        let entries = std::fs::read_dir(&root).map_err(|e| Error::io(&root, e))?;
        let mut files = Vec::new();
        for entry in entries {
            let path = entry.map_err(|e| Error::io(&root, e))?.path();
            let is_image = path
                .extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| e.eq_ignore_ascii_case("png") || e.eq_ignore_ascii_case("ppm"));
            if is_image && path.is_file() {
                files.push(path);
            }
        }
        files.sort();
        if files.is_empty() {
            return Err(Error::Ingestion {
                path: root,
                msg: "no PNG or PPM files found".into(),
            });
        }
        Ok(Self {
            root,
            files,
            height,
            width,
        })
    }

    pub fn len(&self) -> usize {
        self.files.len()
    }

    pub fn is_empty(&self) -> bool {
        self.files.is_empty()
    }
}

/// Decodes, resizes and stacks every file into an `H×W×3×N` dataset.
pub fn load_dataset(m: &ImageManifest) -> Result<TensorDataset> {
    let per_image = m.height as u128 * m.width as u128 * CHANNELS as u128;
    check_alloc(per_image * m.files.len() as u128, "image dataset")?;
    let samples = m
        .files
        .iter()
        .map(|f| {
            let img = load_image(f)?;
            let img = if img.height == m.height && img.width == m.width {
                img
            } else {
                resize_bilinear(&img, m.height, m.width)
            };
            img.to_tensor()
        })
        .collect::<Result<Vec<_>>>()?;
    TensorDataset::from_samples(&samples)
}

/// `rows = ceil(√n)`, `cols = ceil(n / rows)`.
pub fn grid_layout(n: usize) -> (usize, usize) {
    if n == 0 {
        return (0, 0);
    }
    let mut rows = (n as f64).sqrt() as usize;
    while rows * rows < n {
        rows += 1;
    }
    (rows, n.div_ceil(rows))
}

/// Clamp to [0, 1], scale by 255 and round half away from zero.
pub fn quantize(v: f64) -> u8 {
    let v = if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) };
    (v * 255.0).round() as u8
}

/// Tiles `H×W×3` tensors row-major into one 8-bit RGB raster. Returns
/// `(width, height, bytes)`; unused tiles are black.
pub fn render_grid(samples: &[DenseTensor]) -> Result<(usize, usize, Vec<u8>)> {
    let first = samples
        .first()
        .ok_or_else(|| Error::arg("no images to tile"))?;
    let dims = first.dims();
    if dims.len() != 3 || dims[2] != CHANNELS {
        return Err(Error::dim(format!(
            "image tiles must be HxWx3, got {}",
            first.shape()
        )));
    }
    let (h, w) = (dims[0], dims[1]);
    if let Some(s) = samples.iter().find(|s| s.shape() != first.shape()) {
        return Err(Error::dim(format!(
            "tile of shape {} among tiles of shape {}",
            s.shape(),
            first.shape()
        )));
    }
    let (rows, cols) = grid_layout(samples.len());
    let (gw, gh) = (cols * w, rows * h);
    let mut out = vec![0u8; gw * gh * CHANNELS];
    for (k, s) in samples.iter().enumerate() {
        let (tr, tc) = (k / cols, k % cols);
        let data = s.data();
        for r in 0..h {
            for c in 0..w {
                for ch in 0..CHANNELS {
                    let v = data[r + h * (c + w * ch)];
                    let (y, x) = (tr * h + r, tc * w + c);
                    out[(y * gw + x) * CHANNELS + ch] = quantize(v);
                }
            }
        }
    }
    Ok((gw, gh, out))
}

/// 8-bit RGB PNG.
pub fn encode_png(width: usize, height: usize, rgb: &[u8]) -> Result<Vec<u8>> {
    if rgb.len() != width * height * CHANNELS {
        return Err(Error::dim(format!(
            "{} bytes for a {width}x{height} RGB image",
            rgb.len()
        )));
    }
    let mut out = Vec::new();
    let mut encoder = png::Encoder::new(&mut out, width as u32, height as u32);
    encoder.set_color(png::ColorType::Rgb);
    encoder.set_depth(png::BitDepth::Eight);
    let encode = || -> std::result::Result<(), png::EncodingError> {
        let mut writer = encoder.write_header()?;
        writer.write_image_data(rgb)?;
        writer.finish()
    };
    encode().map_err(|e| Error::arg(format!("PNG encoding failed: {e}")))?;
    Ok(out)
}

pub fn save_png(path: impl AsRef<Path>, width: usize, height: usize, rgb: &[u8]) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode_png(width, height, rgb)?).map_err(|e| Error::io(path, e))
}

/// Renders the tiles with [`render_grid`] and writes them as a PNG.
pub fn export_image_grid(samples: &[DenseTensor], path: impl AsRef<Path>) -> Result<()> {
    let (w, h, rgb) = render_grid(samples)?;
    save_png(path, w, h, &rgb)
}
