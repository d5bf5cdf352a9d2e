mod common;

use std::path::Path;

use common::bilinear_oracle;
use tenpca_core::io::image::{
    decode_image, encode_png, grid_layout, resize_bilinear, save_png, RgbImage,
};
use tenpca_core::io::{
    export_image_grid, export_spectrum, load_any, load_dataset, load_tensor, read_spectrum,
    save_tensor, ImageManifest, Stored,
};
use tenpca_core::synth::{random_tensor, seeded};
use tenpca_core::{DenseTensor, Error, Shape};

fn write_ppm(path: &Path, w: usize, h: usize, rgb: &[u8]) {
    let mut b = format!("P6\n{w} {h}\n255\n").into_bytes();
    b.extend_from_slice(rgb);
    std::fs::write(path, b).unwrap();
}

#[test]
fn tensor_file_round_trip_and_truncation() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.tpt");
    let x = random_tensor(&mut seeded(1), &Shape::new(vec![4, 3, 2]).unwrap()).unwrap();
    save_tensor(&path, &x).unwrap();
    let back = load_tensor(&path).unwrap();
    assert_eq!(back, x);
    assert!(matches!(load_any(&path).unwrap(), Stored::Tensor(_)));

    let bytes = std::fs::read(&path).unwrap();
    std::fs::write(&path, &bytes[..20]).unwrap();
    match load_tensor(&path) {
        Err(Error::Format { offset, .. }) => assert_eq!(offset, 16),
        other => panic!("{other:?}"),
    }
    assert!(matches!(
        load_tensor(dir.path().join("missing")),
        Err(Error::Io { .. })
    ));
}

#[test]
fn solid_color_directory() {
    let dir = tempfile::tempdir().unwrap();
    let colors = [[255u8, 0, 0], [0, 255, 0], [0, 0, 255], [51, 102, 153]];
    for (k, c) in colors.iter().enumerate() {
        let rgb: Vec<u8> = c.iter().copied().cycle().take(8 * 8 * 3).collect();
        write_ppm(&dir.path().join(format!("img{k}.ppm")), 8, 8, &rgb);
    }
    std::fs::write(dir.path().join("notes.txt"), "ignored").unwrap();
    let m = ImageManifest::scan(dir.path(), 8, 8).unwrap();
    assert_eq!(m.len(), 4);
    let x = load_dataset(&m).unwrap();
    assert_eq!(x.tensor().dims(), &[8, 8, 3, 4]);
    for (k, c) in colors.iter().enumerate() {
        let s = x.sample_tensor(k);
        for r in 1..=8 {
            for col in 1..=8 {
                for ch in 1..=3 {
                    assert_eq!(s.get(&[r, col, ch]).unwrap(), c[ch - 1] as f64 / 255.0);
                }
            }
        }
    }
    let again = load_dataset(&ImageManifest::scan(dir.path(), 8, 8).unwrap()).unwrap();
    assert_eq!(again, x);
}

#[test]
fn sorted_order_and_mixed_formats() {
    let dir = tempfile::tempdir().unwrap();
    save_png(dir.path().join("b.png"), 2, 2, &[10; 12]).unwrap();
    write_ppm(&dir.path().join("a.ppm"), 2, 2, &[200; 12]);
    write_ppm(&dir.path().join("c.PPM"), 2, 2, &[0; 12]);
    let m = ImageManifest::scan(dir.path(), 2, 2).unwrap();
    let names: Vec<_> = m
        .files
        .iter()
        .map(|f| f.file_name().unwrap().to_str().unwrap().to_owned())
        .collect();
    assert_eq!(names, ["a.ppm", "b.png", "c.PPM"]);
    let x = load_dataset(&m).unwrap();
    assert_eq!(x.sample(0)[0], 200.0 / 255.0);
    assert_eq!(x.sample(1)[0], 10.0 / 255.0);
}

#[test]
fn undecodable_file_is_named() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.png"), b"not a png").unwrap();
    let m = ImageManifest::scan(dir.path(), 4, 4).unwrap();
    match load_dataset(&m) {
        Err(Error::Ingestion { path, .. }) => assert!(path.ends_with("bad.png")),
        other => panic!("{other:?}"),
    }
    let empty = tempfile::tempdir().unwrap();
    assert!(matches!(
        ImageManifest::scan(empty.path(), 4, 4),
        Err(Error::Ingestion { .. })
    ));
}

#[test]
fn resize_matches_direct_bilinear() {
    let src: Vec<f64> = (0..16 * 16 * 3)
        .map(|k| ((k * 37) % 101) as f64 / 100.0)
        .collect();
    let img = RgbImage {
        width: 16,
        height: 16,
        pixels: src.clone(),
    };
    for (h, w) in [(8, 8), (5, 11), (16, 16), (20, 24)] {
        let got = resize_bilinear(&img, h, w);
        let want = bilinear_oracle(&src, 16, 16, h, w);
        for (a, b) in got.pixels.iter().zip(&want) {
            assert!((a - b).abs() <= 1e-12);
        }
    }
}

#[test]
fn grid_of_six_is_three_by_two() {
    assert_eq!(grid_layout(6), (3, 2));
    let dir = tempfile::tempdir().unwrap();
    let shape = Shape::new(vec![4, 5, 3]).unwrap();
    let tiles: Vec<DenseTensor> = (0..6)
        .map(|k| DenseTensor::from_fn(shape.clone(), |_| k as f64 / 5.0).unwrap())
        .collect();
    let path = dir.path().join("grid.png");
    export_image_grid(&tiles, &path).unwrap();
    let img = decode_image(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!((img.width, img.height), (10, 12));
    // tile 3 sits at grid row 1, column 1
    assert_eq!(
        (img.get(4, 5, 0) * 255.0).round(),
        (3.0f64 / 5.0 * 255.0).round()
    );
    let single = dir.path().join("one.png");
    export_image_grid(&tiles[..1], &single).unwrap();
    let img = decode_image(&std::fs::read(&single).unwrap()).unwrap();
    assert_eq!((img.width, img.height), (5, 4));
}

#[test]
fn sixteen_bit_png_is_scaled() {
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, 1, 1);
        enc.set_color(png::ColorType::Rgb);
        enc.set_depth(png::BitDepth::Sixteen);
        let mut w = enc.write_header().unwrap();
        w.write_image_data(&[0xff, 0xff, 0, 0, 0x80, 0]).unwrap();
    }
    let img = decode_image(&out).unwrap();
    assert_eq!(img.pixels, vec![1.0, 0.0, 32768.0 / 65535.0]);
    let gray = encode_png(1, 1, &[9, 9, 9]).unwrap();
    assert_eq!(decode_image(&gray).unwrap().pixels, vec![9.0 / 255.0; 3]);
}

#[test]
fn spectrum_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spectrum.csv");
    let v = vec![3.0, 1.0, 1.0 / 7.0];
    export_spectrum(&v, &path).unwrap();
    assert_eq!(read_spectrum(&path).unwrap(), v);
    export_spectrum(&[], &path).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "index,value\n");
}
