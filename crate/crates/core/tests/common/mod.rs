//! Reference implementations used as test oracles. Each one is the most
//! literal loop form of its definition and shares no code path with the
//! optimized library routines beyond `DenseTensor::get` and `Matrix::get`.
#![allow(dead_code)]

use tenpca_core::rank1::{basis_element, Rank1Basis};
use tenpca_core::{DenseTensor, Matrix, Shape, TensorDataset};

/// Every 1-based multi-index of `dims` in α order. Empty dims yield one empty index.
pub fn all_indices(dims: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &extent in dims {
        let mut next = Vec::with_capacity(out.len() * extent);
        for i in 1..=extent {
            for prefix in &out {
                let mut v = prefix.clone();
                v.push(i);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// `Z[free_x, free_y] = Σ_k x[.., k, ..] y[.., k, ..]`.
pub fn contract_loop(
    x: &DenseTensor,
    y: &DenseTensor,
    modes_x: &[usize],
    modes_y: &[usize],
) -> DenseTensor {
    let free_x: Vec<usize> = (1..=x.order()).filter(|m| !modes_x.contains(m)).collect();
    let free_y: Vec<usize> = (1..=y.order()).filter(|m| !modes_y.contains(m)).collect();
    let k_dims: Vec<usize> = modes_x.iter().map(|&m| x.dims()[m - 1]).collect();
    let mut out_dims: Vec<usize> = free_x.iter().map(|&m| x.dims()[m - 1]).collect();
    out_dims.extend(free_y.iter().map(|&m| y.dims()[m - 1]));
    let shape = Shape::with_dims(out_dims).unwrap();
    let ks = all_indices(&k_dims);
    DenseTensor::from_fn(shape, |out| {
        let mut sum = 0.0;
        for k in &ks {
            let mut ix = vec![0; x.order()];
            let mut iy = vec![0; y.order()];
            for (p, &m) in free_x.iter().enumerate() {
                ix[m - 1] = out[p];
            }
            for (p, &m) in free_y.iter().enumerate() {
                iy[m - 1] = out[free_x.len() + p];
            }
            for (p, (&mx, &my)) in modes_x.iter().zip(modes_y).enumerate() {
                ix[mx - 1] = k[p];
                iy[my - 1] = k[p];
            }
            sum += x.get(&ix).unwrap() * y.get(&iy).unwrap();
        }
        sum
    })
    .unwrap()
}

pub fn inner_loop(x: &DenseTensor, y: &DenseTensor) -> f64 {
    all_indices(x.dims())
        .iter()
        .map(|i| x.get(i).unwrap() * y.get(i).unwrap())
        .sum()
}

/// `Z[i, j] = x[i] y[j]`.
pub fn outer_loop(x: &DenseTensor, y: &DenseTensor) -> DenseTensor {
    let mut dims = x.dims().to_vec();
    dims.extend_from_slice(y.dims());
    let d = x.order();
    DenseTensor::from_fn(Shape::with_dims(dims).unwrap(), |ij| {
        x.get(&ij[..d]).unwrap() * y.get(&ij[d..]).unwrap()
    })
    .unwrap()
}

fn sample_index(i: &[usize], n: usize) -> Vec<usize> {
    let mut v = i.to_vec();
    v.push(n);
    v
}

/// `G[n, m] = Σ_i X(i, n) X(i, m)`.
pub fn gram_loop(x: &TensorDataset) -> Matrix {
    let t = x.tensor();
    let idx = all_indices(x.sample_shape().dims());
    Matrix::from_fn(x.len(), x.len(), |a, b| {
        idx.iter()
            .map(|i| {
                t.get(&sample_index(i, a + 1)).unwrap() * t.get(&sample_index(i, b + 1)).unwrap()
            })
            .sum()
    })
    .unwrap()
}

/// `A^k(p, q) = Σ X(.., p, .., n) X(.., q, .., n)` over all other indices and n.
pub fn mode_operator_loop(x: &TensorDataset, k: usize) -> Matrix {
    let t = x.tensor();
    let ik = x.sample_shape().dims()[k - 1];
    let all = all_indices(t.dims());
    Matrix::from_fn(ik, ik, |p, q| {
        all.iter()
            .filter(|i| i[k - 1] == p + 1)
            .map(|i| {
                let mut j = i.clone();
                j[k - 1] = q + 1;
                t.get(i).unwrap() * t.get(&j).unwrap()
            })
            .sum()
    })
    .unwrap()
}

/// `D[n, m] = ⟨X_n, element m⟩` with every element materialized.
pub fn coefficients_explicit(x: &TensorDataset, b: &Rank1Basis) -> Matrix {
    let elements: Vec<DenseTensor> = (1..=b.len())
        .map(|m| basis_element(b, m).unwrap())
        .collect();
    Matrix::from_fn(x.len(), b.len(), |n, m| {
        inner_loop(&x.sample_tensor(n), &elements[m])
    })
    .unwrap()
}

/// Symmetric matrix × matrix product by triple loop.
pub fn matmul_loop(a: &Matrix, b: &Matrix) -> Matrix {
    Matrix::from_fn(a.rows(), b.cols(), |i, j| {
        (0..a.cols()).map(|k| a.get(i, k) * b.get(k, j)).sum()
    })
    .unwrap()
}

/// Householder reduction of a symmetric matrix to tridiagonal form.
/// Returns (diagonal, off-diagonal).
fn tridiagonalize(a: &Matrix) -> (Vec<f64>, Vec<f64>) {
    let n = a.rows();
    let mut m: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| a.get(i, j)).collect())
        .collect();
    for k in 0..n.saturating_sub(2) {
        let alpha_sq: f64 = (k + 1..n).map(|i| m[i][k] * m[i][k]).sum();
        if alpha_sq == 0.0 {
            continue;
        }
        let alpha = -m[k + 1][k].signum() * alpha_sq.sqrt();
        let mut v = vec![0.0; n];
        v[k + 1] = m[k + 1][k] - alpha;
        for i in k + 2..n {
            v[i] = m[i][k];
        }
        let vv: f64 = v.iter().map(|x| x * x).sum();
        if vv == 0.0 {
            continue;
        }
        // M <- H M H with H = I - 2 v vᵀ / vᵀv
        let p: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| m[i][j] * v[j]).sum::<f64>() * 2.0 / vv)
            .collect();
        let kappa: f64 = v.iter().zip(&p).map(|(a, b)| a * b).sum::<f64>() / vv;
        let w: Vec<f64> = p.iter().zip(&v).map(|(pi, vi)| pi - kappa * vi).collect();
        for i in 0..n {
            for j in 0..n {
                m[i][j] -= v[i] * w[j] + w[i] * v[j];
            }
        }
    }
    let diag = (0..n).map(|i| m[i][i]).collect();
    let off = (0..n.saturating_sub(1)).map(|i| m[i + 1][i]).collect();
    (diag, off)
}

/// Number of eigenvalues of the tridiagonal (d, e) strictly below `x`.
fn sturm_count(d: &[f64], e: &[f64], x: f64) -> usize {
    let tiny = f64::MIN_POSITIVE.sqrt();
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..d.len() {
        let off = if i == 0 { 0.0 } else { e[i - 1] * e[i - 1] / q };
        q = d[i] - x - off;
        if q == 0.0 {
            q = -tiny;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Eigenvalues (descending) by Householder tridiagonalization and Sturm
/// bisection.
pub fn eigenvalues_bisection(a: &Matrix) -> Vec<f64> {
    let n = a.rows();
    let (d, e) = tridiagonalize(a);
    let radius = (0..n)
        .map(|i| {
            let l = if i > 0 { e[i - 1].abs() } else { 0.0 };
            let r = if i + 1 < n { e[i].abs() } else { 0.0 };
            d[i].abs() + l + r
        })
        .fold(0.0, f64::max)
        .max(1e-300);
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        // k-th smallest: largest x with count(x) <= k
        let (mut lo, mut hi) = (-radius * 1.01, radius * 1.01);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            if sturm_count(&d, &e, mid) <= k {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        out.push(0.5 * (lo + hi));
    }
    out.reverse();
    out
}

/// Bilinear resize written as the direct 2-D blend of four neighbours.
pub fn bilinear_oracle(src: &[f64], sh: usize, sw: usize, dh: usize, dw: usize) -> Vec<f64> {
    let coord = |x: usize, s: usize, d: usize| -> (usize, usize, f64) {
        let mut c = (x as f64 + 0.5) * (s as f64 / d as f64) - 0.5;
        if c < 0.0 {
            c = 0.0;
        }
        if c > (s - 1) as f64 {
            c = (s - 1) as f64;
        }
        let c0 = c.floor() as usize;
        let c1 = if c0 + 1 < s { c0 + 1 } else { s - 1 };
        (c0, c1, c - c0 as f64)
    };
    let px = |r: usize, c: usize, ch: usize| src[(r * sw + c) * 3 + ch];
    let mut out = vec![0.0; dh * dw * 3];
    for y in 0..dh {
        let (y0, y1, ty) = coord(y, sh, dh);
        for x in 0..dw {
            let (x0, x1, tx) = coord(x, sw, dw);
            for ch in 0..3 {
                out[(y * dw + x) * 3 + ch] = (1.0 - ty)
                    * ((1.0 - tx) * px(y0, x0, ch) + tx * px(y0, x1, ch))
                    + ty * ((1.0 - tx) * px(y1, x0, ch) + tx * px(y1, x1, ch));
            }
        }
    }
    out
}

/// All k-subsets of 0..n.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut with_last: Vec<Vec<usize>> = subsets(n - 1, k - 1)
        .into_iter()
        .map(|mut s| {
            s.push(n - 1);
            s
        })
        .collect();
    let mut out = subsets(n - 1, k);
    out.append(&mut with_last);
    out
}

/// Mean of `‖X_n − Σ_{l∈S} ⟨X_n, U_l⟩ U_l‖²` over samples, by loops.
pub fn subset_error(x: &TensorDataset, tensors: &[DenseTensor], subset: &[usize]) -> f64 {
    let mut total = 0.0;
    for n in 0..x.len() {
        let s = x.sample(n);
        let mut r = s.to_vec();
        for &l in subset {
            let u = tensors[l].data();
            let c: f64 = s.iter().zip(u).map(|(a, b)| a * b).sum();
            for (ri, ui) in r.iter_mut().zip(u) {
                *ri -= c * ui;
            }
        }
        total += r.iter().map(|v| v * v).sum::<f64>();
    }
    total / x.len() as f64
}

/// Frobenius norm of the difference, relative to `max(‖b‖, tiny)`.
pub fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt();
    let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    num / den.max(1e-300)
}

/// `P = Σ_l v_l v_lᵀ` over the given flat vectors, as an L×L matrix.
pub fn projector(vectors: &[Vec<f64>]) -> Matrix {
    let l = vectors.first().map_or(0, Vec::len);
    Matrix::from_fn(l, l, |i, j| vectors.iter().map(|v| v[i] * v[j]).sum()).unwrap()
}
