use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::settings::check_alloc;

use super::{DenseTensor, Shape};

/// Reorders modes: mode `a` of the result is mode `perm[a]` of `x` (1-based).
pub fn permute(x: &DenseTensor, perm: &[usize]) -> Result<DenseTensor> {
    let d = x.order();
    if perm.len() != d {
        return Err(Error::arg(format!(
            "permutation of length {} for an order-{d} tensor",
            perm.len()
        )));
    }
    let mut seen = vec![false; d];
    for &p in perm {
        if p == 0 || p > d || seen[p - 1] {
            return Err(Error::arg(format!(
                "{perm:?} is not a permutation of 1..={d}"
            )));
        }
        seen[p - 1] = true;
    }
    if perm.iter().enumerate().all(|(a, &p)| p == a + 1) {
        return Ok(x.clone());
    }

    let in_strides = x.shape().strides();
    let out_dims: Vec<usize> = perm.iter().map(|&p| x.dims()[p - 1]).collect();
    let out_strides: Vec<usize> = perm.iter().map(|&p| in_strides[p - 1]).collect();
    let shape = Shape::with_dims(out_dims.clone())?;
    let src = x.data();
    let mut data = Vec::with_capacity(src.len());
    let mut idx = vec![0usize; d];
    let mut offset = 0usize;
    for _ in 0..src.len() {
        data.push(src[offset]);
        // odometer with incremental source offset
        for a in 0..d {
            idx[a] += 1;
            offset += out_strides[a];
            if idx[a] < out_dims[a] {
                break;
            }
            offset -= out_strides[a] * out_dims[a];
            idx[a] = 0;
        }
    }
    Ok(DenseTensor::from_parts(shape, data))
}

fn check_mode_list(modes: &[usize], order: usize, which: &str) -> Result<()> {
    let mut seen = vec![false; order];
    for &m in modes {
        if m == 0 || m > order {
            return Err(Error::arg(format!(
                "mode {m} of {which} is outside 1..={order}"
            )));
        }
        if seen[m - 1] {
            return Err(Error::arg(format!("duplicate mode {m} in {which}")));
        }
        seen[m - 1] = true;
    }
    Ok(())
}

/// Contracts mode `modes_x[k]` of `x` against mode `modes_y[k]` of `y` for every k.
///
/// The result carries the free modes of `x` in their original order followed
/// by the free modes of `y`. Contracting every mode of both operands yields an
/// order-0 tensor.
pub fn contract(
    x: &DenseTensor,
    y: &DenseTensor,
    modes_x: &[usize],
    modes_y: &[usize],
) -> Result<DenseTensor> {
    if modes_x.len() != modes_y.len() {
        return Err(Error::arg(format!(
            "{} contracted modes for x but {} for y",
            modes_x.len(),
            modes_y.len()
        )));
    }
    check_mode_list(modes_x, x.order(), "x")?;
    check_mode_list(modes_y, y.order(), "y")?;
    for (&mx, &my) in modes_x.iter().zip(modes_y) {
        let (ex, ey) = (x.dims()[mx - 1], y.dims()[my - 1]);
        if ex != ey {
            return Err(Error::dim(format!(
                "cannot contract mode {mx} of x (extent {ex}) with mode {my} of y (extent {ey})"
            )));
        }
    }

    let free_x: Vec<usize> = (1..=x.order()).filter(|m| !modes_x.contains(m)).collect();
    let free_y: Vec<usize> = (1..=y.order()).filter(|m| !modes_y.contains(m)).collect();

    let mut out_dims: Vec<usize> = free_x.iter().map(|&m| x.dims()[m - 1]).collect();
    out_dims.extend(free_y.iter().map(|&m| y.dims()[m - 1]));
    let out_shape = Shape::with_dims(out_dims)?;
    check_alloc(out_shape.total_size() as u128, "contraction result")?;

    let f: usize = free_x.iter().map(|&m| x.dims()[m - 1]).product();
    let g: usize = free_y.iter().map(|&m| y.dims()[m - 1]).product();
    let k: usize = modes_x.iter().map(|&m| x.dims()[m - 1]).product();

    // x as an F×K column-major matrix, y as K×G
    let xp: Vec<usize> = free_x.iter().chain(modes_x).copied().collect();
    let yp: Vec<usize> = modes_y.iter().chain(&free_y).copied().collect();
    let xm = permute(x, &xp)?;
    let ym = permute(y, &yp)?;
    let (xs, ys) = (xm.data(), ym.data());

    let mut z = vec![0.0; f * g];
    for col in 0..g {
        let zc = &mut z[col * f..(col + 1) * f];
        for kk in 0..k {
            let yv = ys[kk + k * col];
            if yv == 0.0 {
                continue;
            }
            let xc = &xs[kk * f..(kk + 1) * f];
            for (zv, xv) in zc.iter_mut().zip(xc) {
                *zv += xv * yv;
            }
        }
    }
    Ok(DenseTensor::from_parts(out_shape, z))
}

/// ⟨X, Y⟩ = Σ_i X_i Y_i.
pub fn inner(x: &DenseTensor, y: &DenseTensor) -> Result<f64> {
    x.require_same_shape(y)?;
    Ok(dot(x.data(), y.data()))
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

/// Frobenius norm √⟨X, X⟩.
pub fn norm(x: &DenseTensor) -> f64 {
    dot(x.data(), x.data()).sqrt()
}

/// Z[i, j] = X[i]·Y[j], an order-(q+p) tensor.
pub fn outer(x: &DenseTensor, y: &DenseTensor) -> Result<DenseTensor> {
    let shape = x.shape().concat(y.shape())?;
    check_alloc(shape.total_size() as u128, "outer product")?;
    let mut data = Vec::with_capacity(shape.total_size());
    for &yv in y.data() {
        data.extend(x.data().iter().map(|xv| xv * yv));
    }
    Ok(DenseTensor::from_parts(shape, data))
}

/// The L indicator tensors `e_{i_1} ∘ … ∘ e_{i_d}`, element m at α⁻¹(m).
pub fn canonical_basis(shape: &Shape) -> Result<Vec<DenseTensor>> {
    let total = shape.total_size();
    check_alloc((total as u128) * (total as u128), "canonical basis")?;
    Ok((0..total)
        .map(|m| {
            let mut data = vec![0.0; total];
            data[m] = 1.0;
            DenseTensor::from_parts(shape.clone(), data)
        })
        .collect())
}

/// Groups the last `q` modes into one linear index, and the leading modes (if
/// any) into another. The result is a vector when `q` equals the order and an
/// `L_lead × L_trail` matrix otherwise. Entries do not move.
pub fn flatten(x: &DenseTensor, q: usize) -> Result<DenseTensor> {
    let d = x.order();
    if q == 0 || q > d {
        return Err(Error::arg(format!(
            "cannot flatten the last {q} modes of an order-{d} tensor"
        )));
    }
    let lead: usize = x.dims()[..d - q].iter().product();
    let trail: usize = x.dims()[d - q..].iter().product();
    let shape = if q == d {
        Shape::new(vec![trail])?
    } else {
        Shape::new(vec![lead, trail])?
    };
    x.clone().reshape(shape)
}

/// Restores a flattened tensor to `shape`.
pub fn unflatten(x: &DenseTensor, shape: &Shape) -> Result<DenseTensor> {
    x.clone().reshape(shape.clone())
}

/// n-mode product along `mode` (1-based).
///
/// With `transpose == false` the result is `Y[…, j, …] = Σ_i M[j, i] X[…, i, …]`
/// (M is J×I_k); with `transpose == true` it is `Σ_i M[i, j] X[…, i, …]`
/// (M is I_k×J).
pub fn mode_product(
    x: &DenseTensor,
    mode: usize,
    m: &Matrix,
    transpose: bool,
) -> Result<DenseTensor> {
    let d = x.order();
    if mode == 0 || mode > d {
        return Err(Error::arg(format!("mode {mode} outside 1..={d}")));
    }
    let extent = x.dims()[mode - 1];
    let (rows_in, out_extent) = if transpose {
        (m.rows(), m.cols())
    } else {
        (m.cols(), m.rows())
    };
    if rows_in != extent {
        return Err(Error::dim(format!(
            "mode {mode} has extent {extent} but the matrix is {}x{}{}",
            m.rows(),
            m.cols(),
            if transpose { " (transposed)" } else { "" }
        )));
    }
    let inner_len: usize = x.dims()[..mode - 1].iter().product();
    let outer_len: usize = x.dims()[mode..].iter().product();
    let mut out_dims = x.dims().to_vec();
    out_dims[mode - 1] = out_extent;
    let shape = Shape::with_dims(out_dims)?;
    check_alloc(shape.total_size() as u128, "mode product")?;

    let src = x.data();
    let mut out = vec![0.0; shape.total_size()];
    for b in 0..outer_len {
        let src_block = &src[b * inner_len * extent..(b + 1) * inner_len * extent];
        let out_block = &mut out[b * inner_len * out_extent..(b + 1) * inner_len * out_extent];
        for j in 0..out_extent {
            let dst = &mut out_block[j * inner_len..(j + 1) * inner_len];
            for i in 0..extent {
                let coef = if transpose { m.get(i, j) } else { m.get(j, i) };
                if coef == 0.0 {
                    continue;
                }
                let s = &src_block[i * inner_len..(i + 1) * inner_len];
                for (o, v) in dst.iter_mut().zip(s) {
                    *o += coef * v;
                }
            }
        }
    }
    Ok(DenseTensor::from_parts(shape, out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(dims: &[usize], data: &[f64]) -> DenseTensor {
        DenseTensor::from_vec(Shape::new(dims.to_vec()).unwrap(), data.to_vec()).unwrap()
    }

    fn ones(dims: &[usize]) -> DenseTensor {
        let n = dims.iter().product();
        t(dims, &vec![1.0; n])
    }

    #[test]
    fn identity_contraction_returns_operand() {
        let id = t(&[2, 2], &[1.0, 0.0, 0.0, 1.0]);
        let y = t(&[2, 3], &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let z = contract(&id, &y, &[2], &[1]).unwrap();
        assert_eq!(z, y);
    }

    #[test]
    fn ones_contraction() {
        let z = contract(&ones(&[2, 2]), &ones(&[2, 2]), &[2], &[1]).unwrap();
        assert_eq!(z, t(&[2, 2], &[2.0; 4]));
        let s = contract(&ones(&[2, 2]), &ones(&[2, 2]), &[1, 2], &[1, 2]).unwrap();
        assert_eq!(s.order(), 0);
        assert_eq!(s.scalar_value().unwrap(), 4.0);
    }

    #[test]
    fn contract_argument_errors() {
        let a = ones(&[2, 3]);
        assert!(matches!(
            contract(&a, &a, &[1], &[2]),
            Err(Error::Dimension(msg)) if msg.contains("extent 2") && msg.contains("extent 3")
        ));
        assert!(matches!(
            contract(&a, &a, &[1, 1], &[1, 2]),
            Err(Error::Argument(_))
        ));
        assert!(matches!(
            contract(&a, &a, &[1], &[]),
            Err(Error::Argument(_))
        ));
        assert!(matches!(
            contract(&a, &a, &[3], &[1]),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn inner_and_norm_examples() {
        let o = ones(&[2, 2]);
        assert_eq!(inner(&o, &o).unwrap(), 4.0);
        assert_eq!(norm(&o), 2.0);
        assert_eq!(
            norm(&DenseTensor::zeros(Shape::new(vec![3, 2]).unwrap()).unwrap()),
            0.0
        );
        let e11 = t(&[2, 2], &[1.0, 0.0, 0.0, 0.0]);
        let e12 = t(&[2, 2], &[0.0, 0.0, 1.0, 0.0]);
        assert_eq!(inner(&e11, &e12).unwrap(), 0.0);
        assert!(inner(&o, &ones(&[4])).is_err());
    }

    #[test]
    fn outer_examples() {
        let z = outer(&t(&[2], &[1.0, 0.0]), &t(&[2], &[0.0, 1.0])).unwrap();
        assert_eq!(z.dims(), &[2, 2]);
        assert_eq!(z.get(&[1, 2]).unwrap(), 1.0);
        assert_eq!(z.data().iter().sum::<f64>(), 1.0);

        let y = t(&[2, 3], &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(outer(&DenseTensor::scalar(2.5), &y).unwrap(), y.scaled(2.5));
    }

    #[test]
    fn canonical_basis_is_one_hot() {
        let s = Shape::new(vec![2, 2]).unwrap();
        let b = canonical_basis(&s).unwrap();
        assert_eq!(b.len(), 4);
        for (m, e) in b.iter().enumerate() {
            for (n, f) in b.iter().enumerate() {
                assert_eq!(inner(e, f).unwrap(), if m == n { 1.0 } else { 0.0 });
            }
            assert_eq!(e.data().iter().filter(|v| **v == 1.0).count(), 1);
        }
        let big = Shape::new(vec![20_000]).unwrap();
        assert!(matches!(canonical_basis(&big), Err(Error::Capacity { .. })));
    }

    #[test]
    fn flatten_places_entries_by_alpha() {
        let x = DenseTensor::from_fn(Shape::new(vec![3, 2]).unwrap(), |i| {
            (i[0] * 10 + i[1]) as f64
        })
        .unwrap();
        let v = flatten(&x, 2).unwrap();
        assert_eq!(v.dims(), &[6]);
        assert_eq!(v.get(&[5]).unwrap(), 22.0);
        let back = unflatten(&v, x.shape()).unwrap();
        assert_eq!(back, x);
        let m = flatten(&x, 1).unwrap();
        assert_eq!(m.dims(), &[3, 2]);
        assert!(flatten(&x, 0).is_err());
        assert!(flatten(&x, 3).is_err());
    }

    #[test]
    fn permute_transposes_matrix() {
        let x = t(&[2, 3], &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let y = permute(&x, &[2, 1]).unwrap();
        assert_eq!(y.dims(), &[3, 2]);
        for i in 1..=2 {
            for j in 1..=3 {
                assert_eq!(y.get(&[j, i]).unwrap(), x.get(&[i, j]).unwrap());
            }
        }
        assert!(permute(&x, &[1, 1]).is_err());
    }

    #[test]
    fn mode_product_matches_contraction() {
        let x = DenseTensor::from_fn(Shape::new(vec![2, 3, 2]).unwrap(), |i| {
            (i[0] + 2 * i[1] + 5 * i[2]) as f64 * 0.1
        })
        .unwrap();
        let m = Matrix::from_fn(4, 3, |r, c| (r as f64) - 0.5 * c as f64).unwrap();
        let y = mode_product(&x, 2, &m, false).unwrap();
        assert_eq!(y.dims(), &[2, 4, 2]);
        for a in 1..=2 {
            for j in 1..=4 {
                for b in 1..=2 {
                    let want: f64 = (1..=3)
                        .map(|i| m.get(j - 1, i - 1) * x.get(&[a, i, b]).unwrap())
                        .sum();
                    assert!((y.get(&[a, j, b]).unwrap() - want).abs() < 1e-13);
                }
            }
        }
        let yt = mode_product(&x, 2, &m.transpose(), true).unwrap();
        assert_eq!(yt, y);
        assert!(mode_product(&x, 1, &m, false).is_err());
    }
}
