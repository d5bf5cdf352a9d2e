use crate::error::Result;
use crate::settings::Settings;

use super::{sym_eig_with, Matrix};

/// Thin SVD `D = U diag(σ) Vᵀ` truncated to numerical rank r.
#[derive(Debug, Clone, PartialEq)]
pub struct Svd {
    /// `n×r`, orthonormal columns.
    pub u: Matrix,
    /// Positive, descending.
    pub singular_values: Vec<f64>,
    /// `m×r`, orthonormal columns.
    pub v: Matrix,
}

impl Svd {
    pub fn rank(&self) -> usize {
        self.singular_values.len()
    }

    /// `U diag(σ) Vᵀ` using the leading `k` components.
    pub fn reconstruct(&self, k: usize) -> Result<Matrix> {
        let k = k.min(self.rank());
        let us = Matrix::from_fn(self.u.rows(), k, |r, c| {
            self.u.get(r, c) * self.singular_values[c]
        })?;
        us.matmul(&self.v.leading_columns(k)?.transpose())
    }
}

pub fn svd(d: &Matrix) -> Result<Svd> {
    svd_with(d, &Settings::default())
}

/// SVD through the eigendecomposition of the smaller Gram matrix.
///
/// For `n ≤ m` the left factor comes from `DDᵀ = U Σ² Uᵀ` and the right factor
/// is recovered as `V = Dᵀ U Σ⁻¹`; otherwise the roles swap. Components whose
/// Gram eigenvalue is not above `eps_rank · λ_max` are dropped, so Σ⁻¹ is only
/// formed on the retained block.
pub fn svd_with(d: &Matrix, settings: &Settings) -> Result<Svd> {
    let (n, m) = (d.rows(), d.cols());
    let wide = n <= m;
    let gram = if wide { outer_gram(d)? } else { inner_gram(d)? };
    let eig = sym_eig_with(&gram, settings)?;

    let lambda_max = eig.eigenvalues.first().copied().unwrap_or(0.0);
    let rank = if lambda_max > 0.0 {
        eig.eigenvalues
            .iter()
            .take_while(|&&l| l > settings.eps_rank * lambda_max)
            .count()
    } else {
        0
    };
    let sigma: Vec<f64> = eig.eigenvalues[..rank].iter().map(|l| l.sqrt()).collect();
    let kept = eig.eigenvectors.leading_columns(rank)?;

    // other = Dᵀ·kept·Σ⁻¹ (wide) or D·kept·Σ⁻¹ (tall)
    let projected = if wide {
        d.transpose().matmul(&kept)?
    } else {
        d.matmul(&kept)?
    };
    let other = Matrix::from_fn(projected.rows(), rank, |r, c| {
        projected.get(r, c) / sigma[c]
    })?;

    let (u, v) = if wide { (kept, other) } else { (other, kept) };
    Ok(Svd {
        u,
        singular_values: sigma,
        v,
    })
}

/// `DDᵀ`
fn outer_gram(d: &Matrix) -> Result<Matrix> {
    let n = d.rows();
    let mut g = Matrix::zeros(n, n)?;
    for i in 0..n {
        for j in i..n {
            let dot: f64 = d.row(i).iter().zip(d.row(j)).map(|(a, b)| a * b).sum();
            g.set(i, j, dot);
            g.set(j, i, dot);
        }
    }
    Ok(g)
}

/// `DᵀD`
fn inner_gram(d: &Matrix) -> Result<Matrix> {
    let m = d.cols();
    let mut upper = vec![0.0; m * m];
    for r in 0..d.rows() {
        let row = d.row(r);
        for i in 0..m {
            let a = row[i];
            if a == 0.0 {
                continue;
            }
            for j in i..m {
                upper[i * m + j] += a * row[j];
            }
        }
    }
    Matrix::from_fn(m, m, |i, j| {
        if i <= j {
            upper[i * m + j]
        } else {
            upper[j * m + i]
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diag_like_wide_matrix() {
        let d = Matrix::from_rows(&[vec![3.0, 0.0, 0.0], vec![0.0, 2.0, 0.0]]).unwrap();
        let s = svd(&d).unwrap();
        assert_eq!(s.rank(), 2);
        assert!((s.singular_values[0] - 3.0).abs() < 1e-14);
        assert!((s.singular_values[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn rank_one_outer_product() {
        let u = [0.6, 0.8];
        let v = [1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0];
        let d = Matrix::from_fn(2, 3, |r, c| u[r] * v[c]).unwrap();
        let s = svd(&d).unwrap();
        assert_eq!(s.rank(), 1);
        assert!((s.singular_values[0] - 1.0).abs() < 1e-14);
        // tall orientation goes through DᵀD
        let s = svd(&d.transpose()).unwrap();
        assert_eq!(s.rank(), 1);
        assert!((s.singular_values[0] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        let s = svd(&Matrix::zeros(3, 2).unwrap()).unwrap();
        assert_eq!(s.rank(), 0);
        assert_eq!(s.u.cols(), 0);
        assert_eq!(s.v.rows(), 2);
    }
}
