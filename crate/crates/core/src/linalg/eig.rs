use crate::error::{Error, Result};
use crate::settings::Settings;

use super::Matrix;

/// Eigendecomposition `A = V diag(λ) Vᵀ` of a real symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricEig {
    /// Eigenvalues in descending order.
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the unit eigenvector paired with `eigenvalues[k]`.
    pub eigenvectors: Matrix,
    /// Number of Jacobi sweeps performed.
    pub sweeps: usize,
}

impl SymmetricEig {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn vector(&self, k: usize) -> Vec<f64> {
        self.eigenvectors.column(k)
    }

    /// `max_k ‖A v_k − λ_k v_k‖₂`.
    pub fn max_residual(&self, a: &Matrix) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for k in 0..self.len() {
            let v = self.vector(k);
            let av = a.mul_vec(&v)?;
            let r: f64 = av
                .iter()
                .zip(&v)
                .map(|(x, y)| (x - self.eigenvalues[k] * y).powi(2))
                .sum::<f64>()
                .sqrt();
            worst = worst.max(r);
        }
        Ok(worst)
    }
}

pub fn sym_eig(a: &Matrix) -> Result<SymmetricEig> {
    sym_eig_with(a, &Settings::default())
}

/// Cyclic Jacobi eigensolver.
///
/// The input is checked for symmetry against `sym_tol_rel · max|a_ij|` and
/// then symmetrized as `(A + Aᵀ)/2`. Rotations sweep the strict upper triangle
/// row by row until a full sweep finds nothing left to annihilate. The output
/// is sorted by descending eigenvalue (stable with respect to the Jacobi
/// diagonal order) and each eigenvector's first component larger than
/// `sign_eps` is made positive.
pub fn sym_eig_with(a: &Matrix, settings: &Settings) -> Result<SymmetricEig> {
    if !a.is_square() {
        return Err(Error::dim(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if a.data().iter().any(|v| !v.is_finite()) {
        return Err(Error::arg("matrix has non-finite entries"));
    }
    let n = a.rows();
    let asymmetry = a.max_asymmetry();
    let tolerance = settings.sym_tol_rel * a.max_abs();
    if asymmetry > tolerance {
        return Err(Error::NotSelfAdjoint {
            asymmetry,
            tolerance,
        });
    }

    let mut work = vec![0.0; n * n];
    for r in 0..n {
        for c in 0..n {
            work[r * n + c] = 0.5 * (a.get(r, c) + a.get(c, r));
        }
    }

    let (diag, vt, sweeps) = jacobi(&mut work, n, settings.max_sweeps)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]));

    let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut eigenvectors = Matrix::zeros(n, n)?;
    for (k, &src) in order.iter().enumerate() {
        let v = &vt[src * n..(src + 1) * n];
        let flip = v
            .iter()
            .find(|x| x.abs() > settings.sign_eps)
            .is_some_and(|x| *x < 0.0);
        let sign = if flip { -1.0 } else { 1.0 };
        for (r, &x) in v.iter().enumerate() {
            eigenvectors.set(r, k, sign * x);
        }
    }

    Ok(SymmetricEig {
        eigenvalues,
        eigenvectors,
        sweeps,
    })
}

/// Runs cyclic Jacobi on a symmetric row-major `n×n` buffer in place.
///
/// Returns the diagonal, the eigenvectors as rows of a row-major buffer, and
/// the sweep count.
fn jacobi(a: &mut [f64], n: usize, max_sweeps: usize) -> Result<(Vec<f64>, Vec<f64>, usize)> {
    let mut vt = vec![0.0; n * n];
    for i in 0..n {
        vt[i * n + i] = 1.0;
    }
    let fro = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let diag = |a: &[f64]| (0..n).map(|i| a[i * n + i]).collect::<Vec<f64>>();
    if fro == 0.0 || n < 2 {
        return Ok((diag(a), vt, 0));
    }
    // Off-diagonal entries at this level cannot move any eigenvalue or
    // eigenvector residual above rounding noise.
    let floor = 1e-18 * fro;
    let half_eps = 0.5 * f64::EPSILON;

    for sweep in 0..max_sweeps {
        let mut rotations = 0usize;
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                if apq.abs() <= floor || apq.abs() <= half_eps * (app * aqq).abs().sqrt() {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                rotations += 1;

                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    let t = 1.0 / (theta.abs() + (theta * theta + 1.0).sqrt());
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);

                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;

                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[p * n + k];
                    let akq = a[q * n + k];
                    let new_p = akp - s * (akq + tau * akp);
                    let new_q = akq + s * (akp - tau * akq);
                    a[p * n + k] = new_p;
                    a[q * n + k] = new_q;
                    a[k * n + p] = new_p;
                    a[k * n + q] = new_q;
                }

                let (head, tail) = vt.split_at_mut(q * n);
                let vp = &mut head[p * n..(p + 1) * n];
                let vq = &mut tail[..n];
                for (x, y) in vp.iter_mut().zip(vq.iter_mut()) {
                    let (gp, gq) = (*x, *y);
                    *x = gp - s * (gq + tau * gp);
                    *y = gq + s * (gp - tau * gq);
                }
            }
        }
        if rotations == 0 {
            return Ok((diag(a), vt, sweep + 1));
        }
    }

    let mut off = 0.0;
    for p in 0..n {
        for q in (p + 1)..n {
            off += 2.0 * a[p * n + q] * a[p * n + q];
        }
    }
    Err(Error::Convergence {
        sweeps: max_sweeps,
        residual: off.sqrt(),
    })
}
