mod common;

use common::{
    coefficients_explicit, gram_loop, matmul_loop, mode_operator_loop, projector, rel_diff,
};
use proptest::prelude::*;
use tenpca_core::linalg::sym_eig;
use tenpca_core::rank1::{basis_element, coefficients, mode_operator, rank1_basis, truncate_rank1};
use tenpca_core::synth::{random_dataset, seeded};
use tenpca_core::tensor::{canonical_basis, inner, norm, outer};
use tenpca_core::{DenseTensor, Matrix, Shape, TensorDataset};

fn dataset_dims() -> impl Strategy<Value = (Vec<usize>, usize)> {
    (prop::collection::vec(1usize..=4, 1..=3), 1usize..=6)
}

fn data(dims: &[usize], n: usize, seed: u64) -> TensorDataset {
    random_dataset(&mut seeded(seed), &Shape::new(dims.to_vec()).unwrap(), n).unwrap()
}

#[test]
fn axis_aligned_samples_give_identity_factors() {
    let s = Shape::new(vec![3, 2]).unwrap();
    // distinct weights make every mode spectrum simple
    let samples: Vec<DenseTensor> = canonical_basis(&s)
        .unwrap()
        .into_iter()
        .enumerate()
        .map(|(m, e)| e.scaled(1.0 + m as f64))
        .collect();
    let x = TensorDataset::from_samples(&samples).unwrap();
    let b = rank1_basis(&x).unwrap();
    for u in b.factors() {
        for c in 0..u.cols() {
            let nonzero: Vec<f64> = u
                .column(c)
                .into_iter()
                .filter(|v| v.abs() > 1e-12)
                .collect();
            assert_eq!(nonzero.len(), 1);
            assert!((nonzero[0] - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn basis_dataset_gives_identity_coefficients() {
    let x = data(&[2, 3], 4, 1);
    let b = rank1_basis(&x).unwrap();
    let elements: Vec<DenseTensor> = (1..=6).map(|m| basis_element(&b, m).unwrap()).collect();
    let y = TensorDataset::from_samples(&elements).unwrap();
    let c = coefficients(&y, &b).unwrap();
    assert!(c.d.sub(&Matrix::identity(6).unwrap()).unwrap().max_abs() <= 1e-12);
    assert!(c.singular_values().iter().all(|s| (s - 1.0).abs() <= 1e-12));
}

#[test]
fn single_sample_has_rank_one() {
    let x = data(&[3, 2, 2], 1, 4);
    let c = coefficients(&x, &rank1_basis(&x).unwrap()).unwrap();
    assert_eq!(c.rank(), 1);
    let nx = norm(&x.sample_tensor(0));
    assert!((c.singular_values()[0] - nx).abs() <= 1e-12 * nx);
}

#[test]
fn one_mode_dataset_reduces_to_matrix_pca() {
    let x = data(&[9], 14, 6);
    // X as a 9×14 matrix; classical PCA diagonalizes X Xᵀ
    let xm = Matrix::from_col_major(9, 14, x.tensor().data()).unwrap();
    let pca = sym_eig(&matmul_loop(&xm, &xm.transpose())).unwrap();
    let b = rank1_basis(&x).unwrap();
    let c = coefficients(&x, &b).unwrap();
    for m in 1..=8 {
        if pca.eigenvalues[m - 1] - pca.eigenvalues[m] < 1e-6 * pca.eigenvalues[0] {
            continue;
        }
        let model = truncate_rank1(&x, &c, &b, m).unwrap();
        let got = projector(
            &model
                .components()
                .iter()
                .map(|w| w.data().to_vec())
                .collect::<Vec<_>>(),
        );
        let want = projector(&(0..m).map(|k| pca.vector(k)).collect::<Vec<_>>());
        assert!(got.sub(&want).unwrap().max_abs() <= 1e-9, "M = {m}");
    }
}

#[test]
fn mode_normalization_does_not_move_the_basis() {
    let x = data(&[3, 4, 2], 7, 8);
    let scaled = TensorDataset::new(x.tensor().scaled(1.0 / (x.len() as f64).sqrt())).unwrap();
    let a = rank1_basis(&x).unwrap();
    let b = rank1_basis(&scaled).unwrap();
    for (u, v) in a.factors().iter().zip(b.factors()) {
        assert!(u.sub(v).unwrap().max_abs() <= 1e-10);
    }
}

#[test]
fn gram_oracle_sanity() {
    let x = data(&[2, 2], 3, 0);
    let g = gram_loop(&x);
    assert!((g.trace() - x.energy()).abs() < 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn mode_operator_matches_loop((dims, n) in dataset_dims(), seed in any::<u64>()) {
        let x = data(&dims, n, seed);
        for k in 1..=dims.len() {
            let fast = mode_operator(&x, k).unwrap();
            let slow = mode_operator_loop(&x, k);
            prop_assert!(rel_diff(fast.data(), slow.data()) <= 1e-12);
        }
    }

    #[test]
    fn coefficients_match_explicit_basis((dims, n) in dataset_dims(), seed in any::<u64>()) {
        let x = data(&dims, n, seed);
        let b = rank1_basis(&x).unwrap();
        let c = coefficients(&x, &b).unwrap();
        let d = coefficients_explicit(&x, &b);
        prop_assert!(rel_diff(c.d.data(), d.data()) <= 1e-12);
        // orthonormal change of basis keeps the energy
        let dn = c.d.frobenius();
        prop_assert!((dn * dn - x.energy()).abs() <= 1e-10 * x.energy());
    }

    #[test]
    fn full_expansion_is_exact((dims, n) in dataset_dims(), seed in any::<u64>()) {
        let x = data(&dims, n, seed);
        let b = rank1_basis(&x).unwrap();
        prop_assert!(b.orthonormality_defect() <= 1e-10);
        let c = coefficients(&x, &b).unwrap();
        let elements: Vec<DenseTensor> = (1..=b.len()).map(|m| basis_element(&b, m).unwrap()).collect();
        for (i, e) in elements.iter().enumerate() {
            for (j, f) in elements.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((inner(e, f).unwrap() - want).abs() <= 1e-10);
            }
        }
        for n in 0..x.len() {
            let mut acc = DenseTensor::zeros(x.sample_shape().clone()).unwrap();
            for (m, e) in elements.iter().enumerate() {
                acc.add_scaled(c.d.get(n, m), e).unwrap();
            }
            prop_assert!(rel_diff(acc.data(), x.sample(n)) <= 1e-9);
        }
    }

    #[test]
    fn truncation_error_is_tail_sigma_squared((dims, n) in dataset_dims(), seed in any::<u64>()) {
        let x = data(&dims, n, seed);
        let b = rank1_basis(&x).unwrap();
        let c = coefficients(&x, &b).unwrap();
        let mut last = f64::INFINITY;
        for m in 1..=c.rank() {
            let model = truncate_rank1(&x, &c, &b, m).unwrap();
            let r = model.report();
            let tail: f64 = c.singular_values()[m..].iter().map(|s| s * s).sum::<f64>() / x.len() as f64;
            prop_assert!((r.mean - tail).abs() <= 1e-8 * r.energy, "M={} {:?}", m, r);
            prop_assert!(r.mean <= last * (1.0 + 1e-12) + 1e-15 * r.energy);
            last = r.mean;
        }
        prop_assert!(last <= 1e-9 * x.energy());
        prop_assert!(truncate_rank1(&x, &c, &b, 0).is_err());
        prop_assert!(truncate_rank1(&x, &c, &b, c.rank() + 1).is_err());
    }
}

#[test]
fn rank_one_sample_recovered() {
    let u = DenseTensor::from_vec(Shape::new(vec![2]).unwrap(), vec![0.8, -0.6]).unwrap();
    let v = DenseTensor::from_vec(Shape::new(vec![3]).unwrap(), vec![0.0, 0.6, 0.8]).unwrap();
    let x = TensorDataset::from_samples(&[outer(&u, &v).unwrap()]).unwrap();
    let b = rank1_basis(&x).unwrap();
    let c = coefficients(&x, &b).unwrap();
    assert!((c.d.get(0, 0).abs() - 1.0).abs() <= 1e-12);
    let first = basis_element(&b, 1).unwrap();
    assert!((inner(&first, &outer(&u, &v).unwrap()).unwrap().abs() - 1.0).abs() <= 1e-12);
}
