mod common;

use common::{contract_loop, rel_diff};
use proptest::prelude::*;
use tenpca_core::linalg::sym_eig;
use tenpca_core::operator::{
    apply, covariance_operator, eigentensor_basis, eigentensor_residual, gram_operator,
    is_self_adjoint, rayleigh_quotient,
};
use tenpca_core::synth::{
    random_dataset, random_orthonormal_tensors, random_self_adjoint, random_tensor, seeded,
};
use tenpca_core::tensor::{inner, outer};
use tenpca_core::{DenseTensor, SelfAdjointOperator, Shape, TensorBasis};

fn domain() -> impl Strategy<Value = Shape> {
    prop_oneof![
        Just(vec![2, 2, 2]),
        Just(vec![3, 3, 3]),
        Just(vec![3, 3, 3, 3]),
        Just(vec![2, 3]),
        Just(vec![4]),
        Just(vec![1, 5, 2]),
    ]
    .prop_map(|d| Shape::new(d).unwrap())
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

#[test]
fn apply_matches_contraction_oracle() {
    let dom = Shape::new(vec![2, 2]).unwrap();
    let mut rng = seeded(21);
    let a = random_self_adjoint(&mut rng, &dom).unwrap();
    let y = random_tensor(&mut rng, &dom).unwrap();
    let want = contract_loop(a.entries(), &y, &[3, 4], &[1, 2]);
    assert!(rel_diff(apply(&a, &y).unwrap().data(), want.data()) <= 1e-14);
}

#[test]
fn order_one_operator_matches_sym_eig() {
    let dom = Shape::new(vec![7]).unwrap();
    let a = random_self_adjoint(&mut seeded(5), &dom).unwrap();
    let basis = eigentensor_basis(&a).unwrap();
    let e = sym_eig(&a.matrix().unwrap()).unwrap();
    assert_eq!(basis.eigenvalues(), &e.eigenvalues[..]);
    for k in 0..7 {
        assert_eq!(basis.tensor(k).data(), &e.vector(k)[..]);
    }
}

#[test]
fn construct_then_decompose() {
    let dom = Shape::new(vec![2, 3, 2]).unwrap();
    let mut rng = seeded(8);
    let tensors = random_orthonormal_tensors(&mut rng, &dom, 12).unwrap();
    let lambdas: Vec<f64> = (0..12).map(|k| 6.0 - k as f64).collect();
    let planted = TensorBasis::new(dom.clone(), lambdas.clone(), tensors.clone()).unwrap();
    let a = SelfAdjointOperator::new(planted.spectral_sum().unwrap()).unwrap();
    let basis = eigentensor_basis(&a).unwrap();
    for (got, want) in basis.eigenvalues().iter().zip(&lambdas) {
        assert!((got - want).abs() <= 1e-9);
    }
    // distinct eigenvalues: each eigentensor matches its planted one up to sign
    for (u, b) in basis.tensors().iter().zip(&tensors) {
        assert!((inner(u, b).unwrap().abs() - 1.0).abs() <= 1e-9);
    }
}

#[test]
fn residual_grows_with_perturbation() {
    let dom = Shape::new(vec![3, 3]).unwrap();
    let mut rng = seeded(2);
    let a = random_self_adjoint(&mut rng, &dom).unwrap();
    let basis = eigentensor_basis(&a).unwrap();
    let noise = random_tensor(&mut rng, &dom).unwrap();
    let mut last = eigentensor_residual(&a, &basis).unwrap();
    assert!(last <= 1e-9);
    for eps in [1e-6, 1e-4, 1e-2] {
        let mut tensors = basis.tensors().to_vec();
        tensors[0].add_scaled(eps, &noise).unwrap();
        let bumped = TensorBasis::new(dom.clone(), basis.eigenvalues().to_vec(), tensors).unwrap();
        let r = eigentensor_residual(&a, &bumped).unwrap();
        assert!(r > last);
        last = r;
    }
}

#[test]
fn single_sample_covariance() {
    let s = Shape::new(vec![2, 3]).unwrap();
    let x = random_tensor(&mut seeded(1), &s).unwrap();
    let ds = tenpca_core::TensorDataset::from_samples(std::slice::from_ref(&x)).unwrap();
    let r = covariance_operator(&ds, false).unwrap();
    assert_eq!(r.entries(), &outer(&x, &x).unwrap());
    let basis = eigentensor_basis(&r).unwrap();
    let nx = inner(&x, &x).unwrap();
    assert!((basis.eigenvalues()[0] - nx).abs() <= 1e-12 * nx);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn eigentensor_basis_equals_flattened_eig(dom in domain(), seed in any::<u64>()) {
        let a = random_self_adjoint(&mut seeded(seed), &dom).unwrap();
        let basis = eigentensor_basis(&a).unwrap();
        let direct = sorted(sym_eig(&a.matrix().unwrap()).unwrap().eigenvalues);
        for (x, y) in sorted(basis.eigenvalues().to_vec()).iter().zip(&direct) {
            prop_assert!((x - y).abs() <= 1e-10);
        }
        prop_assert!(eigentensor_residual(&a, &basis).unwrap() <= 1e-9);
        prop_assert!(basis.orthonormality_defect() <= 1e-10);
    }

    #[test]
    fn separated_eigentensors_are_orthogonal(dom in domain(), seed in any::<u64>()) {
        let a = random_self_adjoint(&mut seeded(seed), &dom).unwrap();
        let basis = eigentensor_basis(&a).unwrap();
        let gap = 1e-6 * a.frobenius();
        let ev = basis.eigenvalues();
        for i in 0..basis.len() {
            for j in i + 1..basis.len() {
                if (ev[i] - ev[j]).abs() > gap {
                    prop_assert!(inner(basis.tensor(i), basis.tensor(j)).unwrap().abs() <= 1e-10);
                }
            }
        }
    }

    #[test]
    fn completeness_and_spectral_reconstruction(dom in domain(), seed in any::<u64>()) {
        let a = random_self_adjoint(&mut seeded(seed), &dom).unwrap();
        let basis = eigentensor_basis(&a).unwrap();
        let identity = SelfAdjointOperator::identity(&dom).unwrap();
        let p = basis.projector().unwrap();
        let frob = |t: &DenseTensor| t.data().iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!(frob(&p.sub(identity.entries()).unwrap()) <= 1e-9);
        let s = basis.spectral_sum().unwrap();
        prop_assert!(frob(&s.sub(a.entries()).unwrap()) <= 1e-9 * a.frobenius());
    }

    #[test]
    fn self_adjointness_and_adjoint_identity(dom in domain(), seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let a = random_self_adjoint(&mut rng, &dom).unwrap();
        prop_assert!(is_self_adjoint(a.entries()).unwrap().symmetric);
        for _ in 0..4 {
            let y = random_tensor(&mut rng, &dom).unwrap();
            let z = random_tensor(&mut rng, &dom).unwrap();
            let lhs = inner(&apply(&a, &y).unwrap(), &z).unwrap();
            let rhs = inner(&y, &apply(&a, &z).unwrap()).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * a.frobenius() * dom.total_size() as f64);
        }
    }

    #[test]
    fn gram_and_covariance_are_nonnegative(
        dims in prop::collection::vec(1usize..=3, 1..=3),
        n in 1usize..=6,
        center in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let s = Shape::new(dims).unwrap();
        let mut rng = seeded(seed);
        let x = random_dataset(&mut rng, &s, n).unwrap();
        let g = gram_operator(&x).unwrap();
        let c = covariance_operator(&x, center).unwrap();
        for op in [&g, &c] {
            prop_assert!(is_self_adjoint(op.entries()).unwrap().symmetric);
            let floor = -1e-9 * op.frobenius();
            prop_assert!(eigentensor_basis(op).unwrap().eigenvalues().iter().all(|&l| l >= floor));
        }
        for _ in 0..100 {
            let v = random_tensor(&mut rng, &s).unwrap();
            let q = inner(&v, &apply(&g, &v).unwrap()).unwrap();
            prop_assert!(q >= -1e-12 * g.frobenius() * inner(&v, &v).unwrap());
            prop_assert!(rayleigh_quotient(&g, &v).unwrap() >= -1e-12 * g.frobenius());
        }
    }
}
