//! Invariant battery on seeded synthetic data.

use tenpca_core::operator::{
    covariance_operator, eigentensor_basis_with, eigentensor_residual, is_self_adjoint_with,
};
use tenpca_core::pca::{pca_truncate, project};
use tenpca_core::rank1::{coefficients_with, rank1_basis_with, truncate_rank1};
use tenpca_core::subspace::{project_subspace, subspace_basis_with};
use tenpca_core::synth::{planted_dataset, random_dataset, random_self_adjoint, seeded};
use tenpca_core::tensor::norm;
use tenpca_core::{linalg, SelfAdjointOperator, Settings, Shape, TensorBasis, TensorDataset};

use crate::args::VerifyArgs;
use crate::config::Config;
use crate::error::{CliError, CliResult};

const OPERATOR_DOMAIN: [usize; 3] = [2, 3, 2];
const SAMPLE_SHAPE: [usize; 3] = [3, 4, 2];
const SAMPLES: usize = 10;
const PLANTED_RANK: usize = 3;
/// Relative size of the entry injected by `--perturb`.
const PERTURBATION: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: impl Into<String>) -> Check {
        Check {
            name,
            passed,
            detail: detail.into(),
        }
    }

    fn from_result(name: &'static str, r: tenpca_core::Result<(bool, String)>) -> Check {
        match r {
            Ok((passed, detail)) => Check::new(name, passed, detail),
            Err(e) => Check::new(name, false, e.to_string()),
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {:<24} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail
        )
    }
}

/// Runs every check. Output depends only on `seed`, `perturb` and the
/// settings.
pub fn battery(seed: u64, perturb: bool, s: &Settings) -> tenpca_core::Result<Vec<Check>> {
    let mut rng = seeded(seed);
    let mut checks = Vec::new();

    let domain = Shape::new(OPERATOR_DOMAIN.to_vec())?;
    let mut entries = random_self_adjoint(&mut rng, &domain)?.entries().clone();
    if perturb {
        // A_{α β} with α = (2,1,1), β = (1,1,1); its mirror stays put.
        let mut idx = vec![1; 2 * domain.order()];
        idx[0] = 2;
        let v = entries.get(&idx)?;
        entries.set(&idx, v + PERTURBATION * entries.max_abs())?;
    }
    let sa = is_self_adjoint_with(&entries, s)?;
    checks.push(Check::new(
        "self-adjoint",
        sa.symmetric,
        format!(
            "asymmetry {:.3e} tolerance {:.3e}",
            sa.max_asymmetry, sa.tolerance
        ),
    ));

    let a = SelfAdjointOperator::new_unchecked(entries)?;
    let basis = eigentensor_basis_with(&a, s);
    checks.push(Check::from_result(
        "eigentensor-equivalence",
        basis.as_ref().map_err(clone_err).and_then(|b| {
            let residual = eigentensor_residual(&a, b)?;
            let direct = linalg::sym_eig_with(&a.matrix()?, s)?;
            let diff = direct
                .eigenvalues
                .iter()
                .zip(b.eigenvalues())
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            Ok((
                residual <= s.tol_eig && diff == 0.0,
                format!("residual {residual:.3e} eigenvalue diff {diff:.1e}"),
            ))
        }),
    ));
    checks.push(Check::from_result(
        "eigentensor-orthonormal",
        basis.as_ref().map_err(clone_err).map(|b| {
            let d = b.orthonormality_defect();
            (d <= s.tol_orth, format!("defect {d:.3e}"))
        }),
    ));
    checks.push(Check::from_result(
        "spectral-decomposition",
        basis.as_ref().map_err(clone_err).and_then(|b| {
            let recon = b.spectral_sum()?.sub(a.entries())?;
            let err = norm(&recon) / a.frobenius();
            Ok((err <= s.tol_eig, format!("relative error {err:.3e}")))
        }),
    ));

    let shape = Shape::new(SAMPLE_SHAPE.to_vec())?;
    let x = random_dataset(&mut rng, &shape, SAMPLES)?;

    let cov = eigentensor_basis_with(&covariance_operator(&x, false)?, s)?;
    checks.push(Check::from_result(
        "parseval-selfadjoint",
        parseval(&x, &cov),
    ));
    checks.push(Check::from_result(
        "covariance-identity",
        sweep(cov.len(), |m| pca_truncate(&x, &cov, m)),
    ));

    let b = rank1_basis_with(&x, s)?;
    let d = b.orthonormality_defect();
    checks.push(Check::new(
        "rank1-orthonormal",
        d <= s.tol_orth,
        format!("defect {d:.3e}"),
    ));
    let c = coefficients_with(&x, &b, s)?;
    checks.push(Check::from_result(
        "rank1-identity",
        sweep(c.rank(), |m| truncate_rank1(&x, &c, &b, m)),
    ));

    let planted = planted_dataset(&mut rng, &shape, PLANTED_RANK, SAMPLES)?;
    let sub = subspace_basis_with(&planted, s)?;
    checks.push(Check::new(
        "subspace-rank",
        sub.rank() == PLANTED_RANK,
        format!("rank {} planted {PLANTED_RANK}", sub.rank()),
    ));
    checks.push(Check::from_result(
        "parseval-subspace",
        parseval(&planted, &sub.to_tensor_basis()?),
    ));
    checks.push(Check::from_result(
        "subspace-identity",
        sweep(sub.rank(), |m| project_subspace(&planted, &sub, m)),
    ));
    Ok(checks)
}

fn clone_err(e: &tenpca_core::Error) -> tenpca_core::Error {
    tenpca_core::Error::Argument(format!("no basis: {e}"))
}

/// Projection energy against `‖X_n‖²` for samples in the span of `basis`.
fn parseval(x: &TensorDataset, basis: &TensorBasis) -> tenpca_core::Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for n in 0..x.len() {
        let xn = x.sample_tensor(n);
        let e: f64 = project(&xn, basis)?.iter().map(|c| c * c).sum();
        let nn = norm(&xn).powi(2);
        worst = worst.max((e - nn).abs() / nn.max(f64::MIN_POSITIVE));
    }
    Ok((worst <= 1e-10, format!("max relative defect {worst:.3e}")))
}

/// Error identity at every retained count `1..=available`.
fn sweep(
    available: usize,
    model: impl Fn(usize) -> tenpca_core::Result<tenpca_core::SubspaceModel>,
) -> tenpca_core::Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for m in 1..=available {
        worst = worst.max(model(m)?.report().relative_gap);
    }
    Ok((
        worst <= tenpca_core::ErrorReport::IDENTITY_TOLERANCE,
        format!("max relative gap {worst:.3e} over M = 1..={available}"),
    ))
}

pub fn run(args: &VerifyArgs, config: &Config) -> CliResult<()> {
    let seed = config.pick(args.seed, "seed")?.unwrap_or(0);
    let settings = crate::options::settings(&args.tolerances, config)?;
    let checks = battery(seed, args.perturb, &settings)?;
    for c in &checks {
        println!("{}", c.line());
    }
    let failed: Vec<&str> = checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.name)
        .collect();
    if failed.is_empty() {
        println!("all {} checks passed (seed {seed})", checks.len());
        Ok(())
    } else {
        Err(CliError::Invariant(format!(
            "failed checks: {}",
            failed.join(", ")
        )))
    }
}
