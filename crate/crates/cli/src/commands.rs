use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use tenpca_core::io::csv::spectrum_csv;
use tenpca_core::io::{
    export_image_grid, export_report, export_spectrum, load_any, save_basis, save_coefficients,
    save_model, save_rank1, save_subspace, save_tensor, Stored,
};
use tenpca_core::operator::{covariance_operator_with, eigentensor_basis_with, Normalization};
use tenpca_core::pca::pca_truncate;
use tenpca_core::rank1::{coefficients_with, rank1_basis_with, truncate_rank1};
use tenpca_core::subspace::{project_subspace, subspace_basis_with};
use tenpca_core::{
    CoefficientSvd, DenseTensor, Error, Method, Rank1Basis, Settings, SubspaceBasis, SubspaceModel,
    TensorBasis, TensorDataset,
};

use crate::args::{BasisArgs, InfoArgs, PcaArgs, SpectrumArgs};
use crate::config::Config;
use crate::error::{CliError, CliResult};
use crate::options::RunOptions;

/// A basis built by one of the three methods.
#[derive(Debug, Clone)]
pub enum Built {
    SelfAdjoint(TensorBasis),
    Rank1(Rank1Basis, CoefficientSvd),
    Subspace(SubspaceBasis),
}

impl Built {
    pub fn method(&self) -> Method {
        match self {
            Built::SelfAdjoint(_) => Method::SelfAdjoint,
            Built::Rank1(..) => Method::Rank1,
            Built::Subspace(_) => Method::Subspace,
        }
    }

    /// Eigenvalues for the self-adjoint method, singular values otherwise.
    pub fn spectrum(&self) -> &[f64] {
        match self {
            Built::SelfAdjoint(b) => b.eigenvalues(),
            Built::Rank1(_, c) => c.singular_values(),
            Built::Subspace(b) => b.spectrum(),
        }
    }

    /// Largest admissible retained count.
    pub fn available(&self) -> usize {
        match self {
            Built::SelfAdjoint(b) => b.len(),
            Built::Rank1(_, c) => c.rank(),
            Built::Subspace(b) => b.rank(),
        }
    }

    pub fn truncate(&self, x: &TensorDataset, m: usize) -> tenpca_core::Result<SubspaceModel> {
        match self {
            Built::SelfAdjoint(b) => pca_truncate(x, b, m),
            Built::Rank1(b, c) => truncate_rank1(x, c, b, m),
            Built::Subspace(b) => project_subspace(x, b, m),
        }
    }

    /// Writes the basis (and the coefficient SVD for rank-1) into `dir`.
    pub fn save(&self, dir: &Path) -> tenpca_core::Result<Vec<PathBuf>> {
        let mut written = Vec::new();
        match self {
            Built::SelfAdjoint(b) => {
                let p = dir.join("basis.tpb");
                save_basis(&p, b)?;
                written.push(p);
            }
            Built::Rank1(b, c) => {
                let p = dir.join("basis.tpr");
                save_rank1(&p, b)?;
                written.push(p);
                let p = dir.join("coefficients.tpc");
                save_coefficients(&p, c)?;
                written.push(p);
            }
            Built::Subspace(b) => {
                let p = dir.join("basis.tps");
                save_subspace(&p, b)?;
                written.push(p);
            }
        }
        Ok(written)
    }
}

/// Builds the basis of `method` on `x`. The self-adjoint route refuses
/// domains above `eig_cap` before forming the L×L covariance.
pub fn build(method: Method, x: &TensorDataset, settings: &Settings) -> tenpca_core::Result<Built> {
    Ok(match method {
        Method::SelfAdjoint => {
            let l = x.sample_len();
            if l > settings.eig_cap {
                return Err(Error::Capacity {
                    what: format!("self-adjoint eigenproblem of dimension {l}"),
                    required_bytes: (l as u128).pow(2) * 8,
                    cap_bytes: (settings.eig_cap as u128).pow(2) * 8,
                });
            }
            let a = covariance_operator_with(x, false, Normalization::Population)?;
            Built::SelfAdjoint(eigentensor_basis_with(&a, settings)?)
        }
        Method::Rank1 => {
            let b = rank1_basis_with(x, settings)?;
            let c = coefficients_with(x, &b, settings)?;
            Built::Rank1(b, c)
        }
        Method::Subspace => Built::Subspace(subspace_basis_with(x, settings)?),
    })
}

/// Reuses a stored basis; a rank-1 basis gets fresh coefficients for `x`.
fn from_stored(
    path: &Path,
    method: Method,
    x: &TensorDataset,
    settings: &Settings,
) -> CliResult<Built> {
    let built = match load_any(path)? {
        Stored::Basis(b) => Built::SelfAdjoint(b),
        Stored::Rank1(b) => {
            if b.sample_shape() != x.sample_shape() {
                return Err(Error::Dimension(format!(
                    "basis over {} for samples of shape {}",
                    b.sample_shape(),
                    x.sample_shape()
                ))
                .into());
            }
            let c = coefficients_with(x, &b, settings)?;
            Built::Rank1(b, c)
        }
        Stored::Subspace(b) => Built::Subspace(b),
        other => {
            return Err(CliError::usage(format!(
                "{} holds a {}, not a basis",
                path.display(),
                other.kind()
            )))
        }
    };
    if built.method() != method {
        return Err(CliError::usage(format!(
            "{} holds a {} basis but --method is {method}",
            path.display(),
            built.method()
        )));
    }
    Ok(built)
}

/// The dataset the basis is built on, with its mean when centering.
fn working_set(x: &TensorDataset, center: bool) -> CliResult<(TensorDataset, Option<DenseTensor>)> {
    if !center {
        return Ok((x.clone(), None));
    }
    let mu = x.mean();
    Ok((x.centered_by(&mu)?, Some(mu)))
}

fn fit(
    built: &Built,
    x: &TensorDataset,
    xc: &TensorDataset,
    mean: &Option<DenseTensor>,
    m: usize,
) -> CliResult<SubspaceModel> {
    let model = built.truncate(xc, m)?;
    Ok(match mean {
        Some(mu) => model.with_mean(x, mu.clone())?,
        None => model,
    })
}

pub fn basis(args: &BasisArgs, config: &Config) -> CliResult<()> {
    let opts = RunOptions::resolve(&args.input, config)?;
    let x = opts.load_dataset()?;
    opts.create_out_dir()?;
    let start = Instant::now();
    let (xc, mean) = working_set(&x, opts.center)?;
    let built = build(opts.method, &xc, &opts.settings)?;
    let elapsed = start.elapsed();

    let mut written = built.save(&opts.out)?;
    if let Some(mu) = &mean {
        let p = opts.out.join("mean.tpt");
        save_tensor(&p, mu)?;
        written.push(p);
    }
    let p = opts.out.join("spectrum.csv");
    export_spectrum(built.spectrum(), &p)?;
    written.push(p);

    println!("method   {}", opts.method);
    println!("samples  {}", x.len());
    println!("shape    {}", x.sample_shape());
    println!("L        {}", x.sample_len());
    println!("r        {}", built.available());
    println!("elapsed  {:.3}s", elapsed.as_secs_f64());
    for p in written {
        println!("wrote    {}", p.display());
    }
    Ok(())
}

/// `a:b` with `b` a number or `r`.
pub fn parse_sweep(spec: &str, available: usize) -> CliResult<(usize, usize)> {
    let bad = || CliError::usage(format!("sweep must be A:B with 1 <= A <= B, got '{spec}'"));
    let (a, b) = spec.split_once(':').ok_or_else(bad)?;
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = match b.trim() {
        "r" => available,
        s => s.parse().map_err(|_| bad())?,
    };
    if a == 0 || a > b {
        return Err(bad());
    }
    if b > available {
        return Err(CliError::usage(format!(
            "sweep end {b} exceeds the {available} available components"
        )));
    }
    Ok((a, b))
}

fn is_image_shape(x: &TensorDataset) -> bool {
    matches!(x.sample_shape().dims(), [_, _, 3])
}

fn samples_of(x: &TensorDataset) -> Vec<DenseTensor> {
    (0..x.len()).map(|n| x.sample_tensor(n)).collect()
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn pca(args: &PcaArgs, config: &Config) -> CliResult<()> {
    let opts = RunOptions::resolve(&args.input, config)?;
    let retain: Option<usize> = config.pick(args.retain, "retain")?;
    let basis_file = config.pick(args.basis.clone(), "basis")?;
    let sweep: Option<String> = config.pick(args.sweep.clone(), "sweep")?;

    let x = opts.load_dataset()?;
    opts.create_out_dir()?;
    let (xc, mean) = working_set(&x, opts.center)?;
    let start = Instant::now();
    let built = match &basis_file {
        Some(path) => from_stored(path, opts.method, &xc, &opts.settings)?,
        None => build(opts.method, &xc, &opts.settings)?,
    };
    let available = built.available();
    let m = retain.unwrap_or(available);
    let sweep = sweep.map(|s| parse_sweep(&s, available)).transpose()?;
    let model = fit(&built, &x, &xc, &mean, m)?;
    let elapsed = start.elapsed();
    let report = model.report();

    export_report(report, opts.out.join("errors.csv"))?;
    export_spectrum(built.spectrum(), opts.out.join("spectrum.csv"))?;
    save_model(opts.out.join("model.tpm"), &model)?;

    let mut sweep_failures = Vec::new();
    if let Some((a, b)) = sweep {
        let mut csv = String::from("m,mean,predicted,relative_gap\n");
        for k in a..=b {
            let r = fit(&built, &x, &xc, &mean, k)?.report().clone();
            let _ = writeln!(
                csv,
                "{k},{:.16e},{:.16e},{:.16e}",
                r.mean, r.predicted, r.relative_gap
            );
            if !r.identity_holds() {
                sweep_failures.push(k);
            }
        }
        write_text(&opts.out.join("sweep.csv"), &csv)?;
    }

    if is_image_shape(&x) {
        let full = if m == available {
            model.clone()
        } else {
            fit(&built, &x, &xc, &mean, available)?
        };
        export_image_grid(&samples_of(&x), opts.out.join("grid_original.png"))?;
        export_image_grid(
            &samples_of(&full.reconstruct_all()?),
            opts.out.join("grid_full.png"),
        )?;
        export_image_grid(
            &samples_of(&model.reconstruct_all()?),
            opts.out.join("grid_truncated.png"),
        )?;
    } else {
        log::info!(
            "samples of shape {} are not HxWx3 images; no grids",
            x.sample_shape()
        );
    }

    let holds = report.identity_holds();
    println!("method          {}", opts.method);
    println!("samples         {}", x.len());
    println!("retained        {m} of {available}");
    println!("mean error      {:.6e}", report.mean);
    println!("predicted       {:.6e}", report.predicted);
    println!("relative gap    {:.3e}", report.relative_gap);
    println!("relative error  {:.3e}", report.relative_error());
    println!(
        "identity        {}",
        if holds { "holds" } else { "violated" }
    );
    println!("elapsed         {:.3}s", elapsed.as_secs_f64());

    // A basis loaded from disk may describe other data, so only a basis
    // built from this dataset makes the identity a hard requirement.
    if basis_file.is_none() && (!holds || !sweep_failures.is_empty()) {
        return Err(CliError::Invariant(format!(
            "error identity violated (gap {:.3e} at M = {m}, sweep failures at {sweep_failures:?})",
            report.relative_gap
        )));
    }
    if !holds {
        log::warn!("error identity does not hold for the supplied basis on this dataset");
    }
    Ok(())
}

pub fn spectrum(args: &SpectrumArgs) -> CliResult<()> {
    let values: Vec<f64> = match load_any(&args.file)? {
        Stored::Basis(b) => b.eigenvalues().to_vec(),
        Stored::Coefficients(c) => c.singular_values().to_vec(),
        Stored::Subspace(b) => b.spectrum().to_vec(),
        Stored::Model(m) => m.spectrum().iter().chain(m.tail()).copied().collect(),
        Stored::Rank1(b) => {
            if args.out.is_some() {
                return Err(CliError::usage(
                    "a rank-1 basis has one spectrum per mode; export coefficients.tpc instead",
                ));
            }
            for (k, s) in b.mode_spectra().iter().enumerate() {
                println!("mode {}", k + 1);
                print!("{}", spectrum_csv(s));
            }
            return Ok(());
        }
        Stored::Tensor(_) => {
            return Err(CliError::usage(format!(
                "{} is a plain tensor with no spectrum",
                args.file.display()
            )))
        }
    };
    match &args.out {
        Some(out) => export_spectrum(&values, out)?,
        None => print!("{}", spectrum_csv(&values)),
    }
    Ok(())
}

pub fn info(args: &InfoArgs) -> CliResult<()> {
    let stored = load_any(&args.file)?;
    println!("file     {}", args.file.display());
    println!("kind     {}", stored.kind());
    match &stored {
        Stored::Tensor(t) => {
            println!("shape    {}", t.shape());
            println!("max|x|   {:.6e}", t.max_abs());
        }
        Stored::Basis(b) => {
            println!("domain   {}", b.domain());
            println!("count    {}", b.len());
            println!("orth     {:.3e}", b.orthonormality_defect());
        }
        Stored::Rank1(b) => {
            println!("shape    {}", b.sample_shape());
            println!("L        {}", b.len());
            println!("orth     {:.3e}", b.orthonormality_defect());
        }
        Stored::Coefficients(c) => {
            println!("D        {}x{}", c.d.rows(), c.d.cols());
            println!("rank     {}", c.rank());
        }
        Stored::Subspace(b) => {
            println!("shape    {}", b.sample_shape());
            println!("samples  {}", b.samples());
            println!("rank     {}", b.rank());
        }
        Stored::Model(m) => {
            let r = m.report();
            println!("method   {}", m.method());
            println!("shape    {}", m.sample_shape());
            println!("samples  {}", m.samples());
            println!(
                "retained {} of {}",
                m.retained(),
                m.retained() + m.tail().len()
            );
            println!("centered {}", m.mean().is_some());
            println!("mean     {:.6e}", r.mean);
            println!("gap      {:.3e}", r.relative_gap);
        }
    }
    Ok(())
}
