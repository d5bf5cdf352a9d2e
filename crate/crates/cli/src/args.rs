use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Tensor PCA: bases from self-adjoint tensor operators, rank-1 factors or
/// sample snapshots, with truncation, reconstruction and error reports.
#[derive(Debug, Parser)]
#[command(name = "tenpca", version, about)]
pub struct Cli {
    /// Flat `key = value` file supplying defaults for any flag below.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a basis and write it with its spectrum.
    Basis(BasisArgs),
    /// Truncate, reconstruct and report errors.
    Pca(PcaArgs),
    /// Run the invariant battery on seeded synthetic data.
    Verify(VerifyArgs),
    /// Print or export the spectrum stored in a basis or model file.
    Spectrum(SpectrumArgs),
    /// Describe a stored tensor, basis or model file.
    Info(InfoArgs),
}

/// Where the dataset comes from and how to build the basis.
#[derive(Debug, Clone, Default, Args)]
pub struct InputArgs {
    /// selfadjoint, rank1 or subspace.
    #[arg(long)]
    pub method: Option<String>,

    /// Directory of PNG/PPM images.
    #[arg(long = "in", value_name = "DIR")]
    pub input: Option<PathBuf>,

    /// TPT1 tensor file with the sample mode last.
    #[arg(long, value_name = "FILE")]
    pub tensor: Option<PathBuf>,

    /// Seeded synthetic data, e.g. `rank=3` or `rank=3,n=20,shape=6x6x3`.
    #[arg(long, value_name = "SPEC")]
    pub synthetic: Option<String>,

    /// Image target size as HxW.
    #[arg(long, value_name = "HxW")]
    pub size: Option<String>,

    /// Subtract the sample mean before building the basis.
    #[arg(long)]
    pub center: bool,

    /// Seed for synthetic data.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Output directory (created if missing).
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,

    #[command(flatten)]
    pub tolerances: ToleranceArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ToleranceArgs {
    /// Eigen-residual tolerance relative to ‖A‖_F.
    #[arg(long)]
    pub tol_eig: Option<f64>,
    /// Orthonormality tolerance.
    #[arg(long)]
    pub tol_orth: Option<f64>,
    /// Symmetry tolerance relative to the largest entry.
    #[arg(long)]
    pub sym_tol: Option<f64>,
    /// Numerical-rank cut relative to the largest eigenvalue.
    #[arg(long)]
    pub eps_rank: Option<f64>,
    /// Jacobi sweep limit.
    #[arg(long)]
    pub max_sweeps: Option<usize>,
    /// Largest domain dimension L for the self-adjoint method.
    #[arg(long)]
    pub eig_cap: Option<usize>,
    /// Allocation cap in bytes.
    #[arg(long)]
    pub memory_cap: Option<u64>,
}

#[derive(Debug, Args)]
pub struct BasisArgs {
    #[command(flatten)]
    pub input: InputArgs,
}

#[derive(Debug, Args)]
pub struct PcaArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// Retained component count M (default: all available).
    #[arg(short = 'm', long)]
    pub retain: Option<usize>,

    /// Reuse a basis file written by `basis` instead of rebuilding it.
    #[arg(long, value_name = "FILE")]
    pub basis: Option<PathBuf>,

    /// Also report every M in `a:b` to sweep.csv; `b` may be `r`.
    #[arg(long, value_name = "A:B")]
    pub sweep: Option<String>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub seed: Option<u64>,

    /// Inject an asymmetric entry into the test operator.
    #[arg(long)]
    pub perturb: bool,

    #[command(flatten)]
    pub tolerances: ToleranceArgs,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    /// TPB1, TPR1, TPC1, TPS1 or TPM1 file.
    pub file: PathBuf,

    /// Write `index,value` CSV here instead of printing.
    #[arg(long, value_name = "CSV")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InfoArgs {
    pub file: PathBuf,
}
