//! Resolution of flags and config values into concrete run options.

use std::path::PathBuf;
use std::time::Instant;

use tenpca_core::io::{load_dataset, load_tensor, ImageManifest};
use tenpca_core::synth::{planted_dataset, random_dataset, seeded};
use tenpca_core::{Method, Settings, Shape, TensorDataset};

use crate::args::{InputArgs, ToleranceArgs};
use crate::config::Config;
use crate::error::{CliError, CliResult};

pub const DEFAULT_SIZE: (usize, usize) = (16, 16);
pub const DEFAULT_SYNTH_SAMPLES: usize = 24;
pub const DEFAULT_SYNTH_SHAPE: [usize; 3] = [6, 6, 3];

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub rank: Option<usize>,
    pub samples: usize,
    pub shape: Shape,
}

impl SyntheticSpec {
    /// Comma-separated `rank=`, `n=` and `shape=` entries, all optional.
    pub fn parse(spec: &str) -> CliResult<SyntheticSpec> {
        let mut out = SyntheticSpec {
            rank: None,
            samples: DEFAULT_SYNTH_SAMPLES,
            shape: Shape::new(DEFAULT_SYNTH_SHAPE.to_vec())?,
        };
        for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part.split_once('=').ok_or_else(|| {
                CliError::usage(format!("synthetic: expected key=value, got '{part}'"))
            })?;
            let bad = || CliError::usage(format!("synthetic: bad value '{v}' for '{k}'"));
            match k.trim() {
                "rank" => out.rank = Some(v.trim().parse().map_err(|_| bad())?),
                "n" => out.samples = v.trim().parse().map_err(|_| bad())?,
                "shape" => out.shape = parse_shape(v)?,
                other => return Err(CliError::usage(format!("synthetic: unknown key '{other}'"))),
            }
        }
        if out.samples == 0 {
            return Err(CliError::usage("synthetic: n must be positive"));
        }
        Ok(out)
    }
}

/// `6x6x3` style extents.
pub fn parse_shape(s: &str) -> CliResult<Shape> {
    let dims = s
        .trim()
        .split('x')
        .map(|d| d.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| CliError::usage(format!("bad shape '{s}'")))?;
    Ok(Shape::new(dims)?)
}

pub fn parse_size(s: &str) -> CliResult<(usize, usize)> {
    let shape = parse_shape(s)?;
    match shape.dims() {
        [h, w] => Ok((*h, *w)),
        _ => Err(CliError::usage(format!("size must be HxW, got '{s}'"))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Images(PathBuf),
    Tensor(PathBuf),
    Synthetic(SyntheticSpec),
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub method: Method,
    pub source: Source,
    pub size: (usize, usize),
    pub center: bool,
    pub seed: u64,
    pub out: PathBuf,
    pub settings: Settings,
}

pub fn settings(t: &ToleranceArgs, config: &Config) -> CliResult<Settings> {
    let d = Settings::default();
    let s = Settings {
        tol_eig: config.pick(t.tol_eig, "tol_eig")?.unwrap_or(d.tol_eig),
        tol_orth: config.pick(t.tol_orth, "tol_orth")?.unwrap_or(d.tol_orth),
        sym_tol_rel: config.pick(t.sym_tol, "sym_tol")?.unwrap_or(d.sym_tol_rel),
        eps_rank: config.pick(t.eps_rank, "eps_rank")?.unwrap_or(d.eps_rank),
        max_sweeps: config
            .pick(t.max_sweeps, "max_sweeps")?
            .unwrap_or(d.max_sweeps),
        eig_cap: config.pick(t.eig_cap, "eig_cap")?.unwrap_or(d.eig_cap),
        ..d
    };
    for (name, v) in [
        ("tol-eig", s.tol_eig),
        ("tol-orth", s.tol_orth),
        ("sym-tol", s.sym_tol_rel),
        ("eps-rank", s.eps_rank),
    ] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(CliError::usage(format!(
                "{name} must be a non-negative number"
            )));
        }
    }
    if let Some(cap) = config.pick(t.memory_cap, "memory_cap")? {
        tenpca_core::settings::set_memory_cap(cap);
    }
    Ok(s)
}

impl RunOptions {
    pub fn resolve(a: &InputArgs, config: &Config) -> CliResult<RunOptions> {
        let method: Method = config
            .pick(a.method.clone(), "method")?
            .ok_or_else(|| {
                CliError::usage("--method is required (selfadjoint, rank1 or subspace)")
            })?
            .parse()?;

        let images = config.pick(a.input.clone(), "in")?;
        let tensor = config.pick(a.tensor.clone(), "tensor")?;
        let synthetic = config.pick(a.synthetic.clone(), "synthetic")?;
        let source = match (images, tensor, synthetic) {
            (Some(dir), None, None) => Source::Images(dir),
            (None, Some(file), None) => Source::Tensor(file),
            (None, None, Some(spec)) => Source::Synthetic(SyntheticSpec::parse(&spec)?),
            (None, None, None) => {
                return Err(CliError::usage(
                    "one of --in, --tensor or --synthetic is required",
                ))
            }
            _ => {
                return Err(CliError::usage(
                    "--in, --tensor and --synthetic are mutually exclusive",
                ))
            }
        };

        let size = match config.pick(a.size.clone(), "size")? {
            Some(s) => parse_size(&s)?,
            None => DEFAULT_SIZE,
        };
        let center = a.center || config.get::<bool>("center")?.unwrap_or(false);
        let seed = config.pick(a.seed, "seed")?.unwrap_or(0);
        let out = config
            .pick(a.out.clone(), "out")?
            .ok_or_else(|| CliError::usage("--out is required"))?;
        let settings = settings(&a.tolerances, config)?;
        Ok(RunOptions {
            method,
            source,
            size,
            center,
            seed,
            out,
            settings,
        })
    }

    pub fn load_dataset(&self) -> CliResult<TensorDataset> {
        let start = Instant::now();
        let x = match &self.source {
            Source::Images(dir) => {
                let manifest = ImageManifest::scan(dir, self.size.0, self.size.1)?;
                log::info!("ingesting {} images from {}", manifest.len(), dir.display());
                load_dataset(&manifest)?
            }
            Source::Tensor(file) => {
                let t = load_tensor(file)?;
                if t.order() < 2 {
                    return Err(CliError::usage(format!(
                        "{}: need a tensor of order >= 2 with the sample mode last",
                        file.display()
                    )));
                }
                TensorDataset::new(t)?
            }
            Source::Synthetic(spec) => {
                let mut rng = seeded(self.seed);
                match spec.rank {
                    Some(r) => planted_dataset(&mut rng, &spec.shape, r, spec.samples)?,
                    None => random_dataset(&mut rng, &spec.shape, spec.samples)?,
                }
            }
        };
        log::info!(
            "dataset: {} samples of shape {} in {:.2?}",
            x.len(),
            x.sample_shape(),
            start.elapsed()
        );
        Ok(x)
    }

    pub fn create_out_dir(&self) -> CliResult<()> {
        std::fs::create_dir_all(&self.out).map_err(|source| CliError::Io {
            path: self.out.clone(),
            source,
        })
    }
}
