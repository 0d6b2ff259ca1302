use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "rsplit", version, about = "Relax-and-split experiment runner")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Least absolute deviation regression with planted outliers.
    Lad(Common),
    /// Noiseless real phase retrieval from a Hadamard stack.
    Phase(Common),
    /// Phase retrieval with corrupted measurements and trimming weights.
    PhaseTrimmed(Common),
    /// Semi-supervised logistic regression on two Gaussians.
    Sslr(Common),
    /// Two-action stochastic shortest path via Bellman residuals.
    Ssp(Common),
    /// Fusion clustering of planted clusters.
    Cluster(Common),
    /// Exact robust PCA by alternating prox and truncated SVD.
    Rpca(Common),
    /// Iteration counts of relax-and-split against ADMM over a rho grid.
    AdmmCompare(Common),
    /// LAD solved along a decreasing nu schedule.
    Continuation(Common),
    /// One driver over a grid of values for a single parameter.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Driver {
    Lad,
    Phase,
    PhaseTrimmed,
    Sslr,
    Ssp,
    Cluster,
    Rpca,
    Continuation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Param {
    Nu,
    Lambda,
    Gamma,
    Tau,
    Kappa,
    Seed,
    M,
    N,
    K,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Start {
    Svd,
    Zero,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// Output directory; created after a successful run.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub nu: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Trimming budget as a fraction of the measurement count.
    #[arg(long)]
    pub tau: Option<f64>,
    /// SCAD threshold for `cluster`; omit for the convex penalty.
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub rank: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// `nu0:factor:numin`
    #[arg(long)]
    pub schedule: Option<String>,
    /// Where to write the trace CSV instead of `<out>/trace.csv`.
    #[arg(long)]
    pub trace_out: Option<PathBuf>,
    /// Instance directory (or a `.pgm` image for `rpca`).
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long)]
    pub init_iters: Option<usize>,
    /// Fraction of corrupted measurements (phase-trimmed) or outliers (lad, rpca).
    #[arg(long)]
    pub corrupt: Option<f64>,
    /// Fraction of labeled training rows (sslr).
    #[arg(long)]
    pub labeled: Option<f64>,
    /// Distance between class means (sslr) or neighbouring centers (cluster).
    #[arg(long)]
    pub separation: Option<f64>,
    /// Number of rho grid points for admm-compare.
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long, value_enum)]
    pub start: Option<Start>,
    /// Record wall-clock columns; outputs then differ between runs.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub driver: Driver,
    #[arg(long, value_enum)]
    pub param: Param,
    /// Comma-separated grid, e.g. `0,0.1,1`.
    #[arg(long, value_delimiter = ',', required = true)]
    pub values: Vec<f64>,
    /// Seeds per grid point, counted up from `--seed`.
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
    #[command(flatten)]
    pub common: Common,
}

impl Common {
    /// Every flag set on the command line, by its long name.
    pub fn given(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        macro_rules! check {
            ($($field:ident => $name:literal),* $(,)?) => {
                $(if self.$field.is_some() { v.push($name); })*
            };
        }
        check!(
            nu => "nu", lambda => "lambda", gamma => "gamma", tau => "tau", kappa => "kappa",
            rank => "rank", m => "m", n => "n", k => "k", seed => "seed", max_iter => "max-iter",
            tol => "tol", schedule => "schedule", data => "data", init_iters => "init-iters",
            corrupt => "corrupt", labeled => "labeled", separation => "separation", points => "points",
            start => "start",
        );
        v
    }

    pub fn set(&mut self, param: Param, value: f64) -> Result<(), String> {
        let count = |name: &str| -> Result<usize, String> {
            if value >= 0.0 && value.fract() == 0.0 && value <= u32::MAX as f64 {
                Ok(value as usize)
            } else {
                Err(format!("--{name} grid value {value} is not a nonnegative integer"))
            }
        };
        match param {
            Param::Nu => self.nu = Some(value),
            Param::Lambda => self.lambda = Some(value),
            Param::Gamma => self.gamma = Some(value),
            Param::Tau => self.tau = Some(value),
            Param::Kappa => self.kappa = Some(value),
            Param::Seed => self.seed = Some(count("seed")? as u64),
            Param::M => self.m = Some(count("m")?),
            Param::N => self.n = Some(count("n")?),
            Param::K => self.k = Some(count("k")?),
        }
        Ok(())
    }
}

impl Param {
    pub fn name(self) -> &'static str {
        match self {
            Param::Nu => "nu",
            Param::Lambda => "lambda",
            Param::Gamma => "gamma",
            Param::Tau => "tau",
            Param::Kappa => "kappa",
            Param::Seed => "seed",
            Param::M => "m",
            Param::N => "n",
            Param::K => "k",
        }
    }
}
