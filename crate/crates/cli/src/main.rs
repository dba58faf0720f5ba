use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand};
use krigrate::{Domain, KernelSpec};

mod design;
mod experiment;
mod kernel;
mod krige;
mod output;

/// Kriging with misspecified Matérn smoothness: kernels, designs,
/// interpolation and convergence-rate studies.
#[derive(Debug, Parser)]
#[command(name = "krigrate", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a correlation function (and Matérn spectral density).
    Kernel(kernel::KernelCmd),
    /// Generate or analyse a design.
    Design(design::DesignCmd),
    /// Fit a kriging interpolant to a training CSV and predict.
    Krige(krige::KrigeCmd),
    /// Run convergence-rate studies.
    Experiment(experiment::ExperimentCmd),
}

/// Kernel family flags shared by `kernel` and `krige`.
#[derive(Debug, Clone, Args)]
pub struct KernelArgs {
    #[arg(long, value_parser = ["matern", "wendland"], default_value = "matern")]
    pub family: String,
    /// Matérn smoothness ν.
    #[arg(long, allow_negative_numbers = true)]
    pub nu: Option<f64>,
    /// Generalized Wendland κ.
    #[arg(long, allow_negative_numbers = true)]
    pub kappa: Option<f64>,
    /// Generalized Wendland μ.
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    /// Inverse length-scale.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub phi: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma2: f64,
}

impl KernelArgs {
    /// Kernel spec; a missing family parameter is a usage error (exit code 2).
    pub fn spec(&self) -> KernelSpec {
        let need = |v: Option<f64>, flag: &str| {
            v.unwrap_or_else(|| {
                Cli::command()
                    .error(
                        ErrorKind::MissingRequiredArgument,
                        format!("--{flag} is required for --family {}", self.family),
                    )
                    .exit()
            })
        };
        let base = match self.family.as_str() {
            "wendland" => KernelSpec::wendland(need(self.kappa, "kappa"), need(self.mu, "mu"), self.phi),
            _ => KernelSpec::matern(need(self.nu, "nu"), self.phi),
        };
        base.with_sigma2(self.sigma2)
    }
}

/// Domain flags: either `--domain lo:hi,lo:hi,...` or the unit cube of `--dim`.
#[derive(Debug, Clone, Args)]
pub struct DomainArgs {
    /// Box bounds, one `lo:hi` per coordinate.
    #[arg(long, value_parser = parse_domain, conflicts_with = "dim")]
    pub domain: Option<Domain>,
    /// Dimension of the unit cube used when `--domain` is absent.
    #[arg(long)]
    pub dim: Option<usize>,
}

impl DomainArgs {
    pub fn resolve(&self) -> Option<Domain> {
        match (&self.domain, self.dim) {
            (Some(d), _) => Some(d.clone()),
            (None, Some(dim)) => Some(Domain::unit(dim)),
            (None, None) => None,
        }
    }
}

fn parse_domain(s: &str) -> Result<Domain, String> {
    let bounds = s
        .split(',')
        .map(|part| {
            let (lo, hi) = part
                .split_once(':')
                .ok_or_else(|| format!("expected lo:hi, got '{part}'"))?;
            let lo: f64 = lo.trim().parse().map_err(|_| format!("bad bound '{lo}'"))?;
            let hi: f64 = hi.trim().parse().map_err(|_| format!("bad bound '{hi}'"))?;
            Ok((lo, hi))
        })
        .collect::<Result<Vec<_>, String>>()?;
    Domain::new(bounds).map_err(|e| e.to_string())
}

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "KRIGRATE_OUT_DIR";

fn error_kind(err: &anyhow::Error) -> &'static str {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<krigrate::Error>() {
            return e.kind();
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return "io";
        }
        if cause.downcast_ref::<serde_json::Error>().is_some() {
            return "parse";
        }
    }
    "cli"
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Kernel(cmd) => kernel::run(cmd),
        Command::Design(cmd) => design::run(cmd),
        Command::Krige(cmd) => krige::run(cmd),
        Command::Experiment(cmd) => experiment::run(cmd),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let msg = format!("{err:#}").replace('\n', " ");
            eprintln!("krigrate: error[{}]: {msg}", error_kind(&err));
            ExitCode::FAILURE
        }
    }
}
