use std::io::Write;

use anyhow::{bail, Result};
use clap::Args;
use krigrate::csvio::format_sig;
use krigrate::kernels::matern_spectral;
use krigrate::{Kernel, KernelFamily};

use crate::KernelArgs;

#[derive(Debug, Args)]
pub struct KernelCmd {
    #[command(flatten)]
    kernel: KernelArgs,
    /// Distances at which to evaluate the correlation.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    r: Vec<f64>,
    /// Frequency norms at which to evaluate the Matérn spectral density.
    #[arg(long, value_delimiter = ',')]
    omega: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    dim: usize,
    /// Significant digits in the output.
    #[arg(long, default_value_t = 6)]
    digits: usize,
}

pub fn run(cmd: KernelCmd) -> Result<()> {
    if cmd.r.is_empty() && cmd.omega.is_empty() {
        bail!("nothing to evaluate: pass --r and/or --omega");
    }
    let spec = cmd.kernel.spec();
    let kernel = Kernel::new(spec, cmd.dim)?;
    let mut out = std::io::stdout().lock();
    if !cmd.r.is_empty() {
        writeln!(out, "r,correlation")?;
        for &r in &cmd.r {
            if !(r >= 0.0 && r.is_finite()) {
                return Err(krigrate::Error::Domain(format!("distance must be nonnegative, got {r}")).into());
            }
            writeln!(out, "{},{}", r, format_sig(kernel.corr(r), cmd.digits))?;
        }
    }
    if !cmd.omega.is_empty() {
        if !matches!(spec.family, KernelFamily::Matern { .. }) {
            bail!("spectral density is only available for the Matérn family");
        }
        writeln!(out, "omega,spectral_density")?;
        for &w in &cmd.omega {
            let f = matern_spectral(&spec, w, cmd.dim)?;
            writeln!(out, "{},{}", w, format_sig(f, cmd.digits))?;
        }
    }
    Ok(())
}
