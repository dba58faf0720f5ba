use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use krigrate::csvio::format_sig;
use krigrate::designs::{gen_grid, gen_halton, gen_random, DEFAULT_FILL_RESOLUTION};
use krigrate::{Design, DesignMetrics, Domain, Scheme};

use crate::DomainArgs;

#[derive(Debug, Args)]
pub struct DesignCmd {
    /// random, grid or halton. Ignored with --input.
    #[arg(long, required_unless_present = "input")]
    scheme: Option<Scheme>,
    #[arg(long, required_unless_present = "input")]
    n: Option<usize>,
    /// Seed for random designs.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    domain: DomainArgs,
    /// Analyse an existing design CSV instead of generating one.
    #[arg(long, conflicts_with_all = ["scheme", "n"])]
    input: Option<PathBuf>,
    /// Points file; standard output when absent.
    #[arg(long, short, conflicts_with = "input")]
    out: Option<PathBuf>,
    /// Header row (x1, x2, ...) on written and read CSVs.
    #[arg(long)]
    header: bool,
    /// Lattice resolution per axis for the fill distance when d > 1.
    #[arg(long, default_value_t = DEFAULT_FILL_RESOLUTION)]
    resolution: usize,
}

fn metrics_line(m: &DesignMetrics) -> String {
    format!(
        "h={} q={} rho={} exact={}",
        format_sig(m.fill_distance, 6),
        format_sig(m.separation_radius, 6),
        format_sig(m.mesh_ratio, 6),
        m.fill_is_exact
    )
}

fn build(cmd: &DesignCmd) -> Result<Design> {
    let domain = cmd.domain.resolve();
    if let Some(path) = &cmd.input {
        let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
        return Ok(Design::read_csv(BufReader::new(file), domain, cmd.header)?);
    }
    let domain = domain.unwrap_or_else(|| Domain::unit(1));
    let n = cmd.n.expect("required by clap");
    Ok(match cmd.scheme.expect("required by clap") {
        Scheme::Random => gen_random(&domain, n, cmd.seed)?,
        Scheme::Grid => gen_grid(&domain, n)?,
        Scheme::Halton => gen_halton(&domain, n)?,
        Scheme::External => bail!("use --input to analyse an external design"),
    })
}

pub fn run(cmd: DesignCmd) -> Result<()> {
    let design = build(&cmd)?;
    let metrics = DesignMetrics::compute(&design, cmd.resolution)?;
    match (&cmd.out, &cmd.input) {
        (Some(path), _) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(file);
            design.write_csv(&mut w, cmd.header)?;
            w.flush()?;
            println!("{}", metrics_line(&metrics));
        }
        (None, Some(_)) => println!("{}", metrics_line(&metrics)),
        (None, None) => {
            design.write_csv(std::io::stdout().lock(), cmd.header)?;
            eprintln!("{}", metrics_line(&metrics));
        }
    }
    Ok(())
}
