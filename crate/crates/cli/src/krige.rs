use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use krigrate::csvio::read_rows;
use krigrate::gp::{fit_kriging, PowerEvaluator};
use krigrate::{Design, KernelSpec};

use crate::{DomainArgs, KernelArgs};

#[derive(Debug, Args)]
pub struct KrigeCmd {
    /// Training CSV: coordinates followed by the observed value in the last column.
    #[arg(long)]
    train: PathBuf,
    /// Points to predict at, one per row.
    #[arg(long)]
    predict: PathBuf,
    #[command(flatten)]
    kernel: KernelArgs,
    /// True Matérn smoothness; adds a quasi_power column (mean squared error
    /// of the interpolant under that truth, same phi and sigma2).
    #[arg(long)]
    nu0: Option<f64>,
    #[command(flatten)]
    domain: DomainArgs,
    /// Input files carry a header row; a header is always written.
    #[arg(long)]
    header: bool,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

fn read(path: &Path, header: bool) -> Result<Vec<Vec<f64>>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(read_rows(BufReader::new(file), header)?)
}

pub fn run(cmd: KrigeCmd) -> Result<()> {
    let train = read(&cmd.train, cmd.header)?;
    let width = train.first().map(Vec::len).unwrap_or(0);
    if width < 2 {
        bail!("training file needs at least one coordinate column and a value column");
    }
    let dim = width - 1;
    let (points, obs): (Vec<Vec<f64>>, Vec<f64>) = train
        .into_iter()
        .map(|mut row| {
            let y = row.pop().expect("width checked");
            (row, y)
        })
        .unzip();
    let domain = cmd.domain.resolve().unwrap_or_else(|| krigrate::Domain::unit(dim));
    let design = Design::external(domain, points)?;
    let imposed = cmd.kernel.spec();
    let model = fit_kriging(&design, &obs, &imposed)?;

    let targets = read(&cmd.predict, cmd.header)?;
    if let Some(bad) = targets.iter().find(|p| p.len() != dim) {
        bail!("prediction point has {} coordinates, training data has {dim}", bad.len());
    }
    let power = match cmd.nu0 {
        Some(nu0) => {
            let truth = KernelSpec::matern(nu0, imposed.phi).with_sigma2(imposed.sigma2);
            Some(PowerEvaluator::new(&truth, &imposed, &design)?)
        }
        None => None,
    };

    let sink: Box<dyn Write> = match &cmd.out {
        Some(path) => Box::new(File::create(path).with_context(|| format!("creating {}", path.display()))?),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut out = BufWriter::new(sink);
    let mut names: Vec<String> = (1..=dim).map(|i| format!("x{i}")).collect();
    names.push("prediction".into());
    if power.is_some() {
        names.push("quasi_power".into());
    }
    writeln!(out, "{}", names.join(","))?;
    for x in &targets {
        let mut fields: Vec<String> = x.iter().map(f64::to_string).collect();
        fields.push(model.predict(x).to_string());
        if let Some(p) = &power {
            fields.push(p.quasi_power(x).to_string());
        }
        writeln!(out, "{}", fields.join(","))?;
    }
    out.flush()?;
    if model.jitter_used() > 0.0 {
        eprintln!("note: factorization used jitter {:e}", model.jitter_used());
    }
    Ok(())
}
