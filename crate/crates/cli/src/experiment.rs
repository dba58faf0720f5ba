use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use krigrate::csvio::format_sig;
use krigrate::experiments::{run_rate_study, table2_configs, StudyRun};
use krigrate::{Domain, ExperimentConfig, NormKind, Scheme};

use crate::output::{self, RunManifest};
use crate::OUT_DIR_ENV;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Preset {
    /// Four smoothness pairs under random and grid sampling.
    Table2,
}

#[derive(Debug, Args)]
pub struct ExperimentCmd {
    /// JSON file with one configuration object or an array of them.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    #[arg(long, value_enum, conflicts_with_all = ["nu0", "nu", "scheme"])]
    preset: Option<Preset>,

    #[arg(long)]
    nu0: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    scheme: Option<Scheme>,
    #[arg(long)]
    phi: Option<f64>,
    /// Scale of the imposed kernel when it differs from --phi.
    #[arg(long)]
    phi_imposed: Option<f64>,
    #[arg(long)]
    sigma2: Option<f64>,
    /// Comma-separated sample sizes.
    #[arg(long, value_delimiter = ',')]
    sample_sizes: Option<Vec<usize>>,
    #[arg(long)]
    replications: Option<usize>,
    #[arg(long)]
    eval_points: Option<usize>,
    /// sup, l1, l2 or lp:<p>.
    #[arg(long)]
    norm: Option<NormKind>,
    #[arg(long)]
    seed: Option<u64>,
    /// Box bounds, one `lo:hi` per coordinate.
    #[arg(long, value_parser = crate::parse_domain)]
    domain: Option<Domain>,

    /// Worker threads; defaults to all cores. Results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, env = OUT_DIR_ENV, default_value = "krigrate-out")]
    out_dir: PathBuf,
    /// Also write one SVG per study.
    #[arg(long)]
    svg: bool,
}

impl ExperimentCmd {
    fn apply_overrides(&self, c: &mut ExperimentConfig) {
        if let Some(v) = self.nu0 {
            c.nu0 = v;
        }
        if let Some(v) = self.nu {
            c.nu = v;
        }
        if let Some(v) = self.scheme {
            c.scheme = v;
        }
        if let Some(v) = self.phi {
            c.phi = v;
        }
        if let Some(v) = self.phi_imposed {
            c.phi_imposed = Some(v);
        }
        if let Some(v) = self.sigma2 {
            c.sigma2 = v;
        }
        if let Some(v) = &self.sample_sizes {
            c.sample_sizes = v.clone();
        }
        if let Some(v) = self.replications {
            c.replications = v;
        }
        if let Some(v) = self.eval_points {
            c.eval_points = v;
        }
        if let Some(v) = self.norm {
            c.norm = v;
        }
        if let Some(v) = self.seed {
            c.base_seed = v;
        }
        if let Some(v) = &self.domain {
            c.domain = v.clone();
        }
    }

    /// Configurations after defaults, preset expansion and flag overrides.
    fn resolve(&self) -> Result<Vec<ExperimentConfig>> {
        let mut configs = if let Some(path) = &self.config {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let value: serde_json::Value =
                serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            if value.is_array() {
                serde_json::from_value::<Vec<ExperimentConfig>>(value)
            } else {
                serde_json::from_value::<ExperimentConfig>(value).map(|c| vec![c])
            }
            .with_context(|| format!("invalid configuration in {}", path.display()))?
        } else if let Some(Preset::Table2) = self.preset {
            let mut template = ExperimentConfig::new(1.0, 1.0, Scheme::Grid);
            self.apply_overrides(&mut template);
            table2_configs(&template)
        } else {
            match (self.nu0, self.nu, self.scheme) {
                (Some(nu0), Some(nu), Some(scheme)) => vec![ExperimentConfig::new(nu0, nu, scheme)],
                _ => bail!("give --config, --preset, or all of --nu0, --nu and --scheme"),
            }
        };
        for c in &mut configs {
            self.apply_overrides(c);
            c.validate()?;
        }
        Ok(configs)
    }
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(file))
}

pub fn run(cmd: ExperimentCmd) -> Result<()> {
    let configs = cmd.resolve()?;
    if let Some(t) = cmd.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .context("configuring thread pool")?;
    }
    fs::create_dir_all(&cmd.out_dir).with_context(|| format!("creating {}", cmd.out_dir.display()))?;

    let started = output::unix_now();
    let mut runs = Vec::with_capacity(configs.len());
    for c in &configs {
        eprintln!("running nu0={} nu={} scheme={} ...", c.nu0, c.nu, c.scheme);
        let fit = run_rate_study(c)?;
        eprintln!(
            "  slope {} (theory {}), R2 {}",
            format_sig(fit.slope, 6),
            fit.theoretical_slope,
            format_sig(fit.r_squared, 6)
        );
        runs.push(StudyRun {
            config: c.clone(),
            fit,
        });
    }
    let finished = output::unix_now();

    let dir = &cmd.out_dir;
    output::write_report(create(dir, "report.csv")?, &runs)?;
    output::write_plot_data(create(dir, "plot_data.csv")?, &runs)?;
    serde_json::to_writer_pretty(create(dir, "audit.json")?, &runs)?;
    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION"),
        config_hash: output::config_hash(&configs)?,
        base_seed: configs.first().map(|c| c.base_seed).unwrap_or_default(),
        started_unix: started,
        finished_unix: finished,
        threads: rayon::current_num_threads(),
        configs: &configs,
    };
    serde_json::to_writer_pretty(create(dir, "manifest.json")?, &manifest)?;
    if cmd.svg {
        for run in &runs {
            fs::write(dir.join(output::svg_file_name(run)), output::render_svg(run))?;
        }
    }

    output::write_report(std::io::stdout().lock(), &runs)?;
    Ok(())
}
