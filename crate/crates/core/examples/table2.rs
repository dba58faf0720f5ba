//! Runs the eight oversmoothing configurations at desk scale and prints the table.

use krigrate::experiments::{reproduce_table2, table2_configs};
use krigrate::{ExperimentConfig, Scheme};

fn main() -> krigrate::Result<()> {
    let mut template = ExperimentConfig::new(1.1, 1.3, Scheme::Grid);
    if let Some(reps) = std::env::args().nth(1) {
        template.replications = reps.parse().expect("replications");
    }
    println!("nu0\tnu\tscheme\tES\tTS\tR2\tdropped\tjittered");
    for run in reproduce_table2(&table2_configs(&template))? {
        let row = run.row();
        let jit: usize = run.fit.cells.iter().map(|c| c.jittered_fits).sum();
        let sj = run.fit.cells.iter().map(|c| c.max_sample_jitter).fold(0.0, f64::max);
        println!(
            "{}\t{}\t{}\t{:.4}\t{}\t{:.4}\t{}\t{} {:e}",
            row.nu0, row.nu, row.scheme, row.estimated_slope, row.theoretical_slope, row.r_squared,
            row.dropped_replications, jit, sj
        );
        for c in &run.fit.cells {
            eprint!("{}:{:.3e} ", c.n, c.mean_error);
        }
        eprintln!();
    }
    Ok(())
}
