//! Shared fixtures for the benchmarks.

use krigrate::designs::gen_halton;
use krigrate::Domain;

/// First `n` van der Corput points on `[0, 1]` as a point list.
pub fn halton_1d(n: usize) -> Vec<Vec<f64>> {
    gen_halton(&Domain::unit(1), n)
        .expect("n >= 1")
        .points()
        .to_vec()
}
