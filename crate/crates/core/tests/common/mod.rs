//! Oracles shared by the integration suites.
#![allow(dead_code)]

use std::f64::consts::PI;

use krigrate::designs::{gen_random, spacings};
use krigrate::Domain;

/// K_{n+1/2}(z) from the finite closed form.
pub fn bessel_half_integer(n: u32, z: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 0..=n {
        if k > 0 {
            let kf = k as f64;
            term *= (n as f64 + kf) * (n as f64 - kf + 1.0) / (kf * 2.0 * z);
        }
        sum += term;
    }
    (PI / (2.0 * z)).sqrt() * (-z).exp() * sum
}

/// Matérn correlation for ν ∈ {1/2, 3/2, 5/2} at scaled distance z = 2√ν φ r.
pub fn matern_closed(nu: f64, z: f64) -> f64 {
    let poly = if nu == 0.5 {
        1.0
    } else if nu == 1.5 {
        1.0 + z
    } else if nu == 2.5 {
        1.0 + z + z * z / 3.0
    } else {
        panic!("no closed form for ν = {nu}")
    };
    poly * (-z).exp()
}

/// Fill distance of 1D points in [0, 1] by brute force over `m` equispaced candidates.
pub fn brute_fill_1d(xs: &[f64], m: usize) -> f64 {
    (0..m)
        .map(|j| {
            let c = j as f64 / (m - 1) as f64;
            xs.iter().map(|x| (x - c).abs()).fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// Half the minimum pairwise distance, O(n²).
pub fn brute_separation_1d(xs: &[f64]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            best = best.min((xs[i] - xs[j]).abs());
        }
    }
    best / 2.0
}

/// Two-sample Kolmogorov–Smirnov statistic.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

/// Asymptotic two-sample KS critical value at level 0.01.
pub fn ks_critical_01(n: usize, m: usize) -> f64 {
    1.628 * ((n + m) as f64 / (n * m) as f64).sqrt()
}

/// Largest spacing (boundary gaps included) of points in [0, 1].
pub fn max_gap(points: &[f64]) -> f64 {
    spacings(points, 0.0, 1.0).into_iter().fold(0.0, f64::max)
}

/// Sorted i.i.d. uniform sample on [0, 1], as produced by the random design.
pub fn uniform_sample_1d(n: usize, seed: u64) -> Vec<f64> {
    let mut xs: Vec<f64> = gen_random(&Domain::unit(1), n, seed)
        .unwrap()
        .points()
        .iter()
        .map(|p| p[0])
        .collect();
    xs.sort_by(f64::total_cmp);
    xs
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
