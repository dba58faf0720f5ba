use krigrate::experiments::{
    fit_from_cells, ols_fit, replication_seed, run_rate_study, run_rate_study_norms, table2_configs, CellSummary,
};
use krigrate::{ExperimentConfig, NormKind, Scheme, TheoreticalSlope};
use proptest::prelude::*;

fn quick(nu0: f64, nu: f64, scheme: Scheme, reps: usize) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(nu0, nu, scheme);
    c.replications = reps;
    c
}

fn cell(n: usize, mean_error: f64) -> CellSummary {
    CellSummary {
        n,
        mean_error,
        errors: vec![mean_error],
        dropped: 0,
        jittered_fits: 0,
        max_sample_jitter: 0.0,
    }
}

#[test]
fn same_config_same_bits() {
    let mut c = quick(1.1, 2.8, Scheme::Random, 4);
    c.sample_sizes = vec![20, 40, 60, 80];
    let a = run_rate_study(&c).unwrap();
    let b = run_rate_study(&c).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.slope.to_bits(), b.slope.to_bits());
    c.base_seed += 1;
    assert_ne!(run_rate_study(&c).unwrap().slope.to_bits(), a.slope.to_bits());
}

#[test]
fn seeds_are_distinct_across_cells() {
    let mut seen = std::collections::HashSet::new();
    for n in (20..=150).step_by(10) {
        for rep in 0..100 {
            assert!(seen.insert(replication_seed(20_200_531, n, rep)));
        }
    }
}

#[test]
fn grid_slope_does_not_depend_on_seed() {
    let slopes: Vec<f64> = [1u64, 2, 3, 4, 5]
        .iter()
        .map(|&seed| {
            let mut c = quick(1.1, 1.3, Scheme::Grid, 10);
            c.base_seed = seed;
            run_rate_study(&c).unwrap().slope
        })
        .collect();
    let lo = slopes.iter().cloned().fold(f64::MAX, f64::min);
    let hi = slopes.iter().cloned().fold(f64::MIN, f64::max);
    assert!(hi - lo < 0.2, "{slopes:?}");
}

#[test]
fn mean_error_decreases_for_convergent_studies() {
    // random designs need the full replication count to tame the noise
    for (nu0, nu, scheme, reps) in [
        (1.1, 1.3, Scheme::Grid, 10),
        (2.1, 2.8, Scheme::Grid, 10),
        (1.5, 3.5, Scheme::Grid, 10),
        (1.1, 1.3, Scheme::Random, 100),
    ] {
        let fit = run_rate_study(&quick(nu0, nu, scheme, reps)).unwrap();
        assert!(fit.per_n_mean_error.iter().all(|&(_, e)| e > 0.0));
        let inversions = fit.per_n_mean_error.windows(2).filter(|w| w[1].1 > w[0].1).count();
        assert!(inversions <= 1, "({nu0}, {nu}, {scheme}): {:?}", fit.per_n_mean_error);
    }
}

#[test]
fn norms_are_ordered_on_shared_draws() {
    let mut c = quick(1.1, 1.3, Scheme::Random, 6);
    c.sample_sizes = vec![20, 50, 80, 110];
    let fits = run_rate_study_norms(&c, &[NormKind::Lp { p: 1.0 }, NormKind::Lp { p: 2.0 }, NormKind::Sup]).unwrap();
    for i in 0..c.sample_sizes.len() {
        let (l1, l2, sup) = (&fits[0].cells[i], &fits[1].cells[i], &fits[2].cells[i]);
        assert!(l1.mean_error <= l2.mean_error && l2.mean_error <= sup.mean_error);
        for r in 0..l1.errors.len() {
            assert!(l1.errors[r] <= l2.errors[r] * (1.0 + 1e-12));
            assert!(l2.errors[r] <= sup.errors[r] * (1.0 + 1e-12));
        }
    }
}

#[test]
#[ignore = "observed 1D slopes follow min(nu0, 2nu + 1), not nu; see undersmoothed_grid_slope_is_at_least_nu"]
fn undersmoothed_grid_slope_tracks_nu() {
    let fit = run_rate_study(&quick(2.5, 1.5, Scheme::Grid, 10)).unwrap();
    assert_eq!(fit.theoretical_slope, TheoreticalSlope::Rate(1.5));
    assert!((fit.slope - 1.5).abs() < 0.2, "slope {}", fit.slope);
}

/// `nu` is only an upper-bound exponent. On 1D grids the ν-kernel interpolant
/// behaves like a spline of order 2ν + 1, so the error follows the sample-path
/// smoothness until that order caps it.
#[test]
fn undersmoothed_grid_slope_is_at_least_nu() {
    for (nu0, nu) in [(2.5, 1.5), (3.5, 0.5), (2.0, 1.2), (1.5, 0.5)] {
        let fit = run_rate_study(&quick(nu0, nu, Scheme::Grid, 10)).unwrap();
        assert!(fit.slope > nu - 0.2, "({nu0}, {nu}): slope {}", fit.slope);
        let order = nu0.min(2.0 * nu + 1.0);
        assert!((fit.slope - order).abs() < 0.2, "({nu0}, {nu}): slope {} vs {order}", fit.slope);
    }
}

#[test]
fn halton_designs_converge() {
    let fit = run_rate_study(&quick(1.1, 1.3, Scheme::Halton, 10)).unwrap();
    assert!(fit.slope > 0.8, "slope {}", fit.slope);
    assert!(fit.r_squared > 0.9);
}

#[test]
fn synthetic_power_law_is_recovered() {
    for alpha in [0.3, 1.1, 2.75] {
        let cells = (2..=15).map(|k| 10 * k).map(|n| cell(n, 0.7 * (n as f64).powf(-alpha))).collect();
        let fit = fit_from_cells(cells, TheoreticalSlope::Rate(alpha)).unwrap();
        assert!((fit.slope - alpha).abs() < 1e-10);
        assert!((fit.intercept - 0.7f64.ln()).abs() < 1e-10);
        assert!((fit.r_squared - 1.0).abs() < 1e-10);
    }
}

#[test]
fn config_defaults_from_json() {
    let c: ExperimentConfig = serde_json::from_str(r#"{"nu0": 1.1, "nu": 1.3, "scheme": "grid"}"#).unwrap();
    assert_eq!(c, ExperimentConfig::new(1.1, 1.3, Scheme::Grid));
    assert_eq!(c.sample_sizes, (2..=15).map(|k| 10 * k).collect::<Vec<_>>());
    assert_eq!((c.phi, c.sigma2, c.eval_points), (1.0, 1.0, 200));
    assert_eq!(c.norm, NormKind::Sup);
    let back: ExperimentConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
    assert_eq!(back, c);
}

#[test]
fn invalid_configs_are_rejected() {
    let base = ExperimentConfig::new(1.1, 1.3, Scheme::Grid);
    let bad = [
        ExperimentConfig { sample_sizes: vec![20, 20, 30], ..base.clone() },
        ExperimentConfig { sample_sizes: vec![1, 2, 3], ..base.clone() },
        ExperimentConfig { sample_sizes: vec![20, 30], ..base.clone() },
        ExperimentConfig { replications: 0, ..base.clone() },
        ExperimentConfig { nu: -1.0, ..base.clone() },
        ExperimentConfig { scheme: Scheme::External, ..base.clone() },
    ];
    for c in &bad {
        assert!(matches!(run_rate_study(c), Err(krigrate::Error::Config(_))), "{c:?}");
    }
}

#[test]
fn table_configs_cover_pairs_and_schemes() {
    let configs = table2_configs(&ExperimentConfig::new(1.0, 1.0, Scheme::Grid));
    let got: Vec<(f64, f64, Scheme)> = configs.iter().map(|c| (c.nu0, c.nu, c.scheme)).collect();
    assert_eq!(got.len(), 8);
    for pair in [(1.1, 1.3), (1.1, 2.8), (2.1, 2.8), (1.5, 3.5)] {
        for s in [Scheme::Random, Scheme::Grid] {
            assert!(got.contains(&(pair.0, pair.1, s)));
        }
    }
    assert!(krigrate::experiments::reproduce_table2(&[]).unwrap().is_empty());
}

proptest! {
    #[test]
    fn ols_recovers_lines_and_bounds_r2(
        slope in -5.0f64..5.0,
        intercept in -5.0f64..5.0,
        xs in prop::collection::vec(-10.0f64..10.0, 3..30),
        noise in prop::collection::vec(-1.0f64..1.0, 30),
    ) {
        prop_assume!(xs.iter().any(|&x| (x - xs[0]).abs() > 1e-3));
        let exact: Vec<f64> = xs.iter().map(|x| slope * x + intercept).collect();
        let f = ols_fit(&xs, &exact).unwrap();
        prop_assert!((f.slope - slope).abs() < 1e-8);
        prop_assert!((f.intercept - intercept).abs() < 1e-7);

        let noisy: Vec<f64> = exact.iter().zip(&noise).map(|(y, e)| y + e).collect();
        let g = ols_fit(&xs, &noisy).unwrap();
        prop_assert!((0.0..=1.0).contains(&g.r_squared));
        // residuals are orthogonal to the regressors
        let res: Vec<f64> = xs.iter().zip(&noisy).map(|(x, y)| y - g.slope * x - g.intercept).collect();
        let scale: f64 = noisy.iter().map(|y| y.abs()).sum::<f64>() + 1.0;
        prop_assert!(res.iter().sum::<f64>().abs() < 1e-9 * scale);
        prop_assert!(res.iter().zip(&xs).map(|(r, x)| r * x).sum::<f64>().abs() < 1e-8 * scale * 10.0);
    }

    #[test]
    fn ols_slope_ignores_shifts(
        xs in prop::collection::vec(-10.0f64..10.0, 3..20),
        ys in prop::collection::vec(-10.0f64..10.0, 20),
        dx in -100.0f64..100.0,
        dy in -100.0f64..100.0,
    ) {
        prop_assume!(xs.iter().any(|&x| (x - xs[0]).abs() > 1e-2));
        let ys = &ys[..xs.len()];
        let a = ols_fit(&xs, ys).unwrap();
        let xs2: Vec<f64> = xs.iter().map(|x| x + dx).collect();
        let ys2: Vec<f64> = ys.iter().map(|y| y + dy).collect();
        let b = ols_fit(&xs2, &ys2).unwrap();
        prop_assert!((a.slope - b.slope).abs() < 1e-7 * (1.0 + a.slope.abs()));
        prop_assert!((a.r_squared - b.r_squared).abs() < 1e-7);
    }
}
