use krigrate::designs::{gen_grid, gen_halton, gen_random};
use krigrate::gp::{
    cholesky_spd, corr_matrix, empirical_error, fit_kriging, power_function, quasi_power, sample_gp,
    ErrorNormSpec, PowerEvaluator, DEFAULT_MAX_JITTER,
};
use krigrate::{Design, Domain, KernelSpec, NormKind};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn unit() -> Domain {
    Domain::unit(1)
}

/// Fits whose correlation matrix has condition number above this lose the
/// 1e-6 interpolation guarantee to f64 rounding in the kernel entries.
const WELL_POSED_COND: f64 = 1e10;

#[test]
fn interpolation_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mut checked = 0;
    for case in 0..60 {
        let n = rng.random_range(3..30);
        let nu = rng.random_range(0.5..2.5);
        let phi = rng.random_range(0.5..2.0);
        let design = gen_random(&unit(), n, case).unwrap();
        let obs: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let spec = KernelSpec::matern(nu, phi);
        let ev = corr_matrix(&spec, design.points()).unwrap().symmetric_eigenvalues();
        if ev.max() / ev.min() > WELL_POSED_COND {
            continue;
        }
        checked += 1;
        let model = fit_kriging(&design, &obs, &spec).unwrap();
        for (x, y) in design.points().iter().zip(&obs) {
            let p = model.predict(x);
            assert!((p - y).abs() <= 1e-6, "case {case}: {p} vs {y} (jitter {})", model.jitter_used());
        }
    }
    assert!(checked >= 50, "only {checked} well-posed instances");
}

#[test]
fn quasi_power_dominates_power() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    while checked < 500 {
        let n = rng.random_range(2..15);
        let design = gen_random(&unit(), n, rng.random()).unwrap();
        let truth = KernelSpec::matern(rng.random_range(0.5..3.0), 1.0);
        let imposed = KernelSpec::matern(rng.random_range(0.5..3.0), rng.random_range(0.5..2.0));
        let ev = PowerEvaluator::new(&truth, &imposed, &design).unwrap();
        let x = [rng.random_range(0.0..1.0)];
        let (p, q) = (ev.power(&x), ev.quasi_power(&x));
        assert!(q >= p - 1e-10, "Q²={q} P²={p} design={:?}", design.points());
        checked += 1;
    }
}

#[test]
fn quasi_power_equals_power_for_correct_kernel() {
    for (i, &nu) in [0.5, 1.1, 2.1, 2.8].iter().enumerate() {
        let design = gen_halton(&unit(), 12).unwrap();
        let k = KernelSpec::matern(nu, 1.3).with_sigma2(1.7);
        let ev = PowerEvaluator::new(&k, &k, &design).unwrap();
        for j in 0..25 {
            let x = [(j as f64 + 0.31 * i as f64) / 25.0];
            assert!((ev.quasi_power(&x) - ev.power(&x)).abs() <= 1e-12, "ν={nu} x={x:?}");
        }
    }
}

/// Monte Carlo mean squared error of the misspecified predictor at `x`,
/// with its standard error.
fn mc_mse(truth: &KernelSpec, imposed: &KernelSpec, design: &Design, x: f64, draws: u64) -> (f64, f64) {
    let mut joint = design.points().to_vec();
    joint.push(vec![x]);
    let n = design.len();
    let sq: Vec<f64> = (0..draws)
        .map(|s| {
            let z = sample_gp(truth, &joint, 10_000 + s).unwrap();
            let model = fit_kriging(design, &z.values[..n], imposed).unwrap();
            (z.values[n] - model.predict(&[x])).powi(2)
        })
        .collect();
    let mean = sq.iter().sum::<f64>() / draws as f64;
    let var = sq.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (draws - 1) as f64;
    (mean, (var / draws as f64).sqrt())
}

#[test]
fn monte_carlo_mse_matches_quasi_power() {
    let cases = [
        (1.1, 1.3, gen_grid(&unit(), 5).unwrap(), 0.37),
        (1.1, 2.8, gen_random(&unit(), 8, 1).unwrap(), 0.5),
        (2.1, 2.8, gen_halton(&unit(), 6).unwrap(), 0.9),
        (1.5, 3.5, gen_grid(&unit(), 4).unwrap(), 0.12),
        (2.5, 0.5, gen_halton(&unit(), 7).unwrap(), 0.66),
    ];
    for (nu0, nu, design, x) in cases {
        let truth = KernelSpec::matern(nu0, 1.0);
        let imposed = KernelSpec::matern(nu, 1.0);
        let q = quasi_power(&truth, &imposed, &design, &[x]).unwrap();
        let (mse, se) = mc_mse(&truth, &imposed, &design, x, 4000);
        assert!((mse - q).abs() <= 3.0 * se, "({nu0}, {nu}): MC {mse} ± {se}, Q² {q}");
    }
}

#[test]
fn clustered_oversmoothed_matrix_factors_with_jitter() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pts: Vec<Vec<f64>> = (0..100)
        .map(|i| vec![(i / 10) as f64 * 0.1 + rng.random_range(0.0..1e-3)])
        .collect();
    let m = corr_matrix(&KernelSpec::matern(2.8, 1.0), &pts).unwrap();
    let f = cholesky_spd(&m, DEFAULT_MAX_JITTER).unwrap();
    assert!(f.jitter_used() <= 1e-8);
    let l = f.lower();
    let resid = &l * l.transpose() - (&m + DMatrix::identity(100, 100) * f.jitter_used());
    assert!(resid.amax() <= 1e-10, "residual {}", resid.amax());
}

#[test]
fn sample_covariance_matches_kernel() {
    let pts = vec![vec![0.1], vec![0.35], vec![0.9]];
    let spec = KernelSpec::matern(1.5, 1.0).with_sigma2(2.0);
    let draws = 20_000u64;
    let mut acc = [[0.0f64; 3]; 3];
    for s in 0..draws {
        let v = sample_gp(&spec, &pts, s).unwrap().values;
        for i in 0..3 {
            for j in 0..3 {
                acc[i][j] += v[i] * v[j];
            }
        }
    }
    let m = corr_matrix(&spec, &pts).unwrap() * 2.0;
    for i in 0..3 {
        for j in 0..3 {
            let emp = acc[i][j] / draws as f64;
            // sd of a product of two N(0, 2) variables is at most 2·√2
            assert!((emp - m[(i, j)]).abs() < 4.0 * 2.0 * 2f64.sqrt() / (draws as f64).sqrt(), "({i},{j}) {emp} vs {}", m[(i, j)]);
        }
    }
}

#[test]
fn norm_ordering_on_one_draw() {
    let design = gen_random(&unit(), 30, 2).unwrap();
    let eval = gen_halton(&unit(), 200).unwrap();
    let mut joint = design.points().to_vec();
    joint.extend_from_slice(eval.points());
    let z = sample_gp(&KernelSpec::matern(1.1, 1.0), &joint, 3).unwrap();
    let model = fit_kriging(&design, &z.values[..30], &KernelSpec::matern(2.1, 1.0)).unwrap();
    let err = |kind| empirical_error(&z, &model, &ErrorNormSpec { kind, eval_set: eval.clone() }).unwrap();
    let (l1, l2, sup) = (err(NormKind::Lp { p: 1.0 }), err(NormKind::Lp { p: 2.0 }), err(NormKind::Sup));
    assert!(l1 <= l2 && l2 <= sup, "{l1} {l2} {sup}");
}

#[test]
fn missing_eval_point_is_a_contract_error() {
    let design = gen_grid(&unit(), 5).unwrap();
    let z = sample_gp(&KernelSpec::matern(1.1, 1.0), design.points(), 1).unwrap();
    let model = fit_kriging(&design, &z.values, &KernelSpec::matern(1.1, 1.0)).unwrap();
    let eval = Design::external(unit(), vec![vec![0.0], vec![0.3]]).unwrap();
    let res = empirical_error(&z, &model, &ErrorNormSpec { kind: NormKind::Sup, eval_set: eval });
    assert!(matches!(res, Err(krigrate::Error::Contract(_))));
}

fn design_strategy() -> impl Strategy<Value = Design> {
    (any::<u64>(), 2usize..20).prop_map(|(seed, n)| gen_random(&Domain::unit(1), n, seed).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn cholesky_residual_is_small(design in design_strategy(), nu in 0.5f64..3.0) {
        let m = corr_matrix(&KernelSpec::matern(nu, 1.0), design.points()).unwrap();
        let f = cholesky_spd(&m, DEFAULT_MAX_JITTER).unwrap();
        let l = f.lower();
        let n = m.nrows();
        let resid = &l * l.transpose() - (&m + DMatrix::identity(n, n) * f.jitter_used());
        prop_assert!(resid.amax() <= 1e-10);
    }

    #[test]
    fn more_data_never_increases_power(design in design_strategy(), extra in 0.0f64..1.0, x in 0.0f64..1.0, nu in 0.5f64..2.5) {
        prop_assume!(design.points().iter().all(|p| (p[0] - extra).abs() > 1e-3));
        let k = KernelSpec::matern(nu, 1.0);
        let before = power_function(&k, &design, &[x]).unwrap();
        let after = power_function(&k, &design.with_point(vec![extra]).unwrap(), &[x]).unwrap();
        prop_assert!(after <= before + 1e-10, "{} -> {}", before, after);
    }

    #[test]
    fn power_is_a_variance(design in design_strategy(), x in 0.0f64..1.0, s2 in 0.1f64..4.0) {
        let k = KernelSpec::matern(1.1, 1.0).with_sigma2(s2);
        let p = power_function(&k, &design, &[x]).unwrap();
        prop_assert!((0.0..=s2 + 1e-12).contains(&p));
        let at_design = power_function(&k, &design, &design.points()[0]).unwrap();
        prop_assert!(at_design <= 1e-8);
    }

    #[test]
    fn predictor_ignores_point_order(design in design_strategy(), x in 0.0f64..1.0, seed in any::<u64>()) {
        let n = design.len();
        let z = sample_gp(&KernelSpec::matern(1.1, 1.0), design.points(), seed).unwrap();
        let imposed = KernelSpec::matern(1.3, 1.0);
        let a = fit_kriging(&design, &z.values, &imposed).unwrap();
        prop_assume!(a.jitter_used() == 0.0);
        let idx: Vec<usize> = (0..n).rev().collect();
        let pts: Vec<Vec<f64>> = idx.iter().map(|&i| design.points()[i].clone()).collect();
        let obs: Vec<f64> = idx.iter().map(|&i| z.values[i]).collect();
        let b = fit_kriging(&Design::external(Domain::unit(1), pts).unwrap(), &obs, &imposed).unwrap();
        let (pa, pb) = (a.predict(&[x]), b.predict(&[x]));
        prop_assert!((pa - pb).abs() <= 1e-8 * (1.0 + pa.abs()), "{} vs {}", pa, pb);
    }

    #[test]
    fn sampling_is_deterministic(design in design_strategy(), seed in any::<u64>()) {
        let k = KernelSpec::matern(2.1, 1.0);
        prop_assert_eq!(sample_gp(&k, design.points(), seed).unwrap(), sample_gp(&k, design.points(), seed).unwrap());
    }
}
