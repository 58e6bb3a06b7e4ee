mod common;

use common::c;
use polydist_core::bounds::{optimize_bounds, OptimizeOptions, Problem, Strategy};
use polydist_core::{fixtures, CMatrix, CVector, MatrixPolynomial, TargetSet, WeightSet};

#[test]
fn example2_min_gap_lands_on_the_kink() {
    let (p, t, w) = fixtures::example2();
    let prob = Problem::new(p, t, w).unwrap();
    let rep = optimize_bounds(&prob, (0.0, 5.0), Strategy::MinGap, &OptimizeOptions::default()).unwrap();
    let g = rep.gamma_up.unwrap();
    assert_eq!(Some(rep.gamma_low), rep.gamma_up);
    assert!((g - 2.5730).abs() < 5e-3, "gamma = {g}");
    assert!((rep.beta_low_opt - 6.4007e-4).abs() < 1e-5, "{}", rep.beta_low_opt);
    assert!((rep.beta_up_opt.unwrap() - 8.6167e-4).abs() < 2e-5);
    assert_eq!(rep.q_best.as_ref().unwrap().bound, rep.beta_up_opt.unwrap());
}

#[test]
fn example1_strategies_agree_on_values() {
    let (p, t, w) = fixtures::example1();
    let prob = Problem::new(p, t, w).unwrap();
    let opts = OptimizeOptions::default();
    let a = optimize_bounds(&prob, (0.0, 10.0), Strategy::MinUpper, &opts).unwrap();
    let b = optimize_bounds(&prob, (0.0, 10.0), Strategy::MaxLower, &opts).unwrap();
    assert_eq!(a.beta_low_opt, b.beta_low_opt);
    assert_eq!(a.beta_up_opt, b.beta_up_opt);
    assert!(a.beta_low_opt <= a.beta_up_opt.unwrap());
    let q0 = a.q0.as_ref().unwrap();
    assert!((q0.bound - 12.5337).abs() < 1e-2);
    assert_eq!(a.samples.len(), 200);
    // sandwich over all sampled pairs
    let max_low = a.samples.iter().map(|s| s.beta_low).fold(0.0, f64::max);
    let min_up = a.samples.iter().filter_map(|s| s.beta_up).fold(f64::INFINITY, f64::min);
    assert!(max_low <= min_up);
}

#[test]
fn optimization_is_deterministic() {
    let (p, t, w) = fixtures::example1();
    let prob = Problem::new(p, t, w).unwrap();
    let opts = OptimizeOptions { grid_points: 50, ..Default::default() };
    let a = optimize_bounds(&prob, (0.0, 10.0), Strategy::MinGap, &opts).unwrap();
    let b = optimize_bounds(&prob, (0.0, 10.0), Strategy::MinGap, &opts).unwrap();
    assert_eq!(a.samples, b.samples);
    assert_eq!(a.beta_up_opt, b.beta_up_opt);
    assert_eq!(a.gamma_up, b.gamma_up);
}

#[test]
fn planted_spectrum_report_is_zero() {
    let d = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.0, 0.0), c(-2.0, 0.5), c(0.3, 0.0), c(4.0, 0.0)]));
    let p = MatrixPolynomial::linear_pencil(&d).unwrap();
    let t = TargetSet::new(vec![c(1.0, 0.0), c(-2.0, 0.5), c(0.3, 0.0)]).unwrap();
    let prob = Problem::new(p, t, WeightSet::unit(1)).unwrap();
    for s in [Strategy::MinUpper, Strategy::MaxLower, Strategy::MinGap] {
        let rep = optimize_bounds(&prob, (0.0, 10.0), s, &OptimizeOptions { grid_points: 30, ..Default::default() }).unwrap();
        assert_eq!(rep.beta_low_opt, 0.0);
        assert_eq!(rep.beta_up_opt, Some(0.0));
    }
}
