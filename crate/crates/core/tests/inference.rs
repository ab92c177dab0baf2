use std::f64::consts::{PI, SQRT_2};

use oamepr::inference::{
    epr_witness, epr_witness_from_uncertainties, estimate_dimensions, fit_pattern, CoincidenceScan, FitModel,
    FitOptions, InferenceError, ScanPoint,
};
use oamepr::optics::{pattern_curve, OpticalConfig, PatternParams, SourceParams};
use oamepr::oracle::{linspace, Plane};
use oamepr::synth::{calibrate_rate_scale, gen_pattern_data, NoiseSpec, SynthModel};
use proptest::prelude::*;

fn truth(theta: f64) -> PatternParams {
    PatternParams::new(OpticalConfig::standard(), SourceParams::default(), theta).unwrap()
}

// rounded expectations, so the only error left is integer rounding
fn noiseless_scan(model: SynthModel, theta: f64, xs: &[f64], peak: f64) -> CoincidenceScan {
    let p = truth(theta);
    let scale = calibrate_rate_scale(model, &p, xs, peak, 30.0).unwrap();
    let values = pattern_curve(model.pattern(), xs, &p);
    let points = xs
        .iter()
        .zip(values)
        .map(|(&x, v)| ScanPoint { x, counts: (30.0 * scale * v).round() as u64, t_accum: 30.0 })
        .collect();
    CoincidenceScan::new(points, model.plane(), Some(theta)).unwrap()
}

#[test]
fn noise_free_interference_recovers_widths() {
    let xs = linspace(-0.03, 0.03, 41);
    for theta in [0.0, PI / 2.0, PI] {
        let scan = noiseless_scan(SynthModel::Interference, theta, &xs, 1e7);
        let fit = fit_pattern(&scan, FitModel::Interference, &FitOptions::default()).unwrap();
        assert!((fit.sigma_p / 3.25 - 1.0).abs() < 1e-3, "theta {theta}: sigma_p {}", fit.sigma_p);
        assert!((fit.sigma_x / 12.0 - 1.0).abs() < 1e-3, "theta {theta}: sigma_x {}", fit.sigma_x);
        assert!(fit.chi2_reduced < 1e-3);
        assert!(fit.x0.abs() < 1e-5);
    }
}

#[test]
fn noise_free_image_recovers_widths() {
    let xs = linspace(-1.5, 1.5, 41);
    let scan = noiseless_scan(SynthModel::Image, 0.0, &xs, 1e7);
    let fit = fit_pattern(&scan, FitModel::Image, &FitOptions::default()).unwrap();
    assert!((fit.sigma_p / 3.25 - 1.0).abs() < 1e-3);
    assert!((fit.sigma_x / 12.0 - 1.0).abs() < 1e-3);
}

#[test]
fn free_theta_is_recovered() {
    let xs = linspace(-0.03, 0.03, 41);
    let scan = noiseless_scan(SynthModel::Interference, PI / 2.0, &xs, 1e7);
    let options = FitOptions { theta: Some(1.2), fit_theta: true, ..FitOptions::default() };
    let fit = fit_pattern(&scan, FitModel::Interference, &options).unwrap();
    assert!((fit.theta - PI / 2.0).abs() < 1e-3, "theta {}", fit.theta);
    assert!(fit.theta_stderr.is_some());
}

#[test]
fn covariance_is_symmetric_psd() {
    let xs = linspace(-0.015, 0.015, 41);
    let p = truth(0.0);
    let scale = calibrate_rate_scale(SynthModel::Interference, &p, &xs, 200.0, 30.0).unwrap();
    let noise = NoiseSpec { seed: 3, background_rate: 0.0, rate_scale: scale };
    let scan = gen_pattern_data(SynthModel::Interference, &p, &xs, 30.0, &noise).unwrap();
    let fit = fit_pattern(&scan, FitModel::Interference, &FitOptions::default()).unwrap();
    let c = nalgebra::Matrix5::from_fn(|i, j| fit.covariance[i][j]);
    assert_eq!(c, c.transpose());
    let eig = c.symmetric_eigen().eigenvalues;
    let top = eig.max();
    assert!(eig.iter().all(|&e| e >= -1e-9 * top), "{eig:?}");
}

#[test]
fn fit_is_deterministic() {
    let xs = linspace(-0.015, 0.015, 41);
    let p = truth(0.0);
    let noise = NoiseSpec { seed: 9, background_rate: 0.1, rate_scale: 50.0 };
    let scan = gen_pattern_data(SynthModel::Interference, &p, &xs, 30.0, &noise).unwrap();
    let a = fit_pattern(&scan, FitModel::Interference, &FitOptions::default()).unwrap();
    let b = fit_pattern(&scan, FitModel::Interference, &FitOptions::default()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn flat_scan_is_degenerate() {
    let points = (0..20).map(|i| ScanPoint { x: i as f64, counts: 50, t_accum: 30.0 }).collect();
    let scan = CoincidenceScan::new(points, Plane::Focal, None).unwrap();
    let err = fit_pattern(&scan, FitModel::Interference, &FitOptions::default()).unwrap_err();
    assert!(matches!(err, InferenceError::DegenerateData(_)));
}

#[test]
fn zero_count_points_are_finite() {
    let mut scan = noiseless_scan(SynthModel::Interference, PI, &linspace(-0.03, 0.03, 41), 400.0);
    scan.points[20].counts = 0;
    let fit = fit_pattern(&scan, FitModel::Interference, &FitOptions::default()).unwrap();
    assert!(fit.sigma_p.is_finite() && fit.chi2_reduced.is_finite());
}

#[test]
fn scan_validation() {
    let few = (0..5).map(|i| ScanPoint { x: i as f64, counts: 1, t_accum: 1.0 }).collect();
    assert!(CoincidenceScan::new(few, Plane::Focal, None).is_err());
    let dup = (0..10).map(|i| ScanPoint { x: (i / 2) as f64, counts: 1, t_accum: 1.0 }).collect();
    assert!(CoincidenceScan::new(dup, Plane::Focal, None).is_err());
}

#[test]
fn headline_witness() {
    let w = epr_witness_from_uncertainties(2.30, 0.059).unwrap();
    assert!((w.product - 0.0184).abs() < 5e-5);
    assert!(w.entangled);
    let v = epr_witness(SQRT_2 * 2.30, 1.0 / (SQRT_2 * 0.059), None).unwrap();
    assert!((v.product - w.product).abs() < 1e-15);
    assert!((v.dp_plus - 2.30).abs() < 1e-12 && (v.dx_minus - 0.059).abs() < 1e-12);
}

#[test]
fn first_oam_row() {
    let w = epr_witness_from_uncertainties(2.8, 0.057).unwrap();
    assert!((w.product - 0.025_47).abs() < 1e-5);
    assert!((w.product - 0.0257).abs() <= 5e-4);
}

#[test]
fn witness_stderr_matches_finite_differences() {
    let (sp, sx) = (3.25, 12.0);
    let cov = [[0.01, 0.002], [0.002, 0.04]];
    let w = epr_witness(sp, sx, Some(cov)).unwrap();
    let h = 1e-6;
    let f = |a: f64, b: f64| epr_witness(a, b, None).unwrap().product;
    let gp = (f(sp + h, sx) - f(sp - h, sx)) / (2.0 * h);
    let gx = (f(sp, sx + h) - f(sp, sx - h)) / (2.0 * h);
    let var = gp * gp * cov[0][0] + 2.0 * gp * gx * cov[0][1] + gx * gx * cov[1][1];
    assert!((w.product_stderr.unwrap() / var.sqrt() - 1.0).abs() < 1e-6);
}

#[test]
fn dimension_examples() {
    let d = estimate_dimensions(3.253, 11.98, 100, None).unwrap();
    assert!((d.d_epr - 54.3).abs() < 0.05 && (d.d_epr - 54.6).abs() <= 1.0);
    assert_eq!(d.d_oam, 200);
    assert!(!d.reciprocal);
    let unit = estimate_dimensions(4.0, 2.0, 0, None).unwrap();
    assert!((unit.d_epr - 1.0).abs() < 1e-15);
    assert!(((54.6 * 200.0) / 1.08e4 - 1.0_f64).abs() <= 0.02);
}

proptest! {
    #[test]
    fn product_times_dimension_is_one(sp in 0.1f64..100.0, sx in 0.1f64..100.0) {
        let w = epr_witness(sp, sx, None).unwrap();
        let d = estimate_dimensions(sp, sx, 1, None).unwrap();
        let expected = if d.reciprocal { (sp / (2.0 * sx)).powi(4) } else { 1.0 };
        prop_assert!((w.product * d.d_epr - expected).abs() <= 1e-12 * expected.max(1.0));
    }

    #[test]
    fn witness_is_monotone(sp in 0.1f64..100.0, sx in 0.1f64..100.0) {
        let f = |a: f64, b: f64| epr_witness(a, b, None).unwrap().product;
        let h = 1e-6;
        prop_assert!(f(sp * (1.0 + h), sx) > f(sp, sx));
        prop_assert!(f(sp, sx * (1.0 + h)) < f(sp, sx));
    }

    #[test]
    fn verdict_matches_bound(sp in 0.1f64..100.0, sx in 0.1f64..100.0) {
        let w = epr_witness(sp, sx, None).unwrap();
        prop_assert_eq!(w.entangled, w.product < w.bound);
        prop_assert!(w.dp_plus > 0.0 && w.dx_minus > 0.0);
    }
}
