use std::f64::consts::PI;
use std::time::Instant;

use oamepr::optics::{
    image_pattern, interference_pattern, mz_pattern, Channel, OpticalConfig, PatternParams, PhaseObject, SourceParams,
};
use oamepr::oracle::{
    channel_relative_l2, focal_scale, image_scale, linspace, oracle_pattern, relative_l2, FocalOracle, OracleGrid,
    Plane,
};

fn setup(theta: f64) -> (OpticalConfig, SourceParams, PhaseObject, PatternParams) {
    let cfg = OpticalConfig::standard();
    let src = SourceParams::default();
    let obj = PhaseObject::from_config(&cfg, theta);
    let p = PatternParams::new(cfg, src, theta).unwrap();
    (cfg, src, obj, p)
}

#[test]
fn focal_plane_matches_closed_form() {
    let xs = linspace(-1.5, 1.5, 201);
    let (cfg, src, _, _) = setup(0.0);
    let t0 = Instant::now();
    let oracle = FocalOracle::new(&cfg, &src, &OracleGrid::focal()).unwrap();
    for theta in [0.0, PI / 2.0, -PI / 2.0, PI] {
        let (_, _, obj, p) = setup(theta);
        let scale = focal_scale(&src);
        let closed: Vec<f64> = xs.iter().map(|&x| scale * interference_pattern(x, &p)).collect();
        let o = oracle.pattern(&obj, None, &xs).unwrap();
        let err = relative_l2(&closed, &o.values);
        eprintln!("theta={theta:.3} err={err:.3e} est={:.3e}", o.estimated_error);
        assert!(err <= 1e-3);
        let h = oracle.pattern(&obj, Some(Channel::H), &xs).unwrap().values;
        let v = oracle.pattern(&obj, Some(Channel::V), &xs).unwrap().values;
        let unsplit: Vec<f64> = h.iter().zip(&v).map(|(a, b)| a + b).collect();
        for (ch, o) in [(Channel::H, &h), (Channel::V, &v)] {
            let closed: Vec<f64> = xs.iter().map(|&x| scale * mz_pattern(x, &p, ch)).collect();
            let err = channel_relative_l2(&closed, o, &unsplit);
            eprintln!("  {ch:?} err={err:.3e}");
            assert!(err <= 1e-3);
        }
    }
    eprintln!("elapsed {:?}", t0.elapsed());
}

#[test]
fn image_plane_matches_closed_form() {
    let xs = linspace(-1.5, 1.5, 201);
    for theta in [0.0, PI / 2.0, -PI / 2.0, PI] {
        let (cfg, src, obj, p) = setup(theta);
        let scale = image_scale(&src);
        let closed: Vec<f64> = xs.iter().map(|&x| scale * image_pattern(x, &p)).collect();
        let o = oracle_pattern(&cfg, &src, &obj, Plane::Image, None, &xs, &OracleGrid::image()).unwrap();
        let err = relative_l2(&closed, &o.values);
        eprintln!("image theta={theta:.3} err={err:.3e} est={:.3e}", o.estimated_error);
        assert!(err <= 1e-3);
    }
}
