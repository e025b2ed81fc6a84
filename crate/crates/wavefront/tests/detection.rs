use std::f64::consts::PI;

use num_complex::Complex64;
use wavefront::detect::detect_wf_detailed;
use wavefront::detect::{compare_sets, compare_wf, detect_from_magnitude, detect_wf, profiles_csv, Trust};
use wavefront::synth::{chirp, constant, hermite};
use wavefront::verify::bump_train;
use wavefront::{make_grid, stft, ConeSet, DetectConfig, Error, GridSpec};

fn grid() -> GridSpec {
    make_grid(16.0, 512, 1).unwrap()
}

fn angles(c: &ConeSet) -> Vec<f64> {
    c.directions.iter().map(|d| d.angle()).collect()
}

#[test]
fn compare_examples() {
    let one = ConeSet::from_angles(&[0.0], 0.05);
    let m = compare_sets(&one, &one, 0.1);
    assert!(m.pass && m.detected_to_expected == 0.0 && m.expected_to_detected == 0.0);
    let m = compare_sets(&ConeSet::empty(0.05), &one, 0.1);
    assert!(!m.pass && m.expected_to_detected == f64::INFINITY);
    let m = compare_sets(&ConeSet::from_angles(&[0.0, PI / 2.0], 0.05), &one, 0.1);
    assert!(!m.pass && (m.detected_to_expected - PI / 2.0).abs() < 1e-12);
}

#[test]
fn schwartz_signals_are_regular_and_constants_are_not() {
    let cfg = DetectConfig::for_grid(&grid());
    for k in 0..=2 {
        let r = detect_wf(&hermite(grid(), k).unwrap(), &cfg).unwrap();
        assert!(r.is_empty(), "h{k}");
        assert!(r.directions.iter().all(|d| d.eps_hat >= cfg.eps_min));
    }
    let c = detect_wf(&constant(grid()), &cfg).unwrap();
    assert!(compare_wf(&c, &ConeSet::from_angles(&[0.0, PI], cfg.delta), cfg.step()).pass);
    let ch = detect_wf(&chirp(grid(), &[vec![1.0]]).unwrap(), &cfg).unwrap();
    let line = ConeSet::from_angles(&[PI / 4.0, 5.0 * PI / 4.0], cfg.delta);
    assert!(compare_wf(&ch, &line, 2.0 * cfg.step()).pass, "{:?}", angles(&ch.singular()));
}

#[test]
fn single_bump_train_is_isolated() {
    let cfg = DetectConfig::for_grid(&grid());
    let r = detect_wf(&bump_train(grid(), 0.0).unwrap(), &cfg).unwrap();
    assert!(compare_wf(&r, &ConeSet::from_angles(&[0.0], cfg.delta), 2.0 * cfg.step()).pass);
    assert_eq!(r.singular().len(), 1);
    // the raw run is wide, but nothing far from the ray is flagged
    for e in &r.directions {
        if e.omega.dist(&wavefront::Direction::from_angle(0.0)) > PI / 4.0 {
            assert_eq!(e.class, wavefront::Class::Regular, "{:?}", e.omega);
        }
    }
}

#[test]
fn amplitude_scaling_changes_nothing() {
    let cfg = DetectConfig::for_grid(&grid());
    let u = bump_train(grid(), 90.0).unwrap();
    let base = detect_wf(&u, &cfg).unwrap();
    for s in [1e-6, 1e6] {
        let r = detect_wf(&u.scaled(Complex64::new(s, 0.0)), &cfg).unwrap();
        assert_eq!(r.mask(), base.mask());
        assert_eq!(r.singular_arcs.len(), base.singular_arcs.len());
    }
}

#[test]
fn raising_the_threshold_never_shrinks_the_raw_set() {
    let g = grid();
    let base = DetectConfig::for_grid(&g);
    let u = chirp(g, &[vec![1.0]]).unwrap();
    let mag = stft(&u).unwrap().abs();
    let trust = Trust::for_signal(&u, 1.0, base.floor).unwrap();
    let mut prev: Option<Vec<bool>> = None;
    for eps_min in [0.05, 0.1, 0.3, 0.6, 1.0, 3.0] {
        let mut cfg = base.clone();
        cfg.eps_min = eps_min;
        let mask = detect_from_magnitude(&g, &mag, &cfg, &trust).report.mask();
        if let Some(p) = &prev {
            assert!(p.iter().zip(&mask).all(|(a, b)| !a || *b));
        }
        prev = Some(mask);
    }
}

#[test]
fn radius_beyond_extent_is_rejected() {
    let g = grid();
    let mut cfg = DetectConfig::for_grid(&g);
    *cfg.radii.last_mut().unwrap() = 40.0;
    assert!(matches!(detect_wf(&constant(g), &cfg), Err(Error::RadiusBeyondExtent { .. })));
}

#[test]
fn profile_csv_has_one_row_per_radius() {
    let g = grid();
    let cfg = DetectConfig::for_grid(&g);
    let d = detect_wf_detailed(&hermite(g, 0).unwrap(), &cfg).unwrap();
    let csv = profiles_csv(&d.profiles);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("direction_index,omega0,omega1,r,s,used"));
    assert_eq!(lines.count(), cfg.n_dir * cfg.radii.len());
}
