use num_complex::Complex64;
use proptest::prelude::*;
use wavefront::detect::{compare_wf, detect_wf};
use wavefront::operators::schrodinger_propagate;
use wavefront::report::{classify, Class};
use wavefront::serial::{config_from_json, config_to_json, signal_from_json, signal_to_json};
use wavefront::synth::gaussian;
use wavefront::verify::bump_train;
use wavefront::{make_grid, stft, ConeSet, DetectConfig, Direction, GridSpec, SampledSignal};

fn small() -> GridSpec {
    make_grid(8.0, 64, 1).unwrap()
}

fn signal(g: GridSpec, re: &[f64], im: &[f64]) -> SampledSignal {
    let s = re.iter().zip(im).map(|(a, b)| Complex64::new(*a, *b)).collect();
    SampledSignal::new(g, s, "random").unwrap()
}

fn samples() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (prop::collection::vec(-1.0..1.0f64, 64), prop::collection::vec(-1.0..1.0f64, 64))
}

proptest! {
    #[test]
    fn signal_json_round_trip((re, im) in samples()) {
        let u = signal(small(), &re, &im);
        let back = signal_from_json(&signal_to_json(&u)).unwrap();
        prop_assert_eq!(back.samples, u.samples);
        prop_assert!(back.grid.same_as(&u.grid));
    }

    #[test]
    fn config_json_round_trip(eps in 0.01..2.0f64, res in 0.1..5.0f64, n_dir in 8usize..720) {
        let mut c = DetectConfig::for_grid(&small());
        c.eps_min = eps;
        c.residual_max = res;
        c.n_dir = n_dir;
        prop_assert_eq!(config_from_json(&config_to_json(&c)).unwrap(), c);
    }

    #[test]
    fn stft_is_linear((re, im) in samples(), (re2, im2) in samples(), a in -2.0..2.0f64, b in -2.0..2.0f64) {
        let g = small();
        let (u, v) = (signal(g, &re, &im), signal(g, &re2, &im2));
        let c = Complex64::new(a, b);
        let w = SampledSignal::new(g, u.samples.iter().zip(&v.samples).map(|(x, y)| c * x + y).collect(), "sum").unwrap();
        let (fu, fv, fw) = (stft(&u).unwrap(), stft(&v).unwrap(), stft(&w).unwrap());
        let scale = fw.values.iter().map(|z| z.norm()).fold(1.0, f64::max);
        for i in 0..fw.values.len() {
            prop_assert!((fw.values[i] - (c * fu.values[i] + fv.values[i])).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn wrap_lands_in_the_box(x in -100.0..100.0f64) {
        let g = small();
        let w = g.wrap(x);
        prop_assert!(w >= -g.l && w < g.l);
        prop_assert!(((x - w) / (2.0 * g.l)).fract().abs() < 1e-9 || ((x - w) / (2.0 * g.l)).fract().abs() > 1.0 - 1e-9);
    }

    #[test]
    fn lattice_index_inverts_y(i in 0usize..64) {
        let g = small();
        prop_assert_eq!(g.lattice_index(g.y(i)), Some(i));
    }

    #[test]
    fn classify_is_monotone_in_the_rate(e1 in -2.0..3.0f64, e2 in -2.0..3.0f64, res in 0.0..4.0f64) {
        let c = DetectConfig::for_grid(&small());
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        if classify(lo, res, &c) == Class::Regular {
            prop_assert_eq!(classify(hi, res, &c), Class::Regular);
        }
    }

    #[test]
    fn direction_distance_is_a_metric(a in 0.0..6.3f64, b in 0.0..6.3f64, c in 0.0..6.3f64) {
        let (x, y, z) = (Direction::from_angle(a), Direction::from_angle(b), Direction::from_angle(c));
        prop_assert!(x.dist(&x) < 1e-12);
        prop_assert!((x.dist(&y) - y.dist(&x)).abs() < 1e-12);
        prop_assert!(x.dist(&z) <= x.dist(&y) + y.dist(&z) + 1e-12);
    }

    #[test]
    fn schrodinger_is_unitary(t in -5.0..5.0f64, x0 in -3.0..3.0f64, k in -3.0..3.0f64) {
        let u = gaussian(small(), &[x0], &[k], 1.0).unwrap();
        let v = schrodinger_propagate(&u, t).unwrap();
        prop_assert!((v.l2_norm() / u.l2_norm() - 1.0).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn bump_train_direction_is_recovered(deg in 0.0..360.0f64) {
        let g = make_grid(16.0, 512, 1).unwrap();
        let cfg = DetectConfig::for_grid(&g);
        let r = detect_wf(&bump_train(g, deg).unwrap(), &cfg).unwrap();
        let want = ConeSet::from_angles(&[deg.to_radians()], cfg.delta);
        let m = compare_wf(&r, &want, 2.0 * cfg.step());
        prop_assert!(m.pass, "{deg}: {m:?}");
    }
}
