//! d = 2 backend: shell samples by direct quadrature instead of a full field.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{estimates, fit_lenient, DecayProfile, Detection, Trust};
use crate::config::DetectConfig;
use crate::error::Result;
use crate::geometry::sphere3_points;
use crate::report::{Class, SingularArc, WaveFrontReport};
use crate::signal::SampledSignal;
use crate::transform::stft_direct;
use crate::window::Window;

/// Shell samples per (direction, radius).
pub const SHELL_SAMPLES: usize = 64;

/// Quasi-random points in the cone of half-aperture `delta` around `omega`,
/// radially within `r (1 +- h)`. The first point is on the axis.
fn shell_points(omega: &[f64], r: f64, h: f64, delta: f64, seed: u64) -> Vec<[f64; 4]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(SHELL_SAMPLES);
    out.push([omega[0] * r, omega[1] * r, omega[2] * r, omega[3] * r]);
    while out.len() < SHELL_SAMPLES {
        // tangent direction: random vector with the omega component removed
        let mut v = [0.0; 4];
        for c in v.iter_mut() {
            *c = rng.gen::<f64>() * 2.0 - 1.0;
        }
        let dot: f64 = v.iter().zip(omega).map(|(a, b)| a * b).sum();
        for (c, o) in v.iter_mut().zip(omega) {
            *c -= dot * o;
        }
        let nv = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if nv < 1e-6 {
            continue;
        }
        let t = delta * rng.gen::<f64>().cbrt();
        let rho = r * (1.0 + h * (2.0 * rng.gen::<f64>() - 1.0));
        let mut p = [0.0; 4];
        for i in 0..4 {
            p[i] = rho * (t.cos() * omega[i] + t.sin() * v[i] / nv);
        }
        out.push(p);
    }
    out
}

pub(super) fn detect_2d(u: &SampledSignal, g: &Window, cfg: &DetectConfig, trust: &Trust) -> Result<Detection> {
    let grid = u.grid;
    let dirs = sphere3_points(cfg.n_dir);
    let m = cfg.radii.len();
    let mut points: Vec<Vec<f64>> = vec![vec![0.0; 4]];
    let mut owner = Vec::new();
    for (di, d) in dirs.iter().enumerate() {
        for (ri, &r) in cfg.radii.iter().enumerate() {
            let seed = (di * m + ri) as u64;
            for p in shell_points(d.omega(), r, cfg.shell_width, cfg.delta, seed) {
                let inside = p[..2].iter().all(|x| x.abs() <= grid.l - trust.x_margin)
                    && p[2..].iter().all(|x| x.abs() <= grid.xi_max() - trust.xi_margin);
                if inside {
                    points.push(p.to_vec());
                    owner.push((di, ri));
                }
            }
        }
    }
    let values = stft_direct(u, g, &points)?;
    let mags: Vec<f64> = values.iter().map(|v| v.norm()).collect();
    let field_max = mags.iter().cloned().fold(0.0, f64::max);
    let mut sups = vec![vec![0.0f64; m]; dirs.len()];
    let mut counts = vec![vec![0usize; m]; dirs.len()];
    for (&(di, ri), &a) in owner.iter().zip(&mags[1..]) {
        sups[di][ri] = sups[di][ri].max(a);
        counts[di][ri] += 1;
    }
    let profiles: Vec<DecayProfile> = dirs
        .iter()
        .enumerate()
        .map(|(di, d)| {
            let mut p = DecayProfile {
                omega: d.clone(),
                radii: Vec::new(),
                sups: Vec::new(),
                counts: Vec::new(),
                dropped: Vec::new(),
                field_max,
            };
            for ri in 0..m {
                if counts[di][ri] >= 3 {
                    p.radii.push(cfg.radii[ri]);
                    p.sups.push(sups[di][ri]);
                    p.counts.push(counts[di][ri]);
                } else {
                    p.dropped.push(cfg.radii[ri]);
                }
            }
            p
        })
        .collect();
    let fits: Vec<_> = profiles.iter().map(|p| fit_lenient(p, cfg)).collect();
    let directions = estimates(cfg, &profiles, &fits);
    let singular_arcs = directions
        .iter()
        .filter(|e| e.class == Class::Singular)
        .map(|e| SingularArc::Point { omega: e.omega.clone() })
        .collect();
    let report = WaveFrontReport { config: cfg.clone(), d: 2, directions, singular_arcs };
    Ok(Detection { report, profiles })
}
