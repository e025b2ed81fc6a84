//! Conic decay estimation and wave front classification.

mod localize;
mod sphere;

use std::f64::consts::PI;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::config::DetectConfig;
use crate::error::{Error, Result};
use crate::geometry::{hausdorff, ConeSet, Direction};
use crate::grid::GridSpec;
use crate::report::{classify, Class, DirectionEstimate, SingularArc, WaveFrontReport};
use crate::signal::{validate_signal, SampledSignal};
use crate::transform::{stft_field, StftField};
use crate::window::Window;

pub use localize::{close_gaps, localize, runs};

/// Conic suprema of `|V|` along one direction.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayProfile {
    pub omega: Direction,
    /// Radii that kept at least three lattice points.
    pub radii: Vec<f64>,
    pub sups: Vec<f64>,
    pub counts: Vec<usize>,
    pub dropped: Vec<f64>,
    /// Global `max |V|`, the reference for the relative floor.
    pub field_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub eps_hat: f64,
    pub c_hat: f64,
    pub residual: f64,
    pub used: usize,
}

/// Phase-space box outside which boundary truncation may pollute `|V|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trust {
    pub x_margin: f64,
    pub xi_margin: f64,
}

impl Trust {
    pub fn none() -> Trust {
        Trust { x_margin: 0.0, xi_margin: 0.0 }
    }

    /// Margin wide enough for the window tail to bring the boundary
    /// ratio below the floor.
    pub fn for_signal(u: &SampledSignal, sigma: f64, floor: f64) -> Result<Trust> {
        let b = validate_signal(u)?.boundary_ratio;
        if b <= floor {
            return Ok(Trust::none());
        }
        let m = (2.0 * (b / floor).ln()).sqrt() + 1.0;
        Ok(Trust { x_margin: m * sigma, xi_margin: m / sigma })
    }

    fn admits(&self, grid: &GridSpec, x: f64, xi: f64) -> bool {
        x.abs() <= grid.l - self.x_margin && xi.abs() <= grid.xi_max() - self.xi_margin
    }
}

/// Lattice points grouped by shell and sorted by angle.
pub struct ShellIndex {
    radii: Vec<f64>,
    shells: Vec<Vec<(f64, f64)>>,
    field_max: f64,
}

impl ShellIndex {
    pub fn new(grid: &GridSpec, magnitude: &[f64], cfg: &DetectConfig, trust: &Trust) -> ShellIndex {
        let n = grid.n;
        let h = cfg.shell_width;
        let field_max = magnitude.iter().cloned().fold(0.0, f64::max);
        let shells = cfg
            .radii
            .par_iter()
            .map(|&r| {
                let (lo, hi) = (r * (1.0 - h), r * (1.0 + h));
                let mut pts = Vec::new();
                for i in 0..n {
                    let x = grid.y(i);
                    if x.abs() > hi {
                        continue;
                    }
                    for k in 0..n {
                        let xi = grid.xi(k);
                        let rho = x.hypot(xi);
                        if rho >= lo && rho <= hi && trust.admits(grid, x, xi) {
                            pts.push((xi.atan2(x).rem_euclid(2.0 * PI), magnitude[i * n + k]));
                        }
                    }
                }
                pts.sort_by(|a, b| a.0.total_cmp(&b.0));
                pts
            })
            .collect();
        ShellIndex { radii: cfg.radii.clone(), shells, field_max }
    }

    /// Conic suprema around the planar direction at angle `phi`.
    pub fn profile(&self, phi: f64, delta: f64) -> DecayProfile {
        let mut radii = Vec::new();
        let mut sups = Vec::new();
        let mut counts = Vec::new();
        let mut dropped = Vec::new();
        let phi = phi.rem_euclid(2.0 * PI);
        for (r, pts) in self.radii.iter().zip(&self.shells) {
            let (s, c) = cone_max(pts, phi, delta);
            if c >= 3 {
                radii.push(*r);
                sups.push(s);
                counts.push(c);
            } else {
                dropped.push(*r);
            }
        }
        DecayProfile { omega: Direction::from_angle(phi), radii, sups, counts, dropped, field_max: self.field_max }
    }
}

/// Max and count over points with angle in `[phi - delta, phi + delta]` (circular).
fn cone_max(pts: &[(f64, f64)], phi: f64, delta: f64) -> (f64, usize) {
    let mut best = 0.0f64;
    let mut count = 0;
    let mut scan = |lo: f64, hi: f64| {
        let start = pts.partition_point(|p| p.0 < lo);
        for p in &pts[start..] {
            if p.0 > hi {
                break;
            }
            best = best.max(p.1);
            count += 1;
        }
    };
    let (lo, hi) = (phi - delta, phi + delta);
    let tau = 2.0 * PI;
    if lo < 0.0 {
        scan(lo + tau, tau);
        scan(0.0, hi);
    } else if hi >= tau {
        scan(lo, tau);
        scan(0.0, hi - tau);
    } else {
        scan(lo, hi);
    }
    (best, count)
}

/// Decay profile of a precomputed field along `omega` (d = 1).
pub fn ray_profile(f: &StftField, omega: &Direction, cfg: &DetectConfig) -> Result<DecayProfile> {
    if omega.dim() != 2 {
        return Err(Error::param("omega", "planar direction expected"));
    }
    let extent = f.grid.extent();
    if let Some(&r) = cfg.radii.last() {
        if r * (1.0 - cfg.shell_width) > extent {
            return Err(Error::RadiusBeyondExtent { radius: r, extent });
        }
    }
    let idx = ShellIndex::new(&f.grid, &f.abs(), cfg, &Trust::none());
    let p = idx.profile(omega.angle(), cfg.delta);
    if p.radii.is_empty() {
        return Err(Error::ConeUnresolvable);
    }
    Ok(p)
}

/// Least squares of `ln s` on `{1, -r^(1/theta)}`; needs at least two points.
fn least_squares(r: &[f64], s: &[f64], theta: f64) -> (f64, f64, f64) {
    let xs: Vec<f64> = r.iter().map(|r| -r.powf(1.0 / theta)).collect();
    let ys: Vec<f64> = s.iter().map(|s| s.ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let eps = sxy / sxx;
    let c = my - eps * mx;
    let rss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - c - eps * x).powi(2)).sum();
    (eps, c, (rss / m).sqrt())
}

/// Usable points above the floor, or the sentinel when everything beyond `r_1` underflows.
fn usable(p: &DecayProfile, floor: f64) -> std::result::Result<(Vec<f64>, Vec<f64>), DecayFit> {
    let thr = floor * p.field_max;
    if p.sups.iter().skip(1).all(|&s| s <= thr) {
        let c_hat = p.sups.first().filter(|&&s| s > thr).map(|s| s.ln()).unwrap_or(thr.max(f64::MIN_POSITIVE).ln());
        return Err(DecayFit { eps_hat: f64::INFINITY, c_hat, residual: 0.0, used: 0 });
    }
    let (r, s): (Vec<f64>, Vec<f64>) =
        p.radii.iter().zip(&p.sups).filter(|(_, &s)| s > thr).map(|(r, s)| (*r, *s)).unzip();
    Ok((r, s))
}

/// Fits `s(r) = C exp(-eps r^(1/theta))`.
pub fn fit_decay(p: &DecayProfile, cfg: &DetectConfig) -> Result<DecayFit> {
    let (r, s) = match usable(p, cfg.floor) {
        Ok(v) => v,
        Err(sentinel) => return Ok(sentinel),
    };
    if r.len() < 4 {
        return Err(Error::InsufficientSpan { usable: r.len() });
    }
    let (eps, c, res) = least_squares(&r, &s, cfg.theta);
    Ok(DecayFit { eps_hat: eps, c_hat: c, residual: res, used: r.len() })
}

/// Like `fit_decay`, but fits whatever is usable: two or three points still
/// give a slope, and a lone surviving radius counts as no decay.
fn fit_lenient(p: &DecayProfile, cfg: &DetectConfig) -> DecayFit {
    let (r, s) = match usable(p, cfg.floor) {
        Ok(v) => v,
        Err(sentinel) => return sentinel,
    };
    match r.len() {
        0 => DecayFit { eps_hat: f64::INFINITY, c_hat: 0.0, residual: 0.0, used: 0 },
        1 => DecayFit { eps_hat: 0.0, c_hat: s[0].ln(), residual: 0.0, used: 1 },
        _ => {
            let (eps, c, res) = least_squares(&r, &s, cfg.theta);
            DecayFit { eps_hat: eps, c_hat: c, residual: res, used: r.len() }
        }
    }
}

/// Report plus the profiles it was computed from.
#[derive(Debug, Clone)]
pub struct Detection {
    pub report: WaveFrontReport,
    pub profiles: Vec<DecayProfile>,
}

/// Classifies every direction of the configured grid.
pub fn detect_wf(u: &SampledSignal, cfg: &DetectConfig) -> Result<WaveFrontReport> {
    Ok(detect_wf_detailed(u, cfg)?.report)
}

pub fn detect_wf_detailed(u: &SampledSignal, cfg: &DetectConfig) -> Result<Detection> {
    cfg.check_grid(&u.grid)?;
    let window = Window::from_kind(u.grid, cfg.window)?;
    let sigma = cfg.window.sigma().unwrap_or(1.0);
    let trust = Trust::for_signal(u, sigma, cfg.floor)?;
    match u.grid.d {
        1 => {
            let f = stft_field(u, &window)?;
            Ok(detect_from_magnitude(&u.grid, &f.abs(), cfg, &trust))
        }
        _ => sphere::detect_2d(u, &window, cfg, &trust),
    }
}

/// Detection on a precomputed `|V|` lattice (d = 1).
pub fn detect_from_magnitude(grid: &GridSpec, magnitude: &[f64], cfg: &DetectConfig, trust: &Trust) -> Detection {
    let idx = ShellIndex::new(grid, magnitude, cfg, trust);
    let step = cfg.step();
    let profiles: Vec<DecayProfile> =
        (0..cfg.n_dir).into_par_iter().map(|d| idx.profile(d as f64 * step, cfg.delta)).collect();
    let fits: Vec<DecayFit> = profiles.iter().map(|p| fit_lenient(p, cfg)).collect();
    let report = assemble_planar(cfg, &profiles, &fits);
    Detection { report, profiles }
}

fn estimates(cfg: &DetectConfig, profiles: &[DecayProfile], fits: &[DecayFit]) -> Vec<DirectionEstimate> {
    profiles
        .iter()
        .zip(fits)
        .map(|(p, f)| DirectionEstimate {
            omega: p.omega.clone(),
            eps_hat: f.eps_hat,
            c_hat: f.c_hat,
            residual: f.residual,
            class: classify(f.eps_hat, f.residual, cfg),
        })
        .collect()
}

fn assemble_planar(cfg: &DetectConfig, profiles: &[DecayProfile], fits: &[DecayFit]) -> WaveFrontReport {
    let directions = estimates(cfg, profiles, fits);
    let eps: Vec<f64> = directions.iter().map(|e| e.eps_hat).collect();
    let sing: Vec<bool> = directions.iter().map(|e| e.class == Class::Singular).collect();
    let step = cfg.step();
    let singular_arcs = localize(&eps, &sing, cfg.delta / step)
        .into_iter()
        .map(|(lo, hi)| SingularArc::Planar { start: lo * step, end: hi * step })
        .collect();
    WaveFrontReport { config: cfg.clone(), d: 1, directions, singular_arcs }
}

/// One-sided Hausdorff distances against an expected set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchResult {
    pub detected_to_expected: f64,
    pub expected_to_detected: f64,
    pub tol: f64,
    pub pass: bool,
}

pub fn compare_sets(detected: &ConeSet, expected: &ConeSet, tol: f64) -> MatchResult {
    let (a, b) = hausdorff(detected, expected);
    MatchResult { detected_to_expected: a, expected_to_detected: b, tol, pass: a <= tol + 1e-12 && b <= tol + 1e-12 }
}

pub fn compare_wf(r: &WaveFrontReport, expected: &ConeSet, tol: f64) -> MatchResult {
    compare_sets(&r.singular(), expected, tol)
}

/// CSV dump of decay profiles.
pub fn profiles_csv(profiles: &[DecayProfile]) -> String {
    let mut out = String::new();
    let dim = profiles.first().map(|p| p.omega.dim()).unwrap_or(2);
    out.push_str("direction_index");
    for i in 0..dim {
        let _ = write!(out, ",omega{i}");
    }
    out.push_str(",r,s,used\n");
    for (i, p) in profiles.iter().enumerate() {
        let thr = p.field_max * crate::config::FLOOR;
        let rows = p.radii.iter().zip(&p.sups).map(|(r, s)| (*r, *s, *s > thr));
        let dropped = p.dropped.iter().map(|r| (*r, f64::NAN, false));
        for (r, s, used) in rows.chain(dropped) {
            let _ = write!(out, "{i}");
            for w in p.omega.omega() {
                let _ = write!(out, ",{w}");
            }
            let _ = writeln!(out, ",{r},{s},{}", used as u8);
        }
    }
    out
}
