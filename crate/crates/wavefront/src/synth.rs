//! Test signals with closed-form transforms.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::signal::SampledSignal;

/// Generator recipe, stored verbatim in the signal provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Recipe {
    Gaussian {
        center: Vec<f64>,
        #[serde(rename = "mod")]
        modulation: Vec<f64>,
        #[serde(default = "one")]
        sigma: f64,
    },
    Hermite {
        k: usize,
    },
    Chirp {
        #[serde(rename = "A")]
        a: Vec<Vec<f64>>,
    },
    Constant,
    PrescribedWf {
        dirs: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k_max: Option<usize>,
    },
}

fn one() -> f64 {
    1.0
}

impl Recipe {
    pub fn build(&self, grid: GridSpec) -> Result<SampledSignal> {
        let s = match self {
            Recipe::Gaussian { center, modulation, sigma } => gaussian(grid, center, modulation, *sigma)?,
            Recipe::Hermite { k } => hermite(grid, *k)?,
            Recipe::Chirp { a } => chirp(grid, a)?,
            Recipe::Constant => constant(grid),
            Recipe::PrescribedWf { dirs, k_max } => {
                prescribed_wf(grid, &PrescribedWf::new(dirs.clone(), *k_max, &grid)?)?
            }
        };
        let step = serde_json::to_value(self).expect("recipe serializes");
        Ok(SampledSignal { provenance: vec![step], ..s })
    }
}

fn check_len(name: &'static str, v: &[f64], d: usize) -> Result<()> {
    if v.len() != d {
        return Err(Error::param(name, format!("expected {d} components, got {}", v.len())));
    }
    Ok(())
}

/// Row-major samples of `f` over the grid.
fn sample(grid: GridSpec, f: impl Fn(&[f64]) -> Complex64) -> Vec<Complex64> {
    let ys = grid.coords();
    match grid.d {
        1 => ys.iter().map(|&y| f(&[y])).collect(),
        _ => ys.iter().flat_map(|&a| ys.iter().map(move |&b| (a, b))).map(|(a, b)| f(&[a, b])).collect(),
    }
}

/// `exp(-|x - a|^2 / (2 sigma^2)) exp(i <b, x>)`.
pub fn gaussian(grid: GridSpec, a: &[f64], b: &[f64], sigma: f64) -> Result<SampledSignal> {
    check_len("center", a, grid.d)?;
    check_len("mod", b, grid.d)?;
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::param("sigma", format!("must be positive, got {sigma}")));
    }
    if a.iter().any(|&c| !(c.abs() <= grid.l)) {
        return Err(Error::OutsideGrid);
    }
    let s2 = 2.0 * sigma * sigma;
    let samples = sample(grid, |y| {
        let r2: f64 = y.iter().zip(a).map(|(y, a)| (y - a) * (y - a)).sum();
        let ph: f64 = y.iter().zip(b).map(|(y, b)| y * b).sum();
        Complex64::from_polar((-r2 / s2).exp(), ph)
    });
    SampledSignal::new(grid, samples, "gaussian")
}

/// L2-normalized Hermite function `h_k` (d = 1).
pub fn hermite(grid: GridSpec, k: usize) -> Result<SampledSignal> {
    if grid.d != 1 {
        return Err(Error::param("d", "hermite functions are generated in d = 1"));
    }
    // h_k lives on |x| <~ sqrt(2k+1) with a Gaussian tail of width ~ 8.5
    let reach = (2.0 * k as f64 + 1.0).sqrt() + 8.5;
    if k > 8 || reach > grid.extent() {
        return Err(Error::HermiteTooLarge(k));
    }
    let samples = grid.coords().iter().map(|&y| Complex64::new(hermite_value(k, y), 0.0)).collect();
    Ok(SampledSignal::new(grid, samples, format!("hermite({k})"))?)
}

/// `h_k(y)` by the normalized three-term recurrence.
pub fn hermite_value(k: usize, y: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25) * (-y * y / 2.0).exp();
    for m in 0..k {
        let m = m as f64;
        let next = (2.0 / (m + 1.0)).sqrt() * y * cur - (m / (m + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

pub fn check_symmetric(a: &[Vec<f64>], d: usize) -> Result<()> {
    if a.len() != d || a.iter().any(|r| r.len() != d) {
        return Err(Error::param("A", format!("expected a {d}x{d} matrix")));
    }
    for i in 0..d {
        for j in 0..d {
            if (a[i][j] - a[j][i]).abs() > 1e-12 * (1.0 + a[i][j].abs()) {
                return Err(Error::NotSymmetric);
            }
        }
    }
    Ok(())
}

/// `exp(i <A x, x> / 2)`.
pub fn chirp(grid: GridSpec, a: &[Vec<f64>]) -> Result<SampledSignal> {
    check_symmetric(a, grid.d)?;
    let samples = sample(grid, |y| {
        let mut q = 0.0;
        for (i, row) in a.iter().enumerate() {
            for (j, aij) in row.iter().enumerate() {
                q += aij * y[i] * y[j];
            }
        }
        Complex64::from_polar(1.0, q / 2.0)
    });
    SampledSignal::new(grid, samples, "chirp")
}

pub fn constant(grid: GridSpec) -> SampledSignal {
    SampledSignal {
        grid,
        samples: vec![Complex64::new(1.0, 0.0); grid.len()],
        label: "constant".into(),
        provenance: Vec::new(),
    }
}

/// Largest `k` with `k^2 <= 0.9 * min(L, xi_max)`.
pub fn default_k_max(grid: &GridSpec) -> usize {
    (0.9 * grid.extent()).sqrt().floor() as usize
}

/// Bump-train construction along finitely many phase-space directions.
#[derive(Debug, Clone, PartialEq)]
pub struct PrescribedWf {
    /// Unit vectors `(y_j, eta_j)` in phase space.
    pub directions: Vec<Vec<f64>>,
    pub k_max: usize,
}

impl PrescribedWf {
    /// Normalizes the directions and checks the bump reach against the grid.
    pub fn new(dirs: Vec<Vec<f64>>, k_max: Option<usize>, grid: &GridSpec) -> Result<PrescribedWf> {
        if dirs.is_empty() {
            return Err(Error::param("dirs", "at least one direction is required"));
        }
        let mut directions = Vec::with_capacity(dirs.len());
        for v in dirs {
            check_len("dirs", &v, 2 * grid.d)?;
            let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            if !(n > 0.0 && n.is_finite()) {
                return Err(Error::param("dirs", "zero direction"));
            }
            let u: Vec<f64> = v.iter().map(|a| a / n).collect();
            if directions.iter().any(|w: &Vec<f64>| w.iter().zip(&u).all(|(a, b)| (a - b).abs() < 1e-12)) {
                return Err(Error::param("dirs", "directions must be pairwise distinct"));
            }
            directions.push(u);
        }
        let k_max = k_max.unwrap_or_else(|| default_k_max(grid));
        if k_max == 0 {
            return Err(Error::param("k_max", "must be at least 1"));
        }
        if (k_max * k_max) as f64 > 1.2 * grid.extent() {
            return Err(Error::param(
                "k_max",
                format!("k_max^2 = {} exceeds 1.2 x extent {}", k_max * k_max, grid.extent()),
            ));
        }
        Ok(PrescribedWf { directions, k_max })
    }

    /// Bump centers `(k^2 y_j, k^2 eta_j)` with their weights, off-grid bumps dropped.
    pub fn bumps(&self, grid: &GridSpec) -> Vec<(Vec<f64>, f64)> {
        let d = grid.d;
        let mut out = Vec::new();
        for (j, dir) in self.directions.iter().enumerate() {
            let w = 0.5f64.powi(j as i32 + 1);
            for k in 1..=self.k_max {
                let c: Vec<f64> = dir.iter().map(|v| v * (k * k) as f64).collect();
                let inside = c[..d].iter().all(|x| x.abs() <= grid.l) && c[d..].iter().all(|x| x.abs() < grid.xi_max());
                if inside {
                    out.push((c, w));
                }
            }
        }
        out
    }
}

/// `sum_j 2^{-j} sum_k exp(-|x - k^2 y_j|^2/2) exp(i k^2 <eta_j, x>)`.
pub fn prescribed_wf(grid: GridSpec, p: &PrescribedWf) -> Result<SampledSignal> {
    let d = grid.d;
    let bumps = p.bumps(&grid);
    let samples = sample(grid, |y| {
        bumps
            .iter()
            .map(|(c, w)| {
                let r2: f64 = y.iter().zip(&c[..d]).map(|(y, a)| (y - a) * (y - a)).sum();
                let ph: f64 = y.iter().zip(&c[d..]).map(|(y, b)| y * b).sum();
                Complex64::from_polar(w * (-r2 / 2.0).exp(), ph)
            })
            .sum()
    });
    SampledSignal::new(grid, samples, "prescribed-wf")
}

/// Signal families with exact standard-window transforms.
#[derive(Debug, Clone, PartialEq)]
pub enum OracleKind {
    Gaussian {
        center: Vec<f64>,
        modulation: Vec<f64>,
        sigma: f64,
    },
    Constant {
        d: usize,
    },
    /// One bump-train term `exp(-|x - k^2 y|^2/2) exp(i k^2 <eta, x>)`.
    BumpTerm {
        y: Vec<f64>,
        eta: Vec<f64>,
        k: usize,
    },
}

/// `V_psi` of `exp(-(y-a)^2 s /2) exp(i b y)` in one variable, `s = 1/sigma^2` (0 for constants).
fn oracle_1d(a: f64, s: f64, b: f64, x: f64, xi: f64) -> Complex64 {
    let big_a = (s + 1.0) / 2.0;
    let big_b = Complex64::new(a * s + x, b - xi);
    let c = (a * a * s + x * x) / 2.0;
    let integral = (PI / big_a).sqrt() * (big_b * big_b / (4.0 * big_a) - c).exp();
    integral * (2.0 * PI).powf(-0.5) * PI.powf(-0.25)
}

/// Exact `V_psi u` at a phase-space point `(x..., xi...)`.
pub fn oracle_stft(kind: &OracleKind, point: &[f64]) -> Result<Complex64> {
    let (centers, mods, s): (Vec<f64>, Vec<f64>, f64) = match kind {
        OracleKind::Gaussian { center, modulation, sigma } => {
            if center.len() != modulation.len() || !(*sigma > 0.0) {
                return Err(Error::param("kind", "inconsistent gaussian parameters"));
            }
            (center.clone(), modulation.clone(), 1.0 / (sigma * sigma))
        }
        OracleKind::Constant { d } => (vec![0.0; *d], vec![0.0; *d], 0.0),
        OracleKind::BumpTerm { y, eta, k } => {
            let k2 = (k * k) as f64;
            (y.iter().map(|v| v * k2).collect(), eta.iter().map(|v| v * k2).collect(), 1.0)
        }
    };
    let d = centers.len();
    if d == 0 || d > 2 || point.len() != 2 * d {
        return Err(Error::param("point", format!("expected {} coordinates", 2 * d)));
    }
    Ok((0..d).map(|i| oracle_1d(centers[i], s, mods[i], point[i], point[d + i])).product())
}
