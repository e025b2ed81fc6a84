//! Operators acting on sampled signals and their phase-space maps.
//!
//! Fourier transform, chirp multiplication, dilation, conjugation and the
//! free Schrödinger flow transport the wave front set by linear maps of
//! phase space; [`wf_map`] applies those maps to cone sets.

mod localization;
mod polyop;
mod products;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::fft::CenteredDft;
use crate::geometry::{ConeSet, Direction};
use crate::signal::SampledSignal;
use crate::synth::{check_symmetric, Recipe};

pub use localization::{
    convolution_bound, localization_apply, regularize, window_change_bound, BoundCheck, LocalizationSymbol,
    SymbolRecipe, GROWTH_EPS,
};
pub use polyop::{apply_polyop, char_set, PolyOperator, Term, CHAR_TAU};
pub use products::{convolve, pointwise_product, product_cone, tensor, ProductCone};

/// Linear symplectic generator with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SymplecticMapSpec {
    Fourier,
    Chirp {
        #[serde(rename = "A")]
        a: Vec<Vec<f64>>,
    },
    Dilation {
        #[serde(rename = "A")]
        a: Vec<Vec<f64>>,
    },
    Conjugation,
    Schrodinger {
        t: f64,
    },
}

impl SymplecticMapSpec {
    pub fn validate(&self, d: usize) -> Result<()> {
        match self {
            SymplecticMapSpec::Chirp { a } => check_symmetric(a, d),
            SymplecticMapSpec::Dilation { a } => invert(a, d).map(|_| ()),
            SymplecticMapSpec::Schrodinger { t } if !t.is_finite() => Err(Error::param("t", "must be finite")),
            _ => Ok(()),
        }
    }

    /// Matrix of the phase-space map on `(x_1..x_d, xi_1..xi_d)`.
    pub fn matrix(&self, d: usize) -> Result<Vec<Vec<f64>>> {
        self.validate(d)?;
        let mut m = vec![vec![0.0; 2 * d]; 2 * d];
        for i in 0..d {
            match self {
                SymplecticMapSpec::Fourier => {
                    m[i][d + i] = 1.0;
                    m[d + i][i] = -1.0;
                }
                SymplecticMapSpec::Chirp { a } => {
                    m[i][i] = 1.0;
                    m[d + i][d + i] = 1.0;
                    for j in 0..d {
                        m[d + i][j] = a[i][j];
                    }
                }
                SymplecticMapSpec::Dilation { a } => {
                    let inv = invert(a, d)?;
                    for j in 0..d {
                        m[i][j] = inv[i][j];
                        m[d + i][d + j] = a[j][i];
                    }
                }
                SymplecticMapSpec::Conjugation => {
                    m[i][i] = 1.0;
                    m[d + i][d + i] = -1.0;
                }
                SymplecticMapSpec::Schrodinger { t } => {
                    m[i][i] = 1.0;
                    m[i][d + i] = *t;
                    m[d + i][d + i] = 1.0;
                }
            }
        }
        Ok(m)
    }

    pub fn apply(&self, u: &SampledSignal) -> Result<SampledSignal> {
        match self {
            SymplecticMapSpec::Fourier => fourier(u),
            SymplecticMapSpec::Chirp { a } => chirp_multiply(u, a),
            SymplecticMapSpec::Dilation { a } => dilate(u, a),
            SymplecticMapSpec::Conjugation => Ok(conjugate(u)),
            SymplecticMapSpec::Schrodinger { t } => schrodinger_propagate(u, *t),
        }
    }
}

fn invert(a: &[Vec<f64>], d: usize) -> Result<Vec<Vec<f64>>> {
    if a.len() != d || a.iter().any(|r| r.len() != d) {
        return Err(Error::param("A", format!("expected a {d}x{d} matrix")));
    }
    let det = if d == 1 { a[0][0] } else { a[0][0] * a[1][1] - a[0][1] * a[1][0] };
    if det.abs() < 1e-12 || !det.is_finite() {
        return Err(Error::param("A", "matrix is singular"));
    }
    Ok(if d == 1 {
        vec![vec![1.0 / det]]
    } else {
        vec![vec![a[1][1] / det, -a[0][1] / det], vec![-a[1][0] / det, a[0][0] / det]]
    })
}

/// Unitary Fourier transform onto the dual grid (`L' = xi_max`).
///
/// `u^(xi_k) = (2 pi)^{-d/2} sum_j u_j exp(-i <xi_k, y_j>) dy^d`. The dual of
/// the dual grid is the original one, so four applications return the input.
pub fn fourier(u: &SampledSignal) -> Result<SampledSignal> {
    let grid = u.grid;
    let d = grid.d;
    let dft = CenteredDft::new(grid.n);
    let mut buf = u.samples.clone();
    if d == 1 {
        dft.forward(&mut buf);
    } else {
        dft.forward_2d(&mut buf);
    }
    let scale = ((2.0 * PI).powf(-0.5) * grid.delta()).powi(d as i32);
    for v in buf.iter_mut() {
        *v *= scale;
    }
    let mut out = u.derive(buf, json!({"op": "fourier"}));
    out.grid = grid.dual();
    Ok(out)
}

/// Applies the Fourier multiplier `m(xi)` on the same grid.
pub(crate) fn fourier_multiplier(u: &SampledSignal, m: impl Fn(&[f64]) -> Complex64) -> Vec<Complex64> {
    let grid = u.grid;
    let n = grid.n;
    let dft = CenteredDft::new(n);
    let mut buf = u.samples.clone();
    let xs = grid.freqs();
    let inv = 1.0 / (n as f64).powi(grid.d as i32);
    if grid.d == 1 {
        dft.forward(&mut buf);
        for (v, &xi) in buf.iter_mut().zip(&xs) {
            *v *= m(&[xi]) * inv;
        }
        dft.backward(&mut buf);
    } else {
        dft.forward_2d(&mut buf);
        for (idx, v) in buf.iter_mut().enumerate() {
            *v *= m(&[xs[idx / n], xs[idx % n]]) * inv;
        }
        dft.backward_2d(&mut buf);
    }
    buf
}

/// Multiplication by `exp(i <A x, x> / 2)`.
pub fn chirp_multiply(u: &SampledSignal, a: &[Vec<f64>]) -> Result<SampledSignal> {
    let c = crate::synth::chirp(u.grid, a)?;
    let samples = u.samples.iter().zip(&c.samples).map(|(x, y)| x * y).collect();
    Ok(u.derive(samples, json!({"op": "chirp", "A": a})))
}

enum DilationKind {
    Scalar(i64),
    /// `(Ay)_i = sign_i * y_{perm_i}`
    SignedPermutation([usize; 2], [f64; 2]),
}

fn classify_dilation(a: &[Vec<f64>], d: usize) -> Result<DilationKind> {
    invert(a, d)?;
    let c = a[0][0];
    let scalar = (0..d).all(|i| (0..d).all(|j| if i == j { a[i][j] == c } else { a[i][j] == 0.0 }));
    if scalar {
        if c.fract() != 0.0 {
            return Err(Error::UnsupportedDilation(format!(
                "scalar {c} maps lattice points off the grid; only integer factors are supported"
            )));
        }
        return Ok(DilationKind::Scalar(c as i64));
    }
    if d == 2 {
        let mut perm = [0usize; 2];
        let mut sign = [0.0; 2];
        for i in 0..2 {
            let nz: Vec<usize> = (0..2).filter(|&j| a[i][j] != 0.0).collect();
            if nz.len() != 1 || a[i][nz[0]].abs() != 1.0 {
                return Err(Error::UnsupportedDilation("expected c I or a signed permutation".into()));
            }
            perm[i] = nz[0];
            sign[i] = a[i][nz[0]];
        }
        return Ok(DilationKind::SignedPermutation(perm, sign));
    }
    Err(Error::UnsupportedDilation("expected c I or a signed permutation".into()))
}

/// `A* u(y) = sqrt|det A| u(A y)` for `A = c I` (integer `c`) or a signed permutation.
///
/// Lattice points mapped outside the grid read zero for `|c| > 1`; unit
/// factors wrap around periodically so that they stay bijective.
pub fn dilate(u: &SampledSignal, a: &[Vec<f64>]) -> Result<SampledSignal> {
    let grid = u.grid;
    let d = grid.d;
    let n = grid.n as i64;
    let h = n / 2;
    let kind = classify_dilation(a, d)?;
    // lattice index of A y for the sample at index j along one axis
    let index = |j: i64, c: i64| -> Option<usize> {
        let m = h + c * (j - h);
        if c.abs() == 1 {
            Some(m.rem_euclid(n) as usize)
        } else if (0..n).contains(&m) {
            Some(m as usize)
        } else {
            None
        }
    };
    let zero = Complex64::new(0.0, 0.0);
    let samples: Vec<Complex64> = match (&kind, d) {
        (DilationKind::Scalar(c), 1) => {
            let s = (*c as f64).abs().sqrt();
            (0..n).map(|j| index(j, *c).map_or(zero, |m| u.samples[m] * s)).collect()
        }
        (DilationKind::Scalar(c), _) => {
            let s = (*c as f64).abs();
            let nu = n as usize;
            (0..n * n)
                .map(|idx| {
                    let (i, j) = (idx / n, idx % n);
                    match (index(i, *c), index(j, *c)) {
                        (Some(p), Some(q)) => u.samples[p * nu + q] * s,
                        _ => zero,
                    }
                })
                .collect()
        }
        (DilationKind::SignedPermutation(perm, sign), _) => {
            let nu = n as usize;
            (0..n * n)
                .map(|idx| {
                    let ij = [idx / n, idx % n];
                    let p = index(ij[perm[0]], sign[0] as i64).expect("unit factor wraps");
                    let q = index(ij[perm[1]], sign[1] as i64).expect("unit factor wraps");
                    u.samples[p * nu + q]
                })
                .collect()
        }
    };
    Ok(u.derive(samples, json!({"op": "dilate", "A": a})))
}

pub fn conjugate(u: &SampledSignal) -> SampledSignal {
    let samples = u.samples.iter().map(|z| z.conj()).collect();
    u.derive(samples, json!({"op": "conjugate"}))
}

/// Free Schrödinger flow `u(t) = F^{-1}(exp(-i t |xi|^2 / 2) F u)`.
///
/// With this sign the phase-space map is `(x, xi) -> (x + t xi, xi)`.
pub fn schrodinger_propagate(u: &SampledSignal, t: f64) -> Result<SampledSignal> {
    if !t.is_finite() {
        return Err(Error::param("t", "must be finite"));
    }
    let samples = fourier_multiplier(u, |xi| {
        let r2: f64 = xi.iter().map(|v| v * v).sum();
        Complex64::from_polar(1.0, -t * r2 / 2.0)
    });
    Ok(u.derive(samples, json!({"op": "schrodinger", "t": t})))
}

/// Image of a cone set under the phase-space map of `m`, renormalized.
pub fn wf_map(expected: &ConeSet, m: &SymplecticMapSpec) -> Result<ConeSet> {
    let Some(first) = expected.directions.first() else {
        return Ok(expected.clone());
    };
    let d = first.dim() / 2;
    let mat = m.matrix(d)?;
    let directions = expected
        .directions
        .iter()
        .map(|w| {
            let v: Vec<f64> = mat.iter().map(|row| row.iter().zip(w.omega()).map(|(a, b)| a * b).sum()).collect();
            Direction::normalized(&v)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConeSet { directions, aperture: expected.aperture })
}

/// One pipeline step, as read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase", deny_unknown_fields)]
pub enum Op {
    Fourier,
    Chirp {
        #[serde(rename = "A")]
        a: Vec<Vec<f64>>,
    },
    Dilate {
        #[serde(rename = "A")]
        a: Vec<Vec<f64>>,
    },
    Conjugate,
    Schrodinger {
        t: f64,
    },
    Polyop {
        coeffs: Vec<Term>,
    },
    Localize {
        symbol: SymbolRecipe,
    },
    Regularize {
        eps: f64,
    },
    Multiply {
        with: Recipe,
    },
    Convolve {
        with: Recipe,
    },
    Tensor {
        with: Recipe,
    },
}

impl Op {
    /// The symplectic generator behind this step, if any.
    pub fn as_map(&self) -> Option<SymplecticMapSpec> {
        Some(match self {
            Op::Fourier => SymplecticMapSpec::Fourier,
            Op::Chirp { a } => SymplecticMapSpec::Chirp { a: a.clone() },
            Op::Dilate { a } => SymplecticMapSpec::Dilation { a: a.clone() },
            Op::Conjugate => SymplecticMapSpec::Conjugation,
            Op::Schrodinger { t } => SymplecticMapSpec::Schrodinger { t: *t },
            _ => return None,
        })
    }

    pub fn apply(&self, u: &SampledSignal) -> Result<SampledSignal> {
        if let Some(m) = self.as_map() {
            return m.apply(u);
        }
        match self {
            Op::Polyop { coeffs } => apply_polyop(&PolyOperator::new(coeffs.clone())?, u),
            Op::Localize { symbol } => {
                localization_apply(&LocalizationSymbol::new(symbol.clone(), crate::config::THETA), u)
            }
            Op::Regularize { eps } => regularize(u, *eps),
            Op::Multiply { with } => pointwise_product(u, &with.build(u.grid)?),
            Op::Convolve { with } => convolve(u, &with.build(u.grid)?),
            Op::Tensor { with } => tensor(u, &with.build(u.grid)?),
            _ => unreachable!("symplectic steps handled above"),
        }
    }
}

/// Applies the steps left to right.
pub fn apply_pipeline(u: &SampledSignal, ops: &[Op]) -> Result<SampledSignal> {
    let mut cur = u.clone();
    for op in ops {
        cur = op.apply(&cur)?;
    }
    Ok(cur)
}
