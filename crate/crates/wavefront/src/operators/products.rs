use num_complex::Complex64;
use rustfft::FftPlanner;
use serde_json::json;

use crate::error::{Error, Result};
use crate::geometry::{ConeSet, Direction};
use crate::grid::GridSpec;
use crate::signal::SampledSignal;

pub fn pointwise_product(u: &SampledSignal, v: &SampledSignal) -> Result<SampledSignal> {
    u.grid.check_same(&v.grid)?;
    let samples = u.samples.iter().zip(&v.samples).map(|(a, b)| a * b).collect();
    Ok(u.derive(samples, json!({"op": "multiply", "with": v.provenance})))
}

/// `(u * v)(y_j) = sum_m u_m v(y_j - y_m) dy`, linear (zero-padded) convolution, d = 1.
pub fn convolve(u: &SampledSignal, v: &SampledSignal) -> Result<SampledSignal> {
    u.grid.check_same(&v.grid)?;
    if u.grid.d != 1 {
        return Err(Error::BadDimension(u.grid.d));
    }
    let n = u.grid.n;
    let m = 2 * n;
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);
    let pad = |s: &[Complex64]| {
        let mut b = s.to_vec();
        b.resize(m, Complex64::new(0.0, 0.0));
        b
    };
    let mut a = pad(&u.samples);
    let mut b = pad(&v.samples);
    fwd.process(&mut a);
    fwd.process(&mut b);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y;
    }
    inv.process(&mut a);
    // linear index q = j + m' with y_j - y_m' = y_{q - m'} - y_{n/2}
    let scale = u.grid.delta() / m as f64;
    let samples = (0..n).map(|j| a[j + n / 2] * scale).collect();
    Ok(u.derive(samples, json!({"op": "convolve", "with": v.provenance})))
}

/// `(u (x) v)(y1, y2) = u(y1) v(y2)` on the two-dimensional grid.
pub fn tensor(u: &SampledSignal, v: &SampledSignal) -> Result<SampledSignal> {
    u.grid.check_same(&v.grid)?;
    if u.grid.d != 1 {
        return Err(Error::BadDimension(u.grid.d));
    }
    let grid = GridSpec::new(u.grid.l, u.grid.n, 2)?;
    let samples = u.samples.iter().flat_map(|a| v.samples.iter().map(move |b| a * b)).collect();
    let mut out = SampledSignal::new(grid, samples, format!("{} x {}", u.label, v.label))?;
    out.provenance = u.provenance.clone();
    out.provenance.push(json!({"op": "tensor", "with": v.provenance}));
    Ok(out)
}

/// Expected wave front set of a product, with non-degeneracy warnings.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductCone {
    pub cone: ConeSet,
    pub warnings: Vec<String>,
}

/// `{(x, xi + eta) : (x, xi) in G1, (x, eta) in G2} u G1 u G2` on unit directions.
pub fn product_cone(g1: &ConeSet, g2: &ConeSet) -> Result<ProductCone> {
    let mut dirs: Vec<Direction> = Vec::new();
    let mut warnings = Vec::new();
    let dim = g1.directions.first().or(g2.directions.first()).map_or(2, |w| w.dim());
    let d = dim / 2;
    let norm = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
    for a in &g1.directions {
        for b in &g2.directions {
            let (xa, ea) = a.omega().split_at(d);
            let (xb, eb) = b.omega().split_at(d);
            let (na, nb) = (norm(xa), norm(xb));
            if na < 1e-12 && nb < 1e-12 {
                let sum: Vec<f64> = ea.iter().zip(eb).map(|(p, q)| p + q).collect();
                if norm(&sum) < 1e-9 {
                    warnings.push(format!("(0, {ea:?}) in the first set meets (0, {eb:?}) in the second"));
                } else {
                    dirs.push(Direction::normalized(&[xa, &sum[..]].concat())?);
                }
                continue;
            }
            if na < 1e-12 || nb < 1e-12 {
                continue;
            }
            let cos = xa.iter().zip(xb).map(|(p, q)| p * q).sum::<f64>() / (na * nb);
            if cos < 1.0 - 1e-9 {
                continue;
            }
            let s = na / nb;
            let v: Vec<f64> = xa.iter().cloned().chain(ea.iter().zip(eb).map(|(p, q)| p + s * q)).collect();
            dirs.push(Direction::normalized(&v)?);
        }
    }
    let mut cone = g1.union(g2);
    for w in dirs {
        if cone.dist_to(&w) > 1e-9 {
            cone.directions.push(w);
        }
    }
    Ok(ProductCone { cone, warnings })
}
