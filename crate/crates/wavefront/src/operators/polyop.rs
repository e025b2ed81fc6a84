//! Differential operators with polynomial coefficients.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::fourier_multiplier;
use crate::config::DetectConfig;
use crate::error::{Error, Result};
use crate::geometry::{sphere3_points, ConeSet, Direction};
use crate::signal::SampledSignal;

/// Relative tolerance band of [`char_set`].
pub const CHAR_TAU: f64 = 1e-3;

/// One coefficient `c x^beta D^alpha`, `D = -i d/dx`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub alpha: Vec<u32>,
    pub beta: Vec<u32>,
    pub c: Complex64,
}

impl Term {
    pub fn new(alpha: Vec<u32>, beta: Vec<u32>, c: f64) -> Term {
        Term { alpha, beta, c: Complex64::new(c, 0.0) }
    }

    fn degree(&self) -> u32 {
        self.alpha.iter().sum::<u32>() + self.beta.iter().sum::<u32>()
    }
}

/// `p(x, D) = sum c_{alpha beta} x^beta D^alpha`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyOperator {
    pub d: usize,
    pub terms: Vec<Term>,
    pub order: u32,
}

fn monomial(v: &[f64], e: &[u32]) -> f64 {
    v.iter().zip(e).map(|(x, &k)| x.powi(k as i32)).product()
}

impl PolyOperator {
    /// Drops zero coefficients and sets the order to the top nonzero degree.
    pub fn new(terms: Vec<Term>) -> Result<PolyOperator> {
        let d = terms.first().map_or(0, |t| t.alpha.len());
        if !(1..=2).contains(&d) {
            return Err(Error::BadDimension(d));
        }
        if terms.iter().any(|t| t.alpha.len() != d || t.beta.len() != d) {
            return Err(Error::param("coeffs", "multi-index lengths disagree"));
        }
        if terms.iter().any(|t| !t.c.re.is_finite() || !t.c.im.is_finite()) {
            return Err(Error::param("coeffs", "coefficients must be finite"));
        }
        let terms: Vec<Term> = terms.into_iter().filter(|t| t.c != Complex64::new(0.0, 0.0)).collect();
        let order = terms.iter().map(Term::degree).max().ok_or(Error::ZeroPrincipalSymbol)?;
        Ok(PolyOperator { d, terms, order })
    }

    /// `D` in one dimension.
    pub fn d1() -> PolyOperator {
        PolyOperator::new(vec![Term::new(vec![1], vec![0], 1.0)]).unwrap()
    }

    /// Multiplication by `x` in one dimension.
    pub fn x1() -> PolyOperator {
        PolyOperator::new(vec![Term::new(vec![0], vec![1], 1.0)]).unwrap()
    }

    /// `x D` in one dimension.
    pub fn xd1() -> PolyOperator {
        PolyOperator::new(vec![Term::new(vec![1], vec![1], 1.0)]).unwrap()
    }

    /// The harmonic oscillator `D^2 + x^2` in one dimension.
    pub fn harmonic1() -> PolyOperator {
        PolyOperator::new(vec![Term::new(vec![2], vec![0], 1.0), Term::new(vec![0], vec![2], 1.0)]).unwrap()
    }

    /// Principal symbol `p_m(x, xi) = sum_{|alpha|+|beta|=m} c x^beta xi^alpha`.
    pub fn principal_symbol(&self, x: &[f64], xi: &[f64]) -> Complex64 {
        self.terms
            .iter()
            .filter(|t| t.degree() == self.order)
            .map(|t| t.c * monomial(x, &t.beta) * monomial(xi, &t.alpha))
            .sum()
    }
}

/// Applies `P` with `D^alpha` as the spectral multiplier `xi^alpha`.
pub fn apply_polyop(p: &PolyOperator, u: &SampledSignal) -> Result<SampledSignal> {
    let grid = u.grid;
    if p.d != grid.d {
        return Err(Error::GridMismatch(format!("operator has d = {}, signal has d = {}", p.d, grid.d)));
    }
    let cmax = p.terms.iter().map(|t| t.c.norm()).fold(0.0, f64::max);
    let bound = grid.xi_max().max(grid.l).max(1.0).powi(p.order as i32) * cmax;
    if !(bound < 1e300) {
        return Err(Error::Overflow(format!("xi_max^{} * max|c| = {bound:e}", p.order)));
    }
    let n = grid.n;
    let ys = grid.coords();
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    for t in &p.terms {
        let du = if t.alpha.iter().all(|&a| a == 0) {
            u.samples.clone()
        } else {
            fourier_multiplier(u, |xi| Complex64::new(monomial(xi, &t.alpha), 0.0))
        };
        for (idx, (o, v)) in out.iter_mut().zip(&du).enumerate() {
            let xb = if grid.d == 1 {
                monomial(&[ys[idx]], &t.beta)
            } else {
                monomial(&[ys[idx / n], ys[idx % n]], &t.beta)
            };
            *o += t.c * xb * v;
        }
    }
    Ok(u.derive(out, json!({"op": "polyop", "coeffs": p.terms})))
}

/// Directions where `|p_m|` falls within `CHAR_TAU` of zero, relative to its maximum.
pub fn char_set(p: &PolyOperator, cfg: &DetectConfig) -> Result<ConeSet> {
    let dirs: Vec<Direction> = match p.d {
        1 => (0..cfg.n_dir).map(|i| Direction::from_angle(2.0 * PI * i as f64 / cfg.n_dir as f64)).collect(),
        _ => sphere3_points(cfg.n_dir),
    };
    let d = p.d;
    let vals: Vec<f64> = dirs.iter().map(|w| p.principal_symbol(&w.omega()[..d], &w.omega()[d..]).norm()).collect();
    let vmax = vals.iter().cloned().fold(0.0, f64::max);
    if vmax == 0.0 {
        return Err(Error::ZeroPrincipalSymbol);
    }
    let directions =
        dirs.into_iter().zip(&vals).filter(|(_, &v)| v == 0.0 || v <= CHAR_TAU * vmax).map(|(w, _)| w).collect();
    ConeSet::new(directions, cfg.step().min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::synth::hermite;
    use crate::window::Window;

    #[test]
    fn multiplication_and_second_derivative_on_psi() {
        let grid = make_grid(16.0, 512, 1).unwrap();
        let psi = SampledSignal::new(grid, Window::standard(grid).samples, "psi").unwrap();
        let xu = apply_polyop(&PolyOperator::x1(), &psi).unwrap();
        let d2 = PolyOperator::new(vec![Term::new(vec![2], vec![0], 1.0)]).unwrap();
        let d2u = apply_polyop(&d2, &psi).unwrap();
        for j in 0..grid.n {
            let y = grid.y(j);
            let p = psi.samples[j];
            assert!((xu.samples[j] - p * y).norm() < 1e-14);
            assert!((d2u.samples[j] - p * (1.0 - y * y)).norm() < 1e-8, "{j}");
        }
    }

    #[test]
    fn hermite_eigenvalues() {
        let grid = make_grid(16.0, 512, 1).unwrap();
        for k in 0..=2 {
            let h = hermite(grid, k).unwrap();
            let ph = apply_polyop(&PolyOperator::harmonic1(), &h).unwrap();
            let lam = (2 * k + 1) as f64;
            let err = h.samples.iter().zip(&ph.samples).map(|(a, b)| (b - a * lam).norm_sqr()).sum::<f64>().sqrt()
                / h.samples.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            assert!(err < 1e-6 * lam, "k = {k}: {err}");
        }
    }

    #[test]
    fn order_reduction_and_zero_operator() {
        let p = PolyOperator::new(vec![Term::new(vec![2], vec![0], 0.0), Term::new(vec![1], vec![0], 2.0)]).unwrap();
        assert_eq!(p.order, 1);
        assert_eq!(PolyOperator::new(vec![Term::new(vec![1], vec![0], 0.0)]), Err(Error::ZeroPrincipalSymbol));
    }

    #[test]
    fn characteristic_sets() {
        let grid = make_grid(16.0, 512, 1).unwrap();
        let cfg = DetectConfig::for_grid(&grid);
        assert!(char_set(&PolyOperator::harmonic1(), &cfg).unwrap().is_empty());
        let angles =
            |c: &ConeSet| -> Vec<f64> { c.directions.iter().map(|d| d.angle().to_degrees().round()).collect() };
        assert_eq!(angles(&char_set(&PolyOperator::d1(), &cfg).unwrap()), vec![0.0, 180.0]);
        assert_eq!(angles(&char_set(&PolyOperator::x1(), &cfg).unwrap()), vec![90.0, 270.0]);
        assert_eq!(angles(&char_set(&PolyOperator::xd1(), &cfg).unwrap()), vec![0.0, 90.0, 180.0, 270.0]);
    }

    #[test]
    fn overflow_guard() {
        let grid = make_grid(16.0, 512, 1).unwrap();
        let psi = SampledSignal::new(grid, Window::standard(grid).samples, "psi").unwrap();
        let p = PolyOperator::new(vec![Term::new(vec![200], vec![0], 1.0)]).unwrap();
        assert!(matches!(apply_polyop(&p, &psi), Err(Error::Overflow(_))));
    }
}
