//! Localization operators `A_a u = V*(a V u)` with the standard window.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::signal::SampledSignal;
use crate::transform::{stft, stft_adjoint, stft_field};
use crate::window::Window;

/// Decay rates tested by the growth certificate.
pub const GROWTH_EPS: [f64; 3] = [1.0, 0.1, 0.01];
const GROWTH_RADII: [f64; 4] = [1e1, 1e2, 1e3, 1e4];
const GROWTH_DIRS: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SymbolRecipe {
    Constant {
        c: f64,
    },
    /// `1 + x^2 + xi^2`
    OnePlusQuadratic,
    /// `exp(a x^2 + b xi^2)`
    ExpQuadratic {
        a: f64,
        b: f64,
    },
    /// Values on the phase-space lattice, row-major in `x`.
    Lattice {
        values: Vec<f64>,
    },
}

impl SymbolRecipe {
    /// `exp(-eps (x^2 + xi^2) / 2)`.
    pub fn gaussian(eps: f64) -> SymbolRecipe {
        SymbolRecipe::ExpQuadratic { a: -eps / 2.0, b: -eps / 2.0 }
    }

    fn log_abs(&self, x: f64, xi: f64) -> Option<f64> {
        match self {
            SymbolRecipe::Constant { c } => Some(c.abs().ln()),
            SymbolRecipe::OnePlusQuadratic => Some((1.0 + x * x + xi * xi).ln()),
            SymbolRecipe::ExpQuadratic { a, b } => Some(a * x * x + b * xi * xi),
            SymbolRecipe::Lattice { .. } => None,
        }
    }

    pub fn values(&self, grid: &GridSpec) -> Result<Vec<f64>> {
        let n = grid.n;
        if let SymbolRecipe::Lattice { values } = self {
            if values.len() != n * n {
                return Err(Error::SampleCount { expected: n * n, got: values.len() });
            }
            if let Some(index) = values.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite { index });
            }
            return Ok(values.clone());
        }
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for k in 0..n {
                let (x, xi) = (grid.y(i), grid.xi(k));
                out.push(match self {
                    SymbolRecipe::Constant { c } => *c,
                    _ => self.log_abs(x, xi).unwrap().exp(),
                });
            }
        }
        if let Some(index) = out.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(out)
    }
}

/// Symbol with its growth certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizationSymbol {
    pub recipe: SymbolRecipe,
    /// `(eps, passed)` for every entry of [`GROWTH_EPS`].
    pub certificate: Vec<(f64, bool)>,
}

impl LocalizationSymbol {
    /// Checks that `log|a| - eps (|x|^{1/theta} + |xi|^{1/theta})` is
    /// eventually non-increasing along rays, for each test `eps`.
    /// Lattice symbols are bounded on a bounded set and always pass.
    pub fn new(recipe: SymbolRecipe, theta: f64) -> LocalizationSymbol {
        let p = 1.0 / theta;
        let certificate = GROWTH_EPS
            .iter()
            .map(|&eps| {
                let ok = (0..GROWTH_DIRS).all(|j| {
                    let phi = 2.0 * PI * (j as f64 + 0.5) / GROWTH_DIRS as f64;
                    let g = |r: f64| -> Option<f64> {
                        let (x, xi) = (r * phi.cos(), r * phi.sin());
                        recipe.log_abs(x, xi).map(|l| l - eps * (x.abs().powf(p) + xi.abs().powf(p)))
                    };
                    GROWTH_RADII.windows(2).all(|w| match (g(w[0]), g(w[1])) {
                        (Some(a), Some(b)) => b <= a || b == f64::NEG_INFINITY,
                        _ => true,
                    })
                });
                (eps, ok)
            })
            .collect();
        LocalizationSymbol { recipe, certificate }
    }

    pub fn check(&self) -> Result<()> {
        match self.certificate.iter().find(|(_, ok)| !ok) {
            Some(&(eps, _)) => Err(Error::GrowthCertificate { eps }),
            None => Ok(()),
        }
    }
}

/// `V*(a V u)` with the standard Gaussian window (d = 1).
pub fn localization_apply(a: &LocalizationSymbol, u: &SampledSignal) -> Result<SampledSignal> {
    a.check()?;
    if u.grid.d != 1 {
        return Err(Error::BadDimension(u.grid.d));
    }
    let f = stft(u)?;
    let v = stft_adjoint(&f.multiply(&a.recipe.values(&u.grid)?));
    Ok(u.derive(v.samples, json!({"op": "localize", "symbol": a.recipe})))
}

/// `A_{a_eps} u` with `a_eps = exp(-eps (x^2 + xi^2) / 2)`.
pub fn regularize(u: &SampledSignal, eps: f64) -> Result<SampledSignal> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::param("eps", format!("must be positive, got {eps}")));
    }
    let a = LocalizationSymbol::new(SymbolRecipe::gaussian(eps), crate::config::THETA);
    let mut out = localization_apply(&a, u)?;
    *out.provenance.last_mut().unwrap() = json!({"op": "regularize", "eps": eps});
    Ok(out)
}

/// Outcome of a pointwise bound `lhs <= c rhs` on the lattice.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    /// Largest `lhs / rhs` over points where `rhs` is above the noise floor.
    pub c_fit: f64,
    pub c_theory: f64,
    /// Points violating `lhs <= (1 + 1e-3) c_theory rhs + floor max(lhs)`.
    pub violations: usize,
    pub pass: bool,
}

fn bound_check(lhs: &[f64], rhs: &[f64], c_theory: f64, floor: f64) -> BoundCheck {
    let lmax = lhs.iter().cloned().fold(0.0, f64::max);
    let rmax = rhs.iter().cloned().fold(0.0, f64::max);
    let mut c_fit: f64 = 0.0;
    let mut violations = 0;
    for (&l, &r) in lhs.iter().zip(rhs) {
        if r > floor * rmax {
            c_fit = c_fit.max(l / r);
        }
        if l > (1.0 + 1e-3) * c_theory * r + floor * lmax {
            violations += 1;
        }
    }
    BoundCheck { c_fit, c_theory, violations, pass: violations == 0 && c_fit <= (1.0 + 1e-3) * c_theory }
}

/// Periodic convolution of two `n x n` lattice arrays; `kernel` is centered
/// (index `n/2` is the zero offset).
fn periodic_convolve(a: &[f64], kernel: &[f64], n: usize) -> Vec<f64> {
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let transpose = |b: &mut Vec<Complex64>| {
        for i in 0..n {
            for k in i + 1..n {
                b.swap(i * n + k, k * n + i);
            }
        }
    };
    let fft2 = |b: &mut Vec<Complex64>, plan: &std::sync::Arc<dyn rustfft::Fft<f64>>| {
        plan.process(b);
        transpose(b);
        plan.process(b);
        transpose(b);
    };
    let mut fa: Vec<Complex64> = a.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let h = n / 2;
    let mut fk: Vec<Complex64> =
        (0..n * n).map(|idx| Complex64::new(kernel[((idx / n + h) % n) * n + (idx % n + h) % n], 0.0)).collect();
    fft2(&mut fa, &fwd);
    fft2(&mut fk, &fwd);
    for (x, y) in fa.iter_mut().zip(&fk) {
        *x *= y;
    }
    fft2(&mut fa, &inv);
    let s = 1.0 / (n * n) as f64;
    fa.iter().map(|z| z.re * s).collect()
}

/// `|V(A_a u)| <= 2 (G * |a V u|)` with `G` the unit-mass Gaussian of variance 2
/// per phase-space coordinate (d = 1).
pub fn convolution_bound(a: &LocalizationSymbol, u: &SampledSignal, floor: f64) -> Result<BoundCheck> {
    let grid = u.grid;
    let n = grid.n;
    let au = localization_apply(a, u)?;
    let lhs = stft(&au)?.abs();
    let weighted = stft(u)?.multiply(&a.recipe.values(&grid)?).abs();
    let cell = grid.delta() * grid.dxi();
    let kernel: Vec<f64> = (0..n * n)
        .map(|idx| {
            let (x, xi) = (grid.y(idx / n), grid.xi(idx % n));
            (-(x * x + xi * xi) / 4.0).exp() / (4.0 * PI) * cell
        })
        .collect();
    let rhs = periodic_convolve(&weighted, &kernel, n);
    Ok(bound_check(&lhs, &rhs, 2.0, floor))
}

/// `|V_g u| <= k_g (|V_psi u| * |V_psi g|^~)` with `~` the reflection (d = 1).
pub fn window_change_bound(u: &SampledSignal, g: &Window, floor: f64) -> Result<BoundCheck> {
    let grid = u.grid;
    let n = grid.n;
    let lhs = stft_field(u, g)?.abs();
    let vu = stft(u)?.abs();
    let gs = SampledSignal::new(grid, g.samples.clone(), "window")?;
    let vg = stft(&gs)?.abs();
    let cell = grid.delta() * grid.dxi();
    let kernel: Vec<f64> = (0..n * n).map(|idx| vg[((n - idx / n) % n) * n + (n - idx % n) % n] * cell).collect();
    let rhs = periodic_convolve(&vu, &kernel, n);
    Ok(bound_check(&lhs, &rhs, g.k_g(), floor))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::synth::{constant, gaussian};

    fn psi(grid: GridSpec) -> SampledSignal {
        SampledSignal::new(grid, Window::standard(grid).samples, "psi").unwrap()
    }

    #[test]
    fn unit_symbol_is_identity() {
        let grid = make_grid(16.0, 256, 1).unwrap();
        let u = gaussian(grid, &[2.0], &[-3.0], 1.5).unwrap();
        let a = LocalizationSymbol::new(SymbolRecipe::Constant { c: 1.0 }, 0.75);
        let v = localization_apply(&a, &u).unwrap();
        assert!(v.l2_dist(&u) < 1e-6);
    }

    #[test]
    fn certificates() {
        let ok = [SymbolRecipe::Constant { c: 1.0 }, SymbolRecipe::OnePlusQuadratic, SymbolRecipe::gaussian(1.0)];
        for r in ok {
            assert!(LocalizationSymbol::new(r, 0.75).check().is_ok());
        }
        let bad = LocalizationSymbol::new(SymbolRecipe::ExpQuadratic { a: 1.0, b: 0.0 }, 0.75);
        assert_eq!(bad.check(), Err(Error::GrowthCertificate { eps: 1.0 }));
        let grid = make_grid(16.0, 256, 1).unwrap();
        assert!(matches!(localization_apply(&bad, &psi(grid)), Err(Error::GrowthCertificate { .. })));
    }

    #[test]
    fn regularized_gaussian_distance() {
        // A_{a_eps} psi = psi / (1 + eps)
        let grid = make_grid(16.0, 512, 1).unwrap();
        let u = psi(grid);
        for eps in [1e-3, 0.1, 1.0] {
            let v = regularize(&u, eps).unwrap();
            let want = eps / (1.0 + eps);
            assert!((v.l2_dist(&u) - want).abs() < 1e-9, "{eps}");
        }
        assert!(regularize(&u, -1.0).is_err());
    }

    #[test]
    fn regularized_constant_is_boundary_clean() {
        let grid = make_grid(16.0, 512, 1).unwrap();
        let u = constant(grid);
        assert!(u.diagnostics().unwrap().truncated);
        let v = regularize(&u, 0.3).unwrap();
        assert!(!v.diagnostics().unwrap().truncated);
    }

    #[test]
    fn pointwise_bounds_hold() {
        let grid = make_grid(8.0, 128, 1).unwrap();
        let u = gaussian(grid, &[1.0], &[2.0], 1.0).unwrap();
        let a = LocalizationSymbol::new(SymbolRecipe::OnePlusQuadratic, 0.75);
        let b = convolution_bound(&a, &u, 1e-12).unwrap();
        assert!(b.pass, "{b:?}");
        let g = Window::dilated(grid, 0.7).unwrap();
        let w = window_change_bound(&psi(grid), &g, 1e-12).unwrap();
        assert!(w.pass, "{w:?}");
    }
}
