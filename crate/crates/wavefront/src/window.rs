use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WindowKind {
    #[default]
    StandardGaussian,
    DilatedGaussian {
        sigma: f64,
    },
    Custom,
}

impl WindowKind {
    /// Gaussian width, if the window is a Gaussian.
    pub fn sigma(&self) -> Option<f64> {
        match self {
            WindowKind::StandardGaussian => Some(1.0),
            WindowKind::DilatedGaussian { sigma } => Some(*sigma),
            WindowKind::Custom => None,
        }
    }
}

/// Window samples on the signal grid, centered at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    pub grid: GridSpec,
    pub samples: Vec<Complex64>,
    pub l2_norm: f64,
    pub kind: WindowKind,
}

fn gauss_1d(t: f64, sigma: f64) -> f64 {
    (PI * sigma * sigma).powf(-0.25) * (-t * t / (2.0 * sigma * sigma)).exp()
}

impl Window {
    pub fn standard(grid: GridSpec) -> Window {
        Self::gaussian(grid, WindowKind::StandardGaussian, 1.0)
    }

    pub fn dilated(grid: GridSpec, sigma: f64) -> Result<Window> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::param("sigma", format!("must be positive, got {sigma}")));
        }
        Ok(Self::gaussian(grid, WindowKind::DilatedGaussian { sigma }, sigma))
    }

    pub fn from_kind(grid: GridSpec, kind: WindowKind) -> Result<Window> {
        match kind {
            WindowKind::StandardGaussian => Ok(Self::standard(grid)),
            WindowKind::DilatedGaussian { sigma } => Self::dilated(grid, sigma),
            WindowKind::Custom => Err(Error::WindowKind("custom windows need explicit samples".into())),
        }
    }

    pub fn custom(grid: GridSpec, samples: Vec<Complex64>) -> Result<Window> {
        if samples.len() != grid.len() {
            return Err(Error::SampleCount { expected: grid.len(), got: samples.len() });
        }
        let l2_norm = quad_norm(&grid, &samples);
        if l2_norm == 0.0 || !l2_norm.is_finite() {
            return Err(Error::DegenerateNorm);
        }
        Ok(Window { grid, samples, l2_norm, kind: WindowKind::Custom })
    }

    fn gaussian(grid: GridSpec, kind: WindowKind, sigma: f64) -> Window {
        let ys = grid.coords();
        let g1: Vec<f64> = ys.iter().map(|&y| gauss_1d(y, sigma)).collect();
        let samples: Vec<Complex64> = match grid.d {
            1 => g1.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
            _ => g1.iter().flat_map(|&a| g1.iter().map(move |&b| Complex64::new(a * b, 0.0))).collect(),
        };
        let l2_norm = quad_norm(&grid, &samples);
        Window { grid, samples, l2_norm, kind }
    }

    /// Normalization constant `(2 pi)^{-d/2} / ||g||`.
    pub fn k_g(&self) -> f64 {
        (2.0 * PI).powf(-(self.grid.d as f64) / 2.0) / self.l2_norm
    }

    /// Window value at an arbitrary offset; offsets are wrapped onto the periodic grid.
    pub fn eval(&self, t: &[f64]) -> Result<Complex64> {
        match self.kind.sigma() {
            Some(s) => Ok(Complex64::new(t.iter().map(|&v| gauss_1d(self.grid.wrap(v), s)).product(), 0.0)),
            None => {
                let mut idx = 0;
                for &v in t {
                    let w = self.grid.wrap(v);
                    let j = self.grid.lattice_index(w).ok_or(Error::OffLattice(v, 0.0))?;
                    idx = idx * self.grid.n + j;
                }
                Ok(self.samples[idx])
            }
        }
    }

    /// Offset beyond which the window is numerically zero, if known.
    pub fn support_radius(&self) -> Option<f64> {
        self.kind.sigma().map(|s| s * 9.0)
    }
}

fn quad_norm(grid: &GridSpec, samples: &[Complex64]) -> f64 {
    let w = grid.delta().powi(grid.d as i32);
    (samples.iter().map(|z| z.norm_sqr()).sum::<f64>() * w).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    #[test]
    fn standard_is_unit_norm() {
        let g = make_grid(16.0, 512, 1).unwrap();
        let w = Window::standard(g);
        assert!((w.l2_norm - 1.0).abs() < 1e-8);
        assert!((w.samples[256].re - PI.powf(-0.25)).abs() < 1e-15);
        let g2 = make_grid(8.0, 64, 2).unwrap();
        assert!((Window::standard(g2).l2_norm - 1.0).abs() < 1e-8);
    }

    #[test]
    fn dilated_is_unit_norm() {
        let g = make_grid(16.0, 512, 1).unwrap();
        let w = Window::dilated(g, 0.7).unwrap();
        assert!((w.l2_norm - 1.0).abs() < 1e-8);
        assert!(Window::dilated(g, 0.0).is_err());
    }

    #[test]
    fn custom_norm_matches_quadrature() {
        let g = make_grid(4.0, 32, 1).unwrap();
        let s: Vec<Complex64> = (0..32).map(|j| Complex64::new((j % 3) as f64, 1.0)).collect();
        let w = Window::custom(g, s.clone()).unwrap();
        let q = (s.iter().map(|z| z.norm_sqr()).sum::<f64>() * g.delta()).sqrt();
        assert!((w.l2_norm - q).abs() <= 1e-12 * q);
        assert_eq!(w.eval(&[g.y(5)]).unwrap(), s[5]);
    }
}
