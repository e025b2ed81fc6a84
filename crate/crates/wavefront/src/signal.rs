use num_complex::Complex64;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::grid::GridSpec;

/// Boundary ratio above which a signal counts as truncated by the grid.
pub const BOUNDARY_FLAG: f64 = 1e-6;

/// Complex samples on a grid, row-major for d = 2.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    pub grid: GridSpec,
    pub samples: Vec<Complex64>,
    pub label: String,
    /// Recipe and operator chain that produced the samples.
    pub provenance: Vec<Value>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub boundary_ratio: f64,
    pub max_abs: f64,
    pub truncated: bool,
}

impl SampledSignal {
    pub fn new(grid: GridSpec, samples: Vec<Complex64>, label: impl Into<String>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::SampleCount { expected: grid.len(), got: samples.len() });
        }
        Ok(SampledSignal { grid, samples, label: label.into(), provenance: Vec::new() })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        SampledSignal {
            grid,
            samples: vec![Complex64::new(0.0, 0.0); grid.len()],
            label: "zero".into(),
            provenance: Vec::new(),
        }
    }

    pub fn with_provenance(mut self, step: Value) -> Self {
        self.provenance.push(step);
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Same grid and provenance, new samples.
    pub fn derive(&self, samples: Vec<Complex64>, step: Value) -> Self {
        let mut provenance = self.provenance.clone();
        provenance.push(step);
        SampledSignal { grid: self.grid, samples, label: self.label.clone(), provenance }
    }

    pub fn l2_norm(&self) -> f64 {
        let w = self.grid.delta().powi(self.grid.d as i32);
        (self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() * w).sqrt()
    }

    pub fn l2_dist(&self, other: &SampledSignal) -> f64 {
        let w = self.grid.delta().powi(self.grid.d as i32);
        let s: f64 = self.samples.iter().zip(&other.samples).map(|(a, b)| (a - b).norm_sqr()).sum();
        (s * w).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let samples = self.samples.iter().map(|z| z * c).collect();
        self.derive(samples, serde_json::json!({"op": "scale", "c": [c.re, c.im]}))
    }

    pub fn diagnostics(&self) -> Result<Diagnostics> {
        validate_signal(self)
    }
}

/// Boundary-decay ratio, peak magnitude, and a NaN/Inf scan.
pub fn validate_signal(s: &SampledSignal) -> Result<Diagnostics> {
    if s.samples.len() != s.grid.len() {
        return Err(Error::SampleCount { expected: s.grid.len(), got: s.samples.len() });
    }
    if let Some(index) = s.samples.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    let n = s.grid.n;
    let max_abs = s.max_abs();
    let edge = match s.grid.d {
        1 => s.samples[0].norm().max(s.samples[n - 1].norm()),
        _ => {
            let mut m = 0.0f64;
            for i in 0..n {
                for j in [0, n - 1] {
                    m = m.max(s.samples[i * n + j].norm()).max(s.samples[j * n + i].norm());
                }
            }
            m
        }
    };
    let boundary_ratio = if max_abs > 0.0 { edge / max_abs } else { 0.0 };
    Ok(Diagnostics { boundary_ratio, max_abs, truncated: boundary_ratio > BOUNDARY_FLAG })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    #[test]
    fn constant_is_truncated() {
        let g = make_grid(16.0, 64, 1).unwrap();
        let s = SampledSignal::new(g, vec![Complex64::new(1.0, 0.0); 64], "one").unwrap();
        let d = validate_signal(&s).unwrap();
        assert_eq!(d.boundary_ratio, 1.0);
        assert!(d.truncated);
    }

    #[test]
    fn nan_is_rejected() {
        let g = make_grid(16.0, 64, 1).unwrap();
        let mut v = vec![Complex64::new(0.0, 0.0); 64];
        v[5] = Complex64::new(f64::NAN, 0.0);
        let s = SampledSignal::new(g, v, "bad").unwrap();
        assert_eq!(validate_signal(&s), Err(Error::NonFinite { index: 5 }));
    }

    #[test]
    fn wrong_length() {
        let g = make_grid(16.0, 64, 1).unwrap();
        assert!(SampledSignal::new(g, vec![Complex64::new(0.0, 0.0); 3], "x").is_err());
    }
}
