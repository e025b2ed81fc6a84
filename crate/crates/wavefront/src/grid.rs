use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform periodic grid on `[-L, L)^d` with `n` samples per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub d: usize,
    #[serde(rename = "L")]
    pub l: f64,
    pub n: usize,
}

pub fn make_grid(l: f64, n: usize, d: usize) -> Result<GridSpec> {
    GridSpec::new(l, n, d)
}

impl GridSpec {
    pub fn new(l: f64, n: usize, d: usize) -> Result<Self> {
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::BadHalfWidth(l));
        }
        if n < 32 || !n.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(n));
        }
        if d != 1 && d != 2 {
            return Err(Error::BadDimension(d));
        }
        Ok(GridSpec { d, l, n })
    }

    /// Sample spacing `2L/n`.
    pub fn delta(&self) -> f64 {
        2.0 * self.l / self.n as f64
    }

    /// Nyquist frequency `pi / delta`.
    pub fn xi_max(&self) -> f64 {
        PI / self.delta()
    }

    /// Frequency lattice spacing `pi / L`.
    pub fn dxi(&self) -> f64 {
        PI / self.l
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn y(&self, j: usize) -> f64 {
        -self.l + j as f64 * self.delta()
    }

    pub fn xi(&self, k: usize) -> f64 {
        -self.xi_max() + k as f64 * self.dxi()
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.y(j)).collect()
    }

    pub fn freqs(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.xi(k)).collect()
    }

    /// Wrap `t` into `[-L, L)`.
    pub fn wrap(&self, t: f64) -> f64 {
        let p = 2.0 * self.l;
        (t + self.l).rem_euclid(p) - self.l
    }

    /// Largest radius the phase-space lattice covers in every direction.
    pub fn extent(&self) -> f64 {
        self.l.min(self.xi_max())
    }

    /// Grid whose spatial lattice is this grid's frequency lattice.
    pub fn dual(&self) -> GridSpec {
        GridSpec { d: self.d, l: self.xi_max(), n: self.n }
    }

    pub fn same_as(&self, other: &GridSpec) -> bool {
        self.d == other.d && self.n == other.n && (self.l - other.l).abs() <= 1e-12 * self.l
    }

    pub fn check_same(&self, other: &GridSpec) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "(d={}, L={}, n={}) vs (d={}, L={}, n={})",
                self.d, self.l, self.n, other.d, other.l, other.n
            )))
        }
    }

    /// Index of the lattice point nearest to `y`, if `y` lies on the lattice.
    pub fn lattice_index(&self, y: f64) -> Option<usize> {
        let t = (y + self.l) / self.delta();
        let j = t.round();
        if (t - j).abs() < 1e-9 && j >= 0.0 && (j as usize) < self.n {
            Some(j as usize)
        } else {
            None
        }
    }

    pub fn freq_index(&self, xi: f64) -> Option<usize> {
        let t = (xi + self.xi_max()) / self.dxi();
        let k = t.round();
        if (t - k).abs() < 1e-9 && k >= 0.0 && (k as usize) < self.n {
            Some(k as usize)
        } else {
            None
        }
    }
}
