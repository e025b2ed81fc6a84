//! Detector configuration and the defaults table.
//!
//! | parameter      | default (d = 1)            | default (d = 2)        |
//! |----------------|----------------------------|------------------------|
//! | `theta`        | 3/4                        | 3/4                    |
//! | `n_dir`        | 360                        | 400 (sphere spiral)    |
//! | `delta`        | 3 angular steps            | 0.35 rad               |
//! | `radii`        | 12 geometric in [0.25R, 0.65R], R = min(L, xi_max) | same |
//! | `shell_width`  | 0.08                       | 0.08                   |
//! | `floor`        | 1e-12                      | 1e-12                  |
//! | `eps_min`      | 0.3                        | 0.3                    |
//! | `residual_max` | 3.0                        | 3.0                    |
//! | grid           | L = 16, n = 512            | L = 8, n = 64          |

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::window::WindowKind;

pub const THETA: f64 = 0.75;
pub const L_DEFAULT: f64 = 16.0;
pub const N_DEFAULT: usize = 512;
pub const N_DIR_1D: usize = 360;
pub const N_DIR_2D: usize = 400;
pub const DELTA_STEPS: f64 = 3.0;
pub const DELTA_2D: f64 = 0.35;
pub const N_RADII: usize = 12;
pub const RADIUS_LO: f64 = 0.25;
pub const RADIUS_HI: f64 = 0.65;
pub const SHELL_WIDTH: f64 = 0.08;
pub const FLOOR: f64 = 1e-12;
pub const EPS_MIN: f64 = 0.3;
pub const RESIDUAL_MAX: f64 = 3.0;
/// Largest admissible outer radius as a fraction of the field extent.
pub const RADIUS_CAP: f64 = 0.9;

fn default_residual_max() -> f64 {
    RESIDUAL_MAX
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectConfig {
    pub theta: f64,
    pub n_dir: usize,
    pub delta: f64,
    pub radii: Vec<f64>,
    pub shell_width: f64,
    pub floor: f64,
    pub eps_min: f64,
    #[serde(default = "default_residual_max")]
    pub residual_max: f64,
    #[serde(default)]
    pub window: WindowKind,
}

pub fn geometric_radii(lo: f64, hi: f64, m: usize) -> Vec<f64> {
    let q = (hi / lo).ln() / (m - 1) as f64;
    (0..m).map(|i| lo * (q * i as f64).exp()).collect()
}

impl DetectConfig {
    /// Defaults scaled to `grid`.
    pub fn for_grid(grid: &GridSpec) -> DetectConfig {
        let r = grid.extent();
        let (n_dir, delta) = match grid.d {
            1 => (N_DIR_1D, DELTA_STEPS * 2.0 * PI / N_DIR_1D as f64),
            _ => (N_DIR_2D, DELTA_2D),
        };
        DetectConfig {
            theta: THETA,
            n_dir,
            delta,
            radii: geometric_radii(RADIUS_LO * r, RADIUS_HI * r, N_RADII),
            shell_width: SHELL_WIDTH,
            floor: FLOOR,
            eps_min: EPS_MIN,
            residual_max: RESIDUAL_MAX,
            window: WindowKind::StandardGaussian,
        }
    }

    /// Angular step of the planar direction grid.
    pub fn step(&self) -> f64 {
        2.0 * PI / self.n_dir as f64
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta > 0.5 && self.theta < 1.0) {
            return Err(Error::param("theta", format!("must lie in (1/2, 1), got {}", self.theta)));
        }
        if self.n_dir < 8 {
            return Err(Error::param("n_dir", "need at least 8 directions"));
        }
        if !(self.delta > 0.0 && self.delta < PI / 2.0) {
            return Err(Error::param("delta", format!("must lie in (0, pi/2), got {}", self.delta)));
        }
        if self.radii.len() < 8 {
            return Err(Error::param("radii", format!("need at least 8 radii, got {}", self.radii.len())));
        }
        if self.radii[0] <= 0.0 || self.radii.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::param("radii", "must be positive and strictly increasing"));
        }
        if !(self.shell_width > 0.0 && self.shell_width < 1.0) {
            return Err(Error::param("shell_width", "must lie in (0, 1)"));
        }
        if !(self.floor > 0.0 && self.floor < 1e-6) {
            return Err(Error::param("floor", format!("must lie in (0, 1e-6), got {}", self.floor)));
        }
        if !(self.eps_min > 0.0) {
            return Err(Error::param("eps_min", "must be positive"));
        }
        if !(self.residual_max > 0.0) {
            return Err(Error::param("residual_max", "must be positive"));
        }
        if let WindowKind::DilatedGaussian { sigma } = self.window {
            if !(sigma > 0.0) {
                return Err(Error::param("window", "sigma must be positive"));
            }
        }
        Ok(())
    }

    /// Checks the radii against the phase-space extent of `grid`.
    pub fn check_grid(&self, grid: &GridSpec) -> Result<()> {
        self.validate()?;
        let extent = grid.extent();
        let r_max = *self.radii.last().unwrap();
        if r_max > RADIUS_CAP * extent * (1.0 + 1e-12) {
            return Err(Error::RadiusBeyondExtent { radius: r_max, extent: RADIUS_CAP * extent });
        }
        Ok(())
    }
}
