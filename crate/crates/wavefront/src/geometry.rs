use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Unit vector in phase space, components `(x..., xi...)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Direction {
    omega: Vec<f64>,
}

impl TryFrom<Vec<f64>> for Direction {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        let n = norm(&v);
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::param("omega", format!("not a unit vector (norm {n})")));
        }
        Ok(Direction { omega: v })
    }
}

impl From<Direction> for Vec<f64> {
    fn from(d: Direction) -> Vec<f64> {
        d.omega
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

impl Direction {
    /// Normalizes `v`; fails on the zero vector.
    pub fn normalized(v: &[f64]) -> Result<Direction> {
        let n = norm(v);
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::param("omega", "zero or non-finite vector"));
        }
        Ok(Direction { omega: v.iter().map(|a| a / n).collect() })
    }

    /// Planar direction at angle `phi` (d = 1 phase space).
    pub fn from_angle(phi: f64) -> Direction {
        Direction { omega: vec![phi.cos(), phi.sin()] }
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn dim(&self) -> usize {
        self.omega.len()
    }

    pub fn angle(&self) -> f64 {
        self.omega[1].atan2(self.omega[0]).rem_euclid(2.0 * PI)
    }

    pub fn dist(&self, other: &Direction) -> f64 {
        angular_distance(&self.omega, &other.omega)
    }
}

pub fn angular_distance(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = norm(a);
    let nb = norm(b);
    // atan2 form keeps precision for nearly parallel vectors
    let cross2 = (na * na * nb * nb - dot * dot).max(0.0);
    cross2.sqrt().atan2(dot)
}

/// Finite set of directions with a common angular half-width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeSet {
    pub directions: Vec<Direction>,
    pub aperture: f64,
}

impl ConeSet {
    pub fn new(directions: Vec<Direction>, aperture: f64) -> Result<ConeSet> {
        if !(aperture > 0.0 && aperture < PI / 2.0) {
            return Err(Error::param("aperture", format!("must lie in (0, pi/2), got {aperture}")));
        }
        if let Some(d0) = directions.first() {
            if directions.iter().any(|d| d.dim() != d0.dim()) {
                return Err(Error::param("directions", "mixed dimensions"));
            }
        }
        Ok(ConeSet { directions, aperture })
    }

    pub fn empty(aperture: f64) -> ConeSet {
        ConeSet { directions: Vec::new(), aperture }
    }

    /// Planar cone set from angles in radians.
    pub fn from_angles(angles: &[f64], aperture: f64) -> ConeSet {
        ConeSet { directions: angles.iter().map(|&a| Direction::from_angle(a)).collect(), aperture }
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    /// Distance from `d` to the nearest member, `+inf` for the empty set.
    pub fn dist_to(&self, d: &Direction) -> f64 {
        self.directions.iter().map(|e| e.dist(d)).fold(f64::INFINITY, f64::min)
    }

    pub fn union(&self, other: &ConeSet) -> ConeSet {
        let mut directions = self.directions.clone();
        directions.extend(other.directions.iter().cloned());
        ConeSet { directions, aperture: self.aperture.max(other.aperture) }
    }

    /// Whether every member lies within `tol` of `outer`.
    pub fn within(&self, outer: &ConeSet, tol: f64) -> bool {
        self.directions.iter().all(|d| outer.dist_to(d) <= tol + 1e-12)
    }
}

/// One-sided angular Hausdorff distances `(a -> b, b -> a)`.
///
/// A sup over the empty set is 0 and the distance to the empty set is
/// `+inf`, so `(empty, {p})` gives `(0, inf)`.
pub fn hausdorff(a: &ConeSet, b: &ConeSet) -> (f64, f64) {
    let one = |p: &ConeSet, q: &ConeSet| -> f64 {
        if p.is_empty() {
            return 0.0;
        }
        p.directions.iter().map(|d| q.dist_to(d)).fold(0.0, f64::max)
    };
    (one(a, b), one(b, a))
}

/// Quasi-uniform points on S^3 (super-Fibonacci spiral).
pub fn sphere3_points(n: usize) -> Vec<Direction> {
    const PHI: f64 = std::f64::consts::SQRT_2;
    const PSI: f64 = 1.533_751_168_755_204_3;
    (0..n)
        .map(|i| {
            let s = i as f64 + 0.5;
            let r = (s / n as f64).sqrt();
            let big_r = (1.0 - s / n as f64).sqrt();
            let alpha = 2.0 * PI * s / PHI;
            let beta = 2.0 * PI * s / PSI;
            Direction { omega: vec![r * alpha.sin(), r * alpha.cos(), big_r * beta.sin(), big_r * beta.cos()] }
        })
        .collect()
}
