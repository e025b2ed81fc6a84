use serde::{Deserialize, Serialize};

use crate::config::DetectConfig;
use crate::geometry::{ConeSet, Direction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Class {
    Singular,
    Regular,
}

/// Regular iff the decay is fast and well fitted, or the sentinel fired.
pub fn classify(eps_hat: f64, residual: f64, cfg: &DetectConfig) -> Class {
    if eps_hat == f64::INFINITY || (eps_hat >= cfg.eps_min && residual <= cfg.residual_max) {
        Class::Regular
    } else {
        Class::Singular
    }
}

/// f64 fields where `+inf` travels as the string "inf".
pub mod inf_f64 {
    use serde::de::{self, Visitor};
    use serde::{Deserializer, Serializer};
    use std::fmt;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if *v == f64::INFINITY {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = f64;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or the string \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
                Ok(v)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
                Ok(v as f64)
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
                Ok(v as f64)
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
                match v {
                    "inf" => Ok(f64::INFINITY),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionEstimate {
    pub omega: Direction,
    #[serde(with = "inf_f64")]
    pub eps_hat: f64,
    pub c_hat: f64,
    pub residual: f64,
    pub class: Class,
}

/// Localized summary of one singular component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SingularArc {
    /// Planar arc of angles `[start, end]` in radians, `end >= start`, may exceed 2 pi.
    Planar { start: f64, end: f64 },
    /// Isolated direction (d = 2).
    Point { omega: Direction },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveFrontReport {
    pub config: DetectConfig,
    pub d: usize,
    pub directions: Vec<DirectionEstimate>,
    pub singular_arcs: Vec<SingularArc>,
}

impl WaveFrontReport {
    /// Directions classified singular, without localization.
    pub fn raw_singular(&self) -> ConeSet {
        ConeSet {
            directions: self
                .directions
                .iter()
                .filter(|e| e.class == Class::Singular)
                .map(|e| e.omega.clone())
                .collect(),
            aperture: self.config.delta,
        }
    }

    /// Localized singular set, sampled at the angular step.
    pub fn singular(&self) -> ConeSet {
        let step = self.config.step();
        let mut directions = Vec::new();
        for arc in &self.singular_arcs {
            match arc {
                SingularArc::Planar { start, end } => {
                    let mut a = *start;
                    while a < *end - 1e-9 * step {
                        directions.push(Direction::from_angle(a));
                        a += step;
                    }
                    directions.push(Direction::from_angle(*end));
                }
                SingularArc::Point { omega } => directions.push(omega.clone()),
            }
        }
        ConeSet { directions, aperture: self.config.delta }
    }

    pub fn is_empty(&self) -> bool {
        self.singular_arcs.is_empty()
    }

    /// Raw per-direction classes as booleans (true = singular).
    pub fn mask(&self) -> Vec<bool> {
        self.directions.iter().map(|e| e.class == Class::Singular).collect()
    }
}
