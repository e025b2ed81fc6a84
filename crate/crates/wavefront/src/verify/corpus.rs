//! The fixed test corpus and its expected singular sets.

use std::f64::consts::PI;

use crate::error::Result;
use crate::geometry::ConeSet;
use crate::grid::GridSpec;
use crate::signal::SampledSignal;
use crate::synth::Recipe;

/// Angles of the five arc directions, in degrees.
pub const ARC_DEGREES: [f64; 5] = [0.0, 7.5, 15.0, 22.5, 30.0];

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub id: String,
    pub signal: SampledSignal,
    /// Expected singular directions, sampled at `step` for arcs.
    pub expected: ConeSet,
    /// Whether the entry is a prescribed bump train.
    pub bump_train: bool,
}

fn unit(deg: f64) -> Vec<f64> {
    let a = deg.to_radians();
    vec![a.cos(), a.sin()]
}

/// psi, hermite 1 and 2, constant, chirp(1) and the four bump trains.
///
/// `step` is the angular resolution used to sample the expected arc and
/// `aperture` the cone half-width attached to the expected sets.
pub fn default_corpus(grid: GridSpec, step: f64, aperture: f64) -> Result<Vec<CorpusEntry>> {
    let pw = |dirs: Vec<Vec<f64>>| Recipe::PrescribedWf { dirs, k_max: None };
    let arc_dirs: Vec<Vec<f64>> = ARC_DEGREES.iter().map(|&a| unit(a)).collect();
    let arc_end = ARC_DEGREES[4].to_radians();
    let arc_samples = (arc_end / step).round() as usize;
    let arc: Vec<f64> = (0..=arc_samples).map(|i| (i as f64 * step).min(arc_end)).collect();
    let cases: Vec<(&str, Recipe, Vec<f64>, bool)> = vec![
        ("psi", Recipe::Hermite { k: 0 }, vec![], false),
        ("hermite1", Recipe::Hermite { k: 1 }, vec![], false),
        ("hermite2", Recipe::Hermite { k: 2 }, vec![], false),
        ("constant", Recipe::Constant, vec![0.0, PI], false),
        ("chirp1", Recipe::Chirp { a: vec![vec![1.0]] }, vec![PI / 4.0, 5.0 * PI / 4.0], false),
        ("bumps_10", pw(vec![unit(0.0)]), vec![0.0], true),
        ("bumps_01", pw(vec![unit(90.0)]), vec![PI / 2.0], true),
        ("bumps_10_01", pw(vec![unit(0.0), unit(90.0)]), vec![0.0, PI / 2.0], true),
        ("bumps_arc", pw(arc_dirs), arc, true),
    ];
    cases
        .into_iter()
        .map(|(id, recipe, angles, bump_train)| {
            Ok(CorpusEntry {
                id: id.to_string(),
                signal: recipe.build(grid)?.with_label(id),
                expected: ConeSet::from_angles(&angles, aperture),
                bump_train,
            })
        })
        .collect()
}

/// Single-direction bump train at angle `deg`.
pub fn bump_train(grid: GridSpec, deg: f64) -> Result<SampledSignal> {
    Recipe::PrescribedWf { dirs: vec![unit(deg)], k_max: None }.build(grid)
}
