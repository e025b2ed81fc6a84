//! JSON documents for signals, configs and reports.
//!
//! Floats are written in shortest round-trip form, so every document
//! round-trips bit-exactly.

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::DetectConfig;
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::report::WaveFrontReport;
use crate::signal::SampledSignal;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SignalDoc {
    d: usize,
    #[serde(rename = "L")]
    l: f64,
    n: usize,
    label: String,
    samples: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    provenance: Vec<Value>,
}

fn parse<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de)
        .map_err(|e| Error::Schema { path: e.path().to_string(), message: e.inner().to_string() })
}

fn emit<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable value")
}

pub fn signal_to_json(s: &SampledSignal) -> String {
    let doc = SignalDoc {
        d: s.grid.d,
        l: s.grid.l,
        n: s.grid.n,
        label: s.label.clone(),
        samples: s.samples.iter().map(|z| [z.re, z.im]).collect(),
        provenance: s.provenance.clone(),
    };
    emit(&doc)
}

pub fn signal_from_json(text: &str) -> Result<SampledSignal> {
    let doc: SignalDoc = parse(text)?;
    let grid = GridSpec::new(doc.l, doc.n, doc.d)
        .map_err(|e| Error::Schema { path: "L/n/d".into(), message: e.to_string() })?;
    if doc.samples.len() != grid.len() {
        return Err(Error::Schema {
            path: "samples".into(),
            message: format!("expected {} samples, got {}", grid.len(), doc.samples.len()),
        });
    }
    let samples = doc.samples.iter().map(|p| Complex64::new(p[0], p[1])).collect();
    Ok(SampledSignal { grid, samples, label: doc.label, provenance: doc.provenance })
}

pub fn config_to_json(c: &DetectConfig) -> String {
    emit(c)
}

pub fn config_from_json(text: &str) -> Result<DetectConfig> {
    parse(text)
}

pub fn report_to_json(r: &WaveFrontReport) -> String {
    emit(r)
}

pub fn report_from_json(text: &str) -> Result<WaveFrontReport> {
    parse(text)
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    emit(v)
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    parse(text)
}
