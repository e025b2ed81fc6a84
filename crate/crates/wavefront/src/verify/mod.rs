//! Executable pass/fail suites over a fixed corpus.
//!
//! Each suite turns one group of properties into a [`SuiteReport`]. Cases
//! run in parallel and are reported in id order, so two runs with the same
//! [`VerifyConfig`] serialize identically apart from `wall_time`.

mod corpus;
mod suites;

use std::collections::BTreeMap;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::config::DetectConfig;
use crate::detect::{detect_from_magnitude, Trust};
use crate::error::{Error, Result};
use crate::grid::{make_grid, GridSpec};
use crate::operators::{LocalizationSymbol, PolyOperator};
use crate::report::WaveFrontReport;
use crate::signal::SampledSignal;
use crate::transform::{stft_adjoint, stft_field, StftField};
use crate::window::Window;

pub use corpus::{bump_train, default_corpus, CorpusEntry, ARC_DEGREES};
pub use suites::{
    run_covariance_suite, run_density_suite, run_microellipticity_suite, run_microlocality_suite, run_oracle_suite,
};

pub const SUITES: [&str; 5] = ["oracle", "covariance", "microlocality", "microellipticity", "density"];

/// Deliberate defects used to show that a suite can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Analysis transform and spectral multipliers scaled by 2.
    Normalization,
    /// Frequency axis of the analysis transform and of `D` mirrored.
    SignFlip,
    /// Classification threshold `eps_min` forced to 0.
    ThresholdZero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    pub grid: GridSpec,
    /// Grid size for the exhaustive FFT-against-quadrature comparison.
    #[serde(default = "default_oracle_n")]
    pub oracle_n: usize,
    pub detect: DetectConfig,
    /// Corpus ids to run; `None` runs the whole corpus.
    #[serde(default)]
    pub corpus: Option<Vec<String>>,
    #[serde(default = "default_eps_list")]
    pub eps_list: Vec<f64>,
    #[serde(default)]
    pub fault: Option<Fault>,
    #[serde(default)]
    pub seed: u64,
}

fn default_oracle_n() -> usize {
    64
}

fn default_eps_list() -> Vec<f64> {
    vec![0.3, 0.1, 0.03, 0.01]
}

impl VerifyConfig {
    pub fn for_grid(grid: GridSpec) -> VerifyConfig {
        VerifyConfig {
            grid,
            oracle_n: default_oracle_n(),
            detect: DetectConfig::for_grid(&grid),
            corpus: None,
            eps_list: default_eps_list(),
            fault: None,
            seed: 0,
        }
    }

    pub fn with_fault(mut self, fault: Fault) -> VerifyConfig {
        self.fault = Some(fault);
        self
    }

    /// The selected corpus entries, in corpus order.
    pub fn corpus(&self) -> Result<Vec<CorpusEntry>> {
        if self.grid.d != 1 {
            return Err(Error::BadDimension(self.grid.d));
        }
        self.detect.check_grid(&self.grid)?;
        let all = default_corpus(self.grid, self.detect.step(), self.detect.delta)?;
        let Some(ids) = &self.corpus else {
            return Ok(all);
        };
        if ids.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        ids.iter()
            .map(|id| {
                all.iter()
                    .find(|e| &e.id == id)
                    .cloned()
                    .ok_or_else(|| Error::Unknown { what: "corpus entry", name: id.clone() })
            })
            .collect()
    }
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig::for_grid(make_grid(crate::config::L_DEFAULT, crate::config::N_DEFAULT, 1).unwrap())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Verdict {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseResult {
    pub id: String,
    /// SHA-256 of the case parameters and input samples.
    pub digest: String,
    /// Non-finite values are written as strings ("inf", "-inf", "nan").
    pub metrics: BTreeMap<String, Value>,
    pub tol: f64,
    pub verdict: Verdict,
}

impl CaseResult {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Numeric metric, decoding the string forms of non-finite values.
    pub fn metric(&self, name: &str) -> Option<f64> {
        match self.metrics.get(name)? {
            Value::Number(v) => v.as_f64(),
            Value::String(s) => s.parse().ok(),
            Value::Bool(b) => Some(*b as u8 as f64),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub cases: Vec<CaseResult>,
    pub overall: Verdict,
    /// Seconds.
    pub wall_time: f64,
}

impl SuiteReport {
    fn assemble(suite: &str, mut cases: Vec<CaseResult>, start: Instant) -> SuiteReport {
        cases.sort_by(|a, b| a.id.cmp(&b.id));
        let overall = Verdict::from_bool(cases.iter().all(CaseResult::passed));
        SuiteReport { suite: suite.into(), cases, overall, wall_time: start.elapsed().as_secs_f64() }
    }

    pub fn passed(&self) -> bool {
        self.overall == Verdict::Pass
    }

    pub fn case(&self, id: &str) -> Option<&CaseResult> {
        self.cases.iter().find(|c| c.id == id)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CaseResult> {
        self.cases.iter().filter(|c| !c.passed())
    }
}

/// Runs one suite by name.
pub fn run_suite(name: &str, cfg: &VerifyConfig) -> Result<SuiteReport> {
    match name {
        "oracle" => run_oracle_suite(cfg),
        "covariance" => run_covariance_suite(cfg),
        "microlocality" => run_microlocality_suite(cfg),
        "microellipticity" => run_microellipticity_suite(cfg),
        "density" => run_density_suite(cfg),
        _ => Err(Error::Unknown { what: "suite", name: name.into() }),
    }
}

fn metric_value(v: f64) -> Value {
    if v.is_finite() {
        Value::from(v)
    } else if v.is_nan() {
        Value::from("nan")
    } else if v > 0.0 {
        Value::from("inf")
    } else {
        Value::from("-inf")
    }
}

/// Builder for one case.
struct Case {
    id: String,
    hasher: Sha256,
    metrics: BTreeMap<String, Value>,
}

impl Case {
    fn new(id: impl Into<String>) -> Case {
        let id = id.into();
        let mut hasher = Sha256::new();
        hasher.update(id.as_bytes());
        Case { id, hasher, metrics: BTreeMap::new() }
    }

    fn input(mut self, u: &SampledSignal) -> Case {
        let g = u.grid;
        self.hasher.update((g.d as u64).to_le_bytes());
        self.hasher.update(g.l.to_le_bytes());
        self.hasher.update((g.n as u64).to_le_bytes());
        for z in &u.samples {
            self.hasher.update(z.re.to_le_bytes());
            self.hasher.update(z.im.to_le_bytes());
        }
        self
    }

    fn metric(&mut self, name: &str, v: f64) {
        self.metrics.insert(name.into(), metric_value(v));
    }

    fn note(&mut self, name: &str, v: impl Into<Value>) {
        self.metrics.insert(name.into(), v.into());
    }

    fn finish(self, tol: f64, ok: bool) -> CaseResult {
        let digest = self.hasher.finalize().iter().map(|b| format!("{b:02x}")).collect();
        CaseResult { id: self.id, digest, metrics: self.metrics, tol, verdict: Verdict::from_bool(ok) }
    }

    /// A case whose computation errored fails with the message recorded.
    fn error(mut self, tol: f64, e: &Error) -> CaseResult {
        self.note("error", e.to_string());
        self.finish(tol, false)
    }

    fn settle(self, tol: f64, body: impl FnOnce(&mut Case) -> Result<bool>) -> CaseResult {
        let mut c = self;
        match body(&mut c) {
            Ok(ok) => c.finish(tol, ok),
            Err(e) => c.error(tol, &e),
        }
    }
}

/// Library calls with the configured fault applied.
struct Ctx<'a> {
    cfg: &'a VerifyConfig,
}

impl<'a> Ctx<'a> {
    fn new(cfg: &'a VerifyConfig) -> Ctx<'a> {
        Ctx { cfg }
    }

    fn fault(&self) -> Option<Fault> {
        self.cfg.fault
    }

    fn field(&self, u: &SampledSignal, g: &Window) -> Result<StftField> {
        let mut f = stft_field(u, g)?;
        match self.fault() {
            Some(Fault::Normalization) => f.values.iter_mut().for_each(|v| *v *= 2.0),
            Some(Fault::SignFlip) => {
                let n = f.n();
                for row in f.values.chunks_mut(n) {
                    // xi_k -> -xi_k is k -> n - k; k = 0 (xi = -xi_max) stays
                    row[1..].reverse();
                }
            }
            _ => {}
        }
        Ok(f)
    }

    fn standard_field(&self, u: &SampledSignal) -> Result<StftField> {
        self.field(u, &Window::standard(u.grid))
    }

    fn detect_cfg(&self, dcfg: &DetectConfig) -> DetectConfig {
        let mut c = dcfg.clone();
        if self.fault() == Some(Fault::ThresholdZero) {
            c.eps_min = 0.0;
        }
        c
    }

    fn detect(&self, u: &SampledSignal) -> Result<WaveFrontReport> {
        self.detect_with(u, &self.cfg.detect)
    }

    fn detect_with(&self, u: &SampledSignal, dcfg: &DetectConfig) -> Result<WaveFrontReport> {
        dcfg.check_grid(&u.grid)?;
        let c = self.detect_cfg(dcfg);
        if u.max_abs() == 0.0 {
            // exact zero has no wave front set
            return Ok(WaveFrontReport { config: c, d: 1, directions: Vec::new(), singular_arcs: Vec::new() });
        }
        let trust = Trust::for_signal(u, dcfg.window.sigma().unwrap_or(1.0), dcfg.floor)?;
        let f = self.field(u, &Window::from_kind(u.grid, dcfg.window)?)?;
        Ok(detect_from_magnitude(&u.grid, &f.abs(), &c, &trust).report)
    }

    /// Detection on `|V u|` after a phase-space Gaussian blur of width `sigma`.
    fn detect_blurred(&self, u: &SampledSignal, sigma: f64) -> Result<WaveFrontReport> {
        let dcfg = &self.cfg.detect;
        dcfg.check_grid(&u.grid)?;
        let trust = Trust::for_signal(u, 1.0, dcfg.floor)?;
        let f = self.standard_field(u)?;
        let mag = blur(&u.grid, &f.abs(), sigma);
        Ok(detect_from_magnitude(&u.grid, &mag, &self.detect_cfg(dcfg), &trust).report)
    }

    fn localize(&self, a: &LocalizationSymbol, u: &SampledSignal) -> Result<SampledSignal> {
        a.check()?;
        let f = self.standard_field(u)?;
        let mut v = stft_adjoint(&f.multiply(&a.recipe.values(&u.grid)?));
        v.label = u.label.clone();
        Ok(v)
    }

    fn polyop(&self, p: &PolyOperator, u: &SampledSignal) -> Result<SampledSignal> {
        let mut p = p.clone();
        for t in &mut p.terms {
            let k: u32 = t.alpha.iter().sum();
            match self.fault() {
                Some(Fault::Normalization) if k > 0 => t.c *= 2.0,
                Some(Fault::SignFlip) if k % 2 == 1 => t.c = -t.c,
                _ => {}
            }
        }
        crate::operators::apply_polyop(&p, u)
    }
}

/// Separable periodic Gaussian blur of an `n x n` phase-space lattice,
/// normalized to unit mass per axis.
fn blur(grid: &GridSpec, mag: &[f64], sigma: f64) -> Vec<f64> {
    let n = grid.n;
    let kernel = |h: f64| -> Vec<f64> {
        let reach = ((5.0 * sigma / h).ceil() as usize).min(n / 2 - 1);
        let w: Vec<f64> = (0..=2 * reach)
            .map(|m| {
                let t = (m as f64 - reach as f64) * h;
                (-t * t / (2.0 * sigma * sigma)).exp()
            })
            .collect();
        let s: f64 = w.iter().sum();
        w.into_iter().map(|v| v / s).collect()
    };
    let pass = |src: &[f64], w: &[f64], along_rows: bool| -> Vec<f64> {
        let reach = (w.len() / 2) as isize;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let mut acc = 0.0;
                for (m, wm) in w.iter().enumerate() {
                    let off = m as isize - reach;
                    let (a, b) = if along_rows {
                        (((i as isize + off).rem_euclid(n as isize)) as usize, k)
                    } else {
                        (i, ((k as isize + off).rem_euclid(n as isize)) as usize)
                    };
                    acc += wm * src[a * n + b];
                }
                out[i * n + k] = acc;
            }
        }
        out
    };
    let tmp = pass(mag, &kernel(grid.delta()), true);
    pass(&tmp, &kernel(grid.dxi()), false)
}

fn rel_l2(a: &[Complex64], b: &[Complex64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}
