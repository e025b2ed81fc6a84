//! `wavefront` command-line tool.
//!
//! Exit codes: 0 success, 2 usage or schema error, 3 runtime or numerical
//! error (including a failing verification suite).

mod files;

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};
use thiserror::Error;
use wavefront::detect::{detect_wf_detailed, profiles_csv};
use wavefront::operators::{apply_pipeline, Op};
use wavefront::report::SingularArc;
use wavefront::serial::{config_from_json, from_json, report_to_json, signal_from_json, signal_to_json, to_json};
use wavefront::synth::Recipe;
use wavefront::verify::{run_suite, Fault, SuiteReport, VerifyConfig, SUITES};
use wavefront::{make_grid, stft_field, DetectConfig, SampledSignal, WaveFrontReport, Window, WindowKind};

use files::{emit, parse_rows, parse_vec, read_text, write_atomic};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Lib(#[from] wavefront::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Lib(e) if e.is_usage() => 2,
            CliError::Usage(_) => 2,
            _ => 3,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Parser)]
#[command(name = "wavefront", version, about = "Numerical global wave front sets of sampled signals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a test signal.
    Synth(SynthArgs),
    /// Short-time Fourier transform of a signal (d = 1).
    Stft(StftArgs),
    /// Detect the wave front set of a signal.
    Wf(WfArgs),
    /// Apply an operator pipeline to a signal.
    Op(OpArgs),
    /// Run a verification suite, or `all`.
    Verify(VerifyArgs),
    /// Summarize a detection or suite report.
    Report(ReportArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// gaussian, hermite, chirp, constant or prescribed-wf.
    #[arg(long)]
    kind: String,
    /// Gaussian center, comma separated.
    #[arg(long)]
    center: Option<String>,
    /// Gaussian modulation, comma separated.
    #[arg(long = "mod")]
    modulation: Option<String>,
    #[arg(long)]
    sigma: Option<f64>,
    /// Hermite index.
    #[arg(long)]
    k: Option<usize>,
    /// Chirp matrix, rows separated by `;`.
    #[arg(long = "A")]
    a: Option<String>,
    /// Phase-space directions `y,eta`, separated by `;`.
    #[arg(long)]
    dirs: Option<String>,
    #[arg(long)]
    k_max: Option<usize>,
    #[arg(long = "L", default_value_t = 16.0)]
    l: f64,
    #[arg(long, default_value_t = 512)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    d: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StftArgs {
    #[arg(long)]
    input: PathBuf,
    /// Binary field dump.
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV of `x,xi,abs` over the lattice.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Dilated Gaussian window width.
    #[arg(long)]
    window_sigma: Option<f64>,
}

#[derive(Args)]
struct DetectOverrides {
    /// Detector configuration JSON; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    eps_min: Option<f64>,
    #[arg(long)]
    residual_max: Option<f64>,
    #[arg(long)]
    n_dir: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
    /// Comma separated shell radii.
    #[arg(long)]
    radii: Option<String>,
    #[arg(long)]
    shell_width: Option<f64>,
    #[arg(long)]
    window_sigma: Option<f64>,
}

#[derive(Args)]
struct WfArgs {
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    detect: DetectOverrides,
    /// Report JSON (stdout if absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-direction decay profiles as CSV.
    #[arg(long)]
    profiles: Option<PathBuf>,
    /// Binary dump of the analysed field (d = 1).
    #[arg(long)]
    field_dump: Option<PathBuf>,
}

#[derive(Args)]
struct OpArgs {
    #[arg(long)]
    input: PathBuf,
    /// JSON array of steps, or `@file`.
    #[arg(long)]
    pipeline: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name or `all`.
    suite: String,
    /// Verification configuration JSON.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma separated corpus ids.
    #[arg(long)]
    corpus: Option<String>,
    /// normalization, sign-flip or threshold-zero.
    #[arg(long)]
    fault: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    input: PathBuf,
    /// Per-direction table of a detection report as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(e.code());
    }
    let run = match cli.command {
        Command::Synth(a) => cmd_synth(a),
        Command::Stft(a) => cmd_stft(a),
        Command::Wf(a) => cmd_wf(a),
        Command::Op(a) => cmd_op(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Report(a) => cmd_report(a),
    };
    match run {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn init_threads() -> Result<()> {
    let Ok(v) = std::env::var("WAVEFRONT_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("WAVEFRONT_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Failed(e.to_string()))
}

fn read_signal(path: &Path) -> Result<SampledSignal> {
    Ok(signal_from_json(&read_text(path)?)?)
}

fn usage<T>(r: std::result::Result<T, String>, flag: &str) -> Result<T> {
    r.map_err(|e| CliError::Usage(format!("--{flag}: {e}")))
}

fn cmd_synth(a: SynthArgs) -> Result<()> {
    // assembled as JSON so unknown kinds and stray parameters get schema errors
    let mut m = Map::new();
    m.insert("kind".into(), json!(a.kind));
    if let Some(s) = &a.center {
        m.insert("center".into(), json!(usage(parse_vec(s), "center")?));
    }
    if let Some(s) = &a.modulation {
        m.insert("mod".into(), json!(usage(parse_vec(s), "mod")?));
    }
    if let Some(s) = a.sigma {
        m.insert("sigma".into(), json!(s));
    }
    if let Some(k) = a.k {
        m.insert("k".into(), json!(k));
    }
    if let Some(s) = &a.a {
        m.insert("A".into(), json!(usage(parse_rows(s), "A")?));
    }
    if let Some(s) = &a.dirs {
        m.insert("dirs".into(), json!(usage(parse_rows(s), "dirs")?));
    }
    if let Some(k) = a.k_max {
        m.insert("k_max".into(), json!(k));
    }
    if a.kind == "gaussian" {
        let zeros = json!(vec![0.0; a.d]);
        m.entry("center").or_insert_with(|| zeros.clone());
        m.entry("mod").or_insert(zeros);
    }
    let recipe: Recipe = from_json(&Value::Object(m).to_string())?;
    let grid = make_grid(a.l, a.n, a.d)?;
    let u = recipe.build(grid)?;
    emit(a.out.as_deref(), &signal_to_json(&u))
}

fn window_kind(sigma: Option<f64>) -> WindowKind {
    match sigma {
        Some(sigma) => WindowKind::DilatedGaussian { sigma },
        None => WindowKind::StandardGaussian,
    }
}

fn cmd_stft(a: StftArgs) -> Result<()> {
    let u = read_signal(&a.input)?;
    let w = Window::from_kind(u.grid, window_kind(a.window_sigma))?;
    let f = stft_field(&u, &w)?;
    if let Some(p) = &a.out {
        let mut buf = Vec::new();
        f.write_binary(&mut buf).map_err(|e| CliError::io(p, e))?;
        write_atomic(p, &buf)?;
    }
    if let Some(p) = &a.csv {
        let mut s = String::from("x,xi,abs\n");
        for i in 0..f.n() {
            for k in 0..f.n() {
                let (x, xi) = f.point(i, k);
                let _ = writeln!(s, "{x},{xi},{:e}", f.at(i, k).norm());
            }
        }
        write_atomic(p, s.as_bytes())?;
    }
    if a.out.is_none() && a.csv.is_none() {
        eprintln!("{}x{} field, max |V| {:.6e}, energy {:.6e}", f.n(), f.n(), f.max_abs(), f.energy());
    }
    Ok(())
}

fn detect_config(o: &DetectOverrides, u: &SampledSignal) -> Result<DetectConfig> {
    let mut c = match &o.config {
        Some(p) => config_from_json(&read_text(p)?)?,
        None => DetectConfig::for_grid(&u.grid),
    };
    if let Some(n) = o.n_dir {
        c.n_dir = n;
        if u.grid.d == 1 && o.delta.is_none() {
            c.delta = wavefront::config::DELTA_STEPS * 2.0 * PI / n as f64;
        }
    }
    if let Some(v) = o.eps_min {
        c.eps_min = v;
    }
    if let Some(v) = o.residual_max {
        c.residual_max = v;
    }
    if let Some(v) = o.delta {
        c.delta = v;
    }
    if let Some(s) = &o.radii {
        c.radii = usage(parse_vec(s), "radii")?;
    }
    if let Some(v) = o.shell_width {
        c.shell_width = v;
    }
    if o.window_sigma.is_some() {
        c.window = window_kind(o.window_sigma);
    }
    c.validate()?;
    Ok(c)
}

fn cmd_wf(a: WfArgs) -> Result<()> {
    let u = read_signal(&a.input)?;
    let cfg = detect_config(&a.detect, &u)?;
    let det = detect_wf_detailed(&u, &cfg)?;
    if let Some(p) = &a.profiles {
        write_atomic(p, profiles_csv(&det.profiles).as_bytes())?;
    }
    if let Some(p) = &a.field_dump {
        let f = stft_field(&u, &Window::from_kind(u.grid, cfg.window)?)?;
        let mut buf = Vec::new();
        f.write_binary(&mut buf).map_err(|e| CliError::io(p, e))?;
        write_atomic(p, &buf)?;
    }
    emit(a.out.as_deref(), &report_to_json(&det.report))
}

fn cmd_op(a: OpArgs) -> Result<()> {
    let text = match a.pipeline.strip_prefix('@') {
        Some(path) => read_text(Path::new(path))?,
        None => a.pipeline.clone(),
    };
    let ops: Vec<Op> = from_json(&text)?;
    let u = read_signal(&a.input)?;
    let v = apply_pipeline(&u, &ops)?;
    emit(a.out.as_deref(), &signal_to_json(&v))
}

fn cmd_verify(a: VerifyArgs) -> Result<()> {
    let names: Vec<&str> = match a.suite.as_str() {
        "all" => SUITES.to_vec(),
        s if SUITES.contains(&s) => vec![s],
        s => {
            return Err(CliError::Usage(format!("unknown suite `{s}` (expected one of {} or all)", SUITES.join(", "))))
        }
    };
    let mut cfg = match &a.config {
        Some(p) => from_json::<VerifyConfig>(&read_text(p)?)?,
        None => VerifyConfig::default(),
    };
    if let Some(s) = &a.corpus {
        cfg.corpus = Some(s.split(',').map(|t| t.trim().to_string()).collect());
    }
    if let Some(f) = &a.fault {
        cfg.fault = Some(from_json::<Fault>(&json!(f).to_string())?);
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    let mut reports = Vec::new();
    for name in names {
        let r = run_suite(name, &cfg)?;
        eprintln!("{}", suite_line(&r));
        reports.push(r);
    }
    let text = if reports.len() == 1 { to_json(&reports[0]) } else { to_json(&reports) };
    emit(a.out.as_deref(), &text)?;
    let failed: Vec<&str> = reports.iter().filter(|r| !r.passed()).map(|r| r.suite.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(format!("failing suites: {}", failed.join(", "))))
    }
}

fn suite_line(r: &SuiteReport) -> String {
    let bad: Vec<&str> = r.failures().map(|c| c.id.as_str()).collect();
    let mut s = format!(
        "{:<17} {}  {}/{} cases  {:.2} s",
        r.suite,
        if r.passed() { "PASS" } else { "FAIL" },
        r.cases.len() - bad.len(),
        r.cases.len(),
        r.wall_time
    );
    if !bad.is_empty() {
        let _ = write!(s, "  failing: {}", bad.join(" "));
    }
    s
}

fn arc_text(a: &SingularArc) -> String {
    let deg = |t: f64| t.to_degrees().rem_euclid(360.0);
    match a {
        SingularArc::Planar { start, end } if start == end => format!("{:.1} deg", deg(*start)),
        SingularArc::Planar { start, end } => {
            format!("[{:.1}, {:.1}] deg", deg(*start), deg(*start) + (end - start).to_degrees())
        }
        SingularArc::Point { omega } => format!("{:?}", omega.omega()),
    }
}

fn cmd_report(a: ReportArgs) -> Result<()> {
    let text = read_text(&a.input)?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| wavefront::Error::Schema { path: String::new(), message: e.to_string() })?;
    let summary = if value.get("directions").is_some() {
        let r: WaveFrontReport = from_json(&text)?;
        if let Some(p) = &a.csv {
            let mut s = String::from("index,angle,eps_hat,residual,class\n");
            for (i, e) in r.directions.iter().enumerate() {
                let _ = writeln!(s, "{i},{},{:e},{:e},{:?}", e.omega.angle(), e.eps_hat, e.residual, e.class);
            }
            write_atomic(p, s.as_bytes())?;
        }
        let singular = r.raw_singular().len();
        let mut s = format!(
            "d = {}, {} directions, {} classified singular, {} singular components",
            r.d,
            r.directions.len(),
            singular,
            r.singular_arcs.len()
        );
        for arc in &r.singular_arcs {
            let _ = write!(s, "\n  {}", arc_text(arc));
        }
        s
    } else if value.is_array() {
        let rs: Vec<SuiteReport> = from_json(&text)?;
        rs.iter().map(suite_line).collect::<Vec<_>>().join("\n")
    } else {
        suite_line(&from_json::<SuiteReport>(&text)?)
    };
    emit(a.out.as_deref(), &summary)
}
