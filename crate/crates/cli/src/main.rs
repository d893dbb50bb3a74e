mod beta;
mod commands;
mod manifest;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use manifest::{check_writable, manifest_path_for, read_manifest, write_file, ErrorRecord, Manifest, Versions};

#[derive(Debug, Parser, Serialize)]
#[command(name = "sturm", version, about = "Spectra and transport of Sturmian Schrödinger operators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "command")]
pub enum Command {
    /// Continued-fraction expansion, convergents and frequency statistics.
    Cf(CfArgs),
    /// Band enumeration of {|x_k| ≤ 2} or {|z_k| ≤ 2} as CSV.
    Spectrum(SpectrumArgs),
    /// Raymond-labeled bands and the band-length bound check.
    Bands(BandsArgs),
    /// Box-counting dimension lower bound and the older bound it replaces.
    Boxdim(BoxdimArgs),
    /// Time-averaged wave-packet spreading on a finite lattice.
    Transport(TransportArgs),
    /// Transfer-matrix upper-bound integrals for the outside probabilities.
    Dtbound(DtboundArgs),
    /// Closed-form transport-exponent bounds.
    Bounds(BoundsArgs),
    /// Sturmian lattice against its periodic approximant.
    DemoBallistic(DemoArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct Common {
    /// golden | silver | precious:a | list:a1,a2,... | real:x | pathological[:first,exponent]
    #[arg(long, default_value = "golden")]
    pub beta: String,
    /// Report path (JSON, or CSV for `spectrum`); stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Manifest path; defaults to `<out>.manifest.json` or `sturm-<command>.manifest.json`.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct CfArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 30)]
    pub depth: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long = "V", default_value_t = 24.0)]
    pub v: f64,
    #[arg(long)]
    pub level: usize,
    /// x, z or both.
    #[arg(long, default_value = "x")]
    pub selector: String,
    #[arg(long, default_value_t = 1000)]
    pub max_q: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct BandsArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long = "V", default_value_t = 24.0)]
    pub v: f64,
    #[arg(long, default_value_t = 6)]
    pub depth: usize,
    /// Labeled bands as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    pub max_q: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct BoxdimArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long = "V", default_value_t = 24.0)]
    pub v: f64,
    #[arg(long, default_value_t = 30)]
    pub depth: usize,
    /// Also box-count the enumerated bands of this level.
    #[arg(long)]
    pub box_level: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct TransportArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long = "V", default_value_t = 24.0)]
    pub v: f64,
    #[arg(long = "L", default_value_t = 800)]
    pub l: usize,
    /// Comma-separated times.
    #[arg(long = "T", value_delimiter = ',', required = true)]
    pub t: Vec<f64>,
    /// ballistic | boundary:max_mass,width | unchecked
    #[arg(long, default_value = "ballistic")]
    pub horizon: String,
    #[arg(long, default_value_t = 60)]
    pub depth: usize,
    #[arg(long, default_value_t = 1.0)]
    pub alpha_max: f64,
    #[arg(long, default_value_t = 0.01)]
    pub alpha_step: f64,
    #[arg(long, default_value_t = 10.0)]
    pub upper_threshold: f64,
    #[arg(long, default_value_t = 0.1)]
    pub lower_threshold: f64,
    #[arg(long, default_value_t = 3.0)]
    pub min_decades: f64,
    /// Writes `<prefix>.a.csv`, `<prefix>.p.csv` and `<prefix>.moment.csv`.
    #[arg(long)]
    pub csv_prefix: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct DtboundArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long = "V", default_value_t = 24.0)]
    pub v: f64,
    #[arg(long = "T", value_delimiter = ',', required = true)]
    pub t: Vec<f64>,
    #[arg(long, default_value_t = 2048)]
    pub grid: usize,
    /// Refine the grid to spacing at most 1/(4T).
    #[arg(long)]
    pub auto_resolution: bool,
    /// Target decay exponent m in T³·I vs T^(−m).
    #[arg(long, default_value_t = 1.0)]
    pub m: f64,
    /// general | no-ones
    #[arg(long, default_value = "general")]
    pub mode: String,
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    #[arg(long, default_value_t = 200)]
    pub depth: usize,
    /// Integrand samples as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long = "V", default_value_t = 100.0)]
    pub v: f64,
    #[arg(long, default_value_t = 60)]
    pub depth: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct DemoArgs {
    /// Only `pathological[:first,exponent]` or explicit lists make sense here.
    #[arg(long, default_value = "pathological")]
    pub beta: String,
    #[arg(long, default_value_t = 4)]
    pub depth: usize,
    #[arg(long = "V", default_value_t = 24.0)]
    pub v: f64,
    /// Approximant level n (period q_n).
    #[arg(long, default_value_t = 3)]
    pub level: usize,
    #[arg(long = "L", default_value_t = 700)]
    pub l: usize,
    #[arg(long = "T", value_delimiter = ',')]
    pub t: Option<Vec<f64>>,
    #[arg(long, default_value = "ballistic")]
    pub horizon: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub csv_prefix: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ReplayArgs {
    #[arg(long)]
    pub manifest: PathBuf,
}

/// Failure classes and their exit codes.
#[derive(Debug)]
pub enum Failure {
    Config { module: &'static str, message: String },
    Numeric { module: &'static str, message: String },
    Hypothesis { module: &'static str, message: String },
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Config { .. } => 2,
            Failure::Numeric { .. } => 3,
            Failure::Hypothesis { .. } => 4,
        }
    }

    pub fn record(&self) -> ErrorRecord {
        let (module, message) = match self {
            Failure::Config { module, message } | Failure::Numeric { module, message } | Failure::Hypothesis { module, message } => {
                (*module, message.clone())
            }
        };
        ErrorRecord { module: module.into(), message, exit_code: self.code() }
    }
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Cf(_) => "cf",
            Command::Spectrum(_) => "spectrum",
            Command::Bands(_) => "bands",
            Command::Boxdim(_) => "boxdim",
            Command::Transport(_) => "transport",
            Command::Dtbound(_) => "dtbound",
            Command::Bounds(_) => "bounds",
            Command::DemoBallistic(_) => "demo-ballistic",
            Command::Replay(_) => "replay",
        }
    }

    fn out_and_manifest(&self) -> (Option<PathBuf>, Option<PathBuf>) {
        let c = match self {
            Command::Cf(a) => &a.common,
            Command::Spectrum(a) => &a.common,
            Command::Bands(a) => &a.common,
            Command::Boxdim(a) => &a.common,
            Command::Transport(a) => &a.common,
            Command::Dtbound(a) => &a.common,
            Command::Bounds(a) => &a.common,
            Command::DemoBallistic(a) => return (a.out.clone(), a.manifest.clone()),
            Command::Replay(_) => return (None, None),
        };
        (c.out.clone(), c.manifest.clone())
    }

    fn extra_outputs(&self) -> Vec<PathBuf> {
        let prefixed = |p: &PathBuf| ["a", "p", "moment"].map(|s| commands::with_suffix(p, &format!("{s}.csv"))).to_vec();
        match self {
            Command::Bands(a) => a.csv.iter().cloned().collect(),
            Command::Dtbound(a) => a.csv.iter().cloned().collect(),
            Command::Transport(a) => a.csv_prefix.as_ref().map(prefixed).unwrap_or_default(),
            Command::DemoBallistic(a) => a.csv_prefix.iter().map(|p| commands::with_suffix(p, "moment.csv")).collect(),
            _ => Vec::new(),
        }
    }
}

/// What a command produced: the main report and any side files.
pub struct Outcome {
    pub report: String,
    pub files: Vec<(PathBuf, String)>,
    pub warnings: Vec<String>,
}

fn run(argv: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(std::iter::once("sturm".to_string()).chain(argv.iter().cloned())) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Command::Replay(r) = &cli.command {
        return match read_manifest(&r.manifest) {
            Ok(m) if m.argv.first().map(String::as_str) != Some("replay") => run(m.argv),
            Ok(_) => {
                eprintln!("error [cli]: a manifest cannot replay another replay");
                2
            }
            Err(e) => {
                eprintln!("error [cli]: {e}");
                2
            }
        };
    }

    let start = Instant::now();
    let name = cli.command.name();
    let (out, manifest) = cli.command.out_and_manifest();
    let manifest_path = manifest
        .or_else(|| out.as_deref().map(manifest_path_for))
        .unwrap_or_else(|| PathBuf::from(format!("sturm-{name}.manifest.json")));
    let mut outputs: Vec<PathBuf> = out.iter().cloned().collect();
    outputs.extend(cli.command.extra_outputs());
    outputs.push(manifest_path.clone());
    if let Err(e) = check_writable(&outputs) {
        eprintln!("error [cli]: {e}");
        return 2;
    }

    let result = commands::dispatch(&cli.command).and_then(|o| {
        match &out {
            Some(p) => write_file(p, &o.report).map_err(|message| Failure::Config { module: "cli", message })?,
            None => print!("{}", o.report),
        }
        for (p, text) in &o.files {
            write_file(p, text).map_err(|message| Failure::Config { module: "cli", message })?;
        }
        Ok(o)
    });

    let (warnings, artifacts, error) = match &result {
        Ok(o) => {
            let mut arts: Vec<String> = out.iter().map(|p| p.display().to_string()).collect();
            arts.extend(o.files.iter().map(|(p, _)| p.display().to_string()));
            (o.warnings.clone(), arts, None)
        }
        Err(f) => (Vec::new(), Vec::new(), Some(f.record())),
    };
    let code = error.as_ref().map_or(0, |e| e.exit_code);
    let m = Manifest {
        tool: "sturm".into(),
        versions: Versions::current(),
        command: name.into(),
        argv,
        config: serde_json::to_value(&cli.command).unwrap_or(serde_json::Value::Null),
        artifacts,
        warnings,
        wall_time_seconds: start.elapsed().as_secs_f64(),
        status: if code == 0 { "ok".into() } else { "error".into() },
        error,
    };
    for w in &m.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(e) = &m.error {
        eprintln!("error [{}]: {}", e.module, e.message);
    }
    let text = serde_json::to_string_pretty(&m).expect("manifest serializes") + "\n";
    if let Err(e) = write_file(&manifest_path, &text) {
        eprintln!("error [cli]: {e}");
        return 2;
    }
    code
}

fn main() -> ExitCode {
    let code = run(std::env::args().skip(1).collect());
    ExitCode::from(code as u8)
}
