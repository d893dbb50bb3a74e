//! Subcommand implementations.

use crate::beta::BetaSpec;
use crate::{
    BandsArgs, BoundsArgs, BoxdimArgs, CfArgs, Command, DemoArgs, DtboundArgs, Failure, Outcome, SpectrumArgs,
    TransportArgs,
};
use serde::Serialize;
use std::path::{Path, PathBuf};
use sturm_core::cf::{
    convergents, frequency_stats, CfError, ContinuedFraction, DensityVerdict, FrequencyStats, Origin, KHINTCHIN_CONSTANT,
    LEVY_KHINTCHIN_D,
};
use sturm_core::estimate::{EstimateSource, TailEstimate};
use sturm_core::io::{num, Csv};
use sturm_core::spectrum::report::{band_spectrum_csv, labeled_bands_csv};
use sturm_core::spectrum::{
    band_hierarchy, box_count, box_dimension_lower_bound, counting_recursion, gamma_v, label_bands, length_bounds,
    prior_bound_comparison, CountingState, DimensionReport, GammaMode, PriorBounds, RaymondType, SearchOptions,
    SpectrumError, TraceSelector,
};
use sturm_core::trace::potential::SturmianPotential;
use sturm_core::transport::{
    alpha_grid, ballistic_demo, closed_form_bounds, dt_decay_slope, dt_upper_bound_integral, evolve_and_average,
    exponent_fit, BallisticOptions, ClosedFormBounds, DtBoundEvaluation, DtOptions, ExponentFit, FitOptions,
    HorizonPolicy, LatticeHamiltonian, LinearFit, TransportError, TransportRun,
};

pub fn with_suffix(p: &Path, suffix: &str) -> PathBuf {
    let name = p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    p.with_file_name(format!("{name}.{suffix}"))
}

fn config(module: &'static str, message: impl Into<String>) -> Failure {
    Failure::Config { module, message: message.into() }
}

fn cf_fail(e: CfError) -> Failure {
    match e {
        CfError::Overflow { .. } => Failure::Numeric { module: "cf", message: e.to_string() },
        _ => config("cf", e.to_string()),
    }
}

fn spectrum_fail(e: SpectrumError) -> Failure {
    let message = e.to_string();
    match e {
        SpectrumError::CouplingTooSmall { .. } => Failure::Hypothesis { module: "spectrum", message },
        SpectrumError::CapExceeded { .. } | SpectrumError::LevelBeyondPrefix { .. } => config("spectrum", message),
        _ => Failure::Numeric { module: "spectrum", message },
    }
}

fn transport_fail(e: TransportError) -> Failure {
    let message = e.to_string();
    match e {
        TransportError::Spectrum(s) => spectrum_fail(s),
        TransportError::Hypothesis(_) => Failure::Hypothesis { module: "transport", message },
        TransportError::Potential(_)
        | TransportError::BadTimes
        | TransportError::HorizonViolated { .. }
        | TransportError::WindowViolated { .. }
        | TransportError::InsufficientDecades { .. } => config("transport", message),
        _ => Failure::Numeric { module: "transport", message },
    }
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report serializes") + "\n"
}

fn resolve(beta: &str, depth: usize, warnings: &mut Vec<String>) -> Result<ContinuedFraction, Failure> {
    let spec: BetaSpec = beta.parse().map_err(|e: String| config("cli", e))?;
    let r = spec.resolve(depth).map_err(cf_fail)?;
    warnings.extend(r.warnings);
    Ok(r.cf)
}

fn surrogate(name: &str, e: &TailEstimate, warnings: &mut Vec<String>) {
    if let (EstimateSource::TailWindow, Some((a, b))) = (e.source, e.window) {
        warnings.push(format!("{name} is a finite-prefix surrogate taken over levels {a}..={b}"));
    }
}

fn parse_horizon(s: &str) -> Result<HorizonPolicy, Failure> {
    match s.split_once(':') {
        None if s == "ballistic" => Ok(HorizonPolicy::Ballistic),
        None if s == "unchecked" => Ok(HorizonPolicy::Unchecked),
        Some(("boundary", rest)) => {
            let (m, w) = rest.split_once(',').ok_or_else(|| config("cli", "expected boundary:max_mass,width"))?;
            let max_mass = m.trim().parse().map_err(|e| config("cli", format!("bad max_mass '{m}': {e}")))?;
            let width = w.trim().parse().map_err(|e| config("cli", format!("bad width '{w}': {e}")))?;
            Ok(HorizonPolicy::BoundaryMass { max_mass, width })
        }
        _ => Err(config("cli", format!("unknown horizon policy '{s}' (ballistic, boundary:max_mass,width, unchecked)"))),
    }
}

pub fn dispatch(cmd: &Command) -> Result<Outcome, Failure> {
    match cmd {
        Command::Cf(a) => cf(a),
        Command::Spectrum(a) => spectrum(a),
        Command::Bands(a) => bands(a),
        Command::Boxdim(a) => boxdim(a),
        Command::Transport(a) => transport(a),
        Command::Dtbound(a) => dtbound(a),
        Command::Bounds(a) => bounds(a),
        Command::DemoBallistic(a) => demo(a),
        Command::Replay(_) => Err(config("cli", "replay is handled before dispatch")),
    }
}

#[derive(Serialize)]
struct CfReport<'a> {
    beta: &'a str,
    quotients: &'a [u64],
    origin: Origin,
    value: f64,
    p: Vec<String>,
    q: Vec<String>,
    g: Vec<String>,
    stats: &'a FrequencyStats,
    d_limsup: TailEstimate,
    d_liminf: TailEstimate,
    exact_d: Option<f64>,
    c_limsup: TailEstimate,
    m_liminf: TailEstimate,
    bounded_density: DensityVerdict,
    levy_khintchin_d: f64,
    khintchin_constant: f64,
}

fn cf(a: &CfArgs) -> Result<Outcome, Failure> {
    let mut warnings = Vec::new();
    let cf = resolve(&a.common.beta, a.depth, &mut warnings)?;
    let table = convergents(&cf);
    let stats = frequency_stats(&cf);
    let report = CfReport {
        beta: &a.common.beta,
        quotients: cf.quotients(),
        origin: cf.origin(),
        value: cf.value(),
        p: table.p_strings(),
        q: table.q_strings(),
        g: stats.g.iter().map(|g| g.to_string()).collect(),
        stats: &stats,
        d_limsup: stats.d_limsup(),
        d_liminf: stats.d_liminf(),
        exact_d: stats.exact_d(),
        c_limsup: stats.c_limsup(),
        m_liminf: stats.m_liminf(),
        bounded_density: stats.bounded_density(),
        levy_khintchin_d: LEVY_KHINTCHIN_D,
        khintchin_constant: KHINTCHIN_CONSTANT,
    };
    for (name, e) in [("D", &report.d_limsup), ("C", &report.c_limsup), ("M", &report.m_liminf)] {
        surrogate(name, e, &mut warnings);
    }
    Ok(Outcome { report: json(&report), files: Vec::new(), warnings })
}

fn search_opts(max_q: u64) -> SearchOptions {
    SearchOptions { max_q, ..SearchOptions::default() }
}

fn spectrum(a: &SpectrumArgs) -> Result<Outcome, Failure> {
    let mut warnings = Vec::new();
    let cf = resolve(&a.common.beta, a.level.max(1), &mut warnings)?;
    let selectors: &[TraceSelector] = match a.selector.as_str() {
        "x" => &[TraceSelector::X],
        "z" => &[TraceSelector::Z],
        "both" => &[TraceSelector::X, TraceSelector::Z],
        s => return Err(config("cli", format!("unknown selector '{s}' (x, z, both)"))),
    };
    let h = band_hierarchy(&cf, a.v, a.level, &search_opts(a.max_q)).map_err(spectrum_fail)?;
    let mut report = String::new();
    for (i, sel) in selectors.iter().enumerate() {
        let csv = band_spectrum_csv(&h.spectrum(a.level, *sel));
        let body = if i == 0 { csv.as_str() } else { csv.split_once('\n').map_or("", |(_, rest)| rest) };
        report.push_str(body);
    }
    Ok(Outcome { report, files: Vec::new(), warnings })
}

#[derive(Serialize)]
struct LevelSummary {
    level: usize,
    type_i: usize,
    type_ii: usize,
    type_iii: usize,
}

#[derive(Serialize)]
struct LengthViolation {
    level: usize,
    index: String,
    width: f64,
    lower: f64,
    upper: f64,
}

#[derive(Serialize)]
struct BandsReport {
    coupling: f64,
    quotients: Vec<u64>,
    levels: Vec<LevelSummary>,
    length_checks: usize,
    length_within: usize,
    length_violations: Vec<LengthViolation>,
    edge_tolerance: f64,
}

fn bands(a: &BandsArgs) -> Result<Outcome, Failure> {
    let mut warnings = Vec::new();
    let cf = resolve(&a.common.beta, a.depth.max(1), &mut warnings)?;
    let h = band_hierarchy(&cf, a.v, a.depth, &search_opts(a.max_q)).map_err(spectrum_fail)?;
    let l = label_bands(&h).map_err(spectrum_fail)?;
    let tol = 1e-10;
    let (mut checks, mut within, mut violations) = (0, 0, Vec::new());
    for lev in &l.levels {
        for b in &lev.bands {
            let lb = length_bounds(&b.index, &cf, a.v).map_err(spectrum_fail)?;
            let w = b.interval.width();
            checks += 1;
            if lb.lower - tol <= w && w <= lb.upper + tol {
                within += 1;
            } else {
                violations.push(LengthViolation { level: lev.level, index: b.index_word(), width: w, lower: lb.lower, upper: lb.upper });
            }
        }
    }
    let report = BandsReport {
        coupling: a.v,
        quotients: cf.quotients().to_vec(),
        levels: l
            .levels
            .iter()
            .map(|lev| LevelSummary {
                level: lev.level,
                type_i: lev.count(RaymondType::I),
                type_ii: lev.count(RaymondType::II),
                type_iii: lev.count(RaymondType::III),
            })
            .collect(),
        length_checks: checks,
        length_within: within,
        length_violations: violations,
        edge_tolerance: tol,
    };
    let files = a.csv.iter().map(|p| (p.clone(), labeled_bands_csv(&l))).collect();
    Ok(Outcome { report: json(&report), files, warnings })
}

#[derive(Serialize)]
struct BoxCheck {
    level: usize,
    epsilon: f64,
    boxes: String,
    half_long_bands: f64,
    holds: bool,
}

#[derive(Serialize)]
struct BoxdimReport {
    dimension: DimensionReport,
    prior: PriorBounds,
    counting: Vec<CountingState>,
    box_check: Option<BoxCheck>,
}

fn boxdim(a: &BoxdimArgs) -> Result<Outcome, Failure> {
    let mut warnings = Vec::new();
    let cf = resolve(&a.common.beta, a.depth, &mut warnings)?;
    let dimension = box_dimension_lower_bound(&cf, a.v).map_err(spectrum_fail)?;
    let prior = prior_bound_comparison(&cf, a.v).map_err(spectrum_fail)?;
    let counting = counting_recursion(&cf, a.v, cf.len());
    surrogate("C", &dimension.c, &mut warnings);
    surrogate("M", &dimension.m, &mut warnings);
    surrogate("the counting-ratio liminf", &dimension.counting_ratio, &mut warnings);
    let box_check = match a.box_level {
        Some(k) => {
            let h = band_hierarchy(&cf, a.v, k, &SearchOptions::default()).map_err(spectrum_fail)?;
            let l = label_bands(&h).map_err(spectrum_fail)?;
            let eps = counting[k].epsilon();
            let ivs: Vec<_> = l.levels[k].bands.iter().map(|b| b.interval).collect();
            let boxes = box_count(&ivs, eps);
            let half = 0.5 * counting[k].long_band_total_f64();
            Some(BoxCheck { level: k, epsilon: eps, boxes: boxes.to_string(), half_long_bands: half, holds: boxes as f64 >= half })
        }
        None => None,
    };
    Ok(Outcome { report: json(&BoxdimReport { dimension, prior, counting, box_check }), files: Vec::new(), warnings })
}

#[derive(Serialize)]
struct TransportReport<'a> {
    beta: &'a str,
    coupling: f64,
    run: &'a TransportRun,
    exponent_fit: Option<ExponentFit>,
    bounds: Option<ClosedFormBounds>,
}

fn transport(a: &TransportArgs) -> Result<Outcome, Failure> {
    let mut warnings = Vec::new();
    let cf = resolve(&a.common.beta, a.depth, &mut warnings)?;
    if a.v <= 20.0 {
        warnings.push(format!("coupling V = {} <= 20: the closed-form bounds do not apply", a.v));
    }
    let horizon = parse_horizon(&a.horizon)?;
    let pot = SturmianPotential::new(&cf, a.v, a.l + 1).map_err(|e| transport_fail(e.into()))?;
    let h = LatticeHamiltonian::from_potential(&pot, a.l).map_err(transport_fail)?;
    let run = evolve_and_average(&h, &a.t, horizon).map_err(transport_fail)?;
    warnings.extend(run.warnings.iter().cloned());
    let opts = FitOptions {
        upper_threshold: a.upper_threshold,
        lower_threshold: a.lower_threshold,
        min_decades: a.min_decades,
        noise_floor: None,
    };
    let exponent_fit = match exponent_fit(&run, &alpha_grid(a.alpha_max, a.alpha_step), opts) {
        Ok(f) => {
            warnings.push(format!(
                "exponent fit over T in [{}, {}] with thresholds {} / {}",
                f.t_window.0, f.t_window.1, opts.upper_threshold, opts.lower_threshold
            ));
            Some(f)
        }
        Err(e) => {
            warnings.push(format!("exponent fit skipped: {e}"));
            None
        }
    };
    let bounds = if a.v > 20.0 {
        let b = closed_form_bounds(&cf, a.v).map_err(transport_fail)?;
        surrogate("D", &b.d, &mut warnings);
        Some(b)
    } else {
        None
    };
    let mut files = Vec::new();
    if let Some(p) = &a.csv_prefix {
        files.push((with_suffix(p, "a.csv"), run.a_csv()));
        files.push((with_suffix(p, "p.csv"), run.p_csv()));
        files.push((with_suffix(p, "moment.csv"), run.moment_csv()));
    }
    let report = TransportReport { beta: &a.common.beta, coupling: a.v, run: &run, exponent_fit, bounds };
    Ok(Outcome { report: json(&report), files, warnings })
}

#[derive(Serialize)]
struct DtReport<'a> {
    beta: &'a str,
    coupling: f64,
    gamma: f64,
    options: DtOptions,
    evaluations: Vec<DtBoundEvaluation>,
    decay_slope: Option<LinearFit>,
}

fn dtbound(a: &DtboundArgs) -> Result<Outcome, Failure> {
    let mut warnings = Vec::new();
    let cf = resolve(&a.common.beta, a.depth, &mut warnings)?;
    let mode = match a.mode.as_str() {
        "general" => GammaMode::General,
        "no-ones" => GammaMode::NoOnes,
        m => return Err(config("cli", format!("unknown mode '{m}' (general, no-ones)"))),
    };
    if a.t.is_empty() || a.t.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(config("cli", "times must be finite and positive"));
    }
    let options = DtOptions {
        grid_points: a.grid,
        auto_resolution: a.auto_resolution,
        decay_m: a.m,
        mode,
        delta: a.delta,
        max_level: a.depth,
        ..DtOptions::default()
    };
    let gamma = gamma_v(&cf, a.v, mode).map_err(spectrum_fail)?.gamma;
    let evaluations: Vec<DtBoundEvaluation> = a
        .t
        .iter()
        .map(|&t| dt_upper_bound_integral(&cf, a.v, t, &options))
        .collect::<Result<_, _>>()
        .map_err(transport_fail)?;
    for e in &evaluations {
        if e.escaped_fraction < 1.0 {
            warnings.push(format!(
                "T = {}: escape reached on only {:.4} of the energy grid",
                e.scale.t, e.escaped_fraction
            ));
        }
    }
    let decay_slope = (evaluations.len() >= 2).then(|| dt_decay_slope(&evaluations));
    let files = a
        .csv
        .iter()
        .map(|p| {
            let mut csv = Csv::new(&["T", "energy", "right", "left"]);
            for e in &evaluations {
                let h = 2.0 * e.k_energy / (e.grid_points - 1) as f64;
                for (i, (r, l)) in e.integrand_right.iter().zip(&e.integrand_left).enumerate() {
                    csv.row(&[num(e.scale.t), num(-e.k_energy + i as f64 * h), num(*r), num(*l)]);
                }
            }
            (p.clone(), csv.finish())
        })
        .collect();
    let report = DtReport { beta: &a.common.beta, coupling: a.v, gamma, options, evaluations, decay_slope };
    Ok(Outcome { report: json(&report), files, warnings })
}

fn bounds(a: &BoundsArgs) -> Result<Outcome, Failure> {
    let mut warnings = Vec::new();
    let cf = resolve(&a.common.beta, a.depth, &mut warnings)?;
    let b = closed_form_bounds(&cf, a.v).map_err(transport_fail)?;
    surrogate("D", &b.d, &mut warnings);
    surrogate("C", &b.c, &mut warnings);
    if !b.lower_applicable {
        warnings.push("partial-quotient density looks unbounded: the lower bound is not applicable".into());
    }
    Ok(Outcome { report: json(&b), files: Vec::new(), warnings })
}

fn demo(a: &DemoArgs) -> Result<Outcome, Failure> {
    let mut warnings = Vec::new();
    let cf = resolve(&a.beta, a.depth, &mut warnings)?;
    let mut opts = BallisticOptions { approximant_level: a.level, l: a.l, horizon: parse_horizon(&a.horizon)?, ..Default::default() };
    if let Some(t) = &a.t {
        opts.times = t.clone();
    }
    let d = ballistic_demo(&cf, a.v, &opts).map_err(transport_fail)?;
    warnings.extend(d.sturmian.warnings.iter().map(|w| format!("sturmian run: {w}")));
    warnings.extend(d.periodic.warnings.iter().map(|w| format!("periodic run: {w}")));
    let files = a
        .csv_prefix
        .iter()
        .map(|p| {
            let mut csv = Csv::new(&["T", "sturmian", "periodic"]);
            for ((t, s), q) in d.sturmian.times.iter().zip(&d.sturmian.moments).zip(&d.periodic.moments) {
                csv.row(&[num(*t), num(*s), num(*q)]);
            }
            (with_suffix(p, "moment.csv"), csv.finish())
        })
        .collect();
    Ok(Outcome { report: json(&d), files, warnings })
}
