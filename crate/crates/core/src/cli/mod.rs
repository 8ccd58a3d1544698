//! Command-line front end.
//!
//! Exit codes: 0 success, 1 other failure, 2 parse or usage error,
//! 3 resource cap, 4 result emitted without a certificate.

pub mod config;
pub mod grammar;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::group::{ball_enumerate, Group, GroupModel, Limits};
use crate::kernels::{direct_cnd_check, schoenberg_check, LengthKernel, DEFAULT_TOLERANCE, DEFAULT_T_GRID};
use crate::reconstruct::{epsilon_schedule, properness_audit, reconstruct, AuditOptions};
use crate::relative::{
    criterion_satisfied, h_invariance_check, quasi_normality, quotient_properness, relative_partition,
    relative_spectrum, relative_tail_model, CosetStructure, QuasiNormalityReport, CRITERION_LABEL,
};
use crate::report::{to_canonical_json, write_profile_csv};
use crate::spectral::{
    classify, growth_profile, omega_estimate, partition_function, spectrum_from_kernel, GrowthProfile,
    PartitionEstimate, SpectrumTruncation, Verdict, DEFAULT_TAIL_DEPTH,
};

pub use config::{parse_config, read_config, KNOWN_KEYS};
pub use grammar::{parse_group, parse_inclusion, parse_kernel, Term};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;
pub const EXIT_UNCERTIFIED: i32 = 4;

const DEFAULT_LAMBDA: f64 = 20.0;
const DEFAULT_PROFILE_DEPTH: usize = 10;
const DEFAULT_MAX_RADIUS: u64 = 64;
const DEFAULT_CHECK_RADIUS: u64 = 3;
const DEFAULT_PROBE_RADIUS: u64 = 1;
const DEFAULT_HORIZONS: [u64; 4] = [1, 2, 3, 4];
const DEFAULT_AUDIT_N: usize = 4;
/// Cutoffs at which relative properness is certified, besides `--lambda`.
const PROPERNESS_GRID: [f64; 5] = [0.0, 1.0, 2.0, 5.0, 10.0];
/// Balls with more elements than this report sizes only.
const MAX_LISTED_ELEMENTS: usize = 1000;

#[derive(Debug, Parser)]
#[command(name = "spectral-growth", version, about = "Spectral growth diagnostics for length functions on groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Enumerate the ball of radius n.
    Ball(JobArgs),
    /// Schoenberg and direct conditional negative definiteness checks.
    CndCheck(JobArgs),
    /// Eigenvalues of the multiplication operator up to lambda.
    Spectrum(JobArgs),
    /// Counting functions and growth estimators up to N.
    Growth(JobArgs),
    /// Partition function brackets on a t-grid.
    Partition(JobArgs),
    /// Finite-horizon growth classification.
    Classify(JobArgs),
    /// Invariance, properness, quasi-normality and relative partition for an inclusion.
    Relative(JobArgs),
    /// Resolvent reconstruction with schedule and properness audit.
    Reconstruct(JobArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Ball(_) => "ball",
            Command::CndCheck(_) => "cnd-check",
            Command::Spectrum(_) => "spectrum",
            Command::Growth(_) => "growth",
            Command::Partition(_) => "partition",
            Command::Classify(_) => "classify",
            Command::Relative(_) => "relative",
            Command::Reconstruct(_) => "reconstruct",
        }
    }

    fn args(&self) -> &JobArgs {
        match self {
            Command::Ball(a)
            | Command::CndCheck(a)
            | Command::Spectrum(a)
            | Command::Growth(a)
            | Command::Partition(a)
            | Command::Classify(a)
            | Command::Relative(a)
            | Command::Reconstruct(a) => a,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Job parameters. Every flag may also come from `--config`; flags win.
#[derive(Debug, Clone, Default, Args)]
pub struct JobArgs {
    #[arg(long)]
    pub group: Option<String>,
    #[arg(long)]
    pub kernel: Option<String>,
    #[arg(long)]
    pub inclusion: Option<String>,
    /// Ball radius.
    #[arg(long = "n")]
    pub n: Option<u64>,
    /// Profile depth; audit depth for reconstruct.
    #[arg(long = "N")]
    pub big_n: Option<usize>,
    /// Spectral cutoff.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Comma-separated t values.
    #[arg(long = "t", value_delimiter = ',')]
    pub t: Option<Vec<f64>>,
    /// Radius of positivity and invariance checks.
    #[arg(long)]
    pub radius: Option<u64>,
    /// Largest enumeration radius.
    #[arg(long = "max-radius")]
    pub max_radius: Option<u64>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Tail summation depth; truncation depth K for reconstruct.
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long = "probe-radius")]
    pub probe_radius: Option<u64>,
    /// Comma-separated orbit horizons.
    #[arg(long, value_delimiter = ',')]
    pub horizons: Option<Vec<u64>>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Flat `key = value` job file.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Parse(format!("bad value {value:?} for {key}")))
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value.split(',').map(|v| parse_value(key, v.trim())).collect()
}

fn fill<T>(slot: &mut Option<T>, parsed: impl FnOnce() -> Result<T>) -> Result<()> {
    if slot.is_none() {
        *slot = Some(parsed()?);
    }
    Ok(())
}

impl JobArgs {
    /// Fills unset fields from config entries.
    pub fn merge_config(&mut self, entries: &[(String, String)]) -> Result<()> {
        for (key, v) in entries {
            let k = key.as_str();
            match k {
                "group" => fill(&mut self.group, || Ok(v.clone()))?,
                "kernel" => fill(&mut self.kernel, || Ok(v.clone()))?,
                "inclusion" => fill(&mut self.inclusion, || Ok(v.clone()))?,
                "n" => fill(&mut self.n, || parse_value(k, v))?,
                "N" => fill(&mut self.big_n, || parse_value(k, v))?,
                "lambda" => fill(&mut self.lambda, || parse_value(k, v))?,
                "t" => fill(&mut self.t, || parse_list(k, v))?,
                "radius" => fill(&mut self.radius, || parse_value(k, v))?,
                "max-radius" => fill(&mut self.max_radius, || parse_value(k, v))?,
                "tolerance" => fill(&mut self.tolerance, || parse_value(k, v))?,
                "depth" => fill(&mut self.depth, || parse_value(k, v))?,
                "probe-radius" => fill(&mut self.probe_radius, || parse_value(k, v))?,
                "horizons" => fill(&mut self.horizons, || parse_list(k, v))?,
                "format" => fill(&mut self.format, || {
                    Format::from_str(v, false).map_err(|_| Error::Parse(format!("bad format {v:?}")))
                })?,
                "output" => fill(&mut self.output, || Ok(v.into()))?,
                _ => return Err(Error::Parse(format!("unknown config key {key:?}"))),
            }
        }
        Ok(())
    }

    fn group(&self) -> Result<GroupModel> {
        parse_group(self.group.as_deref().ok_or_else(|| Error::Parse("--group is required".into()))?)
    }

    fn kernel(&self, model: &GroupModel, limits: &Limits) -> Result<LengthKernel> {
        let text = self.kernel.as_deref().ok_or_else(|| Error::Parse("--kernel is required".into()))?;
        parse_kernel(text, model, limits, None)
    }

    fn inclusion(&self, model: &GroupModel, default: &str) -> Result<CosetStructure> {
        parse_inclusion(self.inclusion.as_deref().unwrap_or(default), model)
    }

    fn t_grid(&self) -> Result<Vec<f64>> {
        let ts = self.t.clone().unwrap_or_else(|| DEFAULT_T_GRID.to_vec());
        if ts.is_empty() || ts.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return Err(Error::Parse(format!("t values must be positive, got {ts:?}")));
        }
        Ok(ts)
    }

    fn lambda(&self) -> Result<f64> {
        let l = self.lambda.unwrap_or(DEFAULT_LAMBDA);
        if l >= 0.0 && l.is_finite() {
            Ok(l)
        } else {
            Err(Error::Parse(format!("lambda must be nonnegative, got {l}")))
        }
    }

    fn tolerance(&self) -> f64 {
        self.tolerance.unwrap_or(DEFAULT_TOLERANCE)
    }
}

/// A finished job: the serialized report and whether a certificate is missing.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub uncertified: Option<String>,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::InvalidArgument(_) => EXIT_PARSE,
        Error::ResourceLimit { .. } => EXIT_RESOURCE,
        Error::Uncertified(_) => EXIT_UNCERTIFIED,
        _ => EXIT_FAILURE,
    }
}

/// Parses `argv`, runs the job, writes the report and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok((outcome, output)) => {
            if let Err(e) = emit(&outcome.text, output.as_ref()) {
                eprintln!("error: {e}");
                return exit_code(&e);
            }
            match outcome.uncertified {
                Some(why) => {
                    eprintln!("certificate unavailable: {why}");
                    EXIT_UNCERTIFIED
                }
                None => EXIT_OK,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn emit(text: &str, output: Option<&PathBuf>) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

/// Resolves the configuration and runs one job.
pub fn execute(command: Command) -> Result<(Outcome, Option<PathBuf>)> {
    let mut args = command.args().clone();
    if let Some(path) = args.config.clone() {
        args.merge_config(&read_config(&path)?)?;
    }
    let limits = Limits::from_env()?;
    let outcome = run_job(command.name(), &args, &limits)?;
    Ok((outcome, args.output))
}

/// Runs the named subcommand with fully resolved arguments.
pub fn run_job(name: &str, args: &JobArgs, limits: &Limits) -> Result<Outcome> {
    let format = args.format.unwrap_or(Format::Json);
    let csv_ok = matches!(name, "spectrum" | "growth" | "partition" | "classify");
    if format == Format::Csv && !csv_ok {
        return Err(Error::Parse(format!("{name} has no csv output")));
    }
    let job = match name {
        "ball" => ball_job(args, limits)?,
        "cnd-check" => cnd_job(args, limits)?,
        "spectrum" => spectrum_job(args, limits)?,
        "growth" | "classify" => growth_job(name, args, limits)?,
        "partition" => partition_job(args, limits)?,
        "relative" => relative_job(args, limits)?,
        "reconstruct" => reconstruct_job(args, limits)?,
        other => return Err(Error::Parse(format!("unknown command {other:?}"))),
    };
    let text = match (format, job.csv) {
        (Format::Csv, Some(csv)) => csv,
        _ => to_canonical_json(&job.json)?,
    };
    Ok(Outcome {
        text,
        uncertified: job.uncertified,
    })
}

struct Job {
    json: Value,
    csv: Option<String>,
    uncertified: Option<String>,
}

fn ball_job(args: &JobArgs, limits: &Limits) -> Result<Job> {
    let model = args.group()?;
    let n = args.n.ok_or_else(|| Error::Parse("--n is required".into()))?;
    let ball = ball_enumerate(model.as_ref(), n, limits)?;
    let elements = (ball.len() <= MAX_LISTED_ELEMENTS)
        .then(|| ball.elements.iter().map(|g| model.format_element(g)).collect::<Vec<_>>());
    Ok(Job {
        json: json!({
            "command": "ball",
            "group": model.label(),
            "radius": n,
            "size": ball.len(),
            "sphere_sizes": ball.sphere_sizes,
            "elements": elements,
            "certificates": {"complete": true},
        }),
        csv: None,
        uncertified: None,
    })
}

fn cnd_job(args: &JobArgs, limits: &Limits) -> Result<Job> {
    let model = args.group()?;
    let kernel = args.kernel(&model, limits)?;
    let radius = args.radius.unwrap_or(DEFAULT_CHECK_RADIUS);
    let tol = args.tolerance();
    let schoenberg = schoenberg_check(model.as_ref(), &kernel, radius, &args.t_grid()?, tol, limits)?;
    let direct = direct_cnd_check(model.as_ref(), &kernel, radius, tol, limits)?;
    let pass = schoenberg.pass && direct.pass;
    Ok(Job {
        json: json!({
            "command": "cnd-check",
            "group": model.label(),
            "kernel": kernel.label(),
            "radius": radius,
            "schoenberg": schoenberg,
            "direct": direct,
            "certificates": {"grid_evidence_only": true, "pass": pass},
        }),
        csv: None,
        uncertified: None,
    })
}

fn spectrum_csv(s: &SpectrumTruncation) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["value", "multiplicity"])?;
    for e in &s.entries {
        w.write_record([crate::report::round_significant(e.value).to_string(), e.multiplicity.to_string()])?;
    }
    into_text(w)
}

fn into_text(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::InvalidArgument(e.to_string()))
}

fn spectrum_job(args: &JobArgs, limits: &Limits) -> Result<Job> {
    let model = args.group()?;
    let kernel = args.kernel(&model, limits)?;
    let lambda = args.lambda()?;
    let max_radius = args.max_radius.unwrap_or(DEFAULT_MAX_RADIUS);
    let s = spectrum_from_kernel(model.as_ref(), &kernel, lambda, max_radius, limits)?;
    let total = s.total_multiplicity()?;
    Ok(Job {
        json: json!({
            "command": "spectrum",
            "group": model.label(),
            "kernel": kernel.label(),
            "spectrum": s,
            "total_multiplicity": total,
            "certificates": {"complete": s.complete},
        }),
        csv: Some(spectrum_csv(&s)?),
        uncertified: (!s.complete).then(|| format!("spectrum below {lambda} not certified complete")),
    })
}

fn partitions_for(
    s: &SpectrumTruncation,
    kernel: &LengthKernel,
    ts: &[f64],
    depth: u64,
) -> Result<Vec<PartitionEstimate>> {
    ts.iter()
        .map(|&t| partition_function(s, t, kernel.tail_model(), depth))
        .collect()
}

fn profile_json(p: &GrowthProfile) -> Value {
    json!({
        "beta": p.beta,
        "gamma": p.gamma,
        "omega_root": p.omega_root,
        "omega_ratio": p.omega_ratio,
        "spectral_dimension": p.spectral_dimension,
    })
}

fn growth_job(name: &str, args: &JobArgs, limits: &Limits) -> Result<Job> {
    let model = args.group()?;
    let kernel = args.kernel(&model, limits)?;
    let n = args.big_n.unwrap_or(DEFAULT_PROFILE_DEPTH);
    let max_radius = args.max_radius.unwrap_or(DEFAULT_MAX_RADIUS);
    let depth = args.depth.map_or(DEFAULT_TAIL_DEPTH, |d| d as u64);
    let s = spectrum_from_kernel(model.as_ref(), &kernel, n as f64, max_radius, limits)?;
    let profile = growth_profile(&s, n)?;
    let partitions = partitions_for(&s, &kernel, &args.t_grid()?, depth)?;
    let classification = classify(&profile, &partitions);
    let omega = omega_estimate(&profile).ok();
    let mut json = json!({
        "command": name,
        "group": model.label(),
        "kernel": kernel.label(),
        "N": n,
        "omega": omega,
        "classification": classification,
        "partitions": partitions,
        "certificates": {"complete": profile.certified, "horizon_bounded": true},
    });
    if name == "growth" {
        json["profile"] = profile_json(&profile);
    }
    let mut csv = Vec::new();
    write_profile_csv(&profile, &mut csv)?;
    Ok(Job {
        json,
        csv: Some(String::from_utf8(csv).map_err(|e| Error::InvalidArgument(e.to_string()))?),
        uncertified: (!profile.certified).then(|| format!("counts up to {n} not certified complete")),
    })
}

fn partition_job(args: &JobArgs, limits: &Limits) -> Result<Job> {
    let model = args.group()?;
    let kernel = args.kernel(&model, limits)?;
    let lambda = args.lambda()?;
    let max_radius = args.max_radius.unwrap_or(DEFAULT_MAX_RADIUS);
    let depth = args.depth.map_or(DEFAULT_TAIL_DEPTH, |d| d as u64);
    let s = spectrum_from_kernel(model.as_ref(), &kernel, lambda, max_radius, limits)?;
    let partitions = partitions_for(&s, &kernel, &args.t_grid()?, depth)?;
    let unknown = partitions.iter().filter(|p| p.verdict == Verdict::Unknown).count();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "partial_sum", "tail_bound", "verdict"])?;
    for p in &partitions {
        let verdict = serde_json::to_value(p.verdict)?;
        w.write_record([
            crate::report::round_significant(p.t).to_string(),
            crate::report::round_significant(p.partial_sum).to_string(),
            crate::report::round_significant(p.tail_bound).to_string(),
            verdict.as_str().unwrap_or_default().to_string(),
        ])?;
    }
    Ok(Job {
        json: json!({
            "command": "partition",
            "group": model.label(),
            "kernel": kernel.label(),
            "cutoff": lambda,
            "spectrum_complete": s.complete,
            "partitions": partitions,
            "certificates": {"complete": s.complete, "certified_tails": unknown == 0},
        }),
        csv: Some(into_text(w)?),
        uncertified: (unknown > 0).then(|| format!("{unknown} partition estimate(s) without a verdict")),
    })
}

fn quasi_normality_json(model: &dyn Group, q: &QuasiNormalityReport) -> Value {
    json!({
        "probe_radius": q.probe_radius,
        "horizons": q.horizons,
        "verdict": q.verdict,
        "probes": q.probes.iter().map(|p| json!({
            "coset": model.format_element(&p.representative),
            "counts": p.counts,
            "verdict": p.verdict,
        })).collect::<Vec<_>>(),
    })
}

fn relative_job(args: &JobArgs, limits: &Limits) -> Result<Job> {
    let model = args.group()?;
    let kernel = args.kernel(&model, limits)?;
    let cosets = args.inclusion(&model, "trivial")?;
    let lambda = args.lambda()?;
    let max_radius = args.max_radius.unwrap_or(DEFAULT_MAX_RADIUS);
    let depth = args.depth.map_or(DEFAULT_TAIL_DEPTH, |d| d as u64);
    let radius = args.radius.unwrap_or(DEFAULT_CHECK_RADIUS);
    let horizons = args.horizons.clone().unwrap_or_else(|| DEFAULT_HORIZONS.to_vec());

    let invariance = h_invariance_check(&cosets, &kernel, radius, args.tolerance(), limits)?;
    let mut cutoffs: Vec<f64> = PROPERNESS_GRID.iter().copied().filter(|&c| c < lambda).collect();
    cutoffs.push(lambda);
    let properness = cutoffs
        .iter()
        .map(|&c| quotient_properness(&cosets, &kernel, c, max_radius, limits))
        .collect::<Result<Vec<_>>>()?;
    let quasi = quasi_normality(&cosets, args.probe_radius.unwrap_or(DEFAULT_PROBE_RADIUS), &horizons, limits)?;
    let spectrum = relative_spectrum(&cosets, &kernel, lambda, max_radius, limits)?;
    let tail = relative_tail_model(&cosets, &kernel, &spectrum)?;
    let partitions = args
        .t_grid()?
        .iter()
        .map(|&t| relative_partition(&spectrum, t, tail.as_ref(), depth))
        .collect::<Result<Vec<_>>>()?;
    let satisfied = criterion_satisfied(&invariance, &properness, &partitions);
    let complete = properness.iter().all(|p| p.complete);
    let unknown = partitions.iter().any(|p| p.verdict == Verdict::Unknown);
    let uncertified = if !invariance.pass {
        Some(format!("kernel is not invariant under {}", cosets.label()))
    } else if !complete {
        Some("properness on the coset space is lower-bound only".to_string())
    } else if unknown {
        Some("relative partition function without a verdict".to_string())
    } else {
        None
    };
    Ok(Job {
        json: json!({
            "command": "relative",
            "group": model.label(),
            "kernel": kernel.label(),
            "inclusion": cosets.label(),
            "invariance": invariance,
            "properness": properness,
            "quasi_normality": quasi_normality_json(model.as_ref(), &quasi),
            "relative_entries": spectrum.truncation.entries,
            "relative_spectrum": {
                "cutoff": spectrum.truncation.cutoff,
                "complete": spectrum.truncation.complete,
                "radius_explored": spectrum.truncation.radius_explored,
            },
            "partitions": partitions,
            "criterion": satisfied.then_some(CRITERION_LABEL),
            "certificates": {
                "complete": complete,
                "invariance_grid_evidence_only": true,
                "horizon_bounded": true,
                "criterion_satisfied": satisfied,
            },
        }),
        csv: None,
        uncertified,
    })
}

fn reconstruct_job(args: &JobArgs, limits: &Limits) -> Result<Job> {
    let model = args.group()?;
    let kernel = args.kernel(&model, limits)?;
    let cosets = args.inclusion(&model, "trivial")?;
    let depth = args.depth.unwrap_or(crate::reconstruct::DEFAULT_DEPTH);
    let max_radius = args.max_radius.unwrap_or(crate::reconstruct::DEFAULT_MAX_RADIUS);
    let n = args.big_n.unwrap_or(DEFAULT_AUDIT_N);
    let radius = args.radius.unwrap_or(DEFAULT_CHECK_RADIUS);
    let tol = args.tolerance();

    let schedule = epsilon_schedule(model.as_ref(), &kernel, depth, max_radius, limits)?;
    let rec = reconstruct(&kernel, schedule, depth)?;
    let audit = properness_audit(&rec, &cosets, n, &AuditOptions::default(), limits)?;
    let schedule_pairs: Vec<(u64, f64)> = rec
        .schedule()
        .radii
        .iter()
        .copied()
        .zip(rec.schedule().epsilons.iter().copied())
        .collect();
    let lprime = rec.clone().into_kernel();
    let schoenberg = schoenberg_check(model.as_ref(), &lprime, radius, &args.t_grid()?, tol, limits)?;
    let invariance = h_invariance_check(&cosets, &lprime, radius, tol, limits)?;
    Ok(Job {
        json: json!({
            "command": "reconstruct",
            "group": model.label(),
            "kernel": kernel.label(),
            "inclusion": cosets.label(),
            "depth": depth,
            "schedule": schedule_pairs,
            "gamma_sets": audit.gamma_sizes,
            "audit": audit,
            "schoenberg": schoenberg,
            "invariance": invariance,
            "certificates": {
                "complete": audit.certified,
                "grid_evidence_only": true,
                "truncated_at": depth,
            },
        }),
        csv: None,
        uncertified: (!audit.certified).then(|| "a level set of the input kernel is not certified complete".to_string()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(pairs: &[(&str, &str)]) -> JobArgs {
        let entries: Vec<(String, String)> = pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        let mut a = JobArgs::default();
        a.merge_config(&entries).unwrap();
        a
    }

    #[test]
    fn flags_override_config() {
        let mut a = JobArgs {
            group: Some("zd(1)".into()),
            ..JobArgs::default()
        };
        a.merge_config(&[("group".into(), "free(2)".into()), ("t".into(), "1, 2".into())]).unwrap();
        assert_eq!(a.group.as_deref(), Some("zd(1)"));
        assert_eq!(a.t, Some(vec![1.0, 2.0]));
        assert!(a.merge_config(&[("N".into(), "x".into())]).is_err());
    }

    #[test]
    fn ball_of_radius_zero() {
        let out = run_job("ball", &args(&[("group", "free(2)"), ("n", "0")]), &Limits::default()).unwrap();
        let v: Value = serde_json::from_str(&out.text).unwrap();
        assert_eq!(v["size"], 1);
        assert_eq!(v["elements"][0], "e");
    }

    #[test]
    fn csv_only_for_profiles() {
        let a = args(&[("group", "free(2)"), ("n", "1"), ("format", "csv")]);
        assert!(matches!(run_job("ball", &a, &Limits::default()), Err(Error::Parse(_))));
    }

    #[test]
    fn error_codes() {
        assert_eq!(exit_code(&Error::Parse("x".into())), EXIT_PARSE);
        assert_eq!(exit_code(&Error::ResourceLimit { what: "x", requested: 2, limit: 1 }), EXIT_RESOURCE);
        assert_eq!(exit_code(&Error::Uncertified("x".into())), EXIT_UNCERTIFIED);
        assert_eq!(run(["spectral-growth", "ball", "--group", "free(2", "--n", "1"]), EXIT_PARSE);
        assert_eq!(run(["spectral-growth", "bogus"]), EXIT_PARSE);
    }
}
