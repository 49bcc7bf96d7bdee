//! `qrious`: build q-factorial ratio polynomials, check Landau's criterion
//! and coefficient shapes, and sweep whole families.
//!
//! Exit status: 0 pass, 1 a check failed, 2 usage or parse error,
//! 3 internal error. Results go to stdout, logs to stderr.

mod config;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use log::info;
use serde::Serialize;
use serde_json::{json, Value};

use qrious::dfact::{build, Method};
use qrious::families::{enumerate_admissible_partitions, listed_admissible, Partition, Registry};
use qrious::identities::dixon_sweep;
use qrious::scanner::{
    self, find_threshold, parse_checks, Check, ParamRange, Property, ScanConfig, Witness,
};
use qrious::shape::{
    check_one_plus_q_unimodal, check_parity_unimodal, check_positive, check_unimodal,
};
use qrious::{Error, FactorialPair, FamilyId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Plain,
}

#[derive(Parser, Debug)]
#[command(
    name = "qrious",
    version,
    about = "Exact checks for q-factorial ratio polynomials"
)]
struct Cli {
    /// Output format for results on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// JSON file supplying defaults for any flag; command-line flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Sporadic-pair registry (JSON array of {id, label, a, b, source}).
    #[arg(long, global = true, env = "QRIOUS_REGISTRY")]
    registry: Option<PathBuf>,

    /// Increase log verbosity on stderr (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Run Landau's criterion and shape checks on one pair.
    Check {
        /// Pair as `a1,a2,.../b1,b2,...`.
        pair: String,
        /// Comma-separated checks.
        #[arg(long, default_value = "landau,positivity,one_plus_q_unimodal")]
        checks: String,
        #[arg(long, default_value = "cyclotomic")]
        method: String,
    },
    /// Build D(a, b; q) and print or save its coefficients.
    Build {
        pair: String,
        #[arg(long, default_value = "cyclotomic")]
        method: String,
        /// Write the coefficient array (decimal strings) to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep a family over parameter ranges, writing JSON Lines.
    Scan {
        #[arg(long)]
        family: String,
        #[arg(long)]
        l: Option<String>,
        #[arg(long)]
        m: Option<String>,
        #[arg(long)]
        n: Option<String>,
        /// Partition for lambda families; repeatable. Defaults to the listed fourteen.
        #[arg(long = "lambda")]
        lambda: Vec<String>,
        /// Registry id range for the sporadic family.
        #[arg(long)]
        ids: Option<String>,
        /// Dilation range applied to every instance.
        #[arg(long)]
        dilations: Option<String>,
        #[arg(long, default_value = "landau,positivity,one_plus_q_unimodal")]
        checks: String,
        #[arg(long, default_value_t = 10_000)]
        degree_cap: u64,
        /// Worker threads; defaults to the available parallelism.
        #[arg(long)]
        workers: Option<usize>,
        /// Keep only parameter tuples with gcd 1.
        #[arg(long)]
        coprime: bool,
        /// Include coefficient arrays in records.
        #[arg(long)]
        emit_coeffs: bool,
        /// Record elapsed_ms per instance (makes output nondeterministic).
        #[arg(long)]
        timing: bool,
        #[arg(long, default_value = "cyclotomic")]
        method: String,
        /// JSONL output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Keep complete records already in --out and compute only the rest.
        #[arg(long)]
        resume: bool,
    },
    /// Least N such that every dilation D_n, N <= n <= nmax, has the property.
    Threshold {
        pair: String,
        #[arg(long, default_value = "unimodal")]
        property: String,
        #[arg(long, default_value_t = 10)]
        nmax: u64,
    },
    /// Partitions admissible up to a grid bound for both lambda families.
    Partitions {
        #[arg(long, default_value_t = 11)]
        max_size: u64,
        #[arg(long, default_value_t = 12)]
        grid: u64,
    },
    /// Check the q-Dixon summation over a box of (l, m, n).
    Dixon {
        /// Common upper bound for l, m and n.
        #[arg(long, default_value_t = 3)]
        max: u64,
        #[arg(long)]
        l_max: Option<u64>,
        #[arg(long)]
        m_max: Option<u64>,
        #[arg(long)]
        n_max: Option<u64>,
    },
    /// Family catalogue.
    Families {
        #[command(subcommand)]
        action: FamiliesCmd,
    },
}

#[derive(Subcommand, Debug)]
enum FamiliesCmd {
    /// List family identifiers and their tuple templates.
    List,
}

/// Outcome of a command: pass or fail with the document already printed.
enum Status {
    Pass,
    Fail,
}

/// A failure that maps to exit status 2.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(e: Error) -> anyhow::Error {
    anyhow::Error::new(Usage(e.to_string()))
}

fn parse_pair(s: &str) -> Result<FactorialPair> {
    s.parse().map_err(usage)
}

fn parse_with<T: std::str::FromStr<Err = Error>>(s: &str) -> Result<T> {
    s.parse().map_err(usage)
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<Usage>().is_some() {
        return 2;
    }
    match e.downcast_ref::<Error>() {
        Some(
            Error::Parse(_)
            | Error::Schema(_)
            | Error::LandauRejection(_)
            | Error::UnknownFamily(_)
            | Error::InvalidArgument(_)
            | Error::DomainViolation(_)
            | Error::ZeroEntry,
        ) => 2,
        Some(Error::NonExactDivision(_) | Error::NegativeExponent { .. }) => 1,
        _ => 3,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::NonExactDivision(_) => "NonExactDivision",
        Error::NegativeExponent { .. } => "NegativeExponent",
        Error::RouteDisagreement { .. } => "RouteDisagreement",
        Error::InvariantViolation(_) => "InvariantViolation",
        _ => "Error",
    }
}

fn print_csv(header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(std::io::stdout().lock());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

fn print_json(v: &impl Serialize) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v)?;
    writeln!(out)?;
    Ok(())
}

#[derive(Serialize)]
struct CheckOutcome {
    check: Check,
    holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Witness>,
    /// Floor-sum at the witness (Landau only).
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn witness_text(w: &Option<Witness>) -> String {
    match w {
        Some(Witness::Index(i)) => i.to_string(),
        Some(Witness::Point(x)) => x.clone(),
        None => String::new(),
    }
}

fn cmd_check(format: Format, pair: &str, checks: &str, method: &str) -> Result<Status> {
    let pair = parse_pair(pair)?;
    let checks = parse_checks(checks).map_err(usage)?;
    let method: Method = parse_with(method)?;
    let landau = pair.check_landau();
    let poly = if checks.iter().any(|&c| c != Check::Landau) && landau.holds {
        Some(build(&pair, method)?)
    } else {
        None
    };
    let mut outcomes = Vec::new();
    for &check in &checks {
        let mut o = CheckOutcome {
            check,
            holds: false,
            witness: None,
            value: None,
            error: None,
        };
        match (check, &poly) {
            (Check::Landau, _) => {
                o.holds = landau.holds;
                o.witness = landau.witness.map(|x| Witness::Point(x.to_string()));
                o.value = (!landau.holds).then_some(landau.value);
            }
            (_, None) => o.error = Some("not a polynomial: Landau's criterion fails".into()),
            (Check::OracleEquality, Some(p)) => {
                let other = match method {
                    Method::Cyclotomic => build(&pair, Method::Ratio)?,
                    Method::Ratio => build(&pair, Method::Cyclotomic)?,
                };
                o.holds = other == *p;
            }
            (_, Some(p)) => {
                let v = match check {
                    Check::Positivity => check_positive(p),
                    Check::Unimodal => check_unimodal(p),
                    Check::ParityUnimodal => check_parity_unimodal(p),
                    Check::OnePlusQUnimodal => check_one_plus_q_unimodal(p)?,
                    Check::Landau | Check::OracleEquality => unreachable!(),
                };
                o.holds = v.holds;
                o.witness = v.first_violation.map(Witness::Index);
            }
        }
        outcomes.push(o);
    }
    let passed = outcomes.iter().all(|o| o.holds);
    match format {
        Format::Json => print_json(&json!({
            "pair": pair.to_string(),
            "degree": pair.degree(),
            "passed": passed,
            "checks": outcomes,
        }))?,
        Format::Csv => print_csv(
            &["check", "holds", "witness", "value"],
            &outcomes
                .iter()
                .map(|o| {
                    vec![
                        o.check.to_string(),
                        o.holds.to_string(),
                        witness_text(&o.witness),
                        o.value.map_or(String::new(), |v| v.to_string()),
                    ]
                })
                .collect::<Vec<_>>(),
        )?,
        Format::Plain => {
            for o in &outcomes {
                let verdict = if o.holds { "pass" } else { "FAIL" };
                match (&o.witness, &o.error) {
                    (_, Some(e)) => println!("{}: {verdict} ({e})", o.check),
                    (Some(_), _) => {
                        println!("{}: {verdict} at {}", o.check, witness_text(&o.witness))
                    }
                    _ => println!("{}: {verdict}", o.check),
                }
            }
        }
    }
    Ok(if passed { Status::Pass } else { Status::Fail })
}

fn cmd_build(format: Format, pair: &str, method: &str, out: Option<&Path>) -> Result<Status> {
    let pair = parse_pair(pair)?;
    let method: Method = parse_with(method)?;
    let poly = match build(&pair, method) {
        Ok(p) => p,
        Err(e @ (Error::NonExactDivision(_) | Error::NegativeExponent { .. })) => {
            let doc = json!({
                "pair": pair.to_string(),
                "method": method,
                "error": {"kind": error_kind(&e), "message": e.to_string()},
            });
            match format {
                Format::Json => print_json(&doc)?,
                Format::Csv => print_csv(
                    &["pair", "method", "error"],
                    &[vec![pair.to_string(), method.to_string(), e.to_string()]],
                )?,
                Format::Plain => println!("{pair}: {e}"),
            }
            return Ok(Status::Fail);
        }
        Err(e) => return Err(e.into()),
    };
    if let Some(path) = out {
        std::fs::write(path, serde_json::to_string(&poly)? + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
        info!(
            "wrote {} coefficients to {}",
            poly.coeffs().len(),
            path.display()
        );
    }
    match format {
        Format::Json => print_json(&json!({
            "pair": pair.to_string(),
            "method": method,
            "degree": poly.degree(),
            "coeffs": poly,
        }))?,
        Format::Csv => print_csv(
            &["exponent", "coefficient"],
            &poly
                .coeffs()
                .iter()
                .enumerate()
                .map(|(i, c)| vec![i.to_string(), c.to_string()])
                .collect::<Vec<_>>(),
        )?,
        Format::Plain => println!("{poly}"),
    }
    Ok(Status::Pass)
}

fn load_registry(path: Option<&Path>) -> Result<Registry> {
    match path {
        Some(p) => Registry::from_path(p).map_err(|e| match e {
            Error::Io(io) => anyhow::Error::new(io).context(format!("reading {}", p.display())),
            other => anyhow::Error::new(other),
        }),
        None => Ok(Registry::default()),
    }
}

fn opt_range(s: &Option<String>) -> Result<Option<ParamRange>> {
    s.as_deref().map(parse_with).transpose()
}

/// Streams scan records to stdout in the requested format.
enum RecordSink {
    Json(std::io::StdoutLock<'static>),
    Csv(Box<csv::Writer<std::io::StdoutLock<'static>>>, Vec<Check>),
    Plain(std::io::StdoutLock<'static>),
}

impl RecordSink {
    fn new(format: Format, checks: &[Check]) -> Result<Self> {
        let stdout = std::io::stdout().lock();
        Ok(match format {
            Format::Json => RecordSink::Json(stdout),
            Format::Plain => RecordSink::Plain(stdout),
            Format::Csv => {
                let mut w = csv::Writer::from_writer(stdout);
                let mut header = vec!["family", "params", "pair", "degree", "skipped"];
                header.extend(checks.iter().map(|c| c.name()));
                header.extend(["q1_value", "max_coeff_bits", "error"]);
                w.write_record(&header)?;
                RecordSink::Csv(Box::new(w), checks.to_vec())
            }
        })
    }

    fn write(&mut self, rec: &qrious::ScanRecord) -> qrious::Result<()> {
        match self {
            RecordSink::Json(out) => {
                serde_json::to_writer(&mut *out, rec)?;
                out.write_all(b"\n")?;
            }
            RecordSink::Plain(out) => {
                let verdicts: Vec<String> = rec
                    .verdicts
                    .iter()
                    .map(|(c, v)| format!("{c}={}", if *v { "pass" } else { "fail" }))
                    .collect();
                let status = match (&rec.error, rec.skipped) {
                    (Some(e), _) => format!(" error: {e}"),
                    (None, true) => " skipped".to_owned(),
                    (None, false) => String::new(),
                };
                writeln!(
                    out,
                    "{} degree={} {}{status}",
                    rec.instance,
                    rec.degree,
                    verdicts.join(" ")
                )?;
            }
            RecordSink::Csv(w, checks) => {
                let inst = &rec.instance;
                let mut row = vec![
                    inst.family.to_string(),
                    serde_json::to_string(&inst.params)?,
                    inst.pair.to_string(),
                    rec.degree.to_string(),
                    rec.skipped.to_string(),
                ];
                row.extend(
                    checks
                        .iter()
                        .map(|c| rec.verdicts.get(c).map_or(String::new(), |v| v.to_string())),
                );
                row.push(rec.q1_value.clone().unwrap_or_default());
                row.push(rec.max_coeff_bits.map_or(String::new(), |b| b.to_string()));
                row.push(rec.error.clone().unwrap_or_default());
                w.write_record(&row)
                    .map_err(|e| qrious::Error::Io(e.into()))?;
            }
        }
        Ok(())
    }

    fn finish(self) -> Result<()> {
        match self {
            RecordSink::Csv(mut w, _) => w.flush()?,
            RecordSink::Json(mut out) | RecordSink::Plain(mut out) => out.flush()?,
        }
        Ok(())
    }
}

fn cmd_scan(format: Format, registry: &Registry, cmd: &Cmd) -> Result<Status> {
    let Cmd::Scan {
        family,
        l,
        m,
        n,
        lambda,
        ids,
        dilations,
        checks,
        degree_cap,
        workers,
        coprime,
        emit_coeffs,
        timing,
        method,
        out,
        resume,
    } = cmd
    else {
        unreachable!()
    };
    let mut cfg = ScanConfig::new(parse_with::<FamilyId>(family)?);
    cfg.l = opt_range(l)?;
    cfg.m = opt_range(m)?;
    cfg.n = opt_range(n)?;
    cfg.lambdas = lambda
        .iter()
        .map(|s| parse_with::<Partition>(s))
        .collect::<Result<_>>()?;
    cfg.ids = opt_range(ids)?;
    cfg.dilations = opt_range(dilations)?;
    cfg.checks = parse_checks(checks).map_err(usage)?;
    cfg.degree_cap = *degree_cap;
    if let Some(w) = workers {
        cfg.workers = *w;
    }
    cfg.coprime = *coprime;
    cfg.emit_coeffs = *emit_coeffs;
    cfg.timing = *timing;
    cfg.method = parse_with(method)?;

    let summary = match out {
        Some(path) => scanner::scan_to_file(&cfg, registry, path, *resume)?,
        None => {
            if *resume {
                return Err(usage(Error::InvalidArgument("--resume needs --out".into())));
            }
            let mut sink = RecordSink::new(format, &cfg.checks)?;
            let summary = scanner::scan_family_with(&cfg, registry, &Default::default(), |rec| {
                sink.write(rec)
            })?;
            sink.finish()?;
            summary
        }
    };
    info!(
        "{} records ({} resumed, {} skipped, {} errors)",
        summary.records, summary.resumed, summary.skipped, summary.errors
    );
    if out.is_some() {
        match format {
            Format::Json => print_json(&summary)?,
            Format::Csv => print_csv(
                &["records", "resumed", "skipped", "errors", "failures"],
                &[vec![
                    summary.records.to_string(),
                    summary.resumed.to_string(),
                    summary.skipped.to_string(),
                    summary.errors.to_string(),
                    summary.failures.values().sum::<usize>().to_string(),
                ]],
            )?,
            Format::Plain => {
                println!(
                    "{} records, {} resumed, {} skipped, {} errors",
                    summary.records, summary.resumed, summary.skipped, summary.errors
                );
                for (check, count) in &summary.failures {
                    println!("{check}: {count} failing");
                }
            }
        }
    }
    Ok(if summary.all_passed() {
        Status::Pass
    } else {
        Status::Fail
    })
}

fn cmd_threshold(format: Format, pair: &str, property: &str, nmax: u64) -> Result<Status> {
    let pair = parse_pair(pair)?;
    let property: Property = parse_with(property)?;
    let threshold = find_threshold(&pair, property, nmax).map_err(|e| match e {
        Error::InvalidArgument(_) => usage(e),
        other => other.into(),
    })?;
    match format {
        Format::Json => print_json(&json!({
            "pair": pair.to_string(),
            "property": property,
            "n_max": nmax,
            "threshold": threshold,
        }))?,
        Format::Csv => print_csv(
            &["pair", "n_max", "threshold"],
            &[vec![
                pair.to_string(),
                nmax.to_string(),
                threshold.map_or(String::new(), |n| n.to_string()),
            ]],
        )?,
        Format::Plain => match threshold {
            Some(n) => println!("{n}"),
            None => println!("none: fails at n = {nmax}"),
        },
    }
    Ok(if threshold.is_some() {
        Status::Pass
    } else {
        Status::Fail
    })
}

fn cmd_partitions(format: Format, max_size: u64, grid: u64) -> Result<Status> {
    let found = enumerate_admissible_partitions(max_size, grid);
    let listed: Vec<Partition> = listed_admissible()
        .into_iter()
        .filter(|p| p.size() <= max_size)
        .collect();
    let mut a = found.clone();
    let mut b = listed.clone();
    a.sort();
    b.sort();
    let matches_listed = a == b;
    match format {
        Format::Json => print_json(&json!({
            "max_size": max_size,
            "grid": grid,
            "label": "admissible up to grid bound",
            "count": found.len(),
            "partitions": found,
            "matches_listed": matches_listed,
        }))?,
        Format::Csv => print_csv(
            &["partition", "size"],
            &found
                .iter()
                .map(|p| vec![p.to_string(), p.size().to_string()])
                .collect::<Vec<_>>(),
        )?,
        Format::Plain => {
            for p in &found {
                println!("{p}");
            }
        }
    }
    Ok(Status::Pass)
}

fn cmd_dixon(format: Format, l_max: u64, m_max: u64, n_max: u64) -> Result<Status> {
    let rows = dixon_sweep(l_max, m_max, n_max);
    let passed = rows.iter().all(|r| r.holds);
    match format {
        Format::Json => print_json(&json!({
            "passed": passed,
            "count": rows.len(),
            "failures": rows.iter().filter(|r| !r.holds).collect::<Vec<_>>(),
        }))?,
        Format::Csv => print_csv(
            &["l", "m", "n", "holds"],
            &rows
                .iter()
                .map(|r| {
                    vec![
                        r.l.to_string(),
                        r.m.to_string(),
                        r.n.to_string(),
                        r.holds.to_string(),
                    ]
                })
                .collect::<Vec<_>>(),
        )?,
        Format::Plain => {
            for r in rows.iter().filter(|r| !r.holds) {
                println!(
                    "({},{},{}): FAIL {}",
                    r.l,
                    r.m,
                    r.n,
                    r.error.as_deref().unwrap_or("")
                );
            }
            println!(
                "{} of {} pass",
                rows.iter().filter(|r| r.holds).count(),
                rows.len()
            );
        }
    }
    Ok(if passed { Status::Pass } else { Status::Fail })
}

fn cmd_families(format: Format) -> Result<Status> {
    let rows: Vec<Value> = FamilyId::ALL
        .iter()
        .map(|f| json!({"family": f.name(), "template": f.describe()}))
        .collect();
    match format {
        Format::Json => print_json(&rows)?,
        Format::Csv => print_csv(
            &["family", "template"],
            &FamilyId::ALL
                .iter()
                .map(|f| vec![f.name().to_string(), f.describe().to_string()])
                .collect::<Vec<_>>(),
        )?,
        Format::Plain => {
            for f in FamilyId::ALL {
                println!("{:<10} {}", f.name(), f.describe());
            }
        }
    }
    Ok(Status::Pass)
}

fn run(cli: Cli) -> Result<Status> {
    let format = cli.format;
    match &cli.cmd {
        Cmd::Check {
            pair,
            checks,
            method,
        } => cmd_check(format, pair, checks, method),
        Cmd::Build { pair, method, out } => cmd_build(format, pair, method, out.as_deref()),
        scan @ Cmd::Scan { .. } => {
            let registry = load_registry(cli.registry.as_deref())?;
            cmd_scan(format, &registry, scan)
        }
        Cmd::Threshold {
            pair,
            property,
            nmax,
        } => cmd_threshold(format, pair, property, *nmax),
        Cmd::Partitions { max_size, grid } => cmd_partitions(format, *max_size, *grid),
        Cmd::Dixon {
            max,
            l_max,
            m_max,
            n_max,
        } => cmd_dixon(
            format,
            l_max.unwrap_or(*max),
            m_max.unwrap_or(*max),
            n_max.unwrap_or(*max),
        ),
        Cmd::Families {
            action: FamiliesCmd::List,
        } => cmd_families(format),
    }
}

fn main() -> ExitCode {
    let argv: Vec<_> = std::env::args_os().collect();
    let argv = match config::apply(Cli::command(), argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let matches = Cli::command()
        .try_get_matches_from(argv)
        .unwrap_or_else(|e| e.exit());
    let cli = Cli::from_arg_matches(&matches).unwrap_or_else(|e| e.exit());
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .target(env_logger::Target::Stderr)
        .init();
    match run(cli) {
        Ok(Status::Pass) => ExitCode::SUCCESS,
        Ok(Status::Fail) => ExitCode::from(1),
        Err(e) => {
            let code = exit_code(&e);
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}
