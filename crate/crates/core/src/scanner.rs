//! Batch verification over family parameter ranges, with deterministic
//! JSON Lines output, resume support, and the dilation threshold search.
//!
//! Instances are processed in parallel inside a bounded window and written
//! in parameter order, so output bytes do not depend on the worker count.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Read, Seek, SeekFrom, Write};
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use log::{debug, info};
use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dfact::{build, build_cyclotomic, build_ratio, Method};
use crate::error::{Error, Result};
use crate::families::{listed_admissible, FamilyId, FamilyInstance, Params, Partition, Registry};
use crate::landau::FactorialPair;
use crate::poly::Poly;
use crate::shape::{
    check_one_plus_q_unimodal, check_parity_unimodal, check_positive, check_unimodal, Verdict,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Landau,
    Positivity,
    Unimodal,
    ParityUnimodal,
    OnePlusQUnimodal,
    OracleEquality,
}

impl Check {
    pub const ALL: [Check; 6] = [
        Check::Landau,
        Check::Positivity,
        Check::Unimodal,
        Check::ParityUnimodal,
        Check::OnePlusQUnimodal,
        Check::OracleEquality,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Landau => "landau",
            Check::Positivity => "positivity",
            Check::Unimodal => "unimodal",
            Check::ParityUnimodal => "parity_unimodal",
            Check::OnePlusQUnimodal => "one_plus_q_unimodal",
            Check::OracleEquality => "oracle_equality",
        }
    }

    fn needs_polynomial(self) -> bool {
        self != Check::Landau
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .or(match s {
                "positive" => Some(Check::Positivity),
                "oracle" => Some(Check::OracleEquality),
                _ => None,
            })
            .ok_or_else(|| Error::Parse(format!("unknown check `{s}`")))
    }
}

/// Parses a comma-separated list of checks.
pub fn parse_checks(s: &str) -> Result<Vec<Check>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(str::parse)
        .collect()
}

/// An inclusive integer range, written `lo..hi`, `lo-hi`, `lo,hi` or `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RangeRepr", into = "[u64; 2]")]
pub struct ParamRange {
    pub lo: u64,
    pub hi: u64,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RangeRepr {
    Pair([u64; 2]),
    Single(u64),
    Text(String),
}

impl TryFrom<RangeRepr> for ParamRange {
    type Error = Error;

    fn try_from(r: RangeRepr) -> Result<Self> {
        match r {
            RangeRepr::Pair([lo, hi]) => ParamRange::new(lo, hi),
            RangeRepr::Single(k) => ParamRange::new(k, k),
            RangeRepr::Text(s) => s.parse(),
        }
    }
}

impl From<ParamRange> for [u64; 2] {
    fn from(r: ParamRange) -> Self {
        [r.lo, r.hi]
    }
}

impl ParamRange {
    pub fn new(lo: u64, hi: u64) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidArgument(format!("empty range {lo}..{hi}")));
        }
        Ok(ParamRange { lo, hi })
    }

    pub fn iter(self) -> impl Iterator<Item = u64> {
        self.lo..=self.hi
    }
}

impl FromStr for ParamRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad range `{s}`, expected `lo..hi`"));
        let num = |t: &str| t.trim().parse::<u64>().map_err(|_| bad());
        let s = s.trim();
        let (lo, hi) = if let Some((lo, hi)) = s.split_once("..") {
            (num(lo)?, num(hi.trim_start_matches('='))?)
        } else if let Some((lo, hi)) = s.split_once('-').or_else(|| s.split_once(',')) {
            (num(lo)?, num(hi)?)
        } else {
            let k = num(s)?;
            (k, k)
        };
        ParamRange::new(lo, hi).map_err(|_| bad())
    }
}

impl fmt::Display for ParamRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

fn default_checks() -> Vec<Check> {
    vec![Check::Landau, Check::Positivity, Check::OnePlusQUnimodal]
}

fn default_degree_cap() -> u64 {
    10_000
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, usize::from)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub family: FamilyId,
    #[serde(default)]
    pub l: Option<ParamRange>,
    #[serde(default)]
    pub m: Option<ParamRange>,
    #[serde(default)]
    pub n: Option<ParamRange>,
    /// Partitions for `b_lambda` / `c_lambda`; empty means the fourteen listed ones.
    #[serde(default)]
    pub lambdas: Vec<Partition>,
    /// Registry ids for `sporadic`; absent means every entry.
    #[serde(default)]
    pub ids: Option<ParamRange>,
    /// Dilation factors applied to each instance; absent means no dilation.
    #[serde(default)]
    pub dilations: Option<ParamRange>,
    #[serde(default = "default_checks")]
    pub checks: Vec<Check>,
    #[serde(default = "default_degree_cap")]
    pub degree_cap: u64,
    #[serde(default = "default_workers")]
    pub workers: usize,
    /// Keep only tuples whose numeric parameters are coprime.
    #[serde(default)]
    pub coprime: bool,
    #[serde(default)]
    pub emit_coeffs: bool,
    /// Record wall-clock time per instance. Off by default because it makes
    /// output nondeterministic.
    #[serde(default)]
    pub timing: bool,
    #[serde(default)]
    pub method: Method,
}

impl ScanConfig {
    pub fn new(family: FamilyId) -> Self {
        ScanConfig {
            family,
            l: None,
            m: None,
            n: None,
            lambdas: Vec::new(),
            ids: None,
            dilations: None,
            checks: default_checks(),
            degree_cap: default_degree_cap(),
            workers: default_workers(),
            coprime: false,
            emit_coeffs: false,
            timing: false,
            method: Method::default(),
        }
    }

    pub fn with_mn(mut self, m: ParamRange, n: ParamRange) -> Self {
        self.m = Some(m);
        self.n = Some(n);
        self
    }

    pub fn with_checks(mut self, checks: &[Check]) -> Self {
        self.checks = checks.to_vec();
        self
    }

    fn validate(&self) -> Result<()> {
        if self.degree_cap == 0 {
            return Err(Error::InvalidArgument(
                "degree cap must be at least 1".into(),
            ));
        }
        if self.workers == 0 {
            return Err(Error::InvalidArgument(
                "worker count must be at least 1".into(),
            ));
        }
        if self.checks.is_empty() {
            return Err(Error::InvalidArgument("no checks requested".into()));
        }
        Ok(())
    }
}

fn need_range(r: Option<ParamRange>, name: &str, family: FamilyId) -> Result<ParamRange> {
    r.ok_or_else(|| Error::InvalidArgument(format!("family {family} needs a range for `{name}`")))
}

fn params_coprime(p: &Params) -> bool {
    [p.l, p.m, p.n]
        .into_iter()
        .flatten()
        .fold(0u64, |g, x| g.gcd(&x))
        <= 1
}

/// Every in-domain instance of the scan, sorted by parameters.
pub fn enumerate_instances(cfg: &ScanConfig, registry: &Registry) -> Result<Vec<FamilyInstance>> {
    let f = cfg.family;
    let mut grid: Vec<Params> = Vec::new();
    match f {
        FamilyId::Sporadic => {
            for e in registry.entries() {
                if cfg.ids.is_none_or(|r| (r.lo..=r.hi).contains(&e.id)) {
                    grid.push(Params {
                        id: Some(e.id),
                        ..Params::default()
                    });
                }
            }
        }
        FamilyId::Dixon => {
            let (l, m, n) = (
                need_range(cfg.l, "l", f)?,
                need_range(cfg.m, "m", f)?,
                need_range(cfg.n, "n", f)?,
            );
            for l in l.iter() {
                for m in m.iter() {
                    for n in n.iter() {
                        grid.push(Params {
                            l: Some(l),
                            ..Params::mn(m, n)
                        });
                    }
                }
            }
        }
        _ => {
            let (m, n) = (need_range(cfg.m, "m", f)?, need_range(cfg.n, "n", f)?);
            let lambdas = match f {
                FamilyId::BLambda | FamilyId::CLambda if cfg.lambdas.is_empty() => {
                    listed_admissible().into_iter().map(Some).collect()
                }
                FamilyId::BLambda | FamilyId::CLambda => {
                    cfg.lambdas.iter().cloned().map(Some).collect()
                }
                _ => vec![None],
            };
            for lambda in &lambdas {
                for m in m.iter() {
                    for n in n.iter() {
                        grid.push(Params {
                            lambda: lambda.clone(),
                            ..Params::mn(m, n)
                        });
                    }
                }
            }
        }
    }
    if cfg.coprime {
        grid.retain(params_coprime);
    }
    if let Some(d) = cfg.dilations {
        grid = grid
            .into_iter()
            .flat_map(|p| {
                d.iter().map(move |k| Params {
                    dilation: Some(k),
                    ..p.clone()
                })
            })
            .collect();
    }
    grid.sort();
    grid.dedup();
    let mut out = Vec::with_capacity(grid.len());
    for params in grid {
        match FamilyInstance::resolve(f, params, registry) {
            Ok(inst) => out.push(inst),
            Err(Error::DomainViolation(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// A failure location: a coefficient index, or a rational point for Landau.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Witness {
    Index(usize),
    Point(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub instance: FamilyInstance,
    pub degree: i64,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub skipped: bool,
    #[serde(default)]
    pub verdicts: BTreeMap<Check, bool>,
    #[serde(default)]
    pub witnesses: BTreeMap<Check, Witness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q1_value: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_coeff_bits: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<Poly>,
}

impl ScanRecord {
    pub fn key(&self) -> String {
        record_key(&self.instance)
    }

    /// True when every requested check passed and nothing errored.
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.verdicts.values().all(|&v| v)
    }

    fn record(&mut self, check: Check, v: Verdict) {
        self.verdicts.insert(check, v.holds);
        if let Some(i) = v.first_violation {
            self.witnesses.insert(check, Witness::Index(i));
        }
    }
}

/// Identity of a record for deduplication and resume.
pub fn record_key(inst: &FamilyInstance) -> String {
    serde_json::to_string(&(inst.family, &inst.params)).expect("params serialize")
}

fn evaluate(inst: FamilyInstance, cfg: &ScanConfig) -> ScanRecord {
    let start = cfg.timing.then(Instant::now);
    let degree = inst.pair.degree();
    let mut rec = ScanRecord {
        instance: inst,
        degree,
        skipped: false,
        verdicts: BTreeMap::new(),
        witnesses: BTreeMap::new(),
        q1_value: None,
        max_coeff_bits: None,
        elapsed_ms: None,
        error: None,
        coeffs: None,
    };
    if degree > cfg.degree_cap as i64 {
        rec.skipped = true;
        return rec;
    }
    if let Err(e) = run_checks(&mut rec, cfg) {
        rec.error = Some(e.to_string());
    }
    rec.elapsed_ms = start.map(|t| t.elapsed().as_millis() as u64);
    rec
}

fn run_checks(rec: &mut ScanRecord, cfg: &ScanConfig) -> Result<()> {
    let pair = rec.instance.pair.clone();
    let landau = pair.check_landau();
    if cfg.checks.contains(&Check::Landau) {
        rec.verdicts.insert(Check::Landau, landau.holds);
        if let Some(x) = landau.witness {
            rec.witnesses
                .insert(Check::Landau, Witness::Point(x.to_string()));
        }
    }
    if !cfg.checks.iter().any(|c| c.needs_polynomial()) {
        return Ok(());
    }
    if !landau.holds {
        return Err(Error::InvalidArgument(
            "ratio is not a polynomial; shape checks not run".into(),
        ));
    }
    let poly = build(&pair, cfg.method)?;
    rec.q1_value = Some(poly.eval_at_one().to_string());
    rec.max_coeff_bits = Some(poly.max_coeff_bits());
    for &check in &cfg.checks {
        match check {
            Check::Landau => {}
            Check::Positivity => rec.record(check, check_positive(&poly)),
            Check::Unimodal => rec.record(check, check_unimodal(&poly)),
            Check::ParityUnimodal => rec.record(check, check_parity_unimodal(&poly)),
            Check::OnePlusQUnimodal => rec.record(check, check_one_plus_q_unimodal(&poly)?),
            Check::OracleEquality => {
                let other = match cfg.method {
                    Method::Cyclotomic => build_ratio(&pair)?,
                    Method::Ratio => build_cyclotomic(&pair)?,
                };
                rec.verdicts.insert(check, other == poly);
            }
        }
    }
    if rec.verdicts.get(&Check::OnePlusQUnimodal) == Some(&true)
        && rec.verdicts.get(&Check::Positivity) == Some(&false)
    {
        return Err(Error::InvariantViolation(
            "(1+q)-unimodal but not positive".into(),
        ));
    }
    if cfg.emit_coeffs {
        rec.coeffs = Some(poly);
    }
    Ok(())
}

/// Totals over one scan.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub records: usize,
    pub resumed: usize,
    pub skipped: usize,
    pub errors: usize,
    pub failures: BTreeMap<Check, usize>,
}

impl ScanSummary {
    fn add(&mut self, rec: &ScanRecord) {
        self.records += 1;
        self.skipped += rec.skipped as usize;
        self.errors += rec.error.is_some() as usize;
        for (&c, &v) in &rec.verdicts {
            if !v {
                *self.failures.entry(c).or_default() += 1;
            }
        }
    }

    pub fn all_passed(&self) -> bool {
        self.errors == 0 && self.failures.is_empty()
    }
}

/// Instances in flight per worker; bounds memory held for reordering.
const WINDOW_PER_WORKER: usize = 4;

/// Runs the scan, handing records to `sink` in parameter order. Instances
/// whose keys are in `done` are not recomputed.
pub fn scan_family_with(
    cfg: &ScanConfig,
    registry: &Registry,
    done: &HashSet<String>,
    mut sink: impl FnMut(&ScanRecord) -> Result<()>,
) -> Result<ScanSummary> {
    cfg.validate()?;
    let instances: Vec<FamilyInstance> = enumerate_instances(cfg, registry)?;
    let total = instances.len();
    let todo: Vec<FamilyInstance> = instances
        .into_iter()
        .filter(|i| !done.contains(&record_key(i)))
        .collect();
    let mut summary = ScanSummary {
        resumed: total - todo.len(),
        ..ScanSummary::default()
    };
    info!(
        "scanning {} instances of {} ({} already done) on {} workers",
        todo.len(),
        cfg.family,
        summary.resumed,
        cfg.workers
    );
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let window = cfg.workers * WINDOW_PER_WORKER;
    let mut todo = todo.into_iter().peekable();
    while todo.peek().is_some() {
        let chunk: Vec<FamilyInstance> = todo.by_ref().take(window).collect();
        let records: Vec<ScanRecord> =
            pool.install(|| chunk.into_par_iter().map(|i| evaluate(i, cfg)).collect());
        for rec in &records {
            debug!("{} -> {:?}", rec.instance, rec.verdicts);
            summary.add(rec);
            sink(rec)?;
        }
    }
    Ok(summary)
}

/// Runs the scan and collects every record.
pub fn scan_family(cfg: &ScanConfig, registry: &Registry) -> Result<Vec<ScanRecord>> {
    let mut out = Vec::new();
    scan_family_with(cfg, registry, &HashSet::new(), |r| {
        out.push(r.clone());
        Ok(())
    })?;
    Ok(out)
}

/// Reads the keys of complete records in a JSONL file, truncating any
/// partial trailing line left by an interrupted run.
pub fn completed_keys(path: &Path) -> Result<HashSet<String>> {
    let mut keys = HashSet::new();
    let Ok(mut file) = OpenOptions::new().read(true).write(true).open(path) else {
        return Ok(keys);
    };
    let mut text = String::new();
    file.read_to_string(&mut text)?;
    let complete = text.rfind('\n').map_or(0, |i| i + 1);
    if complete < text.len() {
        info!("truncating partial trailing line in {}", path.display());
        file.set_len(complete as u64)?;
    }
    for line in text[..complete].lines().filter(|l| !l.trim().is_empty()) {
        let rec: ScanRecord = serde_json::from_str(line)?;
        keys.insert(rec.key());
    }
    Ok(keys)
}

/// Runs the scan into a JSONL file. With `resume`, records already present
/// are kept and only missing ones are appended; otherwise the file is
/// replaced.
pub fn scan_to_file(
    cfg: &ScanConfig,
    registry: &Registry,
    path: &Path,
    resume: bool,
) -> Result<ScanSummary> {
    let done = if resume {
        completed_keys(path)?
    } else {
        HashSet::new()
    };
    let mut file = OpenOptions::new()
        .create(true)
        .write(true)
        .truncate(!resume)
        .open(path)?;
    file.seek(SeekFrom::End(0))?;
    let mut out = BufWriter::new(file);
    let summary = scan_family_with(cfg, registry, &done, |rec| {
        serde_json::to_writer(&mut out, rec)?;
        out.write_all(b"\n")?;
        // Keep complete lines on disk so an interrupted run can resume.
        out.flush()?;
        Ok(())
    })?;
    out.flush()?;
    Ok(summary)
}

/// Reads every record of a JSONL file.
pub fn read_records(path: &Path) -> Result<Vec<ScanRecord>> {
    let mut text = String::new();
    File::open(path)?.read_to_string(&mut text)?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| Ok(serde_json::from_str(l)?))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    Positivity,
    Unimodal,
    OnePlusQUnimodal,
}

impl FromStr for Property {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "positivity" | "positive" => Ok(Property::Positivity),
            "unimodal" => Ok(Property::Unimodal),
            "one_plus_q_unimodal" => Ok(Property::OnePlusQUnimodal),
            other => Err(Error::Parse(format!("unknown property `{other}`"))),
        }
    }
}

impl Property {
    pub fn holds(self, p: &Poly) -> Result<bool> {
        Ok(match self {
            Property::Positivity => check_positive(p).holds,
            Property::Unimodal => check_unimodal(p).holds,
            Property::OnePlusQUnimodal => check_one_plus_q_unimodal(p)?.holds,
        })
    }
}

/// Least `N <= n_max` such that the property holds for every dilation
/// `D_n`, `N <= n <= n_max`; `None` if it already fails at `n_max`.
/// Dilations are examined from the top down.
pub fn find_threshold(pair: &FactorialPair, property: Property, n_max: u64) -> Result<Option<u64>> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let verdict = pair.check_landau();
    if !verdict.holds {
        return Err(Error::InvalidArgument(format!(
            "{pair} fails Landau's criterion at x = {}",
            verdict.witness.expect("failing verdict has a witness")
        )));
    }
    let mut threshold = None;
    for n in (1..=n_max).rev() {
        let poly = build_cyclotomic(&pair.scale(n)?)?;
        if !property.holds(&poly)? {
            break;
        }
        threshold = Some(n);
    }
    Ok(threshold)
}
