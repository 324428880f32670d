//! Prime-range scanning, table reproduction and CSV/JSON emission.
//!
//! A scan splits `[p_lo, bound]` into integer ranges of [`CHUNK_WIDTH`],
//! sieves each range on a worker of a fixed pool and decides every prime in
//! it. Results are merged by sorting on `(d, p)`, so output does not depend
//! on the worker count.

use std::fmt::{self, Write as _};
use std::io::{Read, Write};
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::primes_in_range;
use crate::error::{Error, Result};
use crate::quadfield::{field_invariants, QuadraticField};
use crate::verdict::{decide_prime, CriteriaReport, Exclusion, Mode, Verdict};

/// Width of one work unit, about 2^16 primes near 10^6.
pub const CHUNK_WIDTH: u64 = 1 << 20;

/// Largest prime a CrossValidate scan reaches without `force`.
pub const CROSS_VALIDATE_CAP: u64 = 100_000;

/// Scan primes stay below 2^31 so that products mod p² fit in 128 bits.
pub const MAX_BOUND: u64 = (1 << 31) - 1;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Human,
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "human" => Ok(OutputFormat::Human),
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!("unknown format `{other}`"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ScanConfig {
    pub discriminants: Vec<i64>,
    /// Inclusive prime range.
    pub p_lo: u64,
    pub bound: u64,
    pub mode: Mode,
    pub jobs: usize,
    /// Lift the CrossValidate cap.
    pub force: bool,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

impl ScanConfig {
    pub fn new(discriminants: Vec<i64>, bound: u64) -> Self {
        ScanConfig {
            discriminants,
            p_lo: 3,
            bound,
            mode: Mode::Fast,
            jobs: 1,
            force: false,
            format: OutputFormat::Human,
            out: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.bound < 3 {
            return Err(Error::Config(format!(
                "bound must be at least 3, got {}",
                self.bound
            )));
        }
        if self.bound > MAX_BOUND {
            return Err(Error::Config(format!(
                "bound must be below 2^31, got {}",
                self.bound
            )));
        }
        if self.jobs == 0 {
            return Err(Error::Config("worker count must be at least 1".into()));
        }
        if self.mode == Mode::CrossValidate && self.bound > CROSS_VALIDATE_CAP && !self.force {
            return Err(Error::Config(format!(
                "cross-validation is capped at p <= {CROSS_VALIDATE_CAP}; pass --force to go to {}",
                self.bound
            )));
        }
        Ok(())
    }
}

/// One decided `(d, p)` pair. Timing is informational and ignored by
/// equality and serialization.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScanRecord {
    #[serde(flatten)]
    pub report: CriteriaReport,
    #[serde(skip)]
    pub elapsed_ns: u64,
}

impl PartialEq for ScanRecord {
    fn eq(&self, other: &Self) -> bool {
        self.report == other.report
    }
}

impl Eq for ScanRecord {}

impl ScanRecord {
    pub fn d(&self) -> i64 {
        self.report.d
    }

    pub fn p(&self) -> u64 {
        self.report.p
    }

    pub fn verdict(&self) -> Verdict {
        self.report.verdict
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanReport {
    /// Primes where the field is not p-rational, sorted by `(d, p)`.
    pub exceptional: Vec<ScanRecord>,
    /// Primes where the criteria do not apply, sorted by `(d, p)`.
    pub excluded: Vec<ScanRecord>,
}

impl ScanReport {
    fn from_records(mut records: Vec<ScanRecord>) -> Self {
        records.sort_by_key(|r| (r.d(), r.p()));
        let (excluded, exceptional) = records
            .into_iter()
            .filter(|r| r.verdict() != Verdict::PRational)
            .partition(|r| r.verdict() == Verdict::Excluded);
        ScanReport {
            exceptional,
            excluded,
        }
    }

    pub fn exceptional_primes(&self, d: i64) -> Vec<u64> {
        self.exceptional
            .iter()
            .filter(|r| r.d() == d)
            .map(ScanRecord::p)
            .collect()
    }

    pub fn excluded_primes(&self, d: i64) -> Vec<u64> {
        self.excluded
            .iter()
            .filter(|r| r.d() == d)
            .map(ScanRecord::p)
            .collect()
    }

    /// All records, exceptional first.
    pub fn records(&self) -> impl Iterator<Item = &ScanRecord> {
        self.exceptional.iter().chain(&self.excluded)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut buf = Vec::new();
        write_csv(self.records(), &mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        Ok(ScanReport::from_records(read_csv(text.as_bytes())?))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Table rows followed by the excluded primes of each discriminant.
    pub fn render_human(&self, discriminants: &[i64]) -> String {
        let mut out = String::new();
        for &d in discriminants {
            writeln!(out, "{}", render_row(d, &self.exceptional_primes(d))).unwrap();
        }
        let mut excluded = self.excluded.iter().peekable();
        if excluded.peek().is_some() {
            writeln!(out, "excluded:").unwrap();
            for r in excluded {
                let reasons: Vec<&str> = r.report.excluded.iter().map(Exclusion::code).collect();
                writeln!(out, "  d={} p={} ({})", r.d(), r.p(), reasons.join(", ")).unwrap();
            }
        }
        out
    }

    pub fn render(&self, format: OutputFormat, discriminants: &[i64]) -> Result<String> {
        match format {
            OutputFormat::Human => Ok(self.render_human(discriminants)),
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json().map(|mut s| {
                s.push('\n');
                s
            }),
        }
    }
}

fn render_row(d: i64, primes: &[u64]) -> String {
    if primes.is_empty() {
        format!("{d} | (none)")
    } else {
        let list: Vec<String> = primes.iter().map(u64::to_string).collect();
        format!("{d} | {}", list.join(", "))
    }
}

fn chunk_ranges(lo: u64, hi: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut start = lo;
    while start <= hi {
        let end = hi.min(start.saturating_add(CHUNK_WIDTH - 1));
        out.push((start, end));
        start = end + 1;
    }
    out
}

fn scan_chunk(field: &QuadraticField, lo: u64, hi: u64, mode: Mode) -> Result<Vec<ScanRecord>> {
    let mut out = Vec::new();
    for p in primes_in_range(lo, hi) {
        let start = Instant::now();
        let mut report = decide_prime(field, p, mode)?;
        if report.verdict == Verdict::PRational {
            continue;
        }
        if report.verdict == Verdict::NotPRational && mode == Mode::Fast {
            report = decide_prime(field, p, Mode::CrossValidate)?;
        }
        out.push(ScanRecord {
            report,
            elapsed_ns: start.elapsed().as_nanos() as u64,
        });
    }
    Ok(out)
}

fn build_fields(discriminants: &[i64]) -> Result<Vec<QuadraticField>> {
    discriminants
        .iter()
        .map(|&d| {
            field_invariants(d).map_err(|e| match e {
                Error::NotFundamental(d) => {
                    Error::Config(format!("{d} is not a fundamental discriminant"))
                }
                other => other,
            })
        })
        .collect()
}

fn run_pool<T: Send>(jobs: usize, work: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {jobs} workers: {e}")))?;
    Ok(pool.install(work))
}

/// Decides every prime in `[p_lo, bound]` for every discriminant of the
/// config. Fast-mode positives are re-decided with all four criteria.
pub fn scan(config: &ScanConfig) -> Result<ScanReport> {
    config.validate()?;
    let fields = build_fields(&config.discriminants)?;
    let units: Vec<(&QuadraticField, u64, u64)> = fields
        .iter()
        .flat_map(|f| {
            chunk_ranges(config.p_lo.max(2), config.bound)
                .into_iter()
                .map(move |(lo, hi)| (f, lo, hi))
        })
        .collect();
    let chunks = run_pool(config.jobs, || {
        units
            .par_iter()
            .map(|&(field, lo, hi)| scan_chunk(field, lo, hi, config.mode))
            .collect::<Result<Vec<_>>>()
    })??;
    Ok(ScanReport::from_records(
        chunks.into_iter().flatten().collect(),
    ))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub d: i64,
    pub primes: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Table {
    pub bound: u64,
    pub rows: Vec<TableRow>,
}

impl Table {
    pub fn row(&self, d: i64) -> Option<&TableRow> {
        self.rows.iter().find(|r| r.d == d)
    }
}

impl fmt::Display for Table {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Discriminant | Primes < {}", self.bound)?;
        for row in &self.rows {
            writeln!(f, "{}", render_row(row.d, &row.primes))?;
        }
        Ok(())
    }
}

/// Exceptional primes up to `bound` for every fundamental `d ≤ d_max`.
pub fn reproduce_table(d_max: i64, bound: u64, jobs: usize) -> Result<Table> {
    let ds: Vec<i64> = (5..=d_max)
        .filter(|&d| crate::quadfield::is_fundamental_discriminant(d))
        .collect();
    let mut config = ScanConfig::new(ds.clone(), bound);
    config.jobs = jobs;
    let report = scan(&config)?;
    let rows = ds
        .into_iter()
        .map(|d| TableRow {
            d,
            primes: report.exceptional_primes(d),
        })
        .collect();
    Ok(Table { bound, rows })
}

/// For each prime in `[p_lo, p_hi]`, the discriminants among `ds` that are
/// not p-rational. Primes where all fields are p-rational are omitted.
pub fn multi_scan(ds: &[i64], p_lo: u64, p_hi: u64, jobs: usize) -> Result<Vec<(u64, Vec<i64>)>> {
    if ds.is_empty() || p_hi < p_lo.max(3) {
        return Ok(Vec::new());
    }
    let mut config = ScanConfig::new(ds.to_vec(), p_hi);
    config.p_lo = p_lo;
    config.jobs = jobs;
    let report = scan(&config)?;
    let mut by_prime: Vec<(u64, i64)> = report.exceptional.iter().map(|r| (r.p(), r.d())).collect();
    by_prime.sort_unstable();
    let mut out: Vec<(u64, Vec<i64>)> = Vec::new();
    for (p, d) in by_prime {
        match out.last_mut() {
            Some((q, list)) if *q == p => list.push(d),
            _ => out.push((p, vec![d])),
        }
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct CsvRow {
    d: i64,
    p: u64,
    verdict: String,
    fibonacci_wieferich: Option<bool>,
    wieferich_unit: Option<bool>,
    period_equal: Option<bool>,
    williams_nonzero: Option<bool>,
    excluded_reasons: String,
}

pub fn write_csv<'a>(
    records: impl IntoIterator<Item = &'a ScanRecord>,
    out: impl Write,
) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for r in records {
        let rep = &r.report;
        let reasons: Vec<&str> = rep.excluded.iter().map(Exclusion::code).collect();
        writer.serialize(CsvRow {
            d: rep.d,
            p: rep.p,
            verdict: rep.verdict.code().to_string(),
            fibonacci_wieferich: rep.fibonacci_wieferich,
            wieferich_unit: rep.wieferich_unit,
            period_equal: rep.period_equal,
            williams_nonzero: rep.williams_nonzero,
            excluded_reasons: reasons.join(";"),
        })?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_csv(input: impl Read) -> Result<Vec<ScanRecord>> {
    let mut reader = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for row in reader.deserialize() {
        let row: CsvRow = row?;
        let excluded = row
            .excluded_reasons
            .split(';')
            .filter(|s| !s.is_empty())
            .map(Exclusion::from_str)
            .collect::<Result<Vec<_>>>()?;
        out.push(ScanRecord {
            report: CriteriaReport {
                d: row.d,
                p: row.p,
                excluded,
                fibonacci_wieferich: row.fibonacci_wieferich,
                wieferich_unit: row.wieferich_unit,
                period_equal: row.period_equal,
                williams_nonzero: row.williams_nonzero,
                verdict: row.verdict.parse()?,
            },
            elapsed_ns: 0,
        });
    }
    Ok(out)
}
