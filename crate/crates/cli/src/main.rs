use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use qprat::arith::{is_prime, kronecker};
use qprat::fibmod::{period_linear, wall_period, wall_period_square, FibParams, PeriodRecord};
use qprat::scan::{multi_scan, OutputFormat};
use qprat::williams::williams_congruence;
use qprat::{
    decide, field_invariants, is_fundamental_discriminant, reproduce_table, scan, CriteriaReport,
    Error, Mode, QuadraticField, ScanConfig,
};

#[derive(Parser, Debug)]
#[command(
    name = "qprat",
    version,
    about = "p-rationality of real quadratic fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fundamental unit and class numbers of Q(√d).
    Field {
        #[arg(short)]
        d: i64,
        #[arg(long)]
        json: bool,
    },
    /// Decide p-rationality at one prime.
    Check {
        #[arg(short)]
        d: i64,
        #[arg(short)]
        p: u64,
        #[arg(long)]
        cross_validate: bool,
        #[arg(long)]
        json: bool,
    },
    /// Exceptional primes up to a bound.
    Scan {
        /// Discriminants: `8`, `5,8,12` or a range `5..100`.
        #[arg(short)]
        d: String,
        #[arg(long)]
        bound: u64,
        #[arg(long, default_value_t = 3)]
        from: u64,
        #[arg(long, env = "QPRAT_JOBS", default_value_t = default_jobs())]
        jobs: usize,
        #[arg(long, default_value = "human")]
        format: OutputFormat,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        cross_validate: bool,
        /// Allow cross-validation beyond p = 10^5.
        #[arg(long)]
        force: bool,
    },
    /// Exceptional primes for every fundamental d up to dmax.
    Table {
        #[arg(long)]
        dmax: i64,
        #[arg(long)]
        bound: u64,
        #[arg(long, env = "QPRAT_JOBS", default_value_t = default_jobs())]
        jobs: usize,
    },
    /// Rank of apparition and period of the unit sequence modulo m.
    Period {
        #[arg(short)]
        d: i64,
        #[arg(short)]
        m: u64,
    },
    /// Both sides of the Williams congruence.
    Williams {
        #[arg(short)]
        d: i64,
        #[arg(short)]
        p: u64,
    },
    /// Primes at which some of several fields fail to be p-rational.
    Multi {
        #[arg(long)]
        discriminants: String,
        #[arg(long)]
        from: u64,
        #[arg(long)]
        to: u64,
        #[arg(long, env = "QPRAT_JOBS", default_value_t = default_jobs())]
        jobs: usize,
    },
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn parse_discriminants(spec: &str) -> Result<Vec<i64>, Error> {
    let bad = |s: &str| Error::Config(format!("cannot parse discriminant list `{s}`"));
    if let Some((lo, hi)) = spec.split_once("..") {
        let lo: i64 = lo.trim().parse().map_err(|_| bad(spec))?;
        let hi: i64 = hi
            .trim()
            .trim_start_matches('=')
            .parse()
            .map_err(|_| bad(spec))?;
        return Ok((lo..=hi)
            .filter(|&d| is_fundamental_discriminant(d))
            .collect());
    }
    let ds = spec
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<i64>().map_err(|_| bad(spec)))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(d) = ds.iter().find(|&&d| !is_fundamental_discriminant(d)) {
        return Err(Error::Config(format!(
            "{d} is not a fundamental discriminant"
        )));
    }
    Ok(ds)
}

fn field(d: i64) -> Result<QuadraticField, Error> {
    field_invariants(d).map_err(|e| match e {
        Error::NotFundamental(d) => Error::Config(format!("{d} is not a fundamental discriminant")),
        other => other,
    })
}

fn show(b: Option<bool>) -> &'static str {
    match b {
        Some(true) => "true",
        Some(false) => "false",
        None => "-",
    }
}

fn render_report(r: &CriteriaReport) -> String {
    let reasons: Vec<&str> = r.excluded.iter().map(|e| e.code()).collect();
    format!(
        "d={} p={}: {}\n  fibonacci-wieferich: {}\n  wieferich-unit: {}\n  period-equal: {}\n  williams-nonzero: {}\n  excluded: {}\n",
        r.d,
        r.p,
        r.verdict,
        show(r.fibonacci_wieferich),
        show(r.wieferich_unit),
        show(r.period_equal),
        show(r.williams_nonzero),
        if reasons.is_empty() { "-".to_string() } else { reasons.join(", ") }
    )
}

fn period(d: i64, m: u64) -> Result<(PeriodRecord, Option<u64>), Error> {
    let f = field(d)?;
    let params = FibParams::from_field(&f);
    if m > 2 && is_prime(m) && !f.divides_unit_discriminant(m) {
        let rec = wall_period(&params, m, kronecker(d, m as i64)?)?;
        return Ok((rec, Some(wall_period_square(&params, m, rec.k))));
    }
    period_linear(&params, m)
        .map(|rec| (rec, None))
        .map_err(|e| match e {
            Error::InvalidArgument(msg) => Error::Config(msg),
            other => other,
        })
}

fn run(command: Command) -> Result<String, Error> {
    match command {
        Command::Field { d, json } => {
            let f = field(d)?;
            if json {
                return Ok(serde_json::to_string_pretty(&f)? + "\n");
            }
            Ok(format!(
                "d = {}\nunit = {}\ntrace = {}\nnorm = {}\nh+ = {}\nh = {}\nperiod = {}\n",
                f.d, f.unit, f.trace_a, f.norm_b, f.h_narrow, f.h, f.cf_period
            ))
        }
        Command::Check {
            d,
            p,
            cross_validate,
            json,
        } => {
            if !is_prime(p) {
                return Err(Error::Config(format!("{p} is not prime")));
            }
            let mode = if cross_validate {
                Mode::CrossValidate
            } else {
                Mode::Fast
            };
            let report = decide(&field(d)?, p, mode)?;
            if json {
                return Ok(serde_json::to_string_pretty(&report)? + "\n");
            }
            Ok(render_report(&report))
        }
        Command::Scan {
            d,
            bound,
            from,
            jobs,
            format,
            out,
            cross_validate,
            force,
        } => {
            let mut config = ScanConfig::new(parse_discriminants(&d)?, bound);
            config.p_lo = from;
            config.jobs = jobs;
            config.mode = if cross_validate {
                Mode::CrossValidate
            } else {
                Mode::Fast
            };
            config.force = force;
            config.format = format;
            config.out = out;
            let report = scan(&config)?;
            let text = report.render(config.format, &config.discriminants)?;
            match &config.out {
                Some(path) => {
                    fs::write(path, text)?;
                    Ok(String::new())
                }
                None => Ok(text),
            }
        }
        Command::Table { dmax, bound, jobs } => Ok(reproduce_table(dmax, bound, jobs)?.to_string()),
        Command::Period { d, m } => {
            let (rec, square) = period(d, m)?;
            let mut text = format!("m = {}\nz = {}\nk = {}\n", rec.modulus, rec.z, rec.k);
            if let Some(k2) = square {
                text += &format!("k(m^2) = {k2}\n");
            }
            Ok(text)
        }
        Command::Williams { d, p } => {
            if !is_prime(p) || p == 2 {
                return Err(Error::Config(format!("{p} is not an odd prime")));
            }
            let report = williams_congruence(&field(d)?, p)?;
            Ok(serde_json::to_string_pretty(&report)? + "\n")
        }
        Command::Multi {
            discriminants,
            from,
            to,
            jobs,
        } => {
            let ds = parse_discriminants(&discriminants)?;
            let mut text = String::new();
            for (p, failing) in multi_scan(&ds, from, to, jobs)? {
                let list: Vec<String> = failing.iter().map(i64::to_string).collect();
                text += &format!("{p} | {}\n", list.join(", "));
            }
            if text.is_empty() {
                text = "(none)\n".to_string();
            }
            Ok(text)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli.command) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            if let Error::EquivalenceViolation(report) = &e {
                eprintln!("error: the four criteria disagree");
                eprint!("{}", render_report(report));
                if let Ok(json) = serde_json::to_string_pretty(report) {
                    eprintln!("{json}");
                }
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(exit_code(&e))
        }
    }
}

/// 2 when the mathematics disagrees with itself, 1 for everything else.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::EquivalenceViolation(_)
        | Error::Inconsistency(_)
        | Error::CongruenceViolation { .. } => 2,
        _ => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use qprat::{Exclusion, Verdict};

    #[test]
    fn exit_codes() {
        let report = CriteriaReport {
            d: 8,
            p: 13,
            excluded: vec![],
            fibonacci_wieferich: Some(true),
            wieferich_unit: Some(false),
            period_equal: Some(true),
            williams_nonzero: Some(false),
            verdict: Verdict::NotPRational,
        };
        assert_eq!(exit_code(&Error::EquivalenceViolation(Box::new(report))), 2);
        assert_eq!(exit_code(&Error::Inconsistency("x".into())), 2);
        assert_eq!(
            exit_code(&Error::CongruenceViolation {
                d: 5,
                p: 7,
                lhs: 1,
                rhs: 2
            }),
            2
        );
        assert_eq!(exit_code(&Error::Config("x".into())), 1);
        let excluded = Error::ExcludedPrime {
            p: 5,
            reason: Exclusion::DividesUnitDiscriminant { ramified: true },
        };
        assert_eq!(exit_code(&excluded), 1);
    }

    #[test]
    fn discriminant_lists() {
        assert_eq!(parse_discriminants("8").unwrap(), vec![8]);
        assert_eq!(parse_discriminants("5, 8,12").unwrap(), vec![5, 8, 12]);
        assert_eq!(parse_discriminants("5..13").unwrap(), vec![5, 8, 12, 13]);
        assert_eq!(parse_discriminants("5..=13").unwrap(), vec![5, 8, 12, 13]);
        assert!(matches!(parse_discriminants("9"), Err(Error::Config(_))));
        assert!(matches!(parse_discriminants("x"), Err(Error::Config(_))));
    }

    #[test]
    fn report_rendering() {
        let report = qprat::decide(&field(73).unwrap(), 5, Mode::CrossValidate).unwrap();
        assert_eq!(
            render_report(&report),
            "d=73 p=5: not-p-rational\n  fibonacci-wieferich: -\n  wieferich-unit: true\n  period-equal: -\n  williams-nonzero: -\n  excluded: divides-unit-discriminant\n"
        );
    }
}
