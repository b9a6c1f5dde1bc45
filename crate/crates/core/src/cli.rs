//! The `thetaset` command line.
//!
//! Every command prints one table, as CSV (single header row) or as a JSON
//! object `{"rows": [...]}`. Exit codes: 0 success, 1 a verified law failed,
//! 2 usage or parse error, 3 resource limit.

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::arith::trial_factorize;
use crate::census::{self, normalize_residue};
use crate::density::{mertens_for, DensitySolver, DEFAULT_TRUNCATION};
use crate::error::Error;
use crate::laws;
use crate::theta::ThetaSpec;
use crate::workbench::Workbench;

pub const EXIT_OK: i32 = 0;
pub const EXIT_LAW_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "thetaset", version, about = "Enumerate, count and measure integer sets defined by a prime-size threshold theta")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Worker threads for enumeration and reductions.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
struct ThetaArg {
    /// practical | dense:<u>[/<v>] | smooth:<y> | almost-prime:<k> | prime-powers
    #[arg(long = "theta", value_parser = parse_theta)]
    spec: ThetaSpec,
}

fn parse_theta(s: &str) -> Result<ThetaSpec, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the members up to --limit.
    Members {
        #[command(flatten)]
        theta: ThetaArg,
        #[arg(long)]
        limit: u64,
        #[arg(long = "mod")]
        modulus: Option<u64>,
        #[arg(long, requires = "modulus", allow_negative_numbers = true)]
        residue: Option<i64>,
        /// Sort ascending instead of depth-first order.
        #[arg(long)]
        sorted: bool,
    },
    /// Count members, optionally restricted by a modulus.
    Count {
        #[command(flatten)]
        theta: ThetaArg,
        #[arg(long)]
        limit: u64,
        #[arg(long = "mod")]
        modulus: Option<u64>,
        #[arg(long, requires = "modulus", allow_negative_numbers = true, conflicts_with_all = ["multiples", "gcd"])]
        residue: Option<i64>,
        #[arg(long, requires = "modulus", conflicts_with = "gcd")]
        multiples: bool,
        #[arg(long, requires = "modulus")]
        gcd: Option<u64>,
    },
    /// Residue-class histogram modulo --mod.
    Hist {
        #[command(flatten)]
        theta: ThetaArg,
        #[arg(long)]
        limit: u64,
        #[arg(long = "mod")]
        modulus: u64,
    },
    /// Series value of r_q.
    Rq {
        #[command(flatten)]
        theta: ThetaArg,
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
        truncation: u64,
    },
    /// Series value of r_{q,a}.
    Rqa {
        #[command(flatten)]
        theta: ThetaArg,
        #[arg(long)]
        q: u64,
        #[arg(long, allow_negative_numbers = true)]
        a: i64,
        #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
        truncation: u64,
    },
    /// r_q for q = 2..=qmax.
    Table {
        #[command(flatten)]
        theta: ThetaArg,
        #[arg(long)]
        qmax: u64,
        #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
        truncation: u64,
    },
    /// Check an identity or law.
    Verify {
        #[command(subcommand)]
        law: Law,
    },
}

#[derive(Subcommand, Debug)]
enum Law {
    /// B_{θ_q}(x/q) − R(x,q) <= B_q(x) <= B_{θ_q}(x/q) for q = 2..=qmax (or one --q).
    Sandwich {
        #[command(flatten)]
        theta: ThetaArg,
        #[arg(long)]
        limit: u64,
        #[arg(long, conflicts_with = "qmax")]
        q: Option<u64>,
        #[arg(long, default_value_t = 30)]
        qmax: u64,
    },
    /// Σ_{m | q/d} μ(m) B_{dm}(x) = #{n : gcd(n, q) = d} for q <= qmax, d | q.
    Moebius {
        #[command(flatten)]
        theta: ThetaArg,
        #[arg(long)]
        limit: u64,
        #[arg(long, default_value_t = 60)]
        qmax: u64,
    },
    /// Element-wise θ_q inclusions for m <= mmax.
    Inclusion {
        #[command(flatten)]
        theta: ThetaArg,
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 10_000)]
        mmax: u64,
    },
    /// mn ∈ B for random valid pairs (m, n).
    Closure {
        #[command(flatten)]
        theta: ThetaArg,
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 1_000)]
        pairs: usize,
        #[arg(long, default_value_t = 10_000)]
        cap: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Spread over the classes coprime to q at each limit.
    Equidist {
        #[command(flatten)]
        theta: ThetaArg,
        #[arg(long)]
        q: u64,
        #[arg(long, value_delimiter = ',', required = true)]
        limits: Vec<u64>,
    },
    /// Empty, singleton or infinite class a mod q.
    Classify {
        #[command(flatten)]
        theta: ThetaArg,
        #[arg(long)]
        q: u64,
        #[arg(long, allow_negative_numbers = true)]
        a: i64,
        #[arg(long, default_value_t = 1_000_000)]
        bound: u64,
    },
}

/// A rectangular report with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
    /// Set by `verify` commands when a law did not hold.
    pub failed: bool,
}

impl Report {
    fn new(columns: &[&'static str]) -> Self {
        Report {
            columns: columns.to_vec(),
            rows: Vec::new(),
            failed: false,
        }
    }

    fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|v| match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.to_string(), v.clone()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut s = json!({ "rows": rows }).to_string();
        s.push('\n');
        s
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Resource(_) | Error::Overflow(_) => EXIT_RESOURCE,
        Error::Domain { .. } | Error::Precondition(_) | Error::Parse { .. } => EXIT_USAGE,
    }
}

/// Parses `args` (program name first), runs the command and writes its
/// report to `out`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let bench = Workbench::new(cli.workers);
    match execute(&bench, cli.command) {
        Ok(report) => emit(&report, cli.format, out),
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn emit(report: &Report, format: Format, out: &mut dyn Write) -> i32 {
    let text = match format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json(),
    };
    if out.write_all(text.as_bytes()).is_err() {
        return EXIT_RESOURCE;
    }
    if report.failed {
        EXIT_LAW_FAILED
    } else {
        EXIT_OK
    }
}

fn execute(bench: &Workbench, command: Command) -> crate::Result<Report> {
    match command {
        Command::Members {
            theta,
            limit,
            modulus,
            residue,
            sorted,
        } => {
            let spec = theta.spec;
            let primes = bench.primes_for(&spec, limit)?;
            let stream = crate::genset::enumerate(&spec, limit, &primes)?;
            let parts = stream.fold(bench, Vec::new, |v: &mut Vec<u64>, m| v.push(m.n()))?;
            let mut values: Vec<u64> = parts.into_iter().flatten().collect();
            if let Some(q) = modulus {
                if q == 0 {
                    return Err(Error::precondition("--mod must be at least 1"));
                }
                let a = normalize_residue(residue.unwrap_or(0), q);
                values.retain(|n| n % q == a);
            }
            if sorted {
                values.sort_unstable();
            }
            let mut r = Report::new(&["n"]);
            for n in values {
                r.push(vec![json!(n)]);
            }
            Ok(r)
        }
        Command::Count {
            theta,
            limit,
            modulus,
            residue,
            multiples,
            gcd,
        } => {
            let spec = theta.spec;
            let name = spec.to_string();
            let Some(q) = modulus else {
                let mut r = Report::new(&["theta", "limit", "count"]);
                r.push(vec![json!(name), json!(limit), json!(census::count(bench, &spec, limit)?)]);
                return Ok(r);
            };
            let (selector, value) = if multiples {
                ("multiples".to_string(), census::count_multiples(bench, &spec, limit, q)?)
            } else if let Some(d) = gcd {
                (format!("gcd:{d}"), census::count_gcd_class(bench, &spec, limit, q, d)?)
            } else {
                let a = residue.unwrap_or(0);
                let c = census::count_class(bench, &spec, limit, q, a)?;
                (format!("residue:{}", normalize_residue(a, q)), c)
            };
            let mut r = Report::new(&["theta", "limit", "mod", "selector", "count"]);
            r.push(vec![json!(name), json!(limit), json!(q), json!(selector), json!(value)]);
            Ok(r)
        }
        Command::Hist { theta, limit, modulus } => {
            let hist = census::histogram(bench, &theta.spec, limit, modulus)?;
            let mut r = Report::new(&["residue", "count"]);
            for (a, c) in hist.counts.iter().enumerate() {
                r.push(vec![json!(a), json!(c)]);
            }
            Ok(r)
        }
        Command::Rq { theta, q, truncation } => {
            let spec = theta.spec;
            let tables = mertens_for(bench, &spec, truncation, q)?;
            let mut solver = DensitySolver::new(bench, &spec, truncation, &tables)?;
            let mut r = Report::new(&["theta", "q", "truncation", "c_theta", "c_q", "r_q"]);
            r.push(vec![
                json!(spec.to_string()),
                json!(q),
                json!(truncation),
                json!(solver.c_theta()?),
                json!(solver.c_q(q)?),
                json!(solver.r_q(q)?),
            ]);
            Ok(r)
        }
        Command::Rqa { theta, q, a, truncation } => {
            let spec = theta.spec;
            let tables = mertens_for(bench, &spec, truncation, q)?;
            let mut solver = DensitySolver::new(bench, &spec, truncation, &tables)?;
            let value = solver.r_qa(q, a)?;
            let d = crate::arith::gcd(normalize_residue(a, q), q);
            let mut r = Report::new(&["theta", "q", "a", "gcd", "truncation", "r_qa"]);
            r.push(vec![
                json!(spec.to_string()),
                json!(q),
                json!(normalize_residue(a, q)),
                json!(d),
                json!(truncation),
                json!(value),
            ]);
            Ok(r)
        }
        Command::Table { theta, qmax, truncation } => {
            let spec = theta.spec;
            let tables = mertens_for(bench, &spec, truncation, qmax)?;
            let mut solver = DensitySolver::new(bench, &spec, truncation, &tables)?;
            let mut r = Report::new(&["theta", "truncation", "q", "c_q", "r_q"]);
            for row in solver.table(qmax)? {
                r.push(vec![json!(spec.to_string()), json!(truncation), json!(row.q), json!(row.c_q), json!(row.r_q)]);
            }
            Ok(r)
        }
        Command::Verify { law } => verify(bench, law),
    }
}

fn verify(bench: &Workbench, law: Law) -> crate::Result<Report> {
    match law {
        Law::Sandwich { theta, limit, q, qmax } => {
            let spec = theta.spec;
            let qs: Vec<u64> = match q {
                Some(q) => vec![q],
                None => (2..=qmax).collect(),
            };
            let mut r = Report::new(&["theta", "x", "q", "lower", "mid", "upper", "remainder", "pass"]);
            for q in qs {
                let s = census::sandwich_check(bench, &spec, limit, q)?;
                r.failed |= !s.pass;
                r.push(vec![
                    json!(spec.to_string()),
                    json!(s.x),
                    json!(s.q),
                    json!(s.lower),
                    json!(s.mid),
                    json!(s.upper),
                    json!(s.remainder),
                    json!(s.pass),
                ]);
            }
            Ok(r)
        }
        Law::Moebius { theta, limit, qmax } => {
            let spec = theta.spec;
            let set = census::MemberSet::build(bench, &spec, limit)?;
            let mut r = Report::new(&["theta", "x", "q", "d", "gcd_class", "mobius_rhs", "pass"]);
            for q in 1..=qmax {
                for d in trial_factorize(q)?.divisors() {
                    let lhs = set.count_gcd_class(q, d)?;
                    let rhs = set.mobius_rhs(q, d)?;
                    let pass = lhs as i64 == rhs;
                    r.failed |= !pass;
                    r.push(vec![
                        json!(spec.to_string()),
                        json!(limit),
                        json!(q),
                        json!(d),
                        json!(lhs),
                        json!(rhs),
                        json!(pass),
                    ]);
                }
            }
            Ok(r)
        }
        Law::Inclusion { theta, q, mmax } => {
            let rep = laws::verify_inclusions(bench, &theta.spec, q, mmax)?;
            Ok(law_row(&theta.spec, q, &rep, &["theta", "q", "m_max", "checked", "violations", "pass"], mmax))
        }
        Law::Closure { theta, q, pairs, cap, seed } => {
            let sample = laws::closure_sample(bench, &theta.spec, q, pairs, cap, seed)?;
            let rep = laws::closure_check(&theta.spec, q, &sample)?;
            Ok(law_row(&theta.spec, q, &rep, &["theta", "q", "cap", "checked", "violations", "pass"], cap))
        }
        Law::Equidist { theta, q, limits } => {
            let mut limits = limits;
            limits.sort_unstable();
            limits.dedup();
            let rep = laws::equidist_report(bench, &theta.spec, &limits, q)?;
            let mut r = Report::new(&[
                "theta",
                "q",
                "x",
                "count",
                "coprime",
                "max_deviation",
                "relative_deviation",
                "scaled_deviation",
            ]);
            for row in rep.rows {
                r.push(vec![
                    json!(rep.theta),
                    json!(q),
                    json!(row.x),
                    json!(row.count),
                    json!(row.coprime),
                    json!(row.max_deviation),
                    json!(row.relative_deviation),
                    json!(row.scaled_deviation),
                ]);
            }
            Ok(r)
        }
        Law::Classify { theta, q, a, bound } => {
            let c = laws::classify_progression(bench, &theta.spec, q, a, bound)?;
            let mut r = Report::new(&["theta", "q", "a", "bound", "members_found", "verdict"]);
            r.push(vec![
                json!(theta.spec.to_string()),
                json!(c.q),
                json!(c.a),
                json!(c.search_bound),
                json!(c.members_found),
                json!(c.label()),
            ]);
            Ok(r)
        }
    }
}

fn law_row(spec: &ThetaSpec, q: u64, rep: &laws::LawReport, columns: &[&'static str], extent: u64) -> Report {
    let mut r = Report::new(columns);
    r.failed = !rep.pass();
    r.push(vec![
        json!(spec.to_string()),
        json!(q),
        json!(extent),
        json!(rep.checked),
        json!(rep.counterexamples.len()),
        json!(rep.pass()),
    ]);
    r
}
