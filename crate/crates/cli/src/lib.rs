//! Command-line front end: argument model, dispatch and report formatting.
//!
//! Every subcommand writes one flat JSON object (or CSV with `--csv` where a
//! table makes sense). Exit codes: 0 success, 1 invalid input, 2 numerical
//! accuracy failure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use rzeta_core::bump::PHI_HAT_ZERO;
use rzeta_core::engine;
use rzeta_core::primes::{self, sieve_primes};
use rzeta_core::resonator::{
    partition_monotonicity, riemann_sum_bracket, yang_factor, Resonator, ResonatorSpec, DEFAULT_ENUMERATION_CAP,
};
use rzeta_core::zeta::{self, EvalPoint};
use rzeta_core::{with_precision, Complex64, Error, Precision, Real};

#[derive(Debug, Parser)]
#[command(
    name = "rzeta",
    version,
    about = "Resonance lower bounds for zeta derivatives on the 1-line"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Write tabular payloads as CSV.
    #[arg(long, global = true)]
    pub csv: bool,
    /// Leave the timestamp out of JSON reports.
    #[arg(long, global = true)]
    pub no_timestamp: bool,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Significant decimal digits; 15 or fewer selects hardware doubles.
    #[arg(long, global = true, env = "RZ_PRECISION")]
    pub precision: Option<u32>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SumMethod {
    Brute,
    Jet,
    Both,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Primes up to a limit.
    Sieve {
        #[arg(long)]
        limit: u64,
    },
    /// The weighted sum S(x; l).
    Ssum {
        #[arg(long)]
        x: f64,
        #[arg(long)]
        b: u32,
        #[arg(long)]
        ell: u32,
        #[arg(long, value_enum, default_value_t = SumMethod::Jet)]
        method: SumMethod,
    },
    /// Partition lower bound against S(x; l).
    Prop {
        #[arg(long)]
        x: f64,
        #[arg(long)]
        b: u32,
        #[arg(long = "J")]
        j: u32,
        #[arg(long)]
        ell: u32,
    },
    /// Weighted Euler product against e^gamma log x.
    Lemma {
        #[arg(long)]
        x: f64,
        #[arg(long)]
        b: u32,
    },
    /// Dirichlet polynomial at one height, or the seeded error probe.
    Zeta {
        #[arg(long = "T")]
        big_t: f64,
        /// Height; without it the error probe runs over [T, 2T].
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        ell: u32,
        /// Also evaluate zeta^(l) by Euler-Maclaurin and Cauchy circles.
        #[arg(long)]
        oracle: bool,
        /// Probe sample count.
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// Resonance certificate |M2|/M1.
    Resonate {
        #[arg(long)]
        x: f64,
        #[arg(long)]
        b: u32,
        #[arg(long = "T")]
        big_t: f64,
        #[arg(long)]
        ell: u32,
    },
    /// Grid maximum of the Dirichlet polynomial over [T, 2T].
    Scan {
        #[arg(long = "T")]
        big_t: f64,
        #[arg(long)]
        ell: u32,
        /// Grid step; defaults to the largest accepted, pi/(4 log T).
        #[arg(long)]
        step: Option<f64>,
        #[arg(long)]
        refine: bool,
        #[arg(long, requires = "b")]
        x: Option<f64>,
        #[arg(long, requires = "x")]
        b: Option<u32>,
    },
    /// Main-term constants of the two lower bounds, l = 0..ellmax.
    Factors {
        #[arg(long)]
        ellmax: u32,
        #[arg(long = "T")]
        big_t: f64,
    },
}

/// One row of [`emit_comparison_table`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub ell: u32,
    pub new_bound: f64,
    pub yang_bound: f64,
    /// `(1 + 1/l)^l`; absent for `l = 0`.
    pub factor: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonTable {
    #[serde(rename = "T")]
    pub big_t: f64,
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("ell,new_bound,yang_bound,factor\n");
        for r in &self.rows {
            let factor = r.factor.map(|f| f.to_string()).unwrap_or_default();
            let _ = writeln!(out, "{},{},{},{}", r.ell, r.new_bound, r.yang_bound, factor);
        }
        out
    }
}

/// Rows `l = 0..=ell_max` of `e^gamma/(l+1) (log_2 T)^(l+1)` against
/// `e^gamma l^l/(l+1)^(l+1) (log_2 T - log_3 T)^(l+1)`.
pub fn emit_comparison_table(ell_max: u32, big_t: f64) -> rzeta_core::Result<ComparisonTable> {
    if ell_max < 1 {
        return Err(Error::Domain("ellmax must be >= 1".into()));
    }
    if !(big_t > std::f64::consts::E.exp()) {
        return Err(Error::Domain(format!("T must exceed e^e, got {big_t}")));
    }
    let rows = (0..=ell_max)
        .map(|ell| {
            let (new_bound, yang_bound) = engine::main_terms(big_t, ell)?;
            let factor = if ell == 0 { None } else { Some(yang_factor(ell)?) };
            Ok(ComparisonRow {
                ell,
                new_bound,
                yang_bound,
                factor,
            })
        })
        .collect::<rzeta_core::Result<Vec<_>>>()?;
    Ok(ComparisonTable { big_t, rows })
}

/// Failure of a run, mapped to an exit code.
#[derive(Debug)]
enum Failure {
    Invalid(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_accuracy() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Invalid(e.to_string())
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Invalid(format!("output: {e}"))
    }
}

enum Payload {
    Json(Map<String, Value>),
    Csv(String),
}

/// Parses `argv` (program name first) and runs the subcommand, writing the
/// report to `--output` or stdout. Returns the exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(f) => {
            let (Failure::Invalid(msg) | Failure::Numerical(msg)) = &f;
            eprintln!("error: {msg}");
            exit_code(&f)
        }
    }
}

fn exit_code(f: &Failure) -> i32 {
    match f {
        Failure::Invalid(_) => 1,
        Failure::Numerical(_) => 2,
    }
}

fn execute(cli: &Cli) -> Result<(), Failure> {
    let precision = precision_of(&cli.global)?;
    let payload = dispatch(&cli.command, &cli.global, precision)?;
    let text = match payload {
        Payload::Csv(s) => s,
        Payload::Json(mut map) => {
            map.insert("precision_digits".into(), json!(precision.digits()));
            if !cli.global.no_timestamp {
                let secs = SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0);
                map.insert("timestamp".into(), json!(secs));
            }
            let mut s = serde_json::to_string_pretty(&Value::Object(map)).expect("report serializes");
            s.push('\n');
            s
        }
    };
    match &cli.global.output {
        Some(path) => File::create(path)?.write_all(text.as_bytes())?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn precision_of(global: &GlobalOpts) -> Result<Precision, Failure> {
    let precision = global.precision.map(Precision::from_digits).unwrap_or_default();
    primes::Constants::load(precision)?;
    Ok(precision)
}

fn report(command: &str, value: impl Serialize) -> Map<String, Value> {
    let mut map = match serde_json::to_value(value).expect("report serializes") {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("value".into(), other);
            m
        }
    };
    map.insert("command".into(), json!(command));
    map
}

/// Labels the fields whose values drop lower-order terms.
fn label_main_terms(map: &mut Map<String, Value>, fields: &[&str]) {
    map.insert("asymptotic_main_term".into(), json!(fields));
}

fn check_finite(name: &str, v: f64) -> Result<(), Failure> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Failure::Invalid(format!("--{name} must be finite, got {v}")))
    }
}

fn dispatch(command: &Command, global: &GlobalOpts, precision: Precision) -> Result<Payload, Failure> {
    match *command {
        Command::Sieve { limit } => {
            let table = sieve_primes(limit)?;
            if global.csv {
                let mut out = String::from("p\n");
                for p in table.primes() {
                    let _ = writeln!(out, "{p}");
                }
                return Ok(Payload::Csv(out));
            }
            Ok(Payload::Json(report(
                "sieve",
                json!({
                    "limit": limit,
                    "prime_count": table.len(),
                    "largest_prime": table.primes().last(),
                }),
            )))
        }
        Command::Ssum { x, b, ell, method } => {
            check_finite("x", x)?;
            let res = Resonator::new(ResonatorSpec::new(x, b, 1)?)?;
            let (brute, jet, over_m) = with_precision!(precision, |R, ctx| {
                let brute = match method {
                    SumMethod::Brute | SumMethod::Both => {
                        Some(res.s_brute::<R>(ctx, ell, DEFAULT_ENUMERATION_CAP)?.to_f64())
                    }
                    SumMethod::Jet => None,
                };
                let (jet, over_m) = match method {
                    SumMethod::Jet | SumMethod::Both => (
                        Some(res.s_jet::<R>(ctx, ell)?.to_f64()),
                        Some(res.s_over_m_jet::<R>(ctx, ell)?.to_f64()),
                    ),
                    SumMethod::Brute => (None, None),
                };
                (brute, jet, over_m)
            });
            let mut map = report(
                "ssum",
                json!({
                    "x": x,
                    "b": b,
                    "ell": ell,
                    "S": jet.or(brute),
                    "S_brute": brute,
                    "S_jet": jet,
                    "S_over_M": over_m,
                    "prime_count": res.prime_count(),
                    "log10_cardinality": res.prime_count() as f64 * (b as f64).log10(),
                }),
            );
            if let (Some(a), Some(j)) = (brute, jet) {
                map.insert(
                    "relative_difference".into(),
                    json!((a - j).abs() / j.abs().max(f64::MIN_POSITIVE)),
                );
            }
            Ok(Payload::Json(map))
        }
        Command::Prop { x, b, j, ell } => {
            check_finite("x", x)?;
            let res = Resonator::new(ResonatorSpec::new(x, b, j)?)?;
            let prop = res.proposition_report(ell, precision)?;
            let bracket = riemann_sum_bracket(ell, j)?;
            let monotone = partition_monotonicity(x, b, ell, &[1, 2, 4, 8], precision)?;
            let mut map = report("prop", prop);
            map.insert("x".into(), json!(x));
            map.insert("b".into(), json!(b));
            map.insert("J".into(), json!(j));
            map.insert("ell".into(), json!(ell));
            map.insert(
                "partition_bound".into(),
                json!(prop.partition_bound_over_m * (b as f64).powi(res.prime_count() as i32)),
            );
            map.insert(
                "bound_below_S".into(),
                json!(prop.partition_bound_over_m <= prop.s_over_m),
            );
            map.insert("riemann_lower".into(), json!(bracket.lower));
            map.insert("riemann_upper".into(), json!(bracket.upper));
            map.insert("partition_nondecreasing_in_J".into(), json!(monotone.nondecreasing));
            label_main_terms(&mut map, &["target"]);
            Ok(Payload::Json(map))
        }
        Command::Lemma { x, b } => {
            check_finite("x", x)?;
            let res = Resonator::new(ResonatorSpec::new(x, b, 1)?)?;
            let (product, target) = with_precision!(precision, |R, ctx| {
                let product = res.layer_sum_over_m::<R>(ctx, 1)?;
                let target = primes::exp_gamma::<R>(ctx) * R::from_f64(ctx, x).ln();
                (product.to_f64(), target.to_f64())
            });
            let mut map = report(
                "lemma",
                json!({
                    "x": x,
                    "b": b,
                    "product": product,
                    "target": target,
                    "ratio": product / target,
                    "deviation": (product / target - 1.0).abs(),
                }),
            );
            label_main_terms(&mut map, &["target"]);
            Ok(Payload::Json(map))
        }
        Command::Zeta {
            big_t,
            t,
            ell,
            oracle,
            samples,
        } => {
            check_finite("T", big_t)?;
            match t {
                Some(t) => {
                    let point = EvalPoint::new(t, ell, big_t)?;
                    let d = zeta::dirichlet_poly(&point);
                    let mut map = report(
                        "zeta",
                        json!({
                            "T": big_t,
                            "t": t,
                            "ell": ell,
                            "in_approximation_range": point.in_approximation_range(),
                            "dirichlet_re": d.re,
                            "dirichlet_im": d.im,
                            "dirichlet_abs": d.norm(),
                        }),
                    );
                    if oracle {
                        let z = zeta::zeta_derivative(Complex64::new(1.0, t), ell)?;
                        let signed = if ell % 2 == 1 { -z } else { z };
                        map.insert("oracle_re".into(), json!(signed.re));
                        map.insert("oracle_im".into(), json!(signed.im));
                        map.insert("abs_difference".into(), json!((signed - d).norm()));
                    }
                    Ok(Payload::Json(map))
                }
                None => {
                    let probe = zeta::approx_error_probe(big_t, samples, ell, global.seed)?;
                    Ok(Payload::Json(report("zeta", probe)))
                }
            }
        }
        Command::Resonate { x, b, big_t, ell } => {
            check_finite("x", x)?;
            check_finite("T", big_t)?;
            let spec = ResonatorSpec::new(x, b, 1)?;
            let cert = engine::certificate(&spec, big_t, ell)?;
            let diagonal = big_t * PHI_HAT_ZERO * cert.cardinality as f64;
            let mut map = report("resonate", cert);
            map.insert("x".into(), json!(x));
            map.insert("b".into(), json!(b));
            map.insert("T".into(), json!(big_t));
            map.insert("ell".into(), json!(ell));
            map.insert("m1_over_diagonal".into(), json!(cert.m1 / diagonal));
            map.insert(
                "m2_over_T_phi_hat_zero".into(),
                json!((cert.m2_re.hypot(cert.m2_im)) / (big_t * PHI_HAT_ZERO)),
            );
            Ok(Payload::Json(map))
        }
        Command::Scan {
            big_t,
            ell,
            step,
            refine,
            x,
            b,
        } => {
            check_finite("T", big_t)?;
            let step = step.unwrap_or_else(|| engine::max_scan_step(big_t));
            let spec = match (x, b) {
                (Some(x), Some(b)) => Some(ResonatorSpec::new(x, b, 1)?),
                _ => None,
            };
            let scan = engine::scan_max(big_t, ell, step, refine, spec.as_ref())?;
            if global.csv {
                let mut out = String::from("t,value\n");
                for (t, v) in &scan.samples {
                    let _ = writeln!(out, "{t},{v}");
                }
                return Ok(Payload::Csv(out));
            }
            let mut map = report("scan", &scan);
            label_main_terms(&mut map, &["theoretical_constant", "yang_constant"]);
            Ok(Payload::Json(map))
        }
        Command::Factors { ellmax, big_t } => {
            let table = emit_comparison_table(ellmax, big_t)?;
            if global.csv {
                return Ok(Payload::Csv(table.to_csv()));
            }
            let mut map = report("factors", &table);
            label_main_terms(&mut map, &["new_bound", "yang_bound"]);
            Ok(Payload::Json(map))
        }
    }
}
