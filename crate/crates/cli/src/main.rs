//! `congruence-lab`: class counts, bound reports, isotropy checks,
//! verification suites and enumeration dumps.
//!
//! Exit codes: 0 all checks pass, 1 a mathematical counterexample was found,
//! 2 usage error. The resolved configuration is logged to stderr as one JSON
//! line so stdout keeps the fixed CSV headers.

use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use congruence_lab::cache::{CacheLoad, Mu0Cache, CACHE_HEADER};
use congruence_lab::congruence::{
    coords_in_congruence, gamma_n_coords, quat_unit_coords, EnumerationWindow, Setting,
};
use congruence_lab::exact::Rational;
use congruence_lab::geometry::translation_length;
use congruence_lab::modular::ElementKind;
use congruence_lab::quaternion::{is_division_with_bound, QuaternionAlgebra, DEFAULT_ISOTROPY_BOUND};
use congruence_lab::report::{
    bound_reports, pgt_statistics, round12, BOUNDS_HEADER, PGT_HEADER,
};
use congruence_lab::verify::{
    verify_hilbert_reciprocity, verify_lemma_sn, verify_order_formula, verify_quat_gap, Suite,
};
use congruence_lab::SplittingCertificate;

const CACHE_ENV: &str = "CONGRUENCE_LAB_CACHE";
const DEFAULT_CACHE_FILE: &str = "congruence_lab_mu0.csv";

#[derive(Parser, Debug)]
#[command(name = "congruence-lab", version, about = "Exact computations for congruence covers of arithmetic surfaces")]
struct Cli {
    /// Class-count cache file (overrides CONGRUENCE_LAB_CACHE).
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Keep class counts in memory only.
    #[arg(long, global = true)]
    no_cache: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum EnumSetting {
    Quaternionic,
    Modular,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Primitive hyperbolic classes of given traces.
    Classes {
        #[arg(long, conflicts_with = "range", required_unless_present = "range")]
        trace: Option<u64>,
        /// Inclusive range `A..B`.
        #[arg(long)]
        range: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Systole and kissing-number lower bounds for the congruence surfaces.
    Bounds {
        /// Levels as `A..B`, `N` or `a,b,c`.
        #[arg(long, default_value = "5..50")]
        n: String,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Splitting of the quaternion algebra (a, b / Q).
    Isotropy {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        /// Height bound for the isotropic-vector search.
        #[arg(long, default_value_t = DEFAULT_ISOTROPY_BOUND)]
        bound: u64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Run a verification suite; prints a JSON summary.
    Verify {
        #[arg(long)]
        suite: String,
        /// Levels as `A..B`, `N` or `a,b,c`.
        #[arg(long)]
        n: Option<String>,
        #[arg(long)]
        height: Option<u64>,
        #[arg(long, default_value_t = 3)]
        p: u64,
        /// Sample count for hilbert-reciprocity.
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// JSON-lines dump of group elements in a height window.
    Enumerate {
        #[arg(long, value_enum, default_value_t = EnumSetting::Quaternionic)]
        setting: EnumSetting,
        #[arg(long, default_value_t = 3)]
        p: u64,
        #[arg(long)]
        height: Option<u64>,
        /// Restrict to the principal congruence subgroup of this level.
        #[arg(long)]
        level: Option<u64>,
    },
    /// Per-trace class counts against the `t / log t` reference.
    Pgt {
        #[arg(long, default_value_t = 200)]
        tmax: u64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

/// Errors in the user's input (exit 2), as opposed to counterexamples (exit 1).
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage<T>(msg: impl Into<String>) -> anyhow::Result<T> {
    Err(Usage(msg.into()).into())
}

fn parse_levels(spec: &str) -> anyhow::Result<Vec<u64>> {
    let bad = || Usage(format!("invalid range {spec:?}; expected A..B, N or a,b,c"));
    if let Some((lo, hi)) = spec.split_once("..") {
        let lo: u64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: u64 = hi.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(bad().into());
        }
        return Ok((lo..=hi).collect());
    }
    spec.split(',')
        .map(|s| s.trim().parse::<u64>().map_err(|_| bad().into()))
        .collect()
}

fn parse_rational(s: &str) -> anyhow::Result<Rational> {
    let r: Rational = match s.trim().parse() {
        Ok(r) => r,
        Err(_) => return usage(format!("malformed rational {s:?}")),
    };
    if r == Rational::from_integer(0.into()) {
        return usage(format!("{s:?} must be nonzero"));
    }
    Ok(r)
}

/// Library errors raised by bad parameters are usage errors.
fn lib<T>(r: congruence_lab::Result<T>) -> anyhow::Result<T> {
    r.map_err(|e| Usage(e.to_string()).into())
}

fn open_cache(cli: &Cli) -> Mu0Cache {
    if cli.no_cache {
        return Mu0Cache::in_memory();
    }
    let path = cli
        .cache
        .clone()
        .or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE_FILE));
    let (cache, load) = Mu0Cache::with_file(&path);
    match load {
        CacheLoad::Corrupt(why) => {
            eprintln!("# cache {} rejected ({why}); recomputing", path.display())
        }
        CacheLoad::Loaded(n) => eprintln!("# cache {} loaded {n} rows", path.display()),
        CacheLoad::Missing => {}
    }
    cache
}

fn log_config(mut params: Value, cache: Option<&Mu0Cache>) {
    params["cache"] = match cache.and_then(|c| c.path()) {
        Some(p) => json!(p.display().to_string()),
        None => Value::Null,
    };
    eprintln!("# config {params}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = run(&cli, &mut out).and_then(|code| {
        out.flush()?;
        Ok(code)
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            if e.downcast_ref::<io::Error>().is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe) {
                return ExitCode::SUCCESS;
            }
            eprintln!("error: {e:#}");
            ExitCode::from(if e.downcast_ref::<Usage>().is_some() { 2 } else { 1 })
        }
    }
}

fn run(cli: &Cli, out: &mut impl Write) -> anyhow::Result<u8> {
    match &cli.command {
        Command::Classes { trace, range, format } => {
            let traces = match (trace, range) {
                (Some(t), _) => vec![*t],
                (None, Some(r)) => parse_levels(r)?,
                (None, None) => return usage("one of --trace or --range is required"),
            };
            if traces.iter().any(|&t| t < 3) {
                return usage("traces must be at least 3");
            }
            let cache = open_cache(cli);
            log_config(json!({"command": "classes", "traces": [traces[0], traces[traces.len() - 1]], "format": format!("{format:?}").to_lowercase()}), Some(&cache));
            cmd_classes(&traces, *format, &cache, out)?;
            cache.persist().context("writing cache")?;
            Ok(0)
        }
        Command::Bounds { n, epsilon, format } => {
            let levels = parse_levels(n)?;
            let cache = open_cache(cli);
            log_config(json!({"command": "bounds", "n": n, "epsilon": epsilon, "setting": "modular", "format": format!("{format:?}").to_lowercase()}), Some(&cache));
            let reports = lib(bound_reports(&levels, *epsilon, &cache))?;
            cache.persist().context("writing cache")?;
            match format {
                Format::Csv => {
                    writeln!(out, "{BOUNDS_HEADER}")?;
                    for r in &reports {
                        writeln!(out, "{}", r.csv_row())?;
                    }
                }
                Format::Json => {
                    for r in &reports {
                        writeln!(out, "{}", r.json())?;
                    }
                }
            }
            let failed = reports.iter().any(|r| !r.verdict_sys || (r.precondition() && !r.verdict_kiss));
            Ok(failed as u8)
        }
        Command::Isotropy { a, b, bound, format } => {
            let (ra, rb) = (parse_rational(a)?, parse_rational(b)?);
            log_config(json!({"command": "isotropy", "a": ra.to_string(), "b": rb.to_string(), "bound": bound}), None);
            let alg = lib(QuaternionAlgebra::new(ra, rb))?;
            let cert = match is_division_with_bound(&alg, *bound) {
                Ok(c) => c,
                Err(e @ congruence_lab::Error::SearchExhausted { .. }) => bail!(e),
                Err(e) => return usage(e.to_string()),
            };
            if !cert.check(&alg) {
                bail!("certificate failed its self-check: {cert:?}");
            }
            match format {
                Format::Json => writeln!(out, "{}", serde_json::to_string(&cert)?)?,
                Format::Csv => match &cert {
                    SplittingCertificate::Split { witness } => {
                        let w: Vec<String> = witness.iter().map(|r| r.to_string()).collect();
                        writeln!(out, "split witness=({}) norm=0", w.join(","))?
                    }
                    SplittingCertificate::Division { ramified } => {
                        let r: Vec<String> = ramified.iter().map(|p| p.to_string()).collect();
                        writeln!(out, "division ramified={}", r.join(","))?
                    }
                },
            }
            Ok(0)
        }
        Command::Verify { suite, n, height, p, samples, seed } => {
            let suite: Suite = match suite.parse() {
                Ok(s) => s,
                Err(e) => return usage(e.to_string()),
            };
            let outcome = match suite {
                Suite::LemmaSn => {
                    let levels = parse_levels(n.as_deref().unwrap_or("5..12"))?;
                    let h = height.unwrap_or(10_000);
                    log_config(json!({"command": "verify", "suite": suite.name(), "n": levels, "height": h}), None);
                    lib(verify_lemma_sn(&levels, lib(EnumerationWindow::new(h))?))?
                }
                Suite::QuatGap => {
                    let levels = parse_levels(n.as_deref().unwrap_or("3,5,7"))?;
                    let h = height.unwrap_or(200);
                    log_config(json!({"command": "verify", "suite": suite.name(), "p": p, "n": levels, "height": h}), None);
                    lib(verify_quat_gap(*p, &levels, lib(EnumerationWindow::new(h))?))?
                }
                Suite::OrderFormula => {
                    let levels = parse_levels(n.as_deref().unwrap_or("2..12"))?;
                    log_config(json!({"command": "verify", "suite": suite.name(), "n": levels}), None);
                    lib(verify_order_formula(&levels))?
                }
                Suite::HilbertReciprocity => {
                    log_config(json!({"command": "verify", "suite": suite.name(), "samples": samples, "seed": seed}), None);
                    lib(verify_hilbert_reciprocity(*samples, *seed, 60))?
                }
            };
            writeln!(out, "{}", serde_json::to_string(&outcome)?)?;
            Ok(if outcome.passed { 0 } else { 1 })
        }
        Command::Enumerate { setting, p, height, level } => cmd_enumerate(*setting, *p, *height, *level, out),
        Command::Pgt { tmax, format } => {
            let cache = open_cache(cli);
            log_config(json!({"command": "pgt", "tmax": tmax, "format": format!("{format:?}").to_lowercase()}), Some(&cache));
            let rows = lib(pgt_statistics(*tmax, &cache))?;
            cache.persist().context("writing cache")?;
            match format {
                Format::Csv => {
                    writeln!(out, "{PGT_HEADER}")?;
                    for r in &rows {
                        writeln!(out, "{}", r.csv_row())?;
                    }
                }
                Format::Json => {
                    for r in &rows {
                        writeln!(out, "{}", r.json())?;
                    }
                }
            }
            Ok(0)
        }
    }
}

fn cmd_classes(traces: &[u64], format: Format, cache: &Mu0Cache, out: &mut impl Write) -> anyhow::Result<()> {
    let lo = traces[0];
    let hi = traces[traces.len() - 1];
    match format {
        Format::Csv => {
            let counts = lib(cache.counts(lo..=hi))?;
            writeln!(out, "{CACHE_HEADER}")?;
            for c in counts.iter().filter(|c| traces.contains(&c.trace)) {
                writeln!(out, "{}", c.csv_row())?;
            }
        }
        Format::Json => {
            for &t in traces {
                let tc = lib(cache.classes(t))?;
                let classes: Vec<Value> = tc
                    .classes
                    .iter()
                    .map(|c| {
                        json!({
                            "representative": c.representative,
                            "primitive": c.primitive,
                            "sl2_primitive_lifts": c.sl2_primitive_lifts,
                            "cycle": c.canonical_cycle,
                        })
                    })
                    .collect();
                let row = json!({
                    "trace": t,
                    "mu0": tc.mu0(),
                    "mu0_sl2": tc.mu0_sl2(),
                    "discriminant": t * t - 4,
                    "n_cycles": tc.n_cycles(),
                    "classes": classes,
                });
                writeln!(out, "{row}")?;
            }
        }
    }
    Ok(())
}

fn element_line(setting: &str, level: u64, coords: &[i64; 4], trace: i64) -> Value {
    let kind = ElementKind::from_trace_i64(trace);
    let mut v = json!({
        "setting": setting,
        "N": level,
        "coords": coords,
        "trace": trace,
        "kind": kind.as_str(),
    });
    if kind == ElementKind::Hyperbolic {
        let l = translation_length(trace).expect("hyperbolic trace");
        v["length"] = json!(round12(l));
    }
    v
}

fn cmd_enumerate(
    setting: EnumSetting,
    p: u64,
    height: Option<u64>,
    level: Option<u64>,
    out: &mut impl Write,
) -> anyhow::Result<u8> {
    match setting {
        EnumSetting::Quaternionic => {
            let h = height.unwrap_or(200);
            let window = lib(EnumerationWindow::new(h))?;
            let label = lib(Setting::quaternionic(p))?.to_string();
            let n = level.unwrap_or(1);
            if n == 0 {
                return usage("--level must be positive");
            }
            log_config(json!({"command": "enumerate", "setting": label, "p": p, "height": h, "level": n}), None);
            let mut all = lib(quat_unit_coords(p, window))?;
            all.retain(|c| coords_in_congruence(c, n));
            for c in &all {
                let trace = 2 * c[0];
                writeln!(out, "{}", element_line(&label, n, c, trace))?;
            }
        }
        EnumSetting::Modular => {
            let Some(n) = level else {
                return usage("--level is required for the modular setting");
            };
            let h = height.unwrap_or(10_000);
            log_config(json!({"command": "enumerate", "setting": "modular", "height": h, "level": n}), None);
            let all = lib(gamma_n_coords(n, lib(EnumerationWindow::new(h))?))?;
            for c in &all {
                writeln!(out, "{}", element_line("modular", n, c, c[0] + c[3]))?;
            }
        }
    }
    Ok(0)
}
