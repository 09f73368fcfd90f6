use std::collections::BTreeMap;
use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qfa_cli::commands::{self, DetectArgs, MeasureArgs, RegularizeArgs};
use qfa_cli::config::{parse_config, SuiteConfig};
use qfa_cli::report::{emit_report, Format, SuiteResult};
use qfa_cli::setspec::parse_set_spec;
use qfa_cli::suites::{run_checks, SUITES};
use qfa_core::fp::GroupSubset;
use serde_json::Value;

#[derive(Parser)]
#[command(name = "qfa", version, about = "Quadratic Fourier analysis and stability checks over F_p^n")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a verification suite and print its report.
    Verify {
        #[arg(long)]
        suite: Option<String>,
        #[arg(long)]
        p: Option<u32>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        eps: Option<f64>,
        /// Decimal or 0x-prefixed hex.
        #[arg(long)]
        seed: Option<String>,
        /// Flat key=value file; command-line flags override it.
        #[arg(long)]
        config: Option<String>,
        /// Rerun with the config recorded in an earlier JSON report.
        #[arg(long, conflicts_with = "config")]
        replay: Option<String>,
        /// Only run checks with these ids.
        #[arg(long = "check")]
        checks: Vec<String>,
        /// Also write the JSON report here.
        #[arg(long)]
        json: Option<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: OutFormat,
    },
    /// Search a set for a combinatorial pattern.
    Detect {
        #[arg(value_parser = ["op", "hop2", "fop2", "vc", "vc2", "cap2", "tree"])]
        pattern: String,
        #[arg(long)]
        set: String,
        /// Pattern size, dimension cap, or tree depth.
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long)]
        witness: bool,
        /// Remove the node budget, so NONE or FOUND is always reached.
        #[arg(long)]
        exhaustive: bool,
        #[arg(long)]
        node_limit: Option<u64>,
    },
    /// Measure a quantity and compare it with a bound.
    Measure {
        #[arg(value_parser = ["u2", "u3", "dev2", "dev23", "oct", "density-transfer", "k222"])]
        name: String,
        #[arg(long)]
        set: String,
        #[arg(long)]
        factor: Option<String>,
        /// Pair or triad descriptor JSON, inline or `@path`.
        #[arg(long)]
        triad: Option<String>,
        #[arg(long)]
        bound: Option<f64>,
        /// Base triple of part indices for k222, as `u,v,w`.
        #[arg(long, default_value = "0,0,0")]
        base: String,
    },
    /// Inspect and transform factor files.
    Factor {
        #[arg(value_parser = ["rank", "repair", "pullback"])]
        action: String,
        #[arg(long)]
        factor: String,
        #[arg(long, default_value = "x")]
        target_rank_fn: String,
        /// Largest complexity allowed during repair.
        #[arg(long, default_value_t = 16)]
        max_complexity: usize,
        /// Rows of the label-space factor for pullback, `/`-separated digit strings.
        #[arg(long)]
        r: Option<String>,
    },
    /// Run the linear regularization engine.
    Regularize {
        #[arg(long)]
        set: String,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value = "2*x")]
        psi: String,
        #[arg(long, default_value_t = 8)]
        max_codim: usize,
        #[arg(long, default_value_t = 1)]
        depth: usize,
        /// Seconds.
        #[arg(long)]
        time_limit: Option<u64>,
        #[arg(long)]
        emit_chain: Option<String>,
    },
}

/// Usage and input errors exit with 2, failed checks with 1.
enum Failure {
    Usage(String),
    Run(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Run(e.to_string())
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn load_set(spec: &str) -> Result<GroupSubset, Failure> {
    parse_set_spec(spec).map_err(usage)
}

fn read_arg(text: &str) -> Result<String, Failure> {
    match text.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {path}: {e}"))),
        None => Ok(text.to_string()),
    }
}

/// Writes to stdout, treating a closed pipe (`qfa ... | head`) as success.
fn write_out(bytes: &[u8]) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    match out.write_all(bytes).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn print_json(v: &Value) -> Result<(), Failure> {
    write_out(format!("{}\n", serde_json::to_string_pretty(v)?).as_bytes())
}

#[allow(clippy::too_many_arguments)]
fn verify(
    suite: Option<String>,
    flags: BTreeMap<String, String>,
    config: Option<String>,
    replay: Option<String>,
    checks: Vec<String>,
    json: Option<String>,
    format: OutFormat,
) -> Result<bool, Failure> {
    let mut kv = BTreeMap::new();
    if let Some(path) = config {
        kv = parse_config(&std::fs::read_to_string(&path).map_err(|e| usage(format!("cannot read {path}: {e}")))?).map_err(usage)?;
    }
    if let Some(path) = replay {
        let old: SuiteResult = serde_json::from_str(&std::fs::read_to_string(&path).map_err(|e| usage(format!("cannot read {path}: {e}")))?)
            .map_err(|e| usage(format!("{path} is not a suite report: {e}")))?;
        kv = old.config;
    }
    kv.extend(flags);
    let suite = match suite.or_else(|| kv.get("suite").cloned()) {
        Some(s) => s,
        None => return Err(usage(format!("--suite is required; one of {}", SUITES.join(", ")))),
    };
    let cfg = SuiteConfig::default().apply(&kv).map_err(usage)?;
    let only: Vec<&str> = checks.iter().map(String::as_str).collect();
    let result = run_checks(&suite, &cfg, (!only.is_empty()).then_some(&only[..]))
        .map_err(usage)?;
    if let Some(path) = json {
        std::fs::write(&path, emit_report(&result, Format::Json))?;
    }
    let out = emit_report(&result, if matches!(format, OutFormat::Json) { Format::Json } else { Format::Text });
    write_out(&out)?;
    Ok(result.passed())
}

fn run(cli: Cli) -> Result<bool, Failure> {
    match cli.cmd {
        Cmd::Verify { suite, p, n, eps, seed, config, replay, checks, json, format } => {
            let mut flags = BTreeMap::new();
            let pairs = [("p", p.map(|v| v.to_string())), ("n", n.map(|v| v.to_string())), ("eps", eps.map(|v| v.to_string())), ("seed", seed)];
            for (k, v) in pairs {
                if let Some(v) = v {
                    flags.insert(k.to_string(), v);
                }
            }
            verify(suite, flags, config, replay, checks, json, format)
        }
        Cmd::Detect { pattern, set, k, witness, exhaustive, node_limit } => {
            let a = load_set(&set)?;
            print_json(&commands::detect(&a, &DetectArgs { pattern: &pattern, k, witness, exhaustive, node_limit })?)?;
            Ok(true)
        }
        Cmd::Measure { name, set, factor, triad, bound, base } => {
            let a = load_set(&set)?;
            let triad = triad.as_deref().map(read_arg).transpose()?;
            let b: Vec<usize> = base.split(',').map(|t| t.trim().parse()).collect::<Result<_, _>>().map_err(|_| usage("--base must be u,v,w"))?;
            let [u, v, w] = b[..] else {
                return Err(usage("--base must be u,v,w"));
            };
            let args = MeasureArgs { name: &name, factor: factor.as_deref(), triad: triad.as_deref(), bound, base: (u, v, w) };
            let report = commands::measure(&a, &args)?;
            print_json(&serde_json::to_value(&report)?)?;
            Ok(report.status == qfa_core::uniformity::Status::Pass)
        }
        Cmd::Factor { action, factor, target_rank_fn, max_complexity, r } => {
            let g = commands::load_factor(&factor).map_err(usage)?;
            let out = match action.as_str() {
                "rank" => commands::factor_rank_cmd(&g)?,
                "repair" => commands::factor_repair(&g, &target_rank_fn, max_complexity)?,
                _ => {
                    let r = r.ok_or_else(|| usage("pullback needs --r"))?;
                    commands::factor_pullback(&g, &r)?
                }
            };
            print_json(&out)?;
            Ok(true)
        }
        Cmd::Regularize { set, eps, psi, max_codim, depth, time_limit, emit_chain } => {
            let a = load_set(&set)?;
            let (summary, chain) = commands::regularize(&a, &RegularizeArgs { eps, psi: &psi, max_codim, depth, time_limit })?;
            if let Some(path) = emit_chain {
                std::fs::write(&path, serde_json::to_string_pretty(&chain)?)?;
            }
            print_json(&summary)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("qfa: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Run(m)) => {
            eprintln!("qfa: {m}");
            ExitCode::from(1)
        }
    }
}
