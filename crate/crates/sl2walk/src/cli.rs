//! Command-line interface: one subcommand per oracle or experiment
//! driver, JSON (default) or CSV output, deterministic under --seed.
//!
//! Exit codes: 0 success, 1 usage error, 2 when an assertion-style
//! check fails or a budget is exceeded.

use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::cayley::{
    count_oracles, girth, is_bipartite, spectral_rho, EigMethod, GirthResult, QuotientGroup,
};
use crate::polyring::{factor, is_admissible, parse_coeff_list, random_irreducible, PolyFp};
use crate::quotient::ResidueRing;
use crate::sieve::{
    run_big_sieve, run_expander_survey, run_small_sieve, ExperimentConfig, ExperimentReport,
    SieveError,
};
use crate::sieve::config::parse_generators;
use crate::walker::{escape_probability, free_pair_search, CertStatus, Predicate, RNG_ID};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Parser, Debug)]
#[command(
    name = "sl2walk",
    version,
    about = "Congruence quotients of SL2(Fp[t]): expansion measurements and random-walk escape experiments",
    disable_help_subcommand = true
)]
pub struct Cli {
    /// RNG seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Enumeration / exploration budget override.
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    /// Write the report to a file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Factor a polynomial over F_p.
    Factor {
        #[arg(long)]
        p: u64,
        /// Comma-separated coefficients, constant first.
        #[arg(long)]
        f: String,
    },
    /// Check whether a degree is M-admissible (exit 2 when it is not).
    Admissible {
        #[arg(long)]
        n: u64,
        #[arg(long = "M", visible_alias = "m")]
        m: u64,
    },
    /// Check irreducibility of f (exit 2 when reducible), or generate
    /// a random irreducible of degree n when only --n is given.
    Irreducible {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        f: Option<String>,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Cayley-graph girth of the generator images mod f.
    Girth {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        f: String,
        /// "nagao" or matrices "a;b;c;d|a;b;c;d".
        #[arg(long, default_value = "nagao")]
        gens: String,
    },
    /// Two-sided spectral radius of the walk operator mod f.
    Spectrum {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        f: String,
        #[arg(long, default_value = "nagao")]
        gens: String,
    },
    /// Exact census of SL2 over the residue field of f.
    Census {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        f: String,
    },
    /// Escape-probability row: direct estimate plus quotient bound.
    Walk {
        #[arg(long)]
        p: u64,
        /// Quotient modulus for the bound side.
        #[arg(long)]
        f: String,
        #[arg(long, default_value = "nagao")]
        gens: String,
        #[arg(long)]
        pred: String,
        #[arg(long)]
        l: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
    },
    /// Small-sieve experiment from a TOML config.
    SmallSieve {
        #[arg(long)]
        config: PathBuf,
    },
    /// Big-sieve experiment from a TOML config.
    BigSieve {
        #[arg(long)]
        config: PathBuf,
    },
    /// Expander survey from a TOML config.
    Survey {
        #[arg(long)]
        config: PathBuf,
    },
    /// Search the generator ball for a relation-free pair.
    FreePair {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value = "nagao")]
        gens: String,
        #[arg(long, default_value_t = 2)]
        radius: usize,
        #[arg(long, default_value_t = 12)]
        depth: usize,
    },
}

enum CliError {
    /// Bad arguments or malformed input: exit 1.
    Usage(String),
    /// A mathematical check failed or a budget was exceeded: exit 2.
    Failed(String),
}

pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            // help/version are successful exits
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(CliError::Failed(msg)) => {
            eprintln!("check failed: {msg}");
            2
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.cmd {
        Cmd::Factor { p, f } => {
            let poly = parse_poly(f, *p)?;
            let fac = factor(&poly).map_err(|e| CliError::Usage(e.to_string()))?;
            let factors: Vec<Value> = fac
                .factors
                .iter()
                .map(|(g, m)| json!({"f": coeff_string(g), "multiplicity": m}))
                .collect();
            emit(
                cli,
                json!({
                    "schema": 1,
                    "p": p,
                    "f": coeff_string(&poly),
                    "unit": fac.unit,
                    "squarefree": fac.is_squarefree(),
                    "factors": factors,
                }),
            )
        }
        Cmd::Admissible { n, m } => {
            let ok = is_admissible(*n, *m).map_err(|e| CliError::Usage(e.to_string()))?;
            emit(cli, json!({"schema": 1, "n": n, "M": m, "admissible": ok}))?;
            if ok {
                Ok(())
            } else {
                Err(CliError::Failed(format!("{n} is not {m}-admissible")))
            }
        }
        Cmd::Irreducible { p, f, n } => match (f, n) {
            (Some(f), _) => {
                let poly = parse_poly(f, *p)?;
                let ok = poly
                    .is_irreducible()
                    .map_err(|e| CliError::Usage(e.to_string()))?;
                emit(
                    cli,
                    json!({"schema": 1, "p": p, "f": coeff_string(&poly), "irreducible": ok}),
                )?;
                if ok {
                    Ok(())
                } else {
                    Err(CliError::Failed(format!("{f:?} is reducible over F_{p}")))
                }
            }
            (None, Some(n)) => {
                let poly = random_irreducible(*p, *n, cli.seed)
                    .map_err(|e| CliError::Usage(e.to_string()))?;
                emit(
                    cli,
                    json!({"schema": 1, "p": p, "n": n, "f": coeff_string(&poly), "seed": cli.seed}),
                )
            }
            (None, None) => Err(CliError::Usage(
                "irreducible needs --f (check) or --n (generate)".into(),
            )),
        },
        Cmd::Girth { p, f, gens } => {
            let ring = parse_ring(f, *p)?;
            let s = parse_generators(gens, *p).map_err(|e| CliError::Usage(e.to_string()))?;
            let budget = cli.budget.unwrap_or(1_000_000) as usize;
            let g = girth(&ring, &s, budget).map_err(|e| CliError::Usage(e.to_string()))?;
            let (kind, value) = match &g {
                GirthResult::Finite(v) => ("finite", json!(v)),
                GirthResult::AtLeast(v) => ("at-least", json!(v)),
                GirthResult::Degenerate(msg) => ("degenerate", json!(msg)),
            };
            emit(
                cli,
                json!({"schema": 1, "modulus": ring.descriptor(), "girth_kind": kind, "girth": value}),
            )
        }
        Cmd::Spectrum { p, f, gens } => {
            let ring = parse_ring(f, *p)?;
            let s = parse_generators(gens, *p).map_err(|e| CliError::Usage(e.to_string()))?;
            let group = enumerate(cli, &ring)?;
            let imgs = s
                .reduce_mod(&ring)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let rep = spectral_rho(&group, &imgs, EigMethod::Auto)
                .map_err(|e| CliError::Failed(e.to_string()))?;
            let bip = is_bipartite(&group, &imgs).map_err(|e| CliError::Failed(e.to_string()))?;
            emit(
                cli,
                json!({
                    "schema": 1,
                    "modulus": ring.descriptor(),
                    "order": group.order().to_string(),
                    "rho": rep.rho,
                    "lambda2": rep.lambda2,
                    "lambda_min": rep.lambda_min,
                    "method": format!("{:?}", rep.method).to_lowercase(),
                    "residual": rep.residual,
                    "n": rep.n,
                    "restricted_to_span": rep.restricted_to_span,
                    "bipartite": bip,
                }),
            )
        }
        Cmd::Census { p, f } => {
            let ring = parse_ring(f, *p)?;
            let group = enumerate(cli, &ring)?;
            let c = count_oracles(&group).map_err(|e| CliError::Failed(e.to_string()))?;
            emit(
                cli,
                json!({
                    "schema": 1,
                    "modulus": ring.descriptor(),
                    "group": format!("SL2({})", c.q),
                    "order": c.order.to_string(),
                    "counts": {
                        "squares": c.squares,
                        "non_squares": c.non_squares,
                        "reducible_char_poly": c.reducible_char_poly,
                        "zero_entry": c.zero_entry,
                        "trace_pm2": c.trace_pm2,
                        "max_trace_count": c.max_trace_count(),
                    },
                    "non_square_fraction": c.non_square_fraction(),
                    "reducible_fraction": c.reducible_fraction(),
                }),
            )
        }
        Cmd::Walk {
            p,
            f,
            gens,
            pred,
            l,
            trials,
        } => {
            let ring = parse_ring(f, *p)?;
            let s = parse_generators(gens, *p).map_err(|e| CliError::Usage(e.to_string()))?;
            let predicate: Predicate =
                pred.parse().map_err(|e: crate::walker::WalkError| {
                    CliError::Usage(e.to_string())
                })?;
            let est = escape_probability(&s, &predicate, *l, &[Arc::clone(&ring)], *trials, cli.seed)
                .map_err(|e| CliError::Failed(e.to_string()))?;
            let bounds: Vec<Value> = est
                .quotient_bounds
                .iter()
                .map(|b| {
                    json!({
                        "modulus": b.descriptor,
                        "bound": b.value,
                        "exact": b.exact,
                        "ci_lo": b.ci.map(|c| c.0),
                        "ci_hi": b.ci.map(|c| c.1),
                    })
                })
                .collect();
            emit(
                cli,
                json!({
                    "schema": 1,
                    "experiment": "walk",
                    "predicate": predicate.to_string(),
                    "l": l,
                    "estimate": est.direct.as_ref().map(|d| d.estimate),
                    "ci_lo": est.direct.as_ref().map(|d| d.ci_lo),
                    "ci_hi": est.direct.as_ref().map(|d| d.ci_hi),
                    "trials": trials,
                    "quotient_bounds": bounds,
                    "seed": cli.seed,
                    "rng_id": RNG_ID,
                }),
            )
        }
        Cmd::SmallSieve { config } => {
            let cfg = load_config(cli, config)?;
            let rep = run_small_sieve(&cfg).map_err(sieve_error)?;
            emit_report(cli, &rep)
        }
        Cmd::BigSieve { config } => {
            let cfg = load_config(cli, config)?;
            let rep = run_big_sieve(&cfg).map_err(sieve_error)?;
            emit_report(cli, &rep)
        }
        Cmd::Survey { config } => {
            let cfg = load_config(cli, config)?;
            let rep = run_expander_survey(&cfg).map_err(sieve_error)?;
            emit_report(cli, &rep)
        }
        Cmd::FreePair {
            p,
            gens,
            radius,
            depth,
        } => {
            let s = parse_generators(gens, *p).map_err(|e| CliError::Usage(e.to_string()))?;
            let cert = free_pair_search(&s, *radius, *depth);
            let certified = cert.status == CertStatus::CertifiedToDepth;
            emit(
                cli,
                json!({
                    "schema": 1,
                    "status": if certified { "certified-to-depth" } else { "refuted" },
                    "x": mat_string(&cert.x),
                    "y": mat_string(&cert.y),
                    "search_radius": cert.search_radius,
                    "certified_depth": cert.certified_depth,
                    "degree_bound": cert.degree_bound,
                }),
            )?;
            if certified {
                Ok(())
            } else {
                Err(CliError::Failed(format!(
                    "no relation-free pair to depth {depth} in the radius-{radius} ball"
                )))
            }
        }
    }
}

fn sieve_error(e: SieveError) -> CliError {
    match e {
        SieveError::Config(_) | SieveError::Poly(_) => CliError::Usage(e.to_string()),
        _ => CliError::Failed(e.to_string()),
    }
}

fn parse_poly(f: &str, p: u64) -> Result<PolyFp, CliError> {
    parse_coeff_list(f, p).map_err(|e| CliError::Usage(e.to_string()))
}

fn parse_ring(f: &str, p: u64) -> Result<Arc<ResidueRing>, CliError> {
    let poly = parse_poly(f, p)?;
    ResidueRing::new(poly).map_err(|e| CliError::Usage(e.to_string()))
}

fn enumerate(cli: &Cli, ring: &Arc<ResidueRing>) -> Result<QuotientGroup, CliError> {
    let budget = cli.budget.map(u128::from).unwrap_or(10_000_000);
    QuotientGroup::enumerate_with_budget(ring, budget).map_err(|e| CliError::Failed(e.to_string()))
}

fn coeff_string(f: &PolyFp) -> String {
    f.coeffs()
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn mat_string(m: &crate::sl2::Mat2<PolyFp>) -> String {
    format!(
        "{};{};{};{}",
        coeff_string(&m.a),
        coeff_string(&m.b),
        coeff_string(&m.c),
        coeff_string(&m.d)
    )
}

fn load_config(cli: &Cli, path: &PathBuf) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let mut cfg = ExperimentConfig::from_toml(&text).map_err(|e| CliError::Usage(e.to_string()))?;
    // CLI flags override file values
    if cli.seed != 0 {
        cfg.seed = cli.seed;
    }
    if let Some(b) = cli.budget {
        cfg.budget.enumeration = b;
    }
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(cfg)
}

fn write_out(cli: &Cli, text: &str) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Single-record output: JSON object, or two-line key/value CSV.
fn emit(cli: &Cli, v: Value) -> Result<(), CliError> {
    let text = match cli.format {
        Format::Json => format!("{}\n", serde_json::to_string(&v).expect("serializable")),
        Format::Csv => {
            let obj = v.as_object().expect("object record");
            let keys: Vec<&str> = obj.keys().map(String::as_str).collect();
            let vals: Vec<String> = obj
                .values()
                .map(|x| match x {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                })
                .map(|s| {
                    if s.contains(',') || s.contains('"') {
                        format!("\"{}\"", s.replace('"', "\"\""))
                    } else {
                        s
                    }
                })
                .collect();
            format!("{}\n{}\n", keys.join(","), vals.join(","))
        }
    };
    write_out(cli, &text)
}

fn emit_report(cli: &Cli, rep: &ExperimentReport) -> Result<(), CliError> {
    let text = match cli.format {
        Format::Json => rep.to_json_lines(),
        Format::Csv => rep.to_csv(),
    };
    write_out(cli, &text)
}
