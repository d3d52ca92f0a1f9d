use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use picodim::asymptotics::{
    conjecture_report, regev_beckner_table, AsymptoticParams, ConjectureOptions, DEFAULT_PRECISION,
};
use picodim::codim::{codim_sequence, codimension_exact_oracle, write_csv, CodimOptions, CodimRecord, ORACLE_BUDGET};
use picodim::kemer::{exp_gz, kemer_report, KemerOptions, DEFAULT_BUDGET, DEFAULT_NU};
use picodim::paths::{
    enumerate_path_structures, enumerate_symbols, path_count_bound, upper_bound_table, write_bound_csv, MatrixCodims,
};
use picodim::scalar::parse_decimal;
use picodim::{Error, StructureAlgebra};

const WORKERS_ENV: &str = "PICODIM_WORKERS";

#[derive(Parser)]
#[command(
    name = "picodim",
    version,
    about = "Codimensions, Kemer invariants and growth diagnostics of finite-dimensional algebras"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Builder spec: mat:d, ut:d1,d2,.., assoc:blocks;r;u, prod:A*B, F
    #[arg(long, conflicts_with = "file")]
    builder: Option<String>,
    /// Algebra file (JSON structure constants)
    #[arg(long)]
    file: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: $PICODIM_WORKERS, else all cores)
    #[arg(long)]
    workers: Option<usize>,
    /// Output path (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Record wall-clock times instead of zeros
    #[arg(long)]
    timings: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Build or inspect an algebra
    Algebra {
        #[command(subcommand)]
        action: AlgebraAction,
    },
    /// Codimensions c_1..c_N
    Codim {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: usize,
        /// Explicit primes, comma separated
        #[arg(long, value_delimiter = ',')]
        primes: Option<Vec<u64>>,
        /// Use the exact rational oracle instead of modular ranks
        #[arg(long)]
        oracle: bool,
    },
    /// Radical, Wedderburn data, Par and exponent
    Invariants {
        #[command(flatten)]
        common: Common,
    },
    /// Witnessed Kemer-index lower bounds
    Kemer {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = DEFAULT_NU)]
        nu: usize,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Extra variables for the exhaustive refutation mode
        #[arg(long)]
        exhaustive: Option<usize>,
    },
    /// Codimensions, fit and prediction in one report
    Conjecture {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_NU)]
        nu: usize,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Symbols, path structures and the upper-bound series of an associated algebra
    Paths {
        #[command(flatten)]
        common: Common,
        /// Largest number of radical words (default: u)
        #[arg(long)]
        s: Option<usize>,
        /// Degrees of the upper-bound series
        #[arg(long, default_value_t = 6)]
        n: usize,
    },
    /// Regev-Beckner sum against its asymptotic form
    Rb {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        k: Vec<String>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        r: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        n: Vec<usize>,
        #[arg(long, default_value_t = DEFAULT_PRECISION)]
        precision: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Subcommand)]
enum AlgebraAction {
    /// Write the structure constants of a builder spec
    Build {
        #[command(flatten)]
        common: Common,
    },
    /// Summarise an algebra
    Inspect {
        #[command(flatten)]
        common: Common,
    },
}

enum Failure {
    Contract(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_contract_error() {
            Failure::Contract(e.to_string())
        } else {
            Failure::Internal(e.to_string())
        }
    }
}

type Run<T> = std::result::Result<T, Failure>;

fn load(common: &Common) -> Run<StructureAlgebra> {
    match (&common.builder, &common.file) {
        (Some(spec), None) => Ok(StructureAlgebra::from_builder_spec(spec)?),
        (None, Some(path)) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Contract(format!("cannot read {}: {e}", path.display())))?;
            Ok(StructureAlgebra::from_json(&text)?)
        }
        _ => Err(Failure::Contract("exactly one of --builder or --file is required".into())),
    }
}

fn source(common: &Common) -> Value {
    match (&common.builder, &common.file) {
        (Some(b), _) => json!({ "builder": b }),
        (_, Some(f)) => json!({ "file": f.display().to_string() }),
        _ => Value::Null,
    }
}

fn setup_workers(requested: Option<usize>) -> Run<()> {
    let n = requested.or_else(|| std::env::var(WORKERS_ENV).ok().and_then(|v| v.parse().ok()));
    if let Some(n) = n {
        if n == 0 {
            return Err(Failure::Contract("--workers must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Internal(format!("thread pool: {e}")))?;
    }
    Ok(())
}

/// JSON artifact: tool version and config echo around the result. The
/// worker count is left out so that outputs do not depend on it.
fn envelope(command: &str, config: Value, result: impl Serialize) -> Run<String> {
    let v = json!({
        "tool": "picodim",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": config,
        "result": result,
    });
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| Failure::Internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// CSV artifact: `#`-prefixed header lines with the same echo.
fn csv_header(command: &str, config: &Value) -> String {
    format!("# picodim {} {command}\n# config {}\n", env!("CARGO_PKG_VERSION"), config)
}

fn emit(out: &Option<PathBuf>, text: &[u8]) -> Run<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Internal(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text).and_then(|_| stdout.flush()).map_err(|e| Failure::Internal(e.to_string()))
        }
    }
}

fn clear_timings(records: &mut [CodimRecord], keep: bool) {
    if !keep {
        for r in records {
            r.seconds = 0.0;
        }
    }
}

fn run(cli: Cli) -> Run<()> {
    match cli.command {
        Command::Algebra { action } => match action {
            AlgebraAction::Build { common } => {
                setup_workers(common.workers)?;
                let a = load(&common)?;
                let mut file = serde_json::to_value(picodim::algebra::AlgebraFile::from(&a))
                    .map_err(|e| Failure::Internal(e.to_string()))?;
                file["generator"] = json!({
                    "tool": "picodim",
                    "version": env!("CARGO_PKG_VERSION"),
                    "config": source(&common),
                });
                let mut s = serde_json::to_string(&file).map_err(|e| Failure::Internal(e.to_string()))?;
                s.push('\n');
                emit(&common.out, s.as_bytes())
            }
            AlgebraAction::Inspect { common } => {
                setup_workers(common.workers)?;
                let a = load(&common)?;
                let triples = a.structure_triples().count();
                let result = json!({
                    "name": a.name(),
                    "dim": a.dim(),
                    "basis": a.basis_labels(),
                    "unital": a.unit().is_some(),
                    "nonzero_structure_constants": triples,
                    "associative": a.check_associativity().is_ok(),
                    "associated": a.associated_info().map(|i| json!({
                        "block_dims": i.block_dims, "r": i.r, "u": i.u, "radical_words": i.radical_words().len()
                    })),
                });
                emit(&common.out, envelope("algebra inspect", source(&common), result)?.as_bytes())
            }
        },
        Command::Codim { common, n, primes, oracle } => {
            setup_workers(common.workers)?;
            let a = load(&common)?;
            let opts = CodimOptions { seed: common.seed, primes: primes.clone(), ..Default::default() };
            let config = json!({
                "source": source(&common), "n": n, "seed": common.seed, "primes": primes,
                "oracle": oracle, "timings": common.timings,
            });
            let (mut records, monotonicity) = if oracle {
                let recs = (1..=n)
                    .map(|m| codimension_exact_oracle(&a, m, ORACLE_BUDGET))
                    .collect::<picodim::Result<Vec<_>>>()?;
                let mono = picodim::codim::monotonicity(&recs);
                (recs, mono)
            } else {
                let seq = codim_sequence(&a, n, &opts)?;
                (seq.records, seq.monotonicity)
            };
            clear_timings(&mut records, common.timings);
            match common.format {
                Format::Json => {
                    let result = json!({ "algebra": a.name(), "records": records, "monotonicity": monotonicity });
                    emit(&common.out, envelope("codim", config, result)?.as_bytes())
                }
                Format::Csv => {
                    let mut buf = csv_header("codim", &config).into_bytes();
                    write_csv(&records, common.timings, &mut buf)?;
                    emit(&common.out, &buf)
                }
            }
        }
        Command::Invariants { common } => {
            setup_workers(common.workers)?;
            let a = load(&common)?;
            let data = a.wedderburn_data_seeded(
                common.seed ^ picodim::algebra::DEFAULT_SPLIT_SEED,
                picodim::algebra::DEFAULT_SPLIT_ATTEMPTS,
            )?;
            let result = json!({
                "algebra": a.name(),
                "dim": a.dim(),
                "radical_dim": data.radical.dimension(),
                "wedderburn": data,
                "par": data.par(),
                "exp": exp_gz(&a)?,
            });
            let config = json!({ "source": source(&common), "seed": common.seed });
            emit(&common.out, envelope("invariants", config, result)?.as_bytes())
        }
        Command::Kemer { common, nu, budget, exhaustive } => {
            setup_workers(common.workers)?;
            let a = load(&common)?;
            let opts = KemerOptions { nu, budget, seed: common.seed, ..Default::default() };
            let report = kemer_report(&a, &opts, exhaustive)?;
            let config = json!({
                "source": source(&common), "nu": nu, "budget": budget, "seed": common.seed, "exhaustive": exhaustive,
            });
            emit(&common.out, envelope("kemer", config, report)?.as_bytes())
        }
        Command::Conjecture { common, n, nu, budget } => {
            setup_workers(common.workers)?;
            let a = load(&common)?;
            let opts = ConjectureOptions {
                codim: CodimOptions { seed: common.seed, ..Default::default() },
                kemer: KemerOptions { nu, budget, seed: common.seed, ..Default::default() },
                window: None,
            };
            let mut report = conjecture_report(&a, n, &opts)?;
            if !common.timings {
                report.clear_timings();
            }
            let config = json!({
                "source": source(&common), "n": n, "nu": nu, "budget": budget, "seed": common.seed,
                "timings": common.timings,
            });
            match common.format {
                Format::Json => emit(&common.out, envelope("conjecture", config, report)?.as_bytes()),
                Format::Csv => {
                    let mut buf = csv_header("conjecture", &config).into_bytes();
                    report.write_csv(&mut buf)?;
                    emit(&common.out, &buf)
                }
            }
        }
        Command::Paths { common, s, n } => {
            setup_workers(common.workers)?;
            let a = load(&common)?;
            let info = a.associated_info().ok_or(Error::NotAssociated)?;
            let s = s.unwrap_or(info.u);
            let syms = enumerate_symbols(&a)?;
            let structures = enumerate_path_structures(&a, s)?;
            let codims =
                MatrixCodims::compute(&info.block_dims, n, &CodimOptions { seed: common.seed, ..Default::default() })?;
            let table = upper_bound_table(&a, n, &codims)?;
            let config = json!({ "source": source(&common), "s": s, "n": n, "seed": common.seed });
            match common.format {
                Format::Json => {
                    let listing: Vec<Value> = structures
                        .iter()
                        .map(|p| {
                            json!({
                                "structure": p.render(&syms),
                                "boundary_radical": p.boundary_radical,
                                "adjacent_radicals": p.adjacent_radicals,
                            })
                        })
                        .collect();
                    let result = json!({
                        "symbols": syms.labels,
                        "symbol_count": syms.symbols.len(),
                        "radical_words": syms.words.len(),
                        "structure_count": structures.len(),
                        "standard_structure_count": structures.iter().filter(|p| p.is_standard()).count(),
                        "path_count_bound": path_count_bound(syms.symbols.len(), s).to_string(),
                        "structures": listing,
                        "upper_bound_series": table,
                        "series_constant": 1,
                    });
                    emit(&common.out, envelope("paths", config, result)?.as_bytes())
                }
                Format::Csv => {
                    let mut buf = csv_header("paths", &config).into_bytes();
                    write_bound_csv(&table, &mut buf)?;
                    emit(&common.out, &buf)
                }
            }
        }
        Command::Rb { k, r, n, precision, out, format } => {
            let parse = |v: &[String]| v.iter().map(|s| parse_decimal(s)).collect::<picodim::Result<Vec<_>>>();
            let params = AsymptoticParams::new(parse(&k)?, parse(&r)?)?;
            if n.is_empty() {
                return Err(Failure::Contract("--n needs at least one degree".into()));
            }
            let rows = regev_beckner_table(&params, &n, precision)?;
            let config = json!({ "k": k, "r": r, "n": n, "precision": precision });
            match format {
                Format::Json => emit(&out, envelope("rb", config, rows)?.as_bytes()),
                Format::Csv => {
                    let mut buf = csv_header("rb", &config);
                    buf.push_str("n,lhs,rhs,ratio\n");
                    for row in rows {
                        buf.push_str(&format!("{},{},{},{}\n", row.n, row.lhs, row.rhs, row.ratio));
                    }
                    emit(&out, buf.as_bytes())
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Contract(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(1)
        }
    }
}
