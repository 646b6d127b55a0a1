use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use graphmc::cobar::{cobar_cohomology, slice_cohomology_vs_corollary, CobarError};
use graphmc::fixtures::FixtureSet;
use graphmc::gauge::{gauge_act, mc_check, GaugeError, TruncationPolicy};
use graphmc::graph::{parse_sum, GraphSum, Slice};
use graphmc::ihx::{enumerate_graphs, Bounds, IhxError, IhxQuotient};
use graphmc::operad::{bracket_truncated, star_truncated};
use graphmc::rep::{format_poly, parse_poly, LieData, Representation};
use graphmc::verify::{verify_paper, Status, VerifyConfig, REPORT_SCHEMA};

#[derive(Parser)]
#[command(name = "graphmc", version, about = "Exact computations in the directed graph complex")]
struct Cli {
    /// Slice limits for IHX quotients, as `arity,internal,edges`.
    #[arg(long, global = true, default_value = "6,4,10")]
    bounds: String,
    /// Largest second grading kept.
    #[arg(long, global = true)]
    cap: Option<usize>,
    /// Lie algebra: a preset name or a TOML/JSON file.
    #[arg(long, global = true)]
    lie: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Include wall-clock time in the report.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full verification pipeline.
    VerifyPaper {
        /// Perturb one elementary fixture before running.
        #[arg(long)]
        corrupt_fixture: Option<String>,
        /// Run only these checks.
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
    },
    /// Lie bracket `[x, y]` modulo IHX.
    Bracket { x: String, y: String },
    /// Pre-Lie product `x ⋆ y` modulo IHX.
    Star { x: String, y: String },
    /// `[a1 + a2, x]` modulo IHX.
    Diff { x: String },
    /// Normal form modulo IHX.
    Reduce { x: String },
    /// Maurer-Cartan residuals of `½[α, α]`.
    Mc {
        alpha: String,
        /// Largest grading above the lowest up to which `α` is complete.
        #[arg(long)]
        known_to: Option<usize>,
    },
    /// `exp(ad ξ) α` modulo IHX.
    Gauge { xi: String, alpha: String },
    /// Cobar cohomology, or the graph-side comparison for one slice.
    Cohomology {
        #[arg(long)]
        cobar: bool,
        #[arg(short = 'n', long)]
        n: usize,
        #[arg(short = 'm', long)]
        internal: Option<usize>,
        #[arg(short = 'e', long)]
        edges: Option<usize>,
    },
    /// Nonzero graphs of a slice and the dimension of its IHX quotient.
    Enumerate {
        n: usize,
        m: usize,
        e: usize,
        #[arg(long)]
        list: bool,
    },
    /// Evaluate the polydifferential operator of a graph sum.
    Represent {
        x: String,
        /// Comma-separated polynomial arguments, e.g. `x_1,x_2*p_1`.
        #[arg(long, default_value = "")]
        args: String,
    },
}

enum CliError {
    Usage(String),
    Inconclusive(String),
}

impl From<IhxError> for CliError {
    fn from(e: IhxError) -> Self {
        CliError::Inconclusive(format!("inconclusive: widen bounds ({e})"))
    }
}

impl From<GaugeError> for CliError {
    fn from(e: GaugeError) -> Self {
        match e {
            GaugeError::Ihx(e) => e.into(),
            e => CliError::Usage(e.to_string()),
        }
    }
}

impl From<CobarError> for CliError {
    fn from(e: CobarError) -> Self {
        match e {
            CobarError::Ihx(e) => e.into(),
            e => CliError::Usage(e.to_string()),
        }
    }
}

struct Outcome {
    text: String,
    result: Value,
    status: Status,
}

impl Outcome {
    fn pass(text: String, result: Value) -> Self {
        Self { text, result, status: Status::Pass }
    }
}

struct Env {
    fixtures: FixtureSet,
    bounds: Bounds,
    cap: Option<usize>,
    lie: Option<String>,
}

fn parse_bounds(s: &str) -> Result<Bounds, CliError> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("bad --bounds {s:?}, expected arity,internal,edges")))?;
    match parts[..] {
        [a, m, e] => Ok(Bounds { max_arity: a, max_internal: m, max_edges: e }),
        _ => Err(CliError::Usage(format!("bad --bounds {s:?}, expected arity,internal,edges"))),
    }
}

fn load_fixtures() -> Result<FixtureSet, CliError> {
    match std::env::var_os("GRAPHMC_FIXTURES") {
        Some(dir) => FixtureSet::with_overrides(Path::new(&dir)).map_err(|e| CliError::Usage(e.to_string())),
        None => Ok(FixtureSet::embedded()),
    }
}

/// A file path, a fixture name, or inline text.
fn load_sum(env: &Env, spec: &str) -> Result<GraphSum, CliError> {
    let path = PathBuf::from(spec);
    if path.is_file() {
        let text = std::fs::read_to_string(&path).map_err(|e| CliError::Usage(format!("{spec}: {e}")))?;
        return parse_sum(&text).map_err(|e| CliError::Usage(format!("{spec}: {e}")));
    }
    if let Ok(x) = env.fixtures.get(spec) {
        return Ok(x.clone());
    }
    parse_sum(spec).map_err(|e| CliError::Usage(format!("{spec:?} is neither a file, a fixture name nor a graph sum: {e}")))
}

fn load_lie(spec: Option<&str>) -> Result<LieData, CliError> {
    let spec = spec.unwrap_or("so3");
    for candidate in [spec.to_string(), format!("{spec}.toml"), format!("{spec}.json")] {
        let p = Path::new(&candidate);
        if p.is_file() {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Usage(format!("{candidate}: {e}")))?;
            return LieData::from_config(&text).map_err(|e| CliError::Usage(format!("{candidate}: {e}")));
        }
    }
    let name = spec.rsplit('/').next().unwrap_or(spec);
    LieData::preset(name).map_err(|e| CliError::Usage(e.to_string()))
}

fn named(env: &Env, x: &GraphSum, q: &IhxQuotient) -> Result<(String, Value), CliError> {
    let reduced = q.reduce(x)?;
    let name = env.fixtures.name_in_fixtures(x, q)?.map(|p| FixtureSet::format_combination(&p));
    let text = name.clone().unwrap_or_else(|| reduced.to_dsl());
    Ok((text, json!({ "reduced": reduced.to_dsl(), "in_fixtures": name, "raw_terms": x.len() })))
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let env = Env { fixtures: load_fixtures()?, bounds: parse_bounds(&cli.bounds)?, cap: cli.cap, lie: cli.lie.clone() };
    let q = IhxQuotient::new(env.bounds);
    match &cli.command {
        Command::VerifyPaper { corrupt_fixture, only } => {
            let mut fixtures = env.fixtures.clone();
            if let Some(name) = corrupt_fixture {
                fixtures.corrupt(name).map_err(|e| CliError::Usage(e.to_string()))?;
            }
            let mut cfg = VerifyConfig { bounds: env.bounds, ..VerifyConfig::default() };
            if let Some(c) = env.cap {
                cfg.cap = c;
            }
            if env.lie.is_some() {
                cfg.lie = load_lie(env.lie.as_deref())?;
            }
            if let Some(bad) = only.iter().find(|&&i| !(1..=10).contains(&i)) {
                return Err(CliError::Usage(format!("no check {bad}")));
            }
            let report = verify_paper(&fixtures, &cfg, only);
            let result = serde_json::to_value(&report).unwrap_or(Value::Null);
            Ok(Outcome { text: report.to_text().trim_end().to_string(), result, status: report.status })
        }
        Command::Bracket { x, y } | Command::Star { x, y } => {
            let (a, b) = (load_sum(&env, x)?, load_sum(&env, y)?);
            let raw = match cli.command {
                Command::Bracket { .. } => bracket_truncated(&a, &b, env.cap),
                _ => star_truncated(&a, &b, env.cap),
            };
            let (text, result) = named(&env, &raw, &q)?;
            Ok(Outcome::pass(text, result))
        }
        Command::Diff { x } => {
            let raw = bracket_truncated(env.fixtures.value("alpha_0"), &load_sum(&env, x)?, env.cap);
            let (text, result) = named(&env, &raw, &q)?;
            Ok(Outcome::pass(text, result))
        }
        Command::Reduce { x } => {
            let (text, result) = named(&env, &load_sum(&env, x)?, &q)?;
            Ok(Outcome::pass(text, result))
        }
        Command::Mc { alpha, known_to } => {
            let cap = env.cap.unwrap_or(4);
            let report = mc_check(&load_sum(&env, alpha)?, *known_to, &q, TruncationPolicy::new(cap))?;
            let mut text = String::new();
            for r in &report.residuals {
                let state = if !r.determined { "undetermined" } else if r.reduced.is_zero() { "zero" } else { "NONZERO" };
                text.push_str(&format!("grading {}: {state} ({} raw terms)", r.grading, r.raw_terms));
                if r.determined && !r.reduced.is_zero() {
                    text.push_str(&format!("\n  {}", r.reduced.to_dsl()));
                }
                text.push('\n');
            }
            let status = if report.passes() { Status::Pass } else { Status::Fail };
            Ok(Outcome { text: text.trim_end().to_string(), result: serde_json::to_value(&report).unwrap_or(Value::Null), status })
        }
        Command::Gauge { xi, alpha } => {
            let cap = env.cap.unwrap_or(3);
            let r = gauge_act(&load_sum(&env, xi)?, &load_sum(&env, alpha)?, &q, TruncationPolicy::new(cap))?;
            let (text, mut result) = named(&env, &r.reduced, &q)?;
            result["cap"] = json!(cap);
            Ok(Outcome::pass(text, result))
        }
        Command::Cohomology { cobar, n, internal, edges } => {
            if *n == 0 {
                return Err(CliError::Usage("-n must be positive".into()));
            }
            if *cobar {
                let h = cobar_cohomology(*n);
                let dims: Vec<String> = h.cohomology.iter().map(usize::to_string).collect();
                let text = format!("({})", dims.join(","));
                return Ok(Outcome::pass(text, serde_json::to_value(&h).unwrap_or(Value::Null)));
            }
            let (Some(m), Some(e)) = (internal, edges) else {
                return Err(CliError::Usage("give --cobar, or both -m and -e for a graph slice".into()));
            };
            let c = slice_cohomology_vs_corollary(*n, *m, *e, &q)?;
            let dims: Vec<String> = c.graph_cohomology.iter().map(usize::to_string).collect();
            let text = format!("({}); antisymmetric cores: {}; agrees: {}", dims.join(","), c.antisymmetric_cores, c.agrees);
            let status = if c.agrees { Status::Pass } else { Status::Fail };
            Ok(Outcome { text, result: serde_json::to_value(&c).unwrap_or(Value::Null), status })
        }
        Command::Enumerate { n, m, e, list } => {
            let s = Slice::new(*n, *m, *e);
            let graphs = enumerate_graphs(*n, *m, *e);
            let space = q.slice(s)?;
            let mut text = format!(
                "{s}: {} graphs, {} relations of rank {}, quotient dimension {}",
                graphs.len(),
                space.relations.len(),
                space.rank(),
                space.dim_quotient()
            );
            if *list {
                for g in &graphs {
                    text.push_str(&format!("\n{}", g.graph()));
                }
            }
            let result = json!({
                "slice": [n, m, e],
                "graphs": graphs.iter().map(|g| g.graph().to_string()).collect::<Vec<_>>(),
                "relations": space.relations.len(),
                "rank": space.rank(),
                "quotient_dimension": space.dim_quotient(),
            });
            Ok(Outcome::pass(text, result))
        }
        Command::Represent { x, args } => {
            let lie = load_lie(env.lie.as_deref())?;
            let rep = Representation::new(lie);
            let sum = load_sum(&env, x)?;
            let polys = if args.trim().is_empty() {
                Vec::new()
            } else {
                args.split(',').map(|a| parse_poly(a.trim(), rep.dim())).collect::<Result<Vec<_>, _>>().map_err(|e| CliError::Usage(e.to_string()))?
            };
            if !sum.keys().any(|g| g.n_external() == polys.len()) {
                return Err(CliError::Usage(format!("no term of arity {} in {x}", polys.len())));
            }
            let value = format_poly(&rep.eval_sum(&sum, &polys));
            Ok(Outcome::pass(value.clone(), json!({ "value": value, "lie": rep.lie().name(), "order": rep.order() })))
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::VerifyPaper { .. } => "verify-paper",
        Command::Bracket { .. } => "bracket",
        Command::Star { .. } => "star",
        Command::Diff { .. } => "diff",
        Command::Reduce { .. } => "reduce",
        Command::Mc { .. } => "mc",
        Command::Gauge { .. } => "gauge",
        Command::Cohomology { .. } => "cohomology",
        Command::Enumerate { .. } => "enumerate",
        Command::Represent { .. } => "represent",
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let start = Instant::now();
    let (status, text, result, error) = match run(&cli) {
        Ok(o) => (o.status, o.text, o.result, None),
        Err(CliError::Inconclusive(m)) => (Status::Inconclusive, m.clone(), Value::Null, Some(m)),
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            return ExitCode::from(3);
        }
    };
    match cli.format {
        Format::Text => emit(&text),
        Format::Json => {
            let mut report = json!({
                "schema": REPORT_SCHEMA,
                "command": command_name(&cli.command),
                "inputs": std::env::args().skip(1).collect::<Vec<_>>(),
                "bounds": cli.bounds,
                "cap": cli.cap,
                "result": result,
                "status": status,
            });
            if let Some(m) = error {
                report["error"] = json!(m);
            }
            if cli.timing {
                report["timing_ms"] = json!(start.elapsed().as_millis() as u64);
            }
            emit(&serde_json::to_string_pretty(&report).expect("serializable"));
        }
    }
    if cli.timing && matches!(cli.format, Format::Text) {
        eprintln!("elapsed: {:.3}s", start.elapsed().as_secs_f64());
    }
    ExitCode::from(status.exit_code() as u8)
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}
