//! `locality-lab` command-line front end.
//!
//! Exit codes: 0 success, 1 checked and negative, 2 usage or format error,
//! 3 resource guard refusal.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use locality_lab::format::{parse_cf_with_limits, parse_permutation, write_cf};
use locality_lab::limits::DEFAULT_MAX_VIOLATIONS;
use locality_lab::numerics::{log_star_rational, parse_rational, power_tower, round_lower_bound};
use locality_lab::search::{min_colours_with_limits, SearchOutcome};
use locality_lab::simulator::{
    extract_with_limits, parse_rule, run_on_cycle, CycleInstance, RadiusAlgorithm, RULE_MAGIC,
};
use locality_lab::speedup::{iterate_speedup_with_limits, speedup_with_limits};
use locality_lab::{ColouringFunction, Error, ErrorKind, Limits, RunOutcome};
use num_bigint::BigUint;
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "locality-lab",
    version,
    about = "Colouring functions and round lower bounds for directed cycles"
)]
struct Cli {
    /// Worker threads (0 = one per core). Never changes output.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Report format on standard output.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Check the shift constraint of a cf-v1 table.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        /// Violations to list before truncating the report.
        #[arg(long, default_value_t = DEFAULT_MAX_VIOLATIONS)]
        max_violations: usize,
    },
    /// Apply one speedup step: k-ary c colours to (k-1)-ary 2^c colours.
    Speedup {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Relabel the used colours to 1..m, keeping their order.
        #[arg(long)]
        normalize: bool,
    },
    /// Iterate speedup down to arity 1 and write the trace as JSON.
    Trace {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Find the least colour count of a valid k-ary table over {1..n}.
    Search {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: usize,
        /// Largest colour count to try (default n).
        #[arg(long)]
        cmax: Option<u32>,
        #[arg(long)]
        witness: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
        /// Include wall time in the JSON report.
        #[arg(long)]
        timing: bool,
    },
    /// Round lower bound log*(n)/2 - 1 for 3-colouring an n-cycle.
    Bound {
        #[arg(long)]
        n: BigUint,
    },
    /// The power tower ^i 2.
    Tower {
        #[arg(long)]
        i: u32,
    },
    /// log* of a non-negative rational (`p`, `p/q` or a decimal).
    Logstar {
        #[arg(long)]
        x: String,
    },
    /// Run a radius-T algorithm on a cycle.
    Simulate {
        /// Permutation file, `random:<seed>`, or `random` (uses --seed).
        #[arg(long)]
        perm: String,
        /// Cycle length for random permutations.
        #[arg(long)]
        n: Option<u32>,
        /// cf-v1 table (applied to sorted windows), rule-v1 table,
        /// `builtin:bucket`, or `builtin:reduction`.
        #[arg(long)]
        alg: String,
        #[arg(long = "T")]
        radius: Option<usize>,
    },
    /// Tabulate an algorithm on increasing windows as a colouring function.
    Extract {
        #[arg(long)]
        alg: String,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        out: PathBuf,
        #[arg(long = "T")]
        radius: Option<usize>,
    },
}

enum Failure {
    Core(Error),
    Io(PathBuf, std::io::Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(e) => match e.kind() {
                ErrorKind::Input => 2,
                ErrorKind::Rejected => 1,
                ErrorKind::Guard => 3,
            },
            Failure::Io(..) | Failure::Usage(_) => 2,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Io(p, e) => write!(f, "{}: {e}", p.display()),
            Failure::Usage(m) => write!(f, "{m}"),
        }
    }
}

type CmdResult = Result<bool, Failure>;

struct Ctx {
    limits: Limits,
    seed: u64,
    format: Option<Format>,
}

impl Ctx {
    fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    /// Prints `report` as JSON, or `text` in text mode.
    fn emit<T: Serialize>(&self, default: Format, report: &T, text: impl FnOnce() -> String) {
        match self.format_or(default) {
            Format::Json => println!("{}", to_json(report)),
            Format::Text => print!("{}", text()),
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize")
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(path.to_owned(), e))
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| Failure::Io(path.to_owned(), e))
}

fn load_cf(path: &Path, limits: &Limits) -> Result<ColouringFunction, Failure> {
    Ok(parse_cf_with_limits(&read(path)?, limits)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let limits = match Limits::from_env() {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let ctx = Ctx {
        limits,
        seed: cli.seed,
        format: cli.format,
    };
    match run(&ctx, cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}

fn run(ctx: &Ctx, command: Command) -> CmdResult {
    match command {
        Command::Verify {
            input,
            max_violations,
        } => verify(ctx, &input, max_violations),
        Command::Speedup {
            input,
            out,
            normalize,
        } => speedup(ctx, &input, &out, normalize),
        Command::Trace { input, out } => trace(ctx, &input, out.as_deref()),
        Command::Search {
            n,
            k,
            cmax,
            witness,
            json,
            timing,
        } => search(ctx, n, k, cmax, witness.as_deref(), json.as_deref(), timing),
        Command::Bound { n } => bound(ctx, &n),
        Command::Tower { i } => tower(ctx, i),
        Command::Logstar { x } => logstar(ctx, &x),
        Command::Simulate {
            perm,
            n,
            alg,
            radius,
        } => simulate(ctx, &perm, n, &alg, radius),
        Command::Extract {
            alg,
            n,
            out,
            radius,
        } => extract(ctx, &alg, n, &out, radius),
    }
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    n: u32,
    k: usize,
    c: u32,
    #[serde(flatten)]
    report: &'a locality_lab::ValidityReport,
}

fn verify(ctx: &Ctx, input: &Path, max_violations: usize) -> CmdResult {
    let f = load_cf(input, &ctx.limits)?;
    let report = f.verify_with_cap(max_violations);
    let out = VerifyReport {
        n: f.n(),
        k: f.arity(),
        c: f.colour_count(),
        report: &report,
    };
    ctx.emit(Format::Text, &out, || {
        if report.is_valid {
            return "valid\n".to_owned();
        }
        let mut s = String::new();
        let _ = write!(s, "invalid: {} violations", report.total_violations);
        if !report.violation_count_exact {
            let _ = write!(s, " (first {} listed)", report.violations.len());
        }
        s.push('\n');
        for v in &report.violations {
            let k = f.arity();
            let colour = f.get(&v[..k]).expect("listed tuples are in range");
            let _ = writeln!(s, "  f{:?} = f{:?} = {colour}", &v[..k], &v[1..]);
        }
        s
    });
    Ok(report.is_valid)
}

#[derive(Serialize)]
struct SpeedupReport {
    n: u32,
    input_arity: usize,
    input_colours: u32,
    output_arity: usize,
    output_colours: u32,
    output_valid: bool,
}

fn speedup(ctx: &Ctx, input: &Path, out: &Path, normalize: bool) -> CmdResult {
    let a = load_cf(input, &ctx.limits)?;
    let mut b = speedup_with_limits(&a, &ctx.limits)?;
    if normalize {
        b = b.normalize();
    }
    write(out, &write_cf(&b))?;
    let report = SpeedupReport {
        n: a.n(),
        input_arity: a.arity(),
        input_colours: a.colour_count(),
        output_arity: b.arity(),
        output_colours: b.colour_count(),
        output_valid: b.verify().is_valid,
    };
    ctx.emit(Format::Text, &report, || {
        format!(
            "{}-ary {}-colouring -> {}-ary {}-colouring ({}), written to {}\n",
            report.input_arity,
            report.input_colours,
            report.output_arity,
            report.output_colours,
            if report.output_valid {
                "valid"
            } else {
                "invalid"
            },
            out.display()
        )
    });
    Ok(true)
}

fn trace(ctx: &Ctx, input: &Path, out: Option<&Path>) -> CmdResult {
    let a = load_cf(input, &ctx.limits)?;
    let t = iterate_speedup_with_limits(&a, &ctx.limits)?;
    let json = to_json(&t);
    match out {
        Some(path) => {
            write(path, &(json.clone() + "\n"))?;
            ctx.emit(Format::Text, &t, || {
                let mut s = String::new();
                for step in &t.steps {
                    let _ = writeln!(
                        s,
                        "arity {:>2}: {} colours (needs >= {})",
                        step.arity, step.colour_count, step.required_colour_count
                    );
                }
                let _ = writeln!(s, "{}", t.conclusion.log_star_inequality.statement);
                let _ = writeln!(s, "trace written to {}", path.display());
                s
            });
        }
        None => println!("{json}"),
    }
    Ok(t.conclusion.exact_bound_holds)
}

#[derive(Serialize)]
struct SearchReport {
    n: u32,
    k: usize,
    c_max: u32,
    feasible: bool,
    min_colours: Option<u32>,
    derived_lower_bound: u64,
    nodes_explored: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_time_ms: Option<f64>,
}

fn search(
    ctx: &Ctx,
    n: u32,
    k: usize,
    cmax: Option<u32>,
    witness: Option<&Path>,
    json: Option<&Path>,
    timing: bool,
) -> CmdResult {
    let c_max = cmax.unwrap_or(n.max(1));
    let start = Instant::now();
    let outcome = min_colours_with_limits(n, k, c_max, &ctx.limits)?;
    let elapsed = start.elapsed().as_secs_f64() * 1000.0;
    let mut report = SearchReport {
        n,
        k,
        c_max,
        feasible: false,
        min_colours: None,
        derived_lower_bound: 0,
        nodes_explored: outcome.nodes_explored(),
        wall_time_ms: timing.then_some(elapsed),
    };
    match &outcome {
        SearchOutcome::Found(r) => {
            report.feasible = true;
            report.min_colours = Some(r.min_colours);
            report.derived_lower_bound = r.derived_lower_bound;
            if let Some(path) = witness {
                write(path, &write_cf(&r.witness))?;
            }
        }
        SearchOutcome::Exhausted(e) => {
            report.derived_lower_bound = e.derived_lower_bound;
            if witness.is_some() {
                eprintln!("no witness written: nothing found within {c_max} colours");
            }
        }
    }
    if let Some(path) = json {
        write(path, &(to_json(&report) + "\n"))?;
    }
    if !timing {
        eprintln!("search took {elapsed:.1} ms");
    }
    ctx.emit(Format::Text, &report, || match report.min_colours {
        Some(c) => format!(
            "min_colours(n={n}, k={k}) = {c} (lower bound {}, {} nodes)\n",
            report.derived_lower_bound, report.nodes_explored
        ),
        None => format!(
            "no valid table for n={n}, k={k} with at most {c_max} colours (lower bound {}, {} nodes)\n",
            report.derived_lower_bound, report.nodes_explored
        ),
    });
    Ok(report.feasible)
}

#[derive(Serialize)]
struct BoundReport {
    n: String,
    #[serde(flatten)]
    bound: locality_lab::numerics::RoundBound,
}

fn bound(ctx: &Ctx, n: &BigUint) -> CmdResult {
    if n == &BigUint::default() {
        return Err(Failure::Usage("--n must be at least 1".into()));
    }
    let b = round_lower_bound(n);
    let text = format!(
        "log*(n) = {}\nlog*(n)/2 - 1 = {}\nrounds >= {}\n",
        b.log_star, b.bound, b.min_rounds
    );
    ctx.emit(
        Format::Text,
        &BoundReport {
            n: n.to_string(),
            bound: b,
        },
        || text,
    );
    Ok(true)
}

#[derive(Serialize)]
struct TowerReport {
    i: u32,
    exact: bool,
    value: locality_lab::TowerValue,
}

fn tower(ctx: &Ctx, i: u32) -> CmdResult {
    let value = power_tower(i);
    let report = TowerReport {
        i,
        exact: value.exact().is_some(),
        value,
    };
    ctx.emit(Format::Text, &report, || format!("{}\n", report.value));
    Ok(true)
}

#[derive(Serialize)]
struct LogStarReport {
    x: String,
    log_star: u32,
}

fn logstar(ctx: &Ctx, x: &str) -> CmdResult {
    let value =
        parse_rational(x).ok_or_else(|| Failure::Usage(format!("not a rational number: {x:?}")))?;
    if value < num_rational::BigRational::default() {
        return Err(Failure::Usage(format!(
            "log* needs a non-negative argument, got {x}"
        )));
    }
    let report = LogStarReport {
        x: value.to_string(),
        log_star: log_star_rational(&value),
    };
    ctx.emit(Format::Text, &report, || format!("{}\n", report.log_star));
    Ok(true)
}

fn load_cycle(ctx: &Ctx, perm: &str, n: Option<u32>) -> Result<CycleInstance, Failure> {
    let seed = match perm.strip_prefix("random") {
        Some("") => Some(ctx.seed),
        Some(rest) => match rest.strip_prefix(':').map(str::parse::<u64>) {
            Some(Ok(s)) => Some(s),
            _ => {
                return Err(Failure::Usage(format!(
                    "expected `random:<seed>`, got {perm:?}"
                )))
            }
        },
        None => None,
    };
    match seed {
        Some(seed) => {
            let n = n.ok_or_else(|| Failure::Usage("random permutations need --n".into()))?;
            Ok(CycleInstance::random(n, seed)?)
        }
        None => {
            let ids = parse_permutation(&read(Path::new(perm))?)?;
            let cycle = CycleInstance::new(ids)?;
            if let Some(n) = n {
                if n as usize != cycle.len() {
                    return Err(Failure::Usage(format!(
                        "--n {n} does not match the {} identifiers in {perm}",
                        cycle.len()
                    )));
                }
            }
            Ok(cycle)
        }
    }
}

/// Resolves `--alg`; `n` is the identifier range the algorithm will see.
fn load_algorithm(
    ctx: &Ctx,
    alg: &str,
    n: u32,
    radius: Option<usize>,
) -> Result<RadiusAlgorithm, Failure> {
    let algorithm = match alg {
        "builtin:bucket" => RadiusAlgorithm::bucket(radius.unwrap_or(0)),
        "builtin:reduction" => RadiusAlgorithm::reduction(n, radius)?,
        other if other.starts_with("builtin:") => {
            return Err(Failure::Usage(format!(
                "unknown builtin algorithm {other:?}"
            )))
        }
        path => {
            let text = read(Path::new(path))?;
            let algorithm = if text.trim_start().starts_with(RULE_MAGIC) {
                RadiusAlgorithm::from_table(parse_rule(&text, &ctx.limits)?)
            } else {
                RadiusAlgorithm::sorted_view(parse_cf_with_limits(&text, &ctx.limits)?)?
            };
            if let Some(t) = radius {
                if t != algorithm.radius() {
                    return Err(Failure::Usage(format!(
                        "--T {t} does not match the radius {} of {path}",
                        algorithm.radius()
                    )));
                }
            }
            algorithm
        }
    };
    Ok(algorithm)
}

#[derive(Serialize)]
struct SimulateReport<'a> {
    n: usize,
    radius: usize,
    ids: &'a [u32],
    #[serde(flatten)]
    outcome: &'a RunOutcome,
}

fn simulate(ctx: &Ctx, perm: &str, n: Option<u32>, alg: &str, radius: Option<usize>) -> CmdResult {
    let cycle = load_cycle(ctx, perm, n)?;
    let algorithm = load_algorithm(ctx, alg, cycle.len() as u32, radius)?;
    let outcome = run_on_cycle(&algorithm, &cycle)?;
    let report = SimulateReport {
        n: cycle.len(),
        radius: algorithm.radius(),
        ids: cycle.ids(),
        outcome: &outcome,
    };
    ctx.emit(Format::Json, &report, || {
        let mut s = format!(
            "{} on n={} with T={}: {}\n",
            alg,
            report.n,
            report.radius,
            if outcome.proper { "proper" } else { "improper" }
        );
        for [i, j] in &outcome.violations {
            let ids = cycle.ids();
            let _ = writeln!(
                s,
                "  nodes {} and {} both coloured {}",
                ids[*i], ids[*j], outcome.colours[*i]
            );
        }
        s
    });
    Ok(outcome.proper)
}

#[derive(Serialize)]
struct ExtractReport {
    n: u32,
    k: usize,
    c: u32,
    valid: bool,
}

fn extract(ctx: &Ctx, alg: &str, n: u32, out: &Path, radius: Option<usize>) -> CmdResult {
    let algorithm = load_algorithm(ctx, alg, n, radius)?;
    let f = extract_with_limits(&algorithm, n, &ctx.limits)?;
    write(out, &write_cf(&f))?;
    let report = ExtractReport {
        n,
        k: f.arity(),
        c: f.colour_count(),
        valid: f.verify().is_valid,
    };
    ctx.emit(Format::Text, &report, || {
        format!(
            "{}-ary table over n={} written to {} ({})\n",
            report.k,
            n,
            out.display(),
            if report.valid { "valid" } else { "invalid" }
        )
    });
    Ok(true)
}
