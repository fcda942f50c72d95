//! `pzeta`: probabilistic zeta functions from the command line.
//!
//! Exit codes: 0 success or claim verified, 1 claim falsified, 2 usage or
//! input error, 3 resource limit reached.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_traits::Signed;
use serde_json::{json, Value};

use pzeta::cache::{CacheError, LatticeCache};
use pzeta::catalog::{example_recurrence_coefficients, smooth_index, CatalogError, EvalConfig};
use pzeta::construct::{self, ConstructError, StopReason};
use pzeta::dseries::SeriesError;
use pzeta::permgroup::{GroupError, PermGroup, DEFAULT_LATTICE_LIMIT, DEFAULT_ORDER_LIMIT};
use pzeta::{DirichletSeries, GroupSpec, SeriesRecipe};

const EXAMPLE_INDEX: u64 = 50_000;

#[derive(Debug, Parser)]
#[command(name = "pzeta", version)]
#[command(about = "Exact probabilistic zeta functions of finite groups and their inverses")]
struct Cli {
    /// Truncation bound: coefficients are computed for n <= bound.
    #[arg(long, global = true, env = "PZETA_BOUND", value_parser = clap::value_parser!(u64).range(1..))]
    bound: Option<u64>,

    /// Refuse to close groups larger than this.
    #[arg(long, global = true, env = "PZETA_ORDER_LIMIT", default_value_t = DEFAULT_ORDER_LIMIT as u64,
          value_parser = clap::value_parser!(u64).range(1..))]
    order_limit: u64,

    /// Refuse to enumerate more subgroups than this.
    #[arg(long, global = true, env = "PZETA_LATTICE_LIMIT", default_value_t = DEFAULT_LATTICE_LIMIT as u64,
          value_parser = clap::value_parser!(u64).range(1..))]
    lattice_limit: u64,

    /// Directory for cached subgroup lattices.
    #[arg(long, global = true, env = "PZETA_CACHE_DIR")]
    cache_dir: Option<PathBuf>,

    /// Ignore the lattice cache even if a directory is configured.
    #[arg(long, global = true, env = "PZETA_NO_CACHE")]
    no_cache: bool,

    #[arg(long, global = true, env = "PZETA_FORMAT", value_enum, default_value_t = Format::Table)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

/// INPUT is a file path or inline text: a series JSON document, a recipe
/// JSON document, or permutation generators in cycle notation (one per
/// line, or separated by ';').
#[derive(Debug, Subcommand)]
enum Command {
    /// Nonzero coefficients a_n of P_G(s).
    Series { input: String },
    /// Nonzero coefficients c_n of the inverse series.
    Invert { input: String },
    /// Dirichlet product of two inputs.
    Mul { left: String, right: String },
    /// Replay the alternating-power construction from a seed group.
    Construct {
        seed: String,
        #[arg(long, default_value_t = 64)]
        max_steps: usize,
    },
    /// Recompute the first negative inverse coefficient of C2^2 x C5^2 x A5.
    #[command(name = "example-50000")]
    Example50000,
    /// Manage the lattice cache.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Debug, Subcommand)]
enum CacheAction {
    /// Delete every cached lattice.
    Clear,
    /// Enumerate a group's lattice and store it.
    Warm { input: String },
    /// Print the cache file path for a group.
    Path { input: String },
}

#[derive(Debug)]
enum Failure {
    Falsified(String),
    Usage(String),
    Limit(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Falsified(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Limit(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Falsified(m) | Failure::Usage(m) | Failure::Limit(m) => m,
        }
    }
}

impl From<GroupError> for Failure {
    fn from(e: GroupError) -> Self {
        match e {
            GroupError::OrderLimit { .. } | GroupError::LatticeLimit { .. } => {
                Failure::Limit(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<CacheError> for Failure {
    fn from(e: CacheError) -> Self {
        match e {
            CacheError::Group(g) => g.into(),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<CatalogError> for Failure {
    fn from(e: CatalogError) -> Self {
        match e {
            CatalogError::Group(g) => g.into(),
            CatalogError::Cache(c) => c.into(),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<SeriesError> for Failure {
    fn from(e: SeriesError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<ConstructError> for Failure {
    fn from(e: ConstructError) -> Self {
        match e {
            ConstructError::Catalog(c) => c.into(),
            other => Failure::Falsified(other.to_string()),
        }
    }
}

enum Input {
    Series(DirichletSeries),
    Recipe(SeriesRecipe),
}

struct Ctx {
    bound: Option<u64>,
    format: Format,
    config: EvalConfig,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("pzeta: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cache = match (&cli.cache_dir, cli.no_cache) {
        (Some(dir), false) => {
            fs::create_dir_all(dir)
                .map_err(|e| Failure::Usage(format!("cache directory {}: {e}", dir.display())))?;
            Some(LatticeCache::new(dir))
        }
        _ => None,
    };
    let ctx = Ctx {
        bound: cli.bound,
        format: cli.format,
        config: EvalConfig {
            order_limit: cli.order_limit as usize,
            lattice_limit: cli.lattice_limit as usize,
            cache,
        },
    };
    match cli.command {
        Command::Series { input } => {
            let series = evaluate(&ctx, &read_input(&input)?)?;
            print_series(&series, "a_n", ctx.format);
        }
        Command::Invert { input } => {
            let series = evaluate(&ctx, &read_input(&input)?)?;
            print_series(&series.invert()?, "c_n", ctx.format);
        }
        Command::Mul { left, right } => {
            let a = evaluate(&ctx, &read_input(&left)?)?;
            let b = evaluate(&ctx, &read_input(&right)?)?;
            print_series(&a.mul(&b), "a_n", ctx.format);
        }
        Command::Construct { seed, max_steps } => cmd_construct(&ctx, &seed, max_steps)?,
        Command::Example50000 => cmd_example(&ctx)?,
        Command::Cache { action } => cmd_cache(&ctx, action)?,
    }
    Ok(())
}

fn read_input(arg: &str) -> Result<Input, Failure> {
    let text = input_text(arg)?;
    let trimmed = text.trim();
    if trimmed.starts_with('{') {
        let value: Value = serde_json::from_str(trimmed)
            .map_err(|e| Failure::Usage(format!("invalid JSON input: {e}")))?;
        if value.get("terms").is_some() {
            return DirichletSeries::from_json(trimmed)
                .map(Input::Series)
                .map_err(|e| Failure::Usage(format!("invalid series: {e}")));
        }
        if value.get("variant").is_some() {
            return SeriesRecipe::from_json(trimmed)
                .map(Input::Recipe)
                .map_err(|e| Failure::Usage(format!("invalid recipe: {e}")));
        }
        return Err(Failure::Usage(
            "JSON input is neither a series nor a recipe".into(),
        ));
    }
    Ok(Input::Recipe(SeriesRecipe::Lattice(group_spec(&text)?)))
}

fn group_spec(text: &str) -> Result<GroupSpec, Failure> {
    Ok(GroupSpec::parse(&text.replace(';', "\n"))?)
}

/// Bound given on the command line, else the input's natural one.
fn resolve_bound(ctx: &Ctx, input: &Input) -> Result<u64, Failure> {
    if let Some(bound) = ctx.bound {
        return Ok(bound);
    }
    match input {
        Input::Series(s) => Ok(s.bound()),
        Input::Recipe(SeriesRecipe::Lattice(spec)) => {
            Ok(PermGroup::close(spec, ctx.config.order_limit)?.order() as u64)
        }
        Input::Recipe(_) => Err(Failure::Usage(
            "--bound is required for recipe input".into(),
        )),
    }
}

fn evaluate(ctx: &Ctx, input: &Input) -> Result<DirichletSeries, Failure> {
    let bound = resolve_bound(ctx, input)?;
    match input {
        Input::Series(s) => Ok(s.truncate(bound)?),
        Input::Recipe(r) => Ok(r.series(bound, &ctx.config)?),
    }
}

fn print_series(series: &DirichletSeries, label: &str, format: Format) {
    match format {
        Format::Json => println!("{}", series.to_json()),
        Format::Csv => {
            println!("n,{label}");
            for (n, c) in series.terms() {
                println!("{n},{c}");
            }
        }
        Format::Table => {
            let rows: Vec<(String, String)> = series
                .terms()
                .iter()
                .map(|(n, c)| (n.to_string(), c.to_string()))
                .collect();
            let wn = rows.iter().map(|r| r.0.len()).max().unwrap_or(0).max(1);
            let wc = rows
                .iter()
                .map(|r| r.1.len())
                .max()
                .unwrap_or(0)
                .max(label.len());
            println!("{:>wn$}  {:>wc$}", "n", label);
            for (n, c) in rows {
                println!("{n:>wn$}  {c:>wc$}");
            }
        }
    }
}

fn cmd_construct(ctx: &Ctx, seed: &str, max_steps: usize) -> Result<(), Failure> {
    let recipe = match read_input(seed)? {
        Input::Recipe(r) => r,
        Input::Series(_) => {
            return Err(Failure::Usage(
                "the seed must be a group or a recipe".into(),
            ))
        }
    };
    let bound = ctx
        .bound
        .ok_or_else(|| Failure::Usage("--bound is required for construct".into()))?;
    let out = construct::run(&recipe, bound, max_steps, &ctx.config)?;
    match ctx.format {
        Format::Json => {
            for row in &out.trace {
                println!("{}", row.to_json_line());
            }
        }
        Format::Csv => {
            println!("k,m,f,frontier");
            for row in &out.trace {
                println!("{},{},{},{}", row.k, row.m, row.f, row.frontier);
            }
        }
        Format::Table => {
            let f_width = out
                .trace
                .iter()
                .map(|r| r.f.to_string().len())
                .max()
                .unwrap_or(1)
                .max(1);
            println!(
                "{:>4}  {:>8}  {:>f_width$}  {:>10}",
                "k", "m", "f", "frontier"
            );
            for row in &out.trace {
                println!(
                    "{:>4}  {:>8}  {:>f_width$}  {:>10}",
                    row.k,
                    row.m,
                    row.f.to_string(),
                    row.frontier
                );
            }
        }
    }
    match out.stop {
        StopReason::Complete => {
            eprintln!("stop: complete, no negative coefficient up to {bound}");
            Ok(())
        }
        StopReason::MaxSteps => {
            eprintln!("stop: reached {max_steps} steps");
            Ok(())
        }
        StopReason::BoundExhausted { index } => Err(Failure::Limit(format!(
            "first negative coefficient at {index}, but A_{index} is not exact up to {bound}"
        ))),
    }
}

fn is_2_5_smooth(mut n: u64) -> bool {
    for p in [2, 5] {
        while n.is_multiple_of(p) {
            n /= p;
        }
    }
    n == 1
}

fn floor_log(base: u64, n: u64) -> u32 {
    let mut k = 0;
    let mut x = base;
    while x <= n {
        k += 1;
        x *= base;
    }
    k
}

fn cmd_example(ctx: &Ctx) -> Result<(), Failure> {
    let bound = ctx.bound.unwrap_or(EXAMPLE_INDEX);
    let series = SeriesRecipe::example_c2c2_c5c5_a5().series(bound, &ctx.config)?;
    let inverse = series.invert()?;
    let first = inverse.first_negative();
    let first_smooth = inverse
        .terms()
        .iter()
        .find(|(n, c)| is_2_5_smooth(*n) && c.is_negative())
        .cloned();
    let negatives_below = inverse
        .terms()
        .iter()
        .filter(|(n, c)| *n < EXAMPLE_INDEX && c.is_negative())
        .count();
    let mut agrees = true;
    for ((i, k), value) in example_recurrence_coefficients(floor_log(2, bound), floor_log(5, bound))
    {
        if let Some(n) = smooth_index(i, k).filter(|n| *n <= bound) {
            agrees &= inverse.coeff(n)? == value;
        }
    }
    let verified = agrees && first.as_ref().map(|(n, _)| *n) == Some(EXAMPLE_INDEX);

    let entry = |e: &Option<(u64, BigInt)>| match e {
        Some((n, c)) => json!({"index": n, "value": c.to_string()}),
        None => Value::Null,
    };
    let report = json!({
        "bound": bound,
        "first_negative": entry(&first),
        "negatives_below_50000": negatives_below,
        "first_negative_2_5_smooth": entry(&first_smooth),
        "recurrence_agrees": agrees,
        "claim_verified": verified,
    });
    let show = |e: &Option<(u64, BigInt)>| match e {
        Some((n, c)) => format!("c_{n} = {c}"),
        None => "no negative coefficient within bound".to_string(),
    };
    match ctx.format {
        Format::Json => println!("{report}"),
        Format::Csv => {
            println!("key,value");
            println!("bound,{bound}");
            for (key, e) in [
                ("first_negative", &first),
                ("first_negative_2_5_smooth", &first_smooth),
            ] {
                match e {
                    Some((n, c)) => println!("{key}_index,{n}\n{key}_value,{c}"),
                    None => println!("{key}_index,"),
                }
            }
            println!("negatives_below_50000,{negatives_below}");
            println!("recurrence_agrees,{agrees}");
            println!("claim_verified,{verified}");
        }
        Format::Table => {
            println!("group                       C2^2 x C5^2 x A5");
            println!("bound                       {bound}");
            println!("first negative              {}", show(&first));
            println!("negatives below 50000       {negatives_below}");
            println!("first negative (2,5-smooth) {}", show(&first_smooth));
            println!("recurrence agrees           {agrees}");
            println!("claim verified              {verified}");
        }
    }
    if verified {
        Ok(())
    } else if !agrees {
        Err(Failure::Falsified(
            "recurrence and inversion disagree".into(),
        ))
    } else {
        Err(Failure::Falsified(format!(
            "first negative coefficient is not at {EXAMPLE_INDEX}: {}",
            show(&first)
        )))
    }
}

fn cmd_cache(ctx: &Ctx, action: CacheAction) -> Result<(), Failure> {
    let cache = ctx
        .config
        .cache
        .as_ref()
        .ok_or_else(|| Failure::Usage("no cache directory configured (--cache-dir)".into()))?;
    match action {
        CacheAction::Clear => {
            let removed = cache.clear()?;
            println!(
                "removed {removed} cached lattices from {}",
                cache.dir().display()
            );
        }
        CacheAction::Warm { input } => {
            let spec = group_spec(&input_text(&input)?)?;
            let group = PermGroup::close(&spec, ctx.config.order_limit)?;
            let table = cache.table_for(&group, ctx.config.lattice_limit)?;
            println!(
                "{}  order {}  {} subgroups",
                cache.path_for(&spec).display(),
                group.order(),
                table.lattice().len()
            );
        }
        CacheAction::Path { input } => {
            let spec = group_spec(&input_text(&input)?)?;
            println!("{}", cache.path_for(&spec).display());
        }
    }
    Ok(())
}

fn input_text(arg: &str) -> Result<String, Failure> {
    let path = Path::new(arg);
    if path.is_file() {
        fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{arg}: {e}")))
    } else {
        Ok(arg.to_string())
    }
}
