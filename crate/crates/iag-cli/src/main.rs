//! Command-line surface for the array grammar library.
//!
//! Exit codes are disjoint across subcommands: 0 success/derivable,
//! 1 definite negative, 2 input error, 3 derivation dead end,
//! 4 inconclusive or capped search.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use iag::engine::StopReason;
use iag::oracle::{CensusQuery, Membership, SearchLimits};
use iag::{Connectivity, Coord, EngineConfig, Grammar, Grid, Pattern};

const EXIT_OK: u8 = 0;
const EXIT_NEGATIVE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_DEAD_END: u8 = 3;
const EXIT_INCONCLUSIVE: u8 = 4;

const GRAIN_NOTE: &str = "note: connectedness of a full pattern refers to its grain (a) cells; \
the empty grain set counts as connected. The rewrite condition itself governs the non-blank \
support of intermediate forms.";

#[derive(Parser)]
#[command(name = "iag", version, about = "Isometric array grammars on image neighborhoods")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a seeded random derivation and print the final form.
    Derive(DeriveArgs),
    /// Decide whether a pattern is derivable, with a witness trace.
    Check(CheckArgs),
    /// Enumerate the derivable pattern set, optionally with coverage.
    Enumerate(EnumerateArgs),
    /// Count connected patterns on a window by brute force.
    Census(CensusArgs),
    /// Validate a grammar against the static rule conditions.
    Validate(ValidateArgs),
    /// Render a pattern as ASCII bits or a plain PBM image.
    Render(RenderArgs),
}

#[derive(Args)]
struct GrammarSource {
    /// Path to a .iag grammar file.
    grammar: Option<PathBuf>,
    /// Use a built-in grammar (currently: cpag).
    #[arg(long, value_name = "NAME", conflicts_with = "grammar")]
    builtin: Option<String>,
}

impl GrammarSource {
    fn load(&self) -> Result<Grammar, u8> {
        self.load_with(iag::parse_grammar)
    }

    /// Lenient load for `validate`: C2/C3-violating rules survive
    /// parsing so the per-rule report can name them.
    fn load_lenient(&self) -> Result<Grammar, u8> {
        self.load_with(iag::parse_grammar_lenient)
    }

    fn load_with(
        &self,
        parse: fn(&str) -> Result<iag::ParsedGrammar, Vec<iag::ParseDiagnostic>>,
    ) -> Result<Grammar, u8> {
        match (&self.builtin, &self.grammar) {
            (Some(name), None) => {
                if name == "cpag" {
                    Ok(iag::builtin_cpag())
                } else {
                    eprintln!("error: unknown built-in grammar '{name}' (available: cpag)");
                    Err(EXIT_INPUT)
                }
            }
            (None, Some(path)) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    eprintln!("error: cannot read {}: {e}", path.display());
                    EXIT_INPUT
                })?;
                match parse(&text) {
                    Ok(parsed) => {
                        for w in &parsed.warnings {
                            eprintln!("{w}");
                        }
                        Ok(parsed.grammar)
                    }
                    Err(diags) => {
                        for d in &diags {
                            eprintln!("{d}");
                        }
                        Err(EXIT_INPUT)
                    }
                }
            }
            _ => {
                eprintln!("error: give a grammar file or --builtin <name>");
                Err(EXIT_INPUT)
            }
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ConnArg {
    #[value(name = "4")]
    Four,
    #[value(name = "8")]
    Eight,
}

impl From<ConnArg> for Connectivity {
    fn from(c: ConnArg) -> Self {
        match c {
            ConnArg::Four => Connectivity::Four,
            ConnArg::Eight => Connectivity::Eight,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

fn parse_window(s: &str) -> Result<(usize, usize), String> {
    let (r, c) = s.split_once('x').ok_or_else(|| format!("expected RxC, got '{s}'"))?;
    let rows = r.parse().map_err(|_| format!("bad row count '{r}'"))?;
    let cols = c.parse().map_err(|_| format!("bad col count '{c}'"))?;
    if rows == 0 || cols == 0 {
        return Err("window dimensions must be at least 1x1".into());
    }
    Ok((rows, cols))
}

fn parse_coord(s: &str) -> Result<Coord, String> {
    let (r, c) = s.split_once(',').ok_or_else(|| format!("expected r,c, got '{s}'"))?;
    Ok(Coord::new(
        r.parse().map_err(|_| format!("bad row '{r}'"))?,
        c.parse().map_err(|_| format!("bad col '{c}'"))?,
    ))
}

fn parse_starts(s: &str) -> Result<StartsArg, String> {
    if s == "all" {
        Ok(StartsArg::All)
    } else {
        parse_coord(s).map(StartsArg::At)
    }
}

#[derive(Clone, Copy)]
enum StartsArg {
    All,
    At(Coord),
}

impl StartsArg {
    fn positions(self, rows: usize, cols: usize) -> std::collections::BTreeSet<Coord> {
        match self {
            StartsArg::All => iag::all_starts(rows, cols),
            StartsArg::At(c) => [c].into(),
        }
    }
}

#[derive(Args)]
struct DeriveArgs {
    #[command(flatten)]
    source: GrammarSource,
    #[arg(long, value_parser = parse_window, value_name = "RxC")]
    window: (usize, usize),
    #[arg(long, value_parser = parse_coord, default_value = "0,0", value_name = "r,c")]
    start: Coord,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "8")]
    connectivity: ConnArg,
    #[arg(long, value_name = "N")]
    max_steps: Option<usize>,
    /// Write the derivation trace to this file.
    #[arg(long, value_name = "PATH")]
    trace: Option<PathBuf>,
}

fn cmd_derive(args: DeriveArgs) -> u8 {
    let grammar = match args.source.load() {
        Ok(g) => g,
        Err(code) => return code,
    };
    let (rows, cols) = args.window;
    let config = EngineConfig {
        connectivity: args.connectivity.into(),
        enforce_c4: true,
        max_steps: args.max_steps,
        rng_seed: args.seed,
    };
    let trace = match iag::derive_random(&grammar, rows, cols, args.start, &config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    if let Some(path) = &args.trace {
        if let Err(e) = fs::write(path, iag::serialize_trace(&trace)) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return EXIT_INPUT;
        }
    }
    print!("{}", trace.final_grid);
    eprintln!("steps: {}, reason: {}", trace.steps.len(), trace.reason);
    match trace.reason {
        StopReason::Terminal => EXIT_OK,
        StopReason::DeadEnd | StopReason::MaxSteps => EXIT_DEAD_END,
    }
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    source: GrammarSource,
    /// Pattern file: 0/1 or a/b rows, or a grid file with blanks.
    #[arg(long, value_name = "PATH")]
    pattern: PathBuf,
    #[arg(long, value_parser = parse_starts, default_value = "all", value_name = "all|r,c")]
    starts: StartsArg,
    /// Visited-form budget for the membership search.
    #[arg(long, default_value_t = 10_000_000)]
    budget: usize,
    #[arg(long, value_enum, default_value = "8")]
    connectivity: ConnArg,
    /// Write the witness trace to this file.
    #[arg(long, value_name = "PATH")]
    trace: Option<PathBuf>,
}

fn load_target(path: &PathBuf) -> Result<Grid, u8> {
    let text = fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        EXIT_INPUT
    })?;
    if let Ok(pattern) = Pattern::parse(&text) {
        return Ok(pattern.to_grid());
    }
    match Grid::parse(&text) {
        Ok(grid) => {
            if let Some((coord, symbol)) =
                grid.symbols().find(|(_, s)| s.is_nonterminal())
            {
                eprintln!("error: target cell {coord} holds nonterminal {symbol}");
                return Err(EXIT_INPUT);
            }
            Ok(grid)
        }
        Err(e) => {
            eprintln!("error: {}: not a valid pattern or grid file ({e})", path.display());
            Err(EXIT_INPUT)
        }
    }
}

fn cmd_check(args: CheckArgs) -> u8 {
    let grammar = match args.source.load() {
        Ok(g) => g,
        Err(code) => return code,
    };
    if args.budget < 1 {
        eprintln!("error: --budget must be at least 1");
        return EXIT_INPUT;
    }
    let target = match load_target(&args.pattern) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let starts = args.starts.positions(target.rows(), target.cols());
    let config = EngineConfig {
        connectivity: args.connectivity.into(),
        ..EngineConfig::default()
    };
    let limits = SearchLimits {
        max_forms: args.budget,
    };
    let verdict = match iag::is_derivable(&grammar, &target, &starts, &config, limits, true) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    match verdict {
        Membership::Derivable(trace) => {
            println!("derivable");
            print!("{}", iag::serialize_trace(&trace));
            if let Some(path) = &args.trace {
                if let Err(e) = fs::write(path, iag::serialize_trace(&trace)) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return EXIT_INPUT;
                }
            }
            EXIT_OK
        }
        Membership::NotDerivable => {
            println!("not derivable");
            EXIT_NEGATIVE
        }
        Membership::Inconclusive { visited_forms } => {
            println!("inconclusive after {visited_forms} forms (budget {})", args.budget);
            EXIT_INCONCLUSIVE
        }
    }
}

#[derive(Args)]
struct CensusArgs {
    #[arg(long, value_parser = parse_window, value_name = "RxC")]
    window: (usize, usize),
    #[arg(long, value_enum, default_value = "8")]
    connectivity: ConnArg,
    /// Require the window's central cell to be a grain.
    #[arg(long)]
    center_fixed: bool,
    /// Require exactly this many grains in total.
    #[arg(long, value_name = "K")]
    grains: Option<usize>,
    /// List the sorted pattern keys with ASCII renderings.
    #[arg(long)]
    list: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: ReportFormat,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

fn census_json(report: &iag::CensusReport) -> serde_json::Value {
    serde_json::json!({
        "window": format!("{}x{}", report.query.rows, report.query.cols),
        "connectivity": report.query.connectivity.as_number(),
        "center_fixed": report.query.center_fixed,
        "grains": report.query.grain_count,
        "count": report.count,
        "empty_pattern_counted": report.empty_pattern_counted,
        "keys": report.keys,
    })
}

fn cmd_census(args: CensusArgs) -> u8 {
    let (rows, cols) = args.window;
    let query = CensusQuery {
        rows,
        cols,
        connectivity: args.connectivity.into(),
        center_fixed: args.center_fixed,
        grain_count: args.grains,
    };
    let report = match iag::census(&query, args.list, args.threads) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    match args.format {
        ReportFormat::Json => println!("{}", census_json(&report)),
        ReportFormat::Text => {
            println!("window: {rows}x{cols}");
            println!("connectivity: {}", query.connectivity.as_number());
            println!("center_fixed: {}", query.center_fixed);
            match query.grain_count {
                Some(k) => println!("grains: {k}"),
                None => println!("grains: any"),
            }
            println!("count: {}", report.count);
            if report.empty_pattern_counted {
                println!("{GRAIN_NOTE}");
            }
            if let Some(keys) = &report.keys {
                for &key in keys {
                    println!("key {key}:");
                    print!("{}", Pattern::from_key(key, rows, cols).unwrap());
                }
            }
        }
    }
    EXIT_OK
}

#[derive(Args)]
struct EnumerateArgs {
    #[command(flatten)]
    source: GrammarSource,
    #[arg(long, value_parser = parse_window, value_name = "RxC")]
    window: (usize, usize),
    #[arg(long, value_parser = parse_starts, default_value = "all", value_name = "all|r,c")]
    starts: StartsArg,
    /// Also compare the derivable set against the connectivity census.
    #[arg(long)]
    coverage: bool,
    /// Visited-form cap for the breadth-first closure.
    #[arg(long, default_value_t = 10_000_000, value_name = "N")]
    cap: usize,
    #[arg(long, value_enum, default_value = "8")]
    connectivity: ConnArg,
    #[arg(long, value_enum, default_value = "text")]
    format: ReportFormat,
}

fn keys_line(keys: &[u64]) -> String {
    keys.iter()
        .map(|k| k.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_enumerate(args: EnumerateArgs) -> u8 {
    let grammar = match args.source.load() {
        Ok(g) => g,
        Err(code) => return code,
    };
    if args.cap < 1 {
        eprintln!("error: --cap must be at least 1");
        return EXIT_INPUT;
    }
    let (rows, cols) = args.window;
    let starts = args.starts.positions(rows, cols);
    let config = EngineConfig {
        connectivity: args.connectivity.into(),
        ..EngineConfig::default()
    };
    let limits = SearchLimits { max_forms: args.cap };
    let exhausted;
    if args.coverage {
        let report = match iag::coverage_report(
            &grammar,
            rows,
            cols,
            config.connectivity,
            &starts,
            &config,
            limits,
        ) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_INPUT;
            }
        };
        exhausted = report.search_exhausted;
        match args.format {
            ReportFormat::Json => {
                println!(
                    "{}",
                    serde_json::json!({
                        "grammar": grammar.name(),
                        "window": format!("{rows}x{cols}"),
                        "connectivity": report.connectivity.as_number(),
                        "derivable_count": report.derivable_count,
                        "connected_count": report.connected_count,
                        "derivable_not_connected": report.derivable_not_connected,
                        "connected_not_derivable": report.connected_not_derivable,
                        "search_exhausted": report.search_exhausted,
                        "visited_forms": report.visited_forms,
                    })
                );
            }
            ReportFormat::Text => {
                println!("grammar: {}", grammar.name());
                println!("window: {rows}x{cols}");
                println!("connectivity: {}", report.connectivity.as_number());
                println!("{GRAIN_NOTE}");
                println!("derivable_count: {}", report.derivable_count);
                println!("connected_count: {}", report.connected_count);
                println!(
                    "derivable_not_connected: {} keys: {}",
                    report.derivable_not_connected.len(),
                    keys_line(&report.derivable_not_connected)
                );
                println!(
                    "connected_not_derivable: {} keys: {}",
                    report.connected_not_derivable.len(),
                    keys_line(&report.connected_not_derivable)
                );
                println!("search_exhausted: {}", report.search_exhausted);
                println!("visited_forms: {}", report.visited_forms);
            }
        }
    } else {
        let result = match iag::derivable_set(&grammar, rows, cols, &starts, &config, limits) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_INPUT;
            }
        };
        exhausted = result.search_exhausted;
        let keys: Vec<u64> = result.keys.iter().copied().collect();
        match args.format {
            ReportFormat::Json => {
                println!(
                    "{}",
                    serde_json::json!({
                        "grammar": grammar.name(),
                        "window": format!("{rows}x{cols}"),
                        "derivable_count": keys.len(),
                        "keys": keys,
                        "search_exhausted": result.search_exhausted,
                        "visited_forms": result.visited_forms,
                    })
                );
            }
            ReportFormat::Text => {
                println!("grammar: {}", grammar.name());
                println!("window: {rows}x{cols}");
                println!("derivable_count: {}", keys.len());
                println!("keys: {}", keys_line(&keys));
                println!("search_exhausted: {}", result.search_exhausted);
                println!("visited_forms: {}", result.visited_forms);
            }
        }
    }
    if exhausted {
        EXIT_OK
    } else {
        EXIT_INCONCLUSIVE
    }
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    source: GrammarSource,
    /// Also report the context-free classification per rule.
    #[arg(long)]
    classify: bool,
}

fn cmd_validate(args: ValidateArgs) -> u8 {
    let grammar = match args.source.load_lenient() {
        Ok(g) => g,
        Err(code) => return code,
    };
    let report = grammar.validate();
    println!("{}", iag::grammar::C4_DYNAMIC_NOTE);
    for rule in grammar.rules() {
        let mine: Vec<_> = report
            .violations
            .iter()
            .filter(|v| v.rule_id.as_deref() == Some(rule.id()))
            .collect();
        if mine.is_empty() {
            if args.classify {
                let cf = if rule.is_context_free() {
                    "context-free"
                } else {
                    "not context-free"
                };
                println!("{}: ok, {cf}", rule.id());
            } else {
                println!("{}: ok", rule.id());
            }
        } else {
            for v in mine {
                println!("{}: [{}] {}", rule.id(), v.condition, v.detail);
            }
        }
    }
    for v in report.violations.iter().filter(|v| v.rule_id.is_none()) {
        println!("grammar: [{}] {}", v.condition, v.detail);
    }
    if args.classify {
        let all_cf = grammar.rules().iter().all(|r| r.is_context_free());
        println!(
            "grammar: {}",
            if all_cf {
                "context-free"
            } else {
                "not context-free"
            }
        );
    }
    if report.is_valid() {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    }
}

#[derive(Args)]
struct RenderArgs {
    /// Pattern file to render.
    #[arg(long, value_name = "PATH", conflicts_with_all = ["key", "window"])]
    pattern: Option<PathBuf>,
    /// Pattern key to render (requires --window).
    #[arg(long, requires = "window")]
    key: Option<u64>,
    #[arg(long, value_parser = parse_window, value_name = "RxC")]
    window: Option<(usize, usize)>,
    #[arg(long, value_enum, default_value = "ascii")]
    format: RenderFormat,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum RenderFormat {
    Ascii,
    Pbm,
}

fn cmd_render(args: RenderArgs) -> u8 {
    let pattern = match (&args.pattern, args.key, args.window) {
        (Some(path), None, _) => {
            let text = match fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read {}: {e}", path.display());
                    return EXIT_INPUT;
                }
            };
            match Pattern::parse(&text) {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_INPUT;
                }
            }
        }
        (None, Some(key), Some((rows, cols))) => match Pattern::from_key(key, rows, cols) {
            Ok(p) => p,
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_INPUT;
            }
        },
        _ => {
            eprintln!("error: give --pattern <file> or --key <n> --window RxC");
            return EXIT_INPUT;
        }
    };
    let rendered = match args.format {
        RenderFormat::Ascii => pattern.to_string(),
        RenderFormat::Pbm => pattern.to_pbm(),
    };
    match &args.out {
        Some(path) => {
            if let Err(e) = fs::write(path, rendered) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return EXIT_INPUT;
            }
        }
        None => print!("{rendered}"),
    }
    EXIT_OK
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Derive(args) => cmd_derive(args),
        Command::Check(args) => cmd_check(args),
        Command::Enumerate(args) => cmd_enumerate(args),
        Command::Census(args) => cmd_census(args),
        Command::Validate(args) => cmd_validate(args),
        Command::Render(args) => cmd_render(args),
    };
    ExitCode::from(code)
}
