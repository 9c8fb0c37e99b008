//! Command-line front end: argument parsing, validation and the three
//! subcommands (`render`, `benchmark`, `enumerate`).

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::{builtin_group, digits_to_letters, GroupSpec, Word};
use crate::image::{tone_map, write_ppm, ToneMapping};
use crate::moebius::{ComplexPoint, GeneratorSet};
use crate::oracles::{
    enumerate_dictionary_bfs, format_benchmark_table, format_benchmark_tsv, render_probabilistic,
    run_benchmark, DictionaryOptions, WalkConfig,
};
use crate::render::{
    self, collect_seed_points, index_search_words, render_index_search, Canvas, RenderConfig,
    RenderMode, RenderStats, SeedPolicy, Viewport,
};

const DEFAULT_MU: &str = "-0.097,1.838";

#[derive(Debug, Parser)]
#[command(
    name = "kleinian",
    version,
    about = "Render limit sets of Kleinian groups by index search"
)]
struct Cli {
    #[command(subcommand)]
    command: CommandArg,
}

#[derive(Debug, Subcommand)]
enum CommandArg {
    /// Render the limit set (or tiling) into a PPM image.
    Render(Flags),
    /// Time index search against the dictionary (and the random walk with --steps).
    Benchmark(Flags),
    /// List the accepted words of the pruned tree.
    Enumerate(Flags),
}

#[derive(Debug, clap::Args)]
struct Flags {
    /// Built-in group: once_punctured_torus or klein_four.
    #[arg(
        long,
        default_value = "once_punctured_torus",
        conflicts_with = "spec_file"
    )]
    group: String,
    /// Group spec file: `m`, alphabet line, then m+1 table rows.
    #[arg(long)]
    spec_file: Option<PathBuf>,
    /// Maskit parameter as RE,IM.
    #[arg(long, default_value = DEFAULT_MU, allow_hyphen_values = true, value_parser = parse_complex)]
    mu: Complex64,
    /// Tree depth [default: 10 for render, 8 for benchmark, 4 for enumerate].
    #[arg(long)]
    depth: Option<u32>,
    #[arg(long, value_enum, default_value = "limit")]
    mode: ModeArg,
    #[arg(long = "algo", value_enum, default_value = "index")]
    algorithm: Algorithm,
    /// Canvas size as WxH.
    #[arg(long, default_value = "800x600", value_parser = parse_size)]
    size: (u32, u32),
    /// Complex-plane window as XMIN,XMAX,YMIN,YMAX.
    #[arg(long, default_value = "-2,4,-1,3", allow_hyphen_values = true, value_parser = parse_viewport)]
    viewport: Viewport,
    /// Orbit seeds for tree renders.
    #[arg(long, value_enum, default_value = "fixed-points")]
    seeds: SeedArg,
    /// Random-walk length (required by --algo random).
    #[arg(long)]
    steps: Option<u64>,
    /// Random-walk steps taken before plotting.
    #[arg(long, default_value_t = crate::oracles::DEFAULT_BURN_IN)]
    burn_in: u64,
    #[arg(long, default_value_t = 1)]
    rng_seed: u64,
    #[arg(long, value_enum, default_value = "binary")]
    tone: ToneArg,
    /// Output path (PPM for render, word list for enumerate).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Stats output path (key/value for render, TSV for benchmark).
    #[arg(long)]
    stats: Option<PathBuf>,
    /// Worker threads for index search [default: available cores].
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Limit,
    Tiling,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    Index,
    Dictionary,
    Random,
}

impl Algorithm {
    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::Index => "index",
            Algorithm::Dictionary => "dictionary",
            Algorithm::Random => "random",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ToneArg {
    Binary,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SeedArg {
    FixedPoints,
    Commutator,
}

fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let parts = parse_reals(s, 2)?;
    Ok(Complex64::new(parts[0], parts[1]))
}

fn parse_reals(s: &str, count: usize) -> std::result::Result<Vec<f64>, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| format!("`{p}` is not a number"))
        })
        .collect::<std::result::Result<_, _>>()?;
    if parts.len() != count || parts.iter().any(|v| !v.is_finite()) {
        return Err(format!("expected {count} finite comma-separated numbers"));
    }
    Ok(parts)
}

fn parse_size(s: &str) -> std::result::Result<(u32, u32), String> {
    let (w, h) = s.split_once(['x', 'X']).ok_or("expected WxH")?;
    let w: u32 = w.parse().map_err(|_| format!("bad width `{w}`"))?;
    let h: u32 = h.parse().map_err(|_| format!("bad height `{h}`"))?;
    if w == 0 || h == 0 {
        return Err("width and height must be positive".into());
    }
    Ok((w, h))
}

fn parse_viewport(s: &str) -> std::result::Result<Viewport, String> {
    let v = parse_reals(s, 4)?;
    Viewport::new(v[0], v[1], v[2], v[3]).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Render,
    Benchmark,
    Enumerate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupSource {
    Builtin(String),
    SpecFile(PathBuf),
}

/// Validated command line.
#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub command: CommandKind,
    pub group: GroupSource,
    pub mu: Complex64,
    pub depth: u32,
    pub mode: RenderMode,
    pub algorithm: Algorithm,
    pub width: u32,
    pub height: u32,
    pub viewport: Viewport,
    pub seeds: SeedPolicy,
    pub steps: Option<u64>,
    pub burn_in: u64,
    pub rng_seed: u64,
    pub tone: ToneMapping,
    pub out: Option<PathBuf>,
    pub stats: Option<PathBuf>,
    pub workers: usize,
}

fn usage(kind: ErrorKind, message: impl std::fmt::Display) -> clap::Error {
    Cli::command().error(kind, message)
}

/// Parses and cross-validates `argv` (program name first). Errors carry
/// clap's usage exit code 2.
pub fn parse_args<I, T>(argv: I) -> std::result::Result<CliConfig, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    let (command, flags) = match cli.command {
        CommandArg::Render(f) => (CommandKind::Render, f),
        CommandArg::Benchmark(f) => (CommandKind::Benchmark, f),
        CommandArg::Enumerate(f) => (CommandKind::Enumerate, f),
    };
    let depth = flags.depth.unwrap_or(match command {
        CommandKind::Render => 10,
        CommandKind::Benchmark => 8,
        CommandKind::Enumerate => 4,
    });
    if depth == 0 {
        return Err(usage(
            ErrorKind::ValueValidation,
            "--depth must be at least 1",
        ));
    }
    if command == CommandKind::Render && flags.out.is_none() {
        return Err(usage(
            ErrorKind::MissingRequiredArgument,
            "render requires --out PATH",
        ));
    }
    if command == CommandKind::Enumerate && flags.algorithm == Algorithm::Random {
        return Err(usage(
            ErrorKind::InvalidValue,
            "enumerate supports --algo index or dictionary",
        ));
    }
    if command == CommandKind::Render
        && flags.algorithm == Algorithm::Random
        && flags.steps.is_none()
    {
        return Err(usage(
            ErrorKind::MissingRequiredArgument,
            "--algo random requires --steps N",
        ));
    }
    if let Some(steps) = flags.steps {
        if steps == 0 || flags.burn_in >= steps {
            return Err(usage(
                ErrorKind::ValueValidation,
                format!(
                    "--steps ({steps}) must exceed --burn-in ({})",
                    flags.burn_in
                ),
            ));
        }
    }
    if flags.workers == Some(0) {
        return Err(usage(
            ErrorKind::ValueValidation,
            "--workers must be at least 1",
        ));
    }
    let workers = flags
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, usize::from));

    Ok(CliConfig {
        command,
        group: match flags.spec_file {
            Some(path) => GroupSource::SpecFile(path),
            None => GroupSource::Builtin(flags.group),
        },
        mu: flags.mu,
        depth,
        mode: match flags.mode {
            ModeArg::Limit => RenderMode::LimitSet,
            ModeArg::Tiling => RenderMode::Tiling,
        },
        algorithm: flags.algorithm,
        width: flags.size.0,
        height: flags.size.1,
        viewport: flags.viewport,
        seeds: match flags.seeds {
            SeedArg::FixedPoints => SeedPolicy::GeneratorFixedPoints,
            SeedArg::Commutator => SeedPolicy::CommutatorFixedPoint,
        },
        steps: flags.steps,
        burn_in: flags.burn_in,
        rng_seed: flags.rng_seed,
        tone: match flags.tone {
            ToneArg::Binary => ToneMapping::Binary,
            ToneArg::Log => ToneMapping::LogDensity,
        },
        out: flags.out,
        stats: flags.stats,
        workers,
    })
}

impl CliConfig {
    /// Resolves the group; four-letter groups get the Maskit generators for `mu`
    /// bound in alphabet order.
    pub fn load_group(&self) -> Result<GroupSpec> {
        let group = match &self.group {
            GroupSource::Builtin(name) => builtin_group(name)?,
            GroupSource::SpecFile(path) => GroupSpec::load(path)?,
        };
        if group.m() == 4 {
            group.with_generators(GeneratorSet::maskit(self.mu)?)
        } else {
            Ok(group)
        }
    }

    fn walk(&self, gens: &GeneratorSet) -> Result<WalkConfig> {
        let seeds = collect_seed_points(gens, &SeedPolicy::GeneratorFixedPoints)?;
        let start = seeds
            .iter()
            .copied()
            .find(|z| !z.is_infinite())
            .unwrap_or(ComplexPoint::Infinity);
        Ok(WalkConfig {
            steps: self.steps.unwrap_or(0),
            burn_in: self.burn_in,
            rng_seed: self.rng_seed,
            start,
        })
    }
}

/// What a render produced, before it is written out.
#[derive(Debug, Clone)]
pub struct RenderOutput {
    pub canvas: Canvas,
    pub stats: RenderStats,
    pub seeds: usize,
    /// Nodes the index search visits per seed (`m^D` or `m + … + m^D`).
    pub nodes_per_seed: u64,
}

pub fn render(config: &CliConfig, group: GroupSpec) -> Result<RenderOutput> {
    let gens = group
        .generators()
        .cloned()
        .ok_or_else(|| Error::MissingGenerators(group.name.clone()))?;
    let nodes_per_seed = config.mode.node_count(group.m(), config.depth)?;
    match config.algorithm {
        Algorithm::Index => {
            let seeds = collect_seed_points(&gens, &config.seeds)?.len();
            let mut rc = RenderConfig::new(group, config.depth);
            rc.mode = config.mode;
            rc.seeds = config.seeds.clone();
            rc.viewport = config.viewport;
            rc.width = config.width;
            rc.height = config.height;
            rc.workers = config.workers;
            let (canvas, stats) = render_index_search(&rc)?;
            Ok(RenderOutput {
                canvas,
                stats,
                seeds,
                nodes_per_seed,
            })
        }
        Algorithm::Dictionary => {
            let started = std::time::Instant::now();
            let seeds = collect_seed_points(&gens, &config.seeds)?;
            let options = DictionaryOptions {
                mode: config.mode,
                orbit: Some((&gens, &seeds)),
                ..DictionaryOptions::default()
            };
            let (entries, memory) = enumerate_dictionary_bfs(&group, config.depth, &options)?;
            let mut canvas = Canvas::new(config.width, config.height)?;
            let mut stats = RenderStats::default();
            for entry in &entries {
                let values = entry.values.as_deref().unwrap_or_default();
                render::plot_values(&mut canvas, &config.viewport, values, &mut stats);
            }
            stats.words_accepted = entries.len() as u64 * seeds.len() as u64;
            stats.words_tested = stats.words_accepted;
            stats.peak_word_buffer_len = memory.peak_digits as usize;
            stats.wall_time = started.elapsed();
            Ok(RenderOutput {
                canvas,
                stats,
                seeds: seeds.len(),
                nodes_per_seed,
            })
        }
        Algorithm::Random => {
            let walk = config.walk(&gens)?;
            let outcome = render_probabilistic(
                &group,
                &walk,
                &config.viewport,
                config.width,
                config.height,
                false,
            )?;
            Ok(RenderOutput {
                canvas: outcome.canvas,
                stats: outcome.stats,
                seeds: 1,
                nodes_per_seed: walk.steps,
            })
        }
    }
}

fn stats_report(config: &CliConfig, group: &GroupSpec, output: &RenderOutput) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "algorithm\t{}", config.algorithm.as_str());
    let _ = writeln!(out, "group\t{}", group.name);
    let _ = writeln!(out, "mode\t{}", config.mode.as_str());
    let _ = writeln!(out, "depth\t{}", config.depth);
    let _ = writeln!(out, "seeds\t{}", output.seeds);
    let _ = writeln!(out, "nodes_per_seed\t{}", output.nodes_per_seed);
    out.push_str(&output.stats.to_report());
    out
}

fn word_lines(words: &mut [Word], group: &GroupSpec) -> Result<String> {
    words.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let mut out = String::new();
    for w in words.iter() {
        let _ = writeln!(out, "{w}\t{}", digits_to_letters(w, group)?);
    }
    Ok(out)
}

/// Runs a validated command.
pub fn run(config: &CliConfig) -> Result<()> {
    let group = config.load_group()?;
    match config.command {
        CommandKind::Render => {
            let output = render(config, group.clone())?;
            let image = tone_map(&output.canvas, config.tone);
            let path = config.out.as_ref().expect("validated: render has --out");
            write_ppm(&image, path)?;
            if let Some(stats_path) = &config.stats {
                std::fs::write(stats_path, stats_report(config, &group, &output))?;
            }
            let s = &output.stats;
            eprintln!(
                "{}: {} words tested, {} accepted, {} plotted ({:.2}% inside), {:.3}s",
                path.display(),
                s.words_tested,
                s.words_accepted,
                s.points_plotted,
                100.0 * s.inside_fraction(),
                s.wall_time.as_secs_f64()
            );
        }
        CommandKind::Benchmark => {
            let walk = match (config.steps, group.generators()) {
                (Some(_), Some(gens)) => Some(config.walk(gens)?),
                _ => None,
            };
            let rows = run_benchmark(&group, config.depth, config.mode, walk.as_ref())?;
            print!("{}", format_benchmark_table(&rows));
            if let Some(path) = &config.stats {
                std::fs::write(path, format_benchmark_tsv(&rows))?;
            }
        }
        CommandKind::Enumerate => {
            let mut words = match config.algorithm {
                Algorithm::Dictionary => {
                    let options = DictionaryOptions {
                        mode: config.mode,
                        ..DictionaryOptions::default()
                    };
                    enumerate_dictionary_bfs(&group, config.depth, &options)?
                        .0
                        .into_iter()
                        .map(|e| e.word)
                        .collect()
                }
                _ => index_search_words(group.table(), config.depth, config.mode)?,
            };
            let text = word_lines(&mut words, &group)?;
            match &config.out {
                Some(path) => std::fs::write(path, text)?,
                None => std::io::stdout().lock().write_all(text.as_bytes())?,
            }
            eprintln!("{} words", words.len());
        }
    }
    Ok(())
}
