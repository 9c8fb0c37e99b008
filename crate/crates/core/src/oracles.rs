//! Baselines for the index search: the stored-dictionary breadth-first
//! enumerator and the random-walk renderer. Both exist for equivalence tests
//! and benchmarks.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::group::{GroupSpec, Word};
use crate::moebius::{ComplexPoint, GeneratorSet};
use crate::render::{self, Canvas, RenderMode, RenderStats, Viewport};

/// Storage ceiling for the dictionary, in digits (one byte each).
pub const DEFAULT_STORAGE_BUDGET: u64 = 1 << 30;
/// Walk steps discarded before plotting starts.
pub const DEFAULT_BURN_IN: u64 = 50;

/// A stored word together with its acceptance state and, optionally, its
/// orbit value for every seed.
#[derive(Debug, Clone, PartialEq)]
pub struct DictionaryEntry {
    pub word: Word,
    pub state: u8,
    pub values: Option<Vec<ComplexPoint>>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MemoryCounters {
    pub peak_words: u64,
    pub peak_digits: u64,
}

#[derive(Debug, Clone)]
pub struct DictionaryOptions<'a> {
    pub mode: RenderMode,
    pub storage_budget: u64,
    /// When set, each entry carries the orbit values of these seeds.
    pub orbit: Option<(&'a GeneratorSet, &'a [ComplexPoint])>,
}

impl Default for DictionaryOptions<'_> {
    fn default() -> Self {
        Self {
            mode: RenderMode::LimitSet,
            storage_budget: DEFAULT_STORAGE_BUDGET,
            orbit: None,
        }
    }
}

struct Ledger {
    words: u64,
    digits: u64,
    peak: MemoryCounters,
    budget: u64,
}

impl Ledger {
    fn add(&mut self, len: usize, depth: u32) -> Result<()> {
        self.words += 1;
        self.digits += len as u64;
        if self.digits > self.budget {
            return Err(Error::StorageBudget {
                depth,
                budget: self.budget,
            });
        }
        self.peak.peak_words = self.peak.peak_words.max(self.words);
        self.peak.peak_digits = self.peak.peak_digits.max(self.digits);
        Ok(())
    }

    fn drop_level(&mut self, level: &[DictionaryEntry]) {
        self.words -= level.len() as u64;
        self.digits -= level.iter().map(|e| e.word.len() as u64).sum::<u64>();
    }
}

/// Builds the pruned tree level by level, keeping every word in memory.
///
/// Level `d + 1` extends each stored level-`d` word on the left (the letter
/// applied last) by every digit whose transition does not crash. In
/// limit-set mode a level is released once its children are stored; tiling
/// mode keeps them all.
pub fn enumerate_dictionary_bfs(
    group: &GroupSpec,
    depth: u32,
    options: &DictionaryOptions<'_>,
) -> Result<(Vec<DictionaryEntry>, MemoryCounters)> {
    if depth == 0 {
        return Err(Error::InvalidDepth(depth));
    }
    let table = group.table();
    let m = table.m();
    let mut ledger = Ledger {
        words: 0,
        digits: 0,
        peak: MemoryCounters::default(),
        budget: options.storage_budget,
    };
    let orbit = options.orbit;

    let mut level = Vec::new();
    for digit in 1..=m {
        let state = table.get(0, digit);
        if state == 0 {
            continue;
        }
        let values = orbit.map(|(gens, seeds)| {
            let g = gens.get(digit);
            seeds.iter().map(|&z| g.apply(z)).collect()
        });
        ledger.add(1, 1)?;
        level.push(DictionaryEntry {
            word: Word::new(vec![digit]),
            state,
            values,
        });
    }

    let mut kept = Vec::new();
    for d in 2..=depth {
        let mut next = Vec::new();
        for entry in &level {
            for digit in 1..=m {
                let state = table.get(entry.state, digit);
                if state == 0 {
                    continue;
                }
                ledger.add(d as usize, d)?;
                let mut digits = Vec::with_capacity(d as usize);
                digits.push(digit);
                digits.extend_from_slice(entry.word.digits());
                let values = match (orbit, &entry.values) {
                    (Some((gens, _)), Some(values)) => {
                        let g = gens.get(digit);
                        Some(values.iter().map(|&z| g.apply(z)).collect())
                    }
                    _ => None,
                };
                next.push(DictionaryEntry {
                    word: Word::new(digits),
                    state,
                    values,
                });
            }
        }
        match options.mode {
            RenderMode::Tiling => kept.append(&mut level),
            RenderMode::LimitSet => ledger.drop_level(&level),
        }
        level = next;
    }
    kept.append(&mut level);
    Ok((kept, ledger.peak))
}

/// The SplitMix64 generator: a Weyl sequence with increment
/// `0x9E3779B97F4A7C15` passed through the finalizer
/// `z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27; z *= 0x94D049BB133111EB; z ^= z >> 31`.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Value in `0..bound` by the multiply-high reduction `(x · bound) >> 64`.
    pub fn below(&mut self, bound: u64) -> u64 {
        ((self.next_u64() as u128 * bound as u128) >> 64) as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkConfig {
    pub steps: u64,
    pub burn_in: u64,
    pub rng_seed: u64,
    pub start: ComplexPoint,
}

impl WalkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::InvalidWalk("steps must be positive".into()));
        }
        if self.burn_in >= self.steps {
            return Err(Error::InvalidWalk(format!(
                "burn-in {} must be below steps {}",
                self.burn_in, self.steps
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct WalkOutcome {
    pub canvas: Canvas,
    pub stats: RenderStats,
    /// Digits in the order they were applied, when requested.
    pub log: Option<Vec<u8>>,
}

/// Random-walk rendering: one ever-growing orbit.
///
/// Each step draws a digit uniformly among the `m` generators, minus the
/// inverse of the previous digit, applies it, and plots the point once the
/// burn-in has passed. The walk is a pure function of `walk.rng_seed`.
pub fn render_probabilistic(
    group: &GroupSpec,
    walk: &WalkConfig,
    viewport: &Viewport,
    width: u32,
    height: u32,
    record_log: bool,
) -> Result<WalkOutcome> {
    walk.validate()?;
    viewport.validate()?;
    let gens = group
        .generators()
        .ok_or_else(|| Error::MissingGenerators(group.name.clone()))?;
    let started = Instant::now();
    let mut canvas = Canvas::new(width, height)?;
    let mut stats = RenderStats {
        peak_word_buffer_len: 1,
        ..RenderStats::default()
    };
    let mut log = record_log.then(|| Vec::with_capacity(walk.steps as usize));
    let mut rng = SplitMix64::new(walk.rng_seed);
    let m = gens.len() as u8;
    let mut candidates = Vec::with_capacity(m as usize);
    let mut previous: Option<u8> = None;
    let mut z = walk.start;

    for step in 0..walk.steps {
        let banned = previous.map_or(0, |p| gens.inverse_of(p));
        candidates.clear();
        candidates.extend((1..=m).filter(|&d| d != banned));
        let digit = candidates[rng.below(candidates.len() as u64) as usize];
        z = gens.get(digit).apply(z);
        previous = Some(digit);
        if let Some(log) = log.as_mut() {
            log.push(digit);
        }
        stats.words_tested += 1;
        stats.words_accepted += 1;
        if step >= walk.burn_in {
            stats.record(render::plot(&mut canvas, viewport, z));
        }
    }
    stats.wall_time = started.elapsed();
    Ok(WalkOutcome { canvas, stats, log })
}

/// One line of the benchmark report.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRow {
    pub algorithm: &'static str,
    /// Depth for tree algorithms, steps for the walk.
    pub size: u64,
    pub words: u64,
    pub peak_stored_digits: u64,
    pub wall_time: Duration,
}

/// Times the lexical work of each algorithm: enumerating accepted words
/// (index search, dictionary) or taking walk steps (random).
pub fn run_benchmark(
    group: &GroupSpec,
    depth: u32,
    mode: RenderMode,
    walk: Option<&WalkConfig>,
) -> Result<Vec<BenchmarkRow>> {
    let mut rows = Vec::new();

    let started = Instant::now();
    let table = group.table();
    let mut accepted = 0;
    for d in mode.depths(depth) {
        let leaves = crate::codec::leaf_count(table.m(), d)?;
        let mut buf = vec![0u8; d as usize];
        accepted += render::scan_level(table, 0..leaves, &mut buf, |_, _, _| {}).1;
    }
    rows.push(BenchmarkRow {
        algorithm: "index",
        size: depth as u64,
        words: accepted,
        peak_stored_digits: depth as u64,
        wall_time: started.elapsed(),
    });

    let started = Instant::now();
    let options = DictionaryOptions {
        mode,
        ..DictionaryOptions::default()
    };
    let (entries, memory) = enumerate_dictionary_bfs(group, depth, &options)?;
    rows.push(BenchmarkRow {
        algorithm: "dictionary",
        size: depth as u64,
        words: entries.len() as u64,
        peak_stored_digits: memory.peak_digits,
        wall_time: started.elapsed(),
    });
    drop(entries);

    if let Some(walk) = walk {
        let outcome = render_probabilistic(group, walk, &Viewport::default(), 256, 256, false)?;
        rows.push(BenchmarkRow {
            algorithm: "random",
            size: walk.steps,
            words: outcome.stats.words_tested,
            peak_stored_digits: 1,
            wall_time: outcome.stats.wall_time,
        });
    }
    Ok(rows)
}

/// Aligned plain-text table.
pub fn format_benchmark_table(rows: &[BenchmarkRow]) -> String {
    let mut out = format!(
        "{:<12} {:>12} {:>14} {:>20} {:>14}\n",
        "algorithm", "depth/steps", "words", "peak stored digits", "wall time ms"
    );
    for row in rows {
        let _ = writeln!(
            out,
            "{:<12} {:>12} {:>14} {:>20} {:>14.3}",
            row.algorithm,
            row.size,
            row.words,
            row.peak_stored_digits,
            row.wall_time.as_secs_f64() * 1e3
        );
    }
    out
}

/// One tab-separated line per row, after a header line.
pub fn format_benchmark_tsv(rows: &[BenchmarkRow]) -> String {
    let mut out =
        String::from("algorithm\tdepth_or_steps\twords\tpeak_stored_digits\twall_time_ms\n");
    for row in rows {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{:.3}",
            row.algorithm,
            row.size,
            row.words,
            row.peak_stored_digits,
            row.wall_time.as_secs_f64() * 1e3
        );
    }
    out
}
