//! Index-search rendering: every node index of the tree is decoded, run
//! through the Cayley table, and, when accepted, evaluated as an orbit and
//! plotted into a hit-count canvas.

use std::fmt::Write as _;
use std::ops::Range;
use std::time::{Duration, Instant};

use num_complex::Complex64;

use crate::codec::{self, DEFAULT_MAX_DEPTH};
use crate::error::{Error, Result};
use crate::group::{GroupSpec, IndexedCayleyTable, Word};
use crate::moebius::{ComplexPoint, GeneratorSet};

/// Largest canvas accepted, in pixels.
pub const MAX_PIXELS: u64 = 1 << 24;
/// Seeds closer than this are treated as one point.
pub const SEED_TOLERANCE: f64 = 1e-12;

/// Rectangular window of the complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Viewport {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Viewport {
    /// `[−2, 4] × [−1, 3]`, wide enough for the Maskit-slice limit sets.
    pub const MASKIT_DEFAULT: Viewport = Viewport {
        x_min: -2.0,
        x_max: 4.0,
        y_min: -1.0,
        y_max: 3.0,
    };

    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        let vp = Viewport {
            x_min,
            x_max,
            y_min,
            y_max,
        };
        vp.validate()?;
        Ok(vp)
    }

    pub fn validate(&self) -> Result<()> {
        let all_finite = [self.x_min, self.x_max, self.y_min, self.y_max]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite || self.x_min >= self.x_max || self.y_min >= self.y_max {
            return Err(Error::InvalidViewport(format!(
                "[{}, {}] x [{}, {}]",
                self.x_min, self.x_max, self.y_min, self.y_max
            )));
        }
        Ok(())
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (self.x_min..=self.x_max).contains(&z.re) && (self.y_min..=self.y_max).contains(&z.im)
    }
}

impl Default for Viewport {
    fn default() -> Self {
        Viewport::MASKIT_DEFAULT
    }
}

/// Hit-count raster, row-major with the top row first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Canvas {
    width: u32,
    height: u32,
    hits: Vec<u64>,
}

impl Canvas {
    pub fn new(width: u32, height: u32) -> Result<Self> {
        let pixels = width as u64 * height as u64;
        if pixels == 0 || pixels > MAX_PIXELS {
            return Err(Error::CanvasSize { width, height });
        }
        Ok(Self {
            width,
            height,
            hits: vec![0; pixels as usize],
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn hits(&self) -> &[u64] {
        &self.hits
    }

    pub fn get(&self, x: u32, y: u32) -> u64 {
        self.hits[y as usize * self.width as usize + x as usize]
    }

    pub fn increment(&mut self, x: u32, y: u32) {
        self.hits[y as usize * self.width as usize + x as usize] += 1;
    }

    pub fn total_hits(&self) -> u64 {
        self.hits.iter().sum()
    }

    pub fn max_hits(&self) -> u64 {
        self.hits.iter().copied().max().unwrap_or(0)
    }

    /// Adds another canvas of the same size into this one.
    pub fn merge(&mut self, other: &Canvas) {
        assert_eq!((self.width, self.height), (other.width, other.height));
        for (a, b) in self.hits.iter_mut().zip(&other.hits) {
            *a += b;
        }
    }

    /// Coordinates of every pixel with at least one hit.
    pub fn lit_pixels(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        let w = self.width as usize;
        self.hits
            .iter()
            .enumerate()
            .filter(|(_, &h)| h > 0)
            .map(move |(i, _)| ((i % w) as u32, (i / w) as u32))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotOutcome {
    Plotted { x: u32, y: u32 },
    Outside,
    AtInfinity,
}

/// Drops `z` into its pixel. Points on the right or bottom edge land in the
/// last column or row.
pub fn plot(canvas: &mut Canvas, viewport: &Viewport, z: ComplexPoint) -> PlotOutcome {
    let outcome = locate(canvas.width, canvas.height, viewport, z);
    if let PlotOutcome::Plotted { x, y } = outcome {
        canvas.increment(x, y);
    }
    outcome
}

fn locate(width: u32, height: u32, viewport: &Viewport, z: ComplexPoint) -> PlotOutcome {
    let Some(z) = z.finite() else {
        return PlotOutcome::AtInfinity;
    };
    if !viewport.contains(z) {
        return PlotOutcome::Outside;
    }
    let dx = (viewport.x_max - viewport.x_min) / width as f64;
    let dy = (viewport.y_max - viewport.y_min) / height as f64;
    let x = (((z.re - viewport.x_min) / dx).floor() as u64).min(width as u64 - 1);
    let y = (((viewport.y_max - z.im) / dy).floor() as u64).min(height as u64 - 1);
    PlotOutcome::Plotted {
        x: x as u32,
        y: y as u32,
    }
}

/// `limit_set` plots only the deepest level; `tiling` plots every level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderMode {
    LimitSet,
    Tiling,
}

impl RenderMode {
    pub fn depths(&self, depth: u32) -> Range<u32> {
        match self {
            RenderMode::LimitSet => depth..depth + 1,
            RenderMode::Tiling => 1..depth + 1,
        }
    }

    /// Nodes visited per seed: `m^D` or `m + … + m^D`.
    pub fn node_count(&self, m: u8, depth: u32) -> Result<u64> {
        let counts = codec::node_counts(m, depth)?;
        Ok(match self {
            RenderMode::LimitSet => counts.leaves,
            RenderMode::Tiling => counts.total,
        })
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            RenderMode::LimitSet => "limit_set",
            RenderMode::Tiling => "tiling",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SeedPolicy {
    GeneratorFixedPoints,
    CommutatorFixedPoint,
    Explicit(Vec<ComplexPoint>),
}

/// Starting points for the orbits.
///
/// Infinity stays in the list: it is a legitimate seed and leaves the point
/// at infinity on its first finite-valued application.
pub fn collect_seed_points(gens: &GeneratorSet, policy: &SeedPolicy) -> Result<Vec<ComplexPoint>> {
    let candidates = match policy {
        SeedPolicy::GeneratorFixedPoints => {
            let mut all = Vec::new();
            for g in gens.maps() {
                all.extend(g.fixed_points()?);
            }
            all
        }
        SeedPolicy::CommutatorFixedPoint => gens.commutator()?.fixed_points()?,
        SeedPolicy::Explicit(points) => {
            return Ok(points
                .iter()
                .map(|z| match z {
                    ComplexPoint::Finite(z) => ComplexPoint::from_complex(*z),
                    ComplexPoint::Infinity => ComplexPoint::Infinity,
                })
                .collect())
        }
    };
    let mut seeds: Vec<ComplexPoint> = Vec::with_capacity(candidates.len());
    for z in candidates {
        if !seeds.iter().any(|s| s.distance(&z) <= SEED_TOLERANCE) {
            seeds.push(z);
        }
    }
    Ok(seeds)
}

/// Applies the letters of `digits` to `seed`, rightmost letter first.
#[inline]
pub fn word_value(digits: &[u8], gens: &GeneratorSet, seed: ComplexPoint) -> ComplexPoint {
    digits
        .iter()
        .rev()
        .fold(seed, |z, &digit| gens.get(digit).apply(z))
}

/// Counters gathered during a render.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RenderStats {
    pub words_tested: u64,
    pub words_accepted: u64,
    pub words_rejected: u64,
    pub points_plotted: u64,
    pub points_outside: u64,
    pub points_at_infinity: u64,
    pub wall_time: Duration,
    /// Longest word buffer held at once by any worker.
    pub peak_word_buffer_len: usize,
}

impl RenderStats {
    pub fn record(&mut self, outcome: PlotOutcome) {
        match outcome {
            PlotOutcome::Plotted { .. } => self.points_plotted += 1,
            PlotOutcome::Outside => self.points_outside += 1,
            PlotOutcome::AtInfinity => self.points_at_infinity += 1,
        }
    }

    /// Sums counters; keeps the larger buffer and the longer wall time.
    pub fn merge(&mut self, other: &RenderStats) {
        self.words_tested += other.words_tested;
        self.words_accepted += other.words_accepted;
        self.words_rejected += other.words_rejected;
        self.points_plotted += other.points_plotted;
        self.points_outside += other.points_outside;
        self.points_at_infinity += other.points_at_infinity;
        self.wall_time = self.wall_time.max(other.wall_time);
        self.peak_word_buffer_len = self.peak_word_buffer_len.max(other.peak_word_buffer_len);
    }

    /// Share of evaluated points that landed inside the viewport.
    pub fn inside_fraction(&self) -> f64 {
        let evaluated = self.points_plotted + self.points_outside + self.points_at_infinity;
        if evaluated == 0 {
            0.0
        } else {
            self.points_plotted as f64 / evaluated as f64
        }
    }

    /// `key<TAB>value` lines.
    pub fn to_report(&self) -> String {
        let mut out = String::new();
        let rows: [(&str, String); 8] = [
            ("words_tested", self.words_tested.to_string()),
            ("words_accepted", self.words_accepted.to_string()),
            ("words_rejected", self.words_rejected.to_string()),
            ("points_plotted", self.points_plotted.to_string()),
            ("points_outside", self.points_outside.to_string()),
            ("points_at_infinity", self.points_at_infinity.to_string()),
            (
                "peak_word_buffer_len",
                self.peak_word_buffer_len.to_string(),
            ),
            (
                "wall_time_ms",
                format!("{:.3}", self.wall_time.as_secs_f64() * 1e3),
            ),
        ];
        for (key, value) in rows {
            let _ = writeln!(out, "{key}\t{value}");
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct RenderConfig {
    pub group: GroupSpec,
    pub depth: u32,
    pub mode: RenderMode,
    pub seeds: SeedPolicy,
    pub viewport: Viewport,
    pub width: u32,
    pub height: u32,
    /// Worker threads; the canvas does not depend on this.
    pub workers: usize,
    pub max_depth: u32,
}

impl RenderConfig {
    /// Limit-set render of `group` at `depth` with the default seeds, viewport and an 800×600 canvas.
    pub fn new(group: GroupSpec, depth: u32) -> Self {
        Self {
            group,
            depth,
            mode: RenderMode::LimitSet,
            seeds: SeedPolicy::GeneratorFixedPoints,
            viewport: Viewport::MASKIT_DEFAULT,
            width: 800,
            height: 600,
            workers: 1,
            max_depth: DEFAULT_MAX_DEPTH,
        }
    }

    fn generators(&self) -> Result<&GeneratorSet> {
        self.group
            .generators()
            .ok_or_else(|| Error::MissingGenerators(self.group.name.clone()))
    }

    pub fn validate(&self) -> Result<()> {
        self.generators()?;
        if self.depth == 0 || self.depth > self.max_depth {
            return Err(Error::InvalidDepth(self.depth));
        }
        self.mode.node_count(self.group.m(), self.depth)?;
        self.viewport.validate()?;
        let pixels = self.width as u64 * self.height as u64;
        if pixels == 0 || pixels > MAX_PIXELS {
            return Err(Error::CanvasSize {
                width: self.width,
                height: self.height,
            });
        }
        Ok(())
    }
}

/// Calls `visit(index, digits, final_state)` for every accepted node with an
/// index in `range` on level `depth`. Returns `(tested, accepted)`.
///
/// `buf` holds the decoded word and must be `depth` long; nothing else is allocated.
#[inline]
pub fn scan_level(
    table: &IndexedCayleyTable,
    range: Range<u64>,
    buf: &mut [u8],
    mut visit: impl FnMut(u64, &[u8], u8),
) -> (u64, u64) {
    let m = table.m();
    let mut accepted = 0;
    let tested = range.end.saturating_sub(range.start);
    for n in range {
        codec::decode_into(n, m, buf);
        let state = table.advance(0, buf.iter().rev().copied());
        if state != 0 {
            accepted += 1;
            visit(n, buf, state);
        }
    }
    (tested, accepted)
}

/// Accepted words found by the index search, level by level in index order.
pub fn index_search_words(
    table: &IndexedCayleyTable,
    depth: u32,
    mode: RenderMode,
) -> Result<Vec<Word>> {
    mode.node_count(table.m(), depth)?;
    let mut words = Vec::new();
    for d in mode.depths(depth) {
        let leaves = codec::leaf_count(table.m(), d)?;
        let mut buf = vec![0u8; d as usize];
        scan_level(table, 0..leaves, &mut buf, |_, digits, _| {
            words.push(Word::from(digits))
        });
    }
    Ok(words)
}

fn chunk(len: u64, workers: usize, w: usize) -> Range<u64> {
    let bound = |k: usize| ((len as u128 * k as u128) / workers as u128) as u64;
    bound(w)..bound(w + 1)
}

struct Job<'a> {
    table: &'a IndexedCayleyTable,
    gens: &'a GeneratorSet,
    seeds: &'a [ComplexPoint],
    depths: Range<u32>,
    viewport: Viewport,
    width: u32,
    height: u32,
    workers: usize,
}

impl Job<'_> {
    fn run(&self, worker: usize) -> Result<(Canvas, RenderStats)> {
        let mut canvas = Canvas::new(self.width, self.height)?;
        let mut stats = RenderStats::default();
        let m = self.table.m();
        let mut buf = Vec::with_capacity(self.depths.end as usize);
        for &seed in self.seeds {
            for d in self.depths.clone() {
                buf.resize(d as usize, 0);
                stats.peak_word_buffer_len = stats.peak_word_buffer_len.max(buf.len());
                let range = chunk(codec::leaf_count(m, d)?, self.workers, worker);
                let (tested, accepted) = scan_level(self.table, range, &mut buf, |_, digits, _| {
                    let z = word_value(digits, self.gens, seed);
                    stats.record(plot(&mut canvas, &self.viewport, z));
                });
                stats.words_tested += tested;
                stats.words_accepted += accepted;
                stats.words_rejected += tested - accepted;
            }
        }
        Ok((canvas, stats))
    }
}

/// Renders the group's limit set (or tiling) by scanning node indexes.
///
/// Each worker scans a fixed slice of every level into a private canvas; the
/// canvases are summed at the end, so the result is independent of `workers`.
pub fn render_index_search(config: &RenderConfig) -> Result<(Canvas, RenderStats)> {
    config.validate()?;
    let started = Instant::now();
    let gens = config.generators()?;
    let seeds = collect_seed_points(gens, &config.seeds)?;
    let workers = config.workers.max(1);
    let job = Job {
        table: config.group.table(),
        gens,
        seeds: &seeds,
        depths: config.mode.depths(config.depth),
        viewport: config.viewport,
        width: config.width,
        height: config.height,
        workers,
    };

    let parts: Vec<Result<(Canvas, RenderStats)>> = if workers == 1 {
        vec![job.run(0)]
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    let job = &job;
                    scope.spawn(move || job.run(w))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("render worker panicked"))
                .collect()
        })
    };

    let mut canvas = Canvas::new(config.width, config.height)?;
    let mut stats = RenderStats::default();
    for part in parts {
        let (c, s) = part?;
        canvas.merge(&c);
        stats.merge(&s);
    }
    stats.wall_time = started.elapsed();
    Ok((canvas, stats))
}

/// Plots precomputed orbit values, e.g. those carried by a stored dictionary.
pub fn plot_values<'a>(
    canvas: &mut Canvas,
    viewport: &Viewport,
    values: impl IntoIterator<Item = &'a ComplexPoint>,
    stats: &mut RenderStats,
) {
    for &z in values {
        stats.record(plot(canvas, viewport, z));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::builtin_group;

    fn maskit(mu: Complex64) -> GeneratorSet {
        GeneratorSet::maskit(mu).unwrap()
    }

    fn torus_config(depth: u32, mode: RenderMode) -> RenderConfig {
        let group = builtin_group("once_punctured_torus")
            .unwrap()
            .with_generators(maskit(Complex64::new(-0.097, 1.838)))
            .unwrap();
        let mut config = RenderConfig::new(group, depth);
        config.mode = mode;
        config.seeds = SeedPolicy::Explicit(vec![ComplexPoint::new(0.0, 0.0)]);
        config
    }

    #[test]
    fn plot_center_and_edges() {
        let vp = Viewport::new(-1.0, 1.0, -1.0, 1.0).unwrap();
        let mut canvas = Canvas::new(100, 100).unwrap();
        assert_eq!(
            plot(&mut canvas, &vp, ComplexPoint::new(0.0, 0.0)),
            PlotOutcome::Plotted { x: 50, y: 50 }
        );
        assert_eq!(
            plot(&mut canvas, &vp, ComplexPoint::Infinity),
            PlotOutcome::AtInfinity
        );
        assert_eq!(
            plot(&mut canvas, &vp, ComplexPoint::new(2.0, 0.0)),
            PlotOutcome::Outside
        );
        assert_eq!(
            plot(&mut canvas, &vp, ComplexPoint::new(1.0, -1.0)),
            PlotOutcome::Plotted { x: 99, y: 99 }
        );
        assert_eq!(
            plot(&mut canvas, &vp, ComplexPoint::new(-1.0, 1.0)),
            PlotOutcome::Plotted { x: 0, y: 0 }
        );
        assert_eq!(canvas.total_hits(), 3);
        assert_eq!(canvas.get(50, 50), 1);
    }

    #[test]
    fn bad_viewport_and_canvas() {
        assert!(Viewport::new(1.0, 1.0, 0.0, 1.0).is_err());
        assert!(Viewport::new(0.0, 1.0, 0.0, f64::NAN).is_err());
        assert!(Canvas::new(0, 10).is_err());
        assert!(Canvas::new(1 << 13, 1 << 13).is_err());
    }

    #[test]
    fn seeds_at_two_i() {
        let seeds = collect_seed_points(
            &maskit(Complex64::new(0.0, 2.0)),
            &SeedPolicy::GeneratorFixedPoints,
        )
        .unwrap();
        assert!(seeds
            .iter()
            .any(|s| s.distance(&ComplexPoint::new(0.0, 1.0)) < 1e-12));
        assert!(seeds.contains(&ComplexPoint::Infinity));
        // a and A share i, b and B share infinity
        assert_eq!(seeds.len(), 2);
    }

    #[test]
    fn explicit_seeds_pass_through() {
        let gens = maskit(Complex64::new(0.0, 2.0));
        let seeds = collect_seed_points(
            &gens,
            &SeedPolicy::Explicit(vec![ComplexPoint::new(0.0, 0.0)]),
        )
        .unwrap();
        assert_eq!(seeds, vec![ComplexPoint::new(0.0, 0.0)]);
    }

    #[test]
    fn commutator_seed_residual() {
        let gens = maskit(Complex64::new(-0.097, 1.838));
        let seeds = collect_seed_points(&gens, &SeedPolicy::CommutatorFixedPoint).unwrap();
        assert!(!seeds.is_empty());
        let k = gens.commutator().unwrap();
        for s in seeds {
            assert!(k.apply(s).distance(&s) <= 1e-9);
        }
    }

    #[test]
    fn word_value_examples() {
        let gens = maskit(Complex64::new(0.3, 1.2));
        let zero = ComplexPoint::new(0.0, 0.0);
        assert_eq!(word_value(&[2], &gens, zero), ComplexPoint::new(2.0, 0.0));
        assert_eq!(
            word_value(&[2, 2], &gens, zero),
            ComplexPoint::new(4.0, 0.0)
        );
        let seed = ComplexPoint::new(0.25, 0.5);
        assert!(word_value(&[1, 3], &gens, seed).distance(&seed) < 1e-12);
        // abA = a(b(A(z)))
        let expected = gens
            .get(1)
            .apply(gens.get(2).apply(gens.get(3).apply(seed)));
        assert_eq!(word_value(&[1, 2, 3], &gens, seed), expected);
    }

    #[test]
    fn render_counts_small() {
        let (_, stats) = render_index_search(&torus_config(2, RenderMode::LimitSet)).unwrap();
        assert_eq!((stats.words_tested, stats.words_accepted), (16, 12));
        assert_eq!(stats.words_rejected, 4);
        let (_, stats) = render_index_search(&torus_config(1, RenderMode::Tiling)).unwrap();
        assert_eq!((stats.words_tested, stats.words_accepted), (4, 4));
        let (_, stats) = render_index_search(&torus_config(3, RenderMode::Tiling)).unwrap();
        assert_eq!((stats.words_tested, stats.words_accepted), (84, 52));
        assert_eq!(stats.peak_word_buffer_len, 3);
    }

    #[test]
    fn render_needs_generators() {
        let config = RenderConfig::new(builtin_group("klein_four").unwrap(), 3);
        assert!(matches!(
            render_index_search(&config),
            Err(Error::MissingGenerators(_))
        ));
        let mut config = torus_config(21, RenderMode::LimitSet);
        assert!(matches!(config.validate(), Err(Error::InvalidDepth(21))));
        config.depth = 0;
        assert!(config.validate().is_err());
    }

    #[test]
    fn chunks_cover_range() {
        for workers in 1..8 {
            let mut next = 0;
            for w in 0..workers {
                let r = chunk(1000, workers, w);
                assert_eq!(r.start, next);
                next = r.end;
            }
            assert_eq!(next, 1000);
        }
    }
}
