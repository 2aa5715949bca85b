//! Decision procedures built on color-BFS: `C_{2k}`-freeness with
//! thresholds, {C12, C14}, {C10, C12} and the incremental families.
//!
//! Each color repetition runs the light search on `G[U]` and then samples
//! sources `s` uniformly with replacement. Every sampled `s` searches for a
//! cycle through itself; when `s` drew the gate color `-1` it also launches
//! the thresholded search from its heavy neighbors colored 0.

use alloc::vec::Vec;

use crate::coloring::{color_bfs, AbortMode, BfsOptions, BfsOutcome, ColorAssignment, ThresholdTable, GATE_COLOR};
use crate::error::{invalid, Error, Result};
use crate::graph::{classify_nodes, Cycle, Graph, NodeClass, NodeId};
use crate::rng::{derive_seed, derived_rng, Rng};
use crate::sim::CostModel;

use rand::Rng as _;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum LoopOrder {
    /// Color assignments outside, source samples inside.
    #[default]
    ColorsOuter,
    /// Source samples outside, a fresh color assignment per phase.
    SourcesOuter,
}

/// How each color repetition draws its colors.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "mode", rename_all = "kebab-case"))]
pub enum ColoringMode {
    #[default]
    Random,
    /// Colors `cycle[j]` with `j` (for the search whose `2k` matches the
    /// cycle length) and every node of `sources` with `-1`; the rest stays
    /// random. Not part of the algorithm; used to test threshold mechanics.
    Forced { cycle: Vec<NodeId>, sources: Vec<NodeId> },
}

/// Repetition counts, seed and execution options of a detector run.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct RunConfig {
    pub seed: u64,
    /// `c_1` in `c_1 * ceil(n^(1-1/k))` source samples per color repetition.
    pub source_scale: u64,
    /// `c_2` in `c_2 * (2k)^(2k)` color repetitions.
    pub color_scale: u64,
    /// Ceiling on color repetitions.
    pub color_cap: u64,
    pub source_repetitions: Option<u64>,
    pub color_repetitions: Option<u64>,
    pub loop_order: LoopOrder,
    pub abort_mode: AbortMode,
    pub cost_model: CostModel,
    pub coloring: ColoringMode,
    /// Refuse runs that would need more phases than this.
    pub phase_budget: Option<u64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            source_scale: 1,
            color_scale: 1,
            color_cap: 100_000,
            source_repetitions: None,
            color_repetitions: None,
            loop_order: LoopOrder::default(),
            abort_mode: AbortMode::default(),
            cost_model: CostModel::default(),
            coloring: ColoringMode::default(),
            phase_budget: None,
        }
    }
}

/// `ceil(n^((k-1)/k))`, exact.
pub fn ceil_root_power(n: usize, k: usize) -> u64 {
    if n <= 1 || k == 0 {
        return n as u64;
    }
    let target = pow_sat(n as u128, k as u32 - 1);
    let mut r = libm::ceil(libm::pow(n as f64, (k - 1) as f64 / k as f64)) as u128;
    while r > 1 && pow_sat(r - 1, k as u32) >= target {
        r -= 1;
    }
    while pow_sat(r, k as u32) < target {
        r += 1;
    }
    r as u64
}

fn pow_sat(base: u128, exp: u32) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base);
    }
    acc
}

impl RunConfig {
    pub fn with_seed(seed: u64) -> Self {
        RunConfig { seed, ..RunConfig::default() }
    }

    pub fn source_reps(&self, n: usize, k: usize) -> u64 {
        self.source_repetitions.unwrap_or_else(|| self.source_scale.saturating_mul(ceil_root_power(n, k))).max(1)
    }

    pub fn color_reps(&self, k: usize) -> u64 {
        self.color_repetitions
            .unwrap_or_else(|| {
                let full = pow_sat(2 * k as u128, 2 * k as u32);
                let scaled = (self.color_scale as u128).saturating_mul(full);
                scaled.min(self.color_cap as u128) as u64
            })
            .max(1)
    }

    fn check(&self) -> Result<()> {
        if self.source_scale == 0 || self.color_scale == 0 || self.color_cap == 0 {
            return Err(invalid!("repetition constants must be at least 1"));
        }
        if self.source_repetitions == Some(0) || self.color_repetitions == Some(0) {
            return Err(invalid!("repetition counts must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Outcome {
    Free,
    CycleFound,
}

/// The search that produced a rejection.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum PhaseKind {
    /// color-BFS from every light node colored 0 inside `G[U]`.
    Light,
    /// color-BFS from the sampled source itself.
    Source,
    /// Thresholded color-BFS from the source's heavy neighbors colored 0.
    Heavy,
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Finding {
    pub phase: PhaseKind,
    /// Half-length of the search that rejected.
    pub k: usize,
    pub color_repetition: u64,
    pub source: Option<NodeId>,
    pub rejecting_node: NodeId,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RunStats {
    pub color_repetitions: u64,
    pub sources_sampled: u64,
    pub gated_sources: u64,
    pub phases: u64,
    pub aborts: u64,
    pub simulated_rounds: u64,
}

impl RunStats {
    pub fn merge(&mut self, other: &RunStats) {
        self.color_repetitions += other.color_repetitions;
        self.sources_sampled += other.sources_sampled;
        self.gated_sources += other.gated_sources;
        self.phases += other.phases;
        self.aborts += other.aborts;
        self.simulated_rounds += other.simulated_rounds;
    }

    fn record(&mut self, out: &BfsOutcome) {
        self.phases += 1;
        self.aborts += out.trace.abort_count() as u64;
        self.simulated_rounds += out.trace.total_rounds;
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Verdict {
    pub outcome: Outcome,
    pub witness: Option<Cycle>,
    pub finding: Option<Finding>,
    pub stats: RunStats,
}

impl Verdict {
    pub fn is_free(&self) -> bool {
        self.outcome == Outcome::Free
    }

    fn free(stats: RunStats) -> Self {
        Verdict { outcome: Outcome::Free, witness: None, finding: None, stats }
    }
}

/// Heavy neighbors of `s` colored 0: the sources of the heavy phase.
pub fn heavy_sources(g: &Graph, class: &NodeClass, colors: &ColorAssignment, s: NodeId) -> Vec<NodeId> {
    g.neighbors(s).iter().copied().filter(|&w| class.is_heavy(w) && colors.get(w) == 0).collect()
}

/// Runs the heavy phase launched by `s`, whatever its color.
pub fn heavy_phase(
    g: &Graph,
    class: &NodeClass,
    colors: &ColorAssignment,
    s: NodeId,
    table: Option<&ThresholdTable>,
    abort_mode: AbortMode,
    cost_model: CostModel,
) -> Result<BfsOutcome> {
    let sources = heavy_sources(g, class, colors, s);
    let opts = BfsOptions { thresholds: table, abort_mode, participants: None, cost_model };
    color_bfs(g, colors.k(), &sources, colors, opts)
}

/// One color-BFS search of a detector: half-length and heavy-phase table.
struct Search<'a> {
    k: usize,
    table: &'a ThresholdTable,
}

struct Runner<'a> {
    g: &'a Graph,
    class: NodeClass,
    light_mask: Vec<bool>,
    searches: Vec<Search<'a>>,
    cfg: &'a RunConfig,
    stats: RunStats,
}

impl<'a> Runner<'a> {
    fn new(g: &'a Graph, class_k: usize, searches: Vec<Search<'a>>, cfg: &'a RunConfig) -> Result<Self> {
        cfg.check()?;
        let class = classify_nodes(g, class_k)?;
        let light_mask = class.light_mask();
        Ok(Runner { g, class, light_mask, searches, cfg, stats: RunStats::default() })
    }

    fn draw_colors(&self, k: usize, rng: &mut Rng) -> Result<ColorAssignment> {
        let mut colors = ColorAssignment::random(self.g.node_count(), k, true, rng);
        if let ColoringMode::Forced { cycle, sources } = &self.cfg.coloring {
            if cycle.len() == 2 * k {
                colors.force_cycle(cycle)?;
            }
            colors.force_gate(sources)?;
        }
        Ok(colors)
    }

    fn found(&self, out: BfsOutcome, phase: PhaseKind, k: usize, rep: u64, source: Option<NodeId>) -> Verdict {
        let det = out.detection.expect("caller checked");
        Verdict {
            outcome: Outcome::CycleFound,
            witness: Some(det.witness),
            finding: Some(Finding { phase, k, color_repetition: rep, source, rejecting_node: det.node }),
            stats: self.stats.clone(),
        }
    }

    fn light(&mut self, colors: &ColorAssignment, rep: u64) -> Result<Option<Verdict>> {
        let sources: Vec<NodeId> =
            (0..self.g.node_count()).filter(|&v| self.light_mask[v] && colors.get(v) == 0).collect();
        let opts = BfsOptions {
            participants: Some(&self.light_mask),
            cost_model: self.cfg.cost_model,
            ..BfsOptions::default()
        };
        let out = color_bfs(self.g, colors.k(), &sources, colors, opts)?;
        self.stats.record(&out);
        Ok(out.detection.is_some().then(|| self.found(out, PhaseKind::Light, colors.k(), rep, None)))
    }

    fn sample_source(
        &mut self,
        colors: &ColorAssignment,
        table: &ThresholdTable,
        s: NodeId,
        rep: u64,
    ) -> Result<Option<Verdict>> {
        let k = colors.k();
        let opts = BfsOptions { cost_model: self.cfg.cost_model, ..BfsOptions::default() };
        let out = color_bfs(self.g, k, &[s], colors, opts)?;
        self.stats.record(&out);
        if out.detection.is_some() {
            return Ok(Some(self.found(out, PhaseKind::Source, k, rep, Some(s))));
        }
        if colors.get(s) != GATE_COLOR {
            return Ok(None);
        }
        self.stats.gated_sources += 1;
        let out = heavy_phase(self.g, &self.class, colors, s, Some(table), self.cfg.abort_mode, self.cfg.cost_model)?;
        self.stats.record(&out);
        Ok(out.detection.is_some().then(|| self.found(out, PhaseKind::Heavy, k, rep, Some(s))))
    }

    fn check_budget(&self, color_reps: u64, source_reps: u64) -> Result<()> {
        if let Some(budget) = self.cfg.phase_budget {
            let per_rep = self.searches.len() as u64 * (1 + 2 * source_reps);
            if color_reps.saturating_mul(per_rep) > budget {
                return Err(Error::BudgetExceeded { budget });
            }
        }
        Ok(())
    }

    fn run(mut self, color_reps: u64, source_reps: u64) -> Result<Verdict> {
        self.check_budget(color_reps, source_reps)?;
        let n = self.g.node_count();
        let seed = self.cfg.seed;
        let searches = core::mem::take(&mut self.searches);
        match self.cfg.loop_order {
            LoopOrder::ColorsOuter => {
                for rep in 0..color_reps {
                    self.stats.color_repetitions += 1;
                    let mut rng = derived_rng(seed, 2 * rep);
                    let mut colorings = Vec::with_capacity(searches.len());
                    for search in &searches {
                        let colors = self.draw_colors(search.k, &mut rng)?;
                        if let Some(v) = self.light(&colors, rep)? {
                            return Ok(v);
                        }
                        colorings.push(colors);
                    }
                    let mut pick = derived_rng(seed, 2 * rep + 1);
                    for _ in 0..source_reps {
                        let s = pick.gen_range(0..n);
                        self.stats.sources_sampled += 1;
                        for (search, colors) in searches.iter().zip(&colorings) {
                            if let Some(v) = self.sample_source(colors, search.table, s, rep)? {
                                return Ok(v);
                            }
                        }
                    }
                }
            }
            LoopOrder::SourcesOuter => {
                for rep in 0..color_reps {
                    let mut rng = derived_rng(seed, 2 * rep);
                    for search in &searches {
                        let colors = self.draw_colors(search.k, &mut rng)?;
                        if let Some(v) = self.light(&colors, rep)? {
                            return Ok(v);
                        }
                    }
                }
                let mut pick = derived_rng(derive_seed(seed, u64::MAX), 0);
                for i in 0..source_reps {
                    let s = pick.gen_range(0..n);
                    self.stats.sources_sampled += 1;
                    for rep in 0..color_reps {
                        let mut rng = derived_rng(derive_seed(seed, i), rep);
                        for search in &searches {
                            let colors = self.draw_colors(search.k, &mut rng)?;
                            if let Some(v) = self.sample_source(&colors, search.table, s, rep)? {
                                return Ok(v);
                            }
                        }
                    }
                }
                self.stats.color_repetitions = color_reps;
            }
        }
        Ok(Verdict::free(self.stats))
    }
}

/// `C_{2k}`-freeness with `table` as the heavy-phase thresholds.
pub fn decide_c2k_freeness(g: &Graph, k: usize, table: &ThresholdTable, cfg: &RunConfig) -> Result<Verdict> {
    if k < 2 {
        return Err(invalid!("k must be at least 2, got {k}"));
    }
    if table.k() != k {
        return Err(invalid!("threshold table is for k = {}, detector uses k = {k}", table.k()));
    }
    let runner = Runner::new(g, k, alloc::vec![Search { k, table }], cfg)?;
    runner.run(cfg.color_reps(k), cfg.source_reps(g.node_count(), k))
}

/// {C12, C14}-freeness: light searches for both lengths with the degree
/// threshold `n^(1/7)`, then per source the 14-cycle heavy search with
/// [`ThresholdTable::c14_stage`] and the 12-cycle heavy search with all caps 1.
pub fn decide_c12_c14_freeness(g: &Graph, cfg: &RunConfig) -> Result<Verdict> {
    let t7 = ThresholdTable::c14_stage();
    let t6 = ThresholdTable::c12_stage_unit();
    let runner = Runner::new(g, 7, alloc::vec![Search { k: 7, table: &t7 }, Search { k: 6, table: &t6 }], cfg)?;
    runner.run(cfg.color_reps(7), cfg.source_reps(g.node_count(), 7))
}

/// {C10, C12}-freeness: decides `C_10` with `t5`, then `C_12` with the
/// extension `(T_5(1), ..., T_5(4), T_5(4))`.
pub fn decide_c10_c12_freeness(g: &Graph, cfg: &RunConfig, t5: &ThresholdTable) -> Result<Verdict> {
    let t6 = ThresholdTable::c12_stage_from_c10(t5)?;
    let first = decide_c2k_freeness(g, 5, t5, cfg)?;
    if !first.is_free() {
        return Ok(first);
    }
    let second_cfg = RunConfig { seed: derive_seed(cfg.seed, 1), ..cfg.clone() };
    let mut second = decide_c2k_freeness(g, 6, &t6, &second_cfg)?;
    let mut stats = first.stats;
    stats.merge(&second.stats);
    second.stats = stats;
    Ok(second)
}

/// The two incremental cycle families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Family {
    /// `{C_{4l} : l <= kmax}`.
    FourL,
    /// `{C_{4l+2} : l <= kmax}`.
    FourLPlusTwo,
}

impl Family {
    /// Half-length of the family member with index `l`.
    pub fn half_length(self, l: usize) -> usize {
        match self {
            Family::FourL => 2 * l,
            Family::FourLPlusTwo => 2 * l + 1,
        }
    }
}

/// `T(0), ..., T(len-1)` with `T(0) = 1` and `T(i) = (i+1) T(i-1)` on even
/// `i` for [`Family::FourL`] (odd `i` for [`Family::FourLPlusTwo`]),
/// `T(i) = T(i-1)` otherwise.
pub fn incremental_sequence(len: usize, family: Family) -> Vec<u64> {
    let mut t = Vec::with_capacity(len);
    for i in 0..len {
        let v = match i {
            0 => 1,
            _ => {
                let grows = match family {
                    Family::FourL => i % 2 == 0,
                    Family::FourLPlusTwo => i % 2 == 1,
                };
                let prev: u64 = t[i - 1];
                if grows {
                    prev.saturating_mul(i as u64 + 1)
                } else {
                    prev
                }
            }
        };
        t.push(v);
    }
    t
}

/// Heavy-phase table for family member `l`: half-length `k` from
/// [`Family::half_length`], caps `T(i)` at steps `i = 1..k`.
pub fn incremental_thresholds(l: usize, family: Family) -> Result<ThresholdTable> {
    if l == 0 {
        return Err(invalid!("family index must be at least 1"));
    }
    let k = family.half_length(l);
    let seq = incremental_sequence(k, family);
    let half: Vec<Option<u64>> = seq[1..].iter().map(|&t| Some(t)).collect();
    Ok(ThresholdTable::symmetric(k, &half)?.with_provenance(crate::coloring::Provenance::Builtin))
}

/// Decides the members `l = 1..=kmax` in order; the first rejection wins.
pub fn decide_family_freeness(g: &Graph, family: Family, kmax: usize, cfg: &RunConfig) -> Result<Verdict> {
    if kmax == 0 {
        return Err(invalid!("kmax must be at least 1"));
    }
    let mut stats = RunStats::default();
    for l in 1..=kmax {
        let table = incremental_thresholds(l, family)?;
        let stage_cfg = RunConfig { seed: derive_seed(cfg.seed, l as u64), ..cfg.clone() };
        let mut v = decide_c2k_freeness(g, family.half_length(l), &table, &stage_cfg)?;
        stats.merge(&v.stats);
        if !v.is_free() {
            v.stats = stats;
            return Ok(v);
        }
    }
    Ok(Verdict::free(stats))
}
