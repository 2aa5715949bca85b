//! Quantities the correctness arguments are phrased in, made computable:
//! packings of well-colored paths, bad neighbor sets around a cycle, and the
//! congestion at the probe node of an adversarial instance.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng as _;

use crate::adversarial::GkInstance;
use crate::coloring::{sample_color, AbortMode, Color, ColorAssignment, Lane, ThresholdTable, GATE_COLOR};
use crate::detectors::heavy_phase;
use crate::error::{invalid, Result};
use crate::flow::internally_disjoint_paths;
use crate::graph::{classify_nodes, Cycle, Graph, NodeId};
use crate::oracle::{self, OracleLimits};
use crate::rng::{derive_seed, rng_from_seed, Rng};
use crate::sim::CostModel;
use crate::stats::{binomial_cdf, powu, Moments};

/// A maximum family of internally disjoint well-colored paths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathPacking {
    pub rho: usize,
    /// Each path is `s, w_0, ..., w_{i-1}, target`.
    pub paths: Vec<Vec<NodeId>>,
}

/// Arcs of the color-layered digraph from `s` to `target`, skipping
/// `forbidden` nodes.
fn layered_arcs(
    g: &Graph,
    colors: &ColorAssignment,
    s: NodeId,
    target: NodeId,
    i: usize,
    forbidden: Option<&[bool]>,
) -> Vec<(NodeId, NodeId)> {
    let allowed = |v: NodeId| forbidden.is_none_or(|f| !f[v]);
    let mut arcs = Vec::new();
    for &w in g.neighbors(s) {
        if colors.get(w) == 0 && w != target && allowed(w) {
            arcs.push((s, w));
        }
    }
    for v in 0..g.node_count() {
        let c = colors.get(v);
        if c < 0 || c as usize >= i || v == s || v == target || !allowed(v) {
            continue;
        }
        for &w in g.neighbors(v) {
            if c as usize + 1 == i {
                if w == target {
                    arcs.push((v, w));
                }
            } else if colors.get(w) == c + 1 && w != s && w != target && allowed(w) {
                arcs.push((v, w));
            }
        }
    }
    arcs
}

fn check_endpoints(colors: &ColorAssignment, s: NodeId, target: NodeId, i: usize) -> Result<()> {
    if i == 0 {
        return Err(invalid!("path index must be at least 1"));
    }
    if colors.get(s) != GATE_COLOR {
        return Err(invalid!("source {s} is not colored -1"));
    }
    if colors.get(target) != i as Color {
        return Err(invalid!("target {target} is not colored {i}"));
    }
    Ok(())
}

/// `rho`: the maximum number of well-colored paths `s, w_0, ..., w_{i-1},
/// target` (with `w_j` colored `j`) sharing only `s` and `target`.
pub fn max_disjoint_wellcolored_paths(
    g: &Graph,
    colors: &ColorAssignment,
    s: NodeId,
    target: NodeId,
    i: usize,
) -> Result<PathPacking> {
    max_disjoint_wellcolored_paths_avoiding(g, colors, s, target, i, None)
}

/// As [`max_disjoint_wellcolored_paths`], never using a node marked in
/// `forbidden`.
pub fn max_disjoint_wellcolored_paths_avoiding(
    g: &Graph,
    colors: &ColorAssignment,
    s: NodeId,
    target: NodeId,
    i: usize,
    forbidden: Option<&[bool]>,
) -> Result<PathPacking> {
    check_endpoints(colors, s, target, i)?;
    let arcs = layered_arcs(g, colors, s, target, i, forbidden);
    let paths = internally_disjoint_paths(g.node_count(), &arcs, s, target);
    Ok(PathPacking { rho: paths.len(), paths })
}

/// Picks, for each of `starts` in order, one well-colored path to `target`
/// disjoint from `avoid` and from the paths picked before. `None` when some
/// start has no such path.
pub fn extend_disjoint_paths(
    g: &Graph,
    colors: &ColorAssignment,
    starts: &[NodeId],
    target: NodeId,
    i: usize,
    avoid: &[NodeId],
) -> Result<Option<Vec<Vec<NodeId>>>> {
    let mut forbidden = vec![false; g.node_count()];
    for &u in avoid {
        forbidden[u] = true;
    }
    let mut chosen = Vec::with_capacity(starts.len());
    for &s in starts {
        let packing = max_disjoint_wellcolored_paths_avoiding(g, colors, s, target, i, Some(&forbidden))?;
        let Some(path) = packing.paths.into_iter().next() else { return Ok(None) };
        for &v in &path[1..path.len() - 1] {
            forbidden[v] = true;
        }
        chosen.push(path);
    }
    Ok(Some(chosen))
}

/// One instrumented heavy phase compared against `rho * T(i-1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeSample {
    pub source: NodeId,
    pub probe: NodeId,
    pub i: usize,
    /// Distinct identifiers the probe received from color `i-1`.
    pub received: usize,
    pub rho: usize,
    /// `rho * T(i-1)` with `T(0) = 1`; `None` for an unbounded cap.
    pub bound: Option<u64>,
}

impl ProbeSample {
    pub fn holds(&self) -> bool {
        self.bound.is_none_or(|b| self.received as u64 <= b)
    }
}

/// Runs the heavy phase of `s` under `table` and records what the probe
/// colored `i` received. The bound assumes nondecreasing caps.
pub fn probe_congestion(
    g: &Graph,
    colors: &ColorAssignment,
    s: NodeId,
    probe: NodeId,
    i: usize,
    table: &ThresholdTable,
    abort_mode: AbortMode,
) -> Result<ProbeSample> {
    let k = colors.k();
    if i == 0 || i > k {
        return Err(invalid!("probe color {i} outside 1..={k}"));
    }
    let class = classify_nodes(g, k)?;
    let out = heavy_phase(g, &class, colors, s, Some(table), abort_mode, CostModel::default())?;
    let received = out.received_count(probe, Lane::Forward);
    let rho = max_disjoint_wellcolored_paths(g, colors, s, probe, i)?.rho;
    let prev = if i == 1 { Some(1) } else { table.cap(i as Color - 1) };
    let bound = prev.map(|t| t.saturating_mul(rho as u64));
    Ok(ProbeSample { source: s, probe, i, received, rho, bound })
}

/// `f(i)` for the {C12, C14} bad sets.
pub const BAD_SET_F: [u64; 6] = crate::coloring::C12_C14_MULTIPLIERS;

/// Bad neighbors of `u_0` on both sides of a well-colored 14-cycle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BadSetReport {
    pub u0: NodeId,
    pub deg_u0: usize,
    pub f: [u64; 6],
    /// Neighbors of `u_0` colored -1 on no 12- and no 14-cycle.
    pub candidates: Vec<NodeId>,
    /// `i -> B(i)` for `i` in `1..=6` and `8..=13`.
    pub sets: BTreeMap<usize, Vec<NodeId>>,
    /// The cycle is colored `u_j <- j` and `u_0` has maximum degree on it.
    pub preconditions: bool,
}

/// Result of one bound of the bad-set analysis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundCheck {
    pub name: &'static str,
    pub side: usize,
    pub size: usize,
    pub holds: bool,
}

impl BadSetReport {
    pub fn set(&self, i: usize) -> &[NodeId] {
        self.sets.get(&i).map_or(&[], |v| v.as_slice())
    }

    fn union_of(&self, range: impl Iterator<Item = usize>) -> BTreeSet<NodeId> {
        range.flat_map(|i| self.set(i).iter().copied()).collect()
    }

    /// `|B(1) u ... u B(6)|`.
    pub fn forward_union(&self) -> usize {
        self.union_of(1..=6).len()
    }

    /// Bounds for `i` in `1..=6` and their mirrors `14 - i`.
    pub fn checks(&self) -> Vec<BoundCheck> {
        let d = self.deg_u0;
        let mut out = Vec::new();
        for (side, base) in [(0usize, 0usize), (1, 14)] {
            let at = |i: usize| if side == 0 { i } else { base - i };
            let size = |i: usize| self.set(at(i)).len();
            out.push(BoundCheck { name: "B(1) <= deg/4", side, size: size(1), holds: 4 * size(1) <= d });
            out.push(BoundCheck { name: "B(2) <= deg/9 + 2", side, size: size(2), holds: 9 * size(2) <= d + 18 });
            out.push(BoundCheck { name: "B(3) <= deg/8", side, size: size(3), holds: 8 * size(3) <= d });
            out.push(BoundCheck { name: "B(4) <= 1", side, size: size(4), holds: size(4) <= 1 });
            out.push(BoundCheck { name: "B(5) empty", side, size: size(5), holds: size(5) == 0 });
            out.push(BoundCheck { name: "B(6) empty", side, size: size(6), holds: size(6) == 0 });
            let u = if side == 0 { self.union_of(1..=6) } else { self.union_of(8..=13) };
            out.push(BoundCheck {
                name: "union <= 35/72 deg + 3",
                side,
                size: u.len(),
                holds: 72 * u.len() <= 35 * d + 216,
            });
        }
        out
    }

    pub fn all_bounds_hold(&self) -> bool {
        self.checks().iter().all(|c| c.holds)
    }

    /// `|N(u_0) \ union of every B(i)|`.
    pub fn good_neighbors(&self) -> usize {
        self.deg_u0 - self.union_of((1..=6).chain(8..=13)).len()
    }

    /// `good_neighbors / deg(u_0)`; 1 when `u_0` is isolated.
    pub fn good_fraction(&self) -> f64 {
        if self.deg_u0 == 0 {
            1.0
        } else {
            self.good_neighbors() as f64 / self.deg_u0 as f64
        }
    }

    /// `good >= deg/36 - 6`, in integers.
    pub fn good_bound_holds(&self) -> bool {
        36 * self.good_neighbors() + 216 >= self.deg_u0
    }
}

/// Computes `B(i) = { s in N(u_0) : color(s) = -1, s on no 12- or 14-cycle,
/// rho_i(s) > f(i) }`, where `rho_i` counts paths to `u_i`. The mirrored
/// side `i` in `8..=13` uses the colors `c -> (14 - c) mod 14`, under which
/// the reversed cycle is well-colored.
pub fn compute_bad_sets(
    g: &Graph,
    colors: &ColorAssignment,
    cstar: &Cycle,
    f: [u64; 6],
    limits: &OracleLimits,
) -> Result<BadSetReport> {
    if cstar.len() != 14 || colors.k() != 7 {
        return Err(invalid!("bad sets are defined for a 14-cycle at k = 7"));
    }
    cstar.validate(g)?;
    let u = cstar.nodes();
    let u0 = u[0];
    let well_colored = u.iter().enumerate().all(|(j, &v)| colors.get(v) == j as Color);
    let max_deg = u.iter().all(|&v| g.degree(v) <= g.degree(u0));
    let mut candidates = Vec::new();
    for &s in g.neighbors(u0) {
        if colors.get(s) != GATE_COLOR {
            continue;
        }
        if oracle::node_in_cycle_of_length(g, s, 12, limits)? || oracle::node_in_cycle_of_length(g, s, 14, limits)? {
            continue;
        }
        candidates.push(s);
    }
    let mirrored = colors.mirrored();
    let mut sets = BTreeMap::new();
    for i in 1..=6usize {
        let mut fwd = Vec::new();
        let mut bwd = Vec::new();
        for &s in &candidates {
            if colors.get(u[i]) == i as Color
                && max_disjoint_wellcolored_paths(g, colors, s, u[i], i)?.rho as u64 > f[i - 1]
            {
                fwd.push(s);
            }
            let m = u[14 - i];
            if mirrored.get(m) == i as Color
                && max_disjoint_wellcolored_paths(g, &mirrored, s, m, i)?.rho as u64 > f[i - 1]
            {
                bwd.push(s);
            }
        }
        sets.insert(i, fwd);
        sets.insert(14 - i, bwd);
    }
    Ok(BadSetReport { u0, deg_u0: g.degree(u0), f, candidates, sets, preconditions: well_colored && max_deg })
}

/// A bundle of well-colored paths from gate neighbor `source` of `u_0` to
/// `u_target` on a 14-cycle. Paths to `u_i` with `i > 7` run along the
/// mirrored colors. With `funnel` every path shares its color-0 node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FanArm {
    pub source: usize,
    pub target: usize,
    pub paths: usize,
    pub funnel: bool,
}

/// A well-colored 14-cycle `u_j = j` with fans hanging off `u_0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FanInstance {
    pub graph: Graph,
    pub colors: ColorAssignment,
    pub cycle: Cycle,
    /// Gate neighbors of `u_0` that start arms, indexed by `FanArm::source`.
    pub sources: Vec<NodeId>,
    pub arms: Vec<FanArm>,
}

/// Builds the cycle, one gate node per distinct arm source, the arms, and
/// gate leaves on `u_0` until it has maximum degree on the cycle.
pub fn fan_instance(arms: &[FanArm]) -> Result<FanInstance> {
    let mut colors: Vec<Color> = (0..14).collect();
    let mut g = Graph::empty(14);
    for j in 0..14 {
        g.add_edge(j, (j + 1) % 14)?;
    }
    let mut node = |g: &mut Graph, c: Color| {
        colors.push(c);
        g.add_node()
    };
    let count = arms.iter().map(|a| a.source + 1).max().unwrap_or(0);
    let mut sources = Vec::with_capacity(count);
    for _ in 0..count {
        let s = node(&mut g, GATE_COLOR);
        g.add_edge(0, s)?;
        sources.push(s);
    }
    for arm in arms {
        if arm.target == 0 || arm.target == 7 || arm.target >= 14 {
            return Err(invalid!("arm target must be in 1..=13 without 7 (got {})", arm.target));
        }
        let backward = arm.target > 7;
        let len = if backward { 14 - arm.target } else { arm.target };
        let s = sources[arm.source];
        let mut shared = None;
        let paths = if arm.funnel && len == 1 { arm.paths.min(1) } else { arm.paths };
        for _ in 0..paths {
            let mut prev = s;
            for j in 0..len as Color {
                let v = match (j, shared) {
                    (0, Some(v)) if arm.funnel => v,
                    _ => {
                        let c = if backward && j > 0 { 14 - j } else { j };
                        let v = node(&mut g, c);
                        g.add_edge(prev, v)?;
                        if j == 0 {
                            shared = Some(v);
                        }
                        v
                    }
                };
                prev = v;
            }
            g.add_edge(prev, arm.target)?;
        }
    }
    while (1..14).any(|j| g.degree(j) > g.degree(0)) {
        let leaf = node(&mut g, GATE_COLOR);
        g.add_edge(0, leaf)?;
    }
    let colors = ColorAssignment::from_colors(7, true, colors)?;
    Ok(FanInstance { graph: g, colors, cycle: Cycle::new((0..14).collect())?, sources, arms: arms.to_vec() })
}

/// Random arms: up to `max_arms` bundles of up to `max_paths` paths over a
/// few sources, targets anywhere on the cycle except `u_7`.
pub fn random_fan_arms(seed: u64, max_arms: usize, max_paths: usize) -> Vec<FanArm> {
    let mut rng = rng_from_seed(seed);
    let arms = rng.gen_range(1..=max_arms.max(1));
    let sources = rng.gen_range(1..=arms);
    (0..arms)
        .map(|_| {
            let mut target = rng.gen_range(1..13);
            if target >= 7 {
                target += 1;
            }
            FanArm {
                source: rng.gen_range(0..sources),
                target,
                paths: rng.gen_range(1..=max_paths.max(1)),
                funnel: rng.gen_bool(0.2),
            }
        })
        .collect()
}

/// Palette scaling for the congestion experiments: the first
/// `randomized` nodes of every probe path draw from `{0, ..., palette-1}`
/// and the remaining ones are pinned to their correct colors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ReducedPalette {
    pub palette: usize,
    pub randomized: usize,
}

/// Per-path indicator probability `r` for an instance.
pub fn path_probability(inst: &GkInstance, reduced: Option<ReducedPalette>) -> f64 {
    match reduced {
        Some(rp) => powu(1.0 / rp.palette as f64, rp.randomized as u32),
        None => powu(1.0 / (2 * inst.k) as f64, inst.k as u32 - 3),
    }
}

/// Number of independent paths feeding the probe from one source.
pub fn paths_per_source(inst: &GkInstance, s: NodeId) -> usize {
    inst.paths.iter().filter(|p| inst.sources[p.p] == s).count()
}

/// One congestion trial.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CongestionSample {
    pub trial: u64,
    pub seed: u64,
    pub source: NodeId,
    /// Identifiers the probe received from color `k-4`, without `u_0`'s.
    pub x: u64,
}

/// Colors for one trial on `inst`: everything uniform over `{0..2k-1}`,
/// `s` set to -1 and the probe path nodes of `s` scaled per `reduced`.
fn trial_colors(
    inst: &GkInstance,
    s: NodeId,
    reduced: Option<ReducedPalette>,
    rng: &mut Rng,
) -> Result<ColorAssignment> {
    let k = inst.k;
    let n = inst.graph.node_count();
    let mut raw: Vec<Color> = (0..n).map(|_| sample_color(rng, k, false)).collect();
    if let Some(rp) = reduced {
        if rp.palette == 0 || rp.palette > 2 * k || rp.randomized > k - 3 || rp.randomized > rp.palette {
            return Err(invalid!("reduced palette {rp:?} does not fit k = {k}"));
        }
        for path in inst.paths.iter().filter(|p| inst.sources[p.p] == s) {
            let chain = path.nodes.iter().copied().chain(core::iter::once(inst.sinks[path.q]));
            for (j, v) in chain.enumerate() {
                raw[v] = if j < rp.randomized { rng.gen_range(0..rp.palette as Color) } else { j as Color };
            }
        }
    }
    raw[s] = GATE_COLOR;
    raw[inst.probe()] = k as Color - 3;
    ColorAssignment::from_colors(k, true, raw)
}

/// Runs the unthresholded heavy phase of a uniform `s in S` and counts what
/// the probe `u_{k-3}` receives.
pub fn congestion_trial(
    inst: &GkInstance,
    trial: u64,
    master_seed: u64,
    reduced: Option<ReducedPalette>,
) -> Result<CongestionSample> {
    congestion_trial_from_seed(inst, trial, derive_seed(master_seed, trial), reduced)
}

/// Replays a congestion trial from its derived seed alone.
pub fn congestion_trial_from_seed(
    inst: &GkInstance,
    trial: u64,
    seed: u64,
    reduced: Option<ReducedPalette>,
) -> Result<CongestionSample> {
    let mut rng = rng_from_seed(seed);
    let s = inst.sources[rng.gen_range(0..inst.sources.len())];
    let colors = trial_colors(inst, s, reduced, &mut rng)?;
    let class = classify_nodes(&inst.graph, inst.k)?;
    let out = heavy_phase(&inst.graph, &class, &colors, s, None, AbortMode::Full, CostModel::default())?;
    let u0 = inst.u(0);
    let x = out.received(inst.probe(), Lane::Forward).iter().filter(|&&id| id != u0).count() as u64;
    Ok(CongestionSample { trial, seed, source: s, x })
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CongestionSummary {
    pub trials: u64,
    /// Binomial parameters `(paths, r)`.
    pub paths: u64,
    pub r: f64,
    pub moments: Moments,
    pub theory_mean: f64,
    pub theory_variance: f64,
    pub threshold: u64,
    /// Empirical and theoretical `P[X <= threshold]`.
    pub empirical_le_t: f64,
    pub theory_le_t: f64,
}

/// Runs `trials` congestion trials and summarizes them against
/// `Binomial(paths, r)`.
pub fn congestion_experiment(
    inst: &GkInstance,
    threshold: u64,
    trials: u64,
    master_seed: u64,
    reduced: Option<ReducedPalette>,
) -> Result<(Vec<CongestionSample>, CongestionSummary)> {
    let samples = (0..trials).map(|t| congestion_trial(inst, t, master_seed, reduced)).collect::<Result<Vec<_>>>()?;
    let summary = summarize_congestion(inst, threshold, &samples, reduced)?;
    Ok((samples, summary))
}

pub fn summarize_congestion(
    inst: &GkInstance,
    threshold: u64,
    samples: &[CongestionSample],
    reduced: Option<ReducedPalette>,
) -> Result<CongestionSummary> {
    let paths = paths_per_source(inst, inst.sources[0]) as u64;
    let r = path_probability(inst, reduced);
    let moments: Moments = samples.iter().map(|s| s.x as f64).collect();
    let hits = samples.iter().filter(|s| s.x <= threshold).count();
    Ok(CongestionSummary {
        trials: samples.len() as u64,
        paths,
        r,
        moments,
        theory_mean: paths as f64 * r,
        theory_variance: paths as f64 * r * (1.0 - r),
        threshold,
        empirical_le_t: if samples.is_empty() { 0.0 } else { hits as f64 / samples.len() as f64 },
        theory_le_t: binomial_cdf(paths, r, threshold as i64)?,
    })
}

/// Fraction of `trials` random colorings of a length-`len` path over
/// `palette` colors that color node `j` with `j`. Returns the hit count.
pub fn path_coloring_hits(len: usize, palette: usize, trials: u64, seed: u64) -> u64 {
    let mut rng = rng_from_seed(seed);
    let mut hits = 0;
    for _ in 0..trials {
        if (0..len).all(|j| rng.gen_range(0..palette) == j) {
            hits += 1;
        }
    }
    hits
}

/// One threshold-sweep trial on `inst`.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepSample {
    pub trial: u64,
    pub seed: u64,
    pub source: NodeId,
    pub x: u64,
    pub detected: bool,
    pub rounds: u64,
}

/// Heavy phase of a uniform `s in S` with every cap equal to `cap`
/// (`None` = unbounded), under the coloring that makes `C*` well-colored
/// and `s` gate-colored; the rest is random as in [`congestion_trial`].
pub fn sweep_trial(
    inst: &GkInstance,
    cap: Option<u64>,
    trial: u64,
    master_seed: u64,
    reduced: Option<ReducedPalette>,
) -> Result<SweepSample> {
    sweep_trial_from_seed(inst, cap, trial, derive_seed(master_seed, trial), reduced)
}

/// Replays a sweep trial from its derived seed alone.
pub fn sweep_trial_from_seed(
    inst: &GkInstance,
    cap: Option<u64>,
    trial: u64,
    seed: u64,
    reduced: Option<ReducedPalette>,
) -> Result<SweepSample> {
    let mut rng = rng_from_seed(seed);
    let s = inst.sources[rng.gen_range(0..inst.sources.len())];
    let mut colors = trial_colors(inst, s, reduced, &mut rng)?;
    colors.force_cycle(inst.cycle.nodes())?;
    let table = ThresholdTable::uniform(inst.k, cap)?;
    let class = classify_nodes(&inst.graph, inst.k)?;
    let out = heavy_phase(&inst.graph, &class, &colors, s, Some(&table), AbortMode::Full, CostModel::default())?;
    let u0 = inst.u(0);
    let x = out.received(inst.probe(), Lane::Forward).iter().filter(|&&id| id != u0).count() as u64;
    Ok(SweepSample { trial, seed, source: s, x, detected: out.detection.is_some(), rounds: out.trace.total_rounds })
}

/// Predicted sweep detection rate at cap `T`: the probe forwards `X + 1`
/// identifiers (its own path from `u_0` included), so detection needs
/// `X <= T - 1`.
pub fn sweep_prediction(paths: u64, r: f64, cap: Option<u64>) -> Result<f64> {
    match cap {
        None => Ok(1.0),
        Some(t) => binomial_cdf(paths, r, t as i64 - 1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversarial::generate_gk;

    #[test]
    fn single_and_theta_paths() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let c = ColorAssignment::from_colors(2, true, vec![-1, 0, 1]).unwrap();
        assert_eq!(max_disjoint_wellcolored_paths(&g, &c, 0, 2, 1).unwrap().rho, 1);
        // s=0, two disjoint colored paths 0-1-3-5 and 0-2-4-5 into target 5 colored 2
        let g = Graph::from_edges(6, [(0, 1), (0, 2), (1, 3), (2, 4), (3, 5), (4, 5), (1, 4)]).unwrap();
        let c = ColorAssignment::from_colors(3, true, vec![-1, 0, 0, 1, 1, 2]).unwrap();
        let p = max_disjoint_wellcolored_paths(&g, &c, 0, 5, 2).unwrap();
        assert_eq!(p.rho, 2);
        assert!(max_disjoint_wellcolored_paths(&g, &c, 1, 5, 2).is_err());
    }

    #[test]
    fn g7_well_colored_path_to_probe() {
        let inst = generate_gk(7, 2).unwrap();
        let g = &inst.graph;
        let path = &inst.paths[0];
        let mut colors = ColorAssignment::from_colors(7, true, vec![13; g.node_count()]).unwrap();
        colors.set(inst.sources[path.p], -1).unwrap();
        for (j, &v) in path.nodes.iter().enumerate() {
            colors.set(v, j as Color).unwrap();
        }
        colors.set(inst.sinks[path.q], 3).unwrap();
        colors.set(inst.probe(), 4).unwrap();
        let s = inst.sources[path.p];
        assert!(crate::coloring::well_colored_path_exists(g, &colors, s, inst.probe(), 4));
        assert_eq!(max_disjoint_wellcolored_paths(g, &colors, s, inst.probe(), 4).unwrap().rho, 1);
    }

    #[test]
    fn congestion_with_pinned_paths_counts_every_path() {
        let inst = generate_gk(7, 3).unwrap();
        let all_pinned = ReducedPalette { palette: 1, randomized: 0 };
        let s = congestion_trial(&inst, 0, 5, Some(all_pinned)).unwrap();
        assert_eq!(s.x, 3);
        let sw = sweep_trial(&inst, Some(3), 0, 5, Some(all_pinned)).unwrap();
        assert!(!sw.detected);
        let sw = sweep_trial(&inst, Some(4), 0, 5, Some(all_pinned)).unwrap();
        assert!(sw.detected);
    }

    #[test]
    fn prediction_edges() {
        assert_eq!(sweep_prediction(4, 0.5, None).unwrap(), 1.0);
        assert!((sweep_prediction(4, 0.5, Some(1)).unwrap() - 1.0 / 16.0).abs() < 1e-12);
    }
}
