//! Color coding: random color assignments, per-step threshold tables and the
//! two-directional color-BFS with its detection rule.
//!
//! In a color-BFS for `2k`-cycles every source sends its identifier to its
//! neighbors colored `1` and `2k-1`. A node colored `i` in `1..k` forwards
//! what it received from color `i-1` to its neighbors colored `i+1`; a node
//! colored `i` in `k+1..2k` forwards what it received from color `i+1` (or
//! from the source, for `2k-1`) to its neighbors colored `i-1`. A node
//! colored `k` rejects when the same identifier reaches it from both sides.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng as _;

use crate::error::{invalid, Error, Result};
use crate::graph::{Cycle, Graph, NodeId};
use crate::rng::Rng;
use crate::sim::{self, CostModel, Message, Outbox, PhaseTrace, Protocol};

pub type Color = i32;

/// The extra color used to gate the heavy phase of a sampled source.
pub const GATE_COLOR: Color = -1;

/// Per-node colors for one color-coding iteration. Colors lie in
/// `-1..2k` when the gate color is enabled and in `0..2k` otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorAssignment {
    colors: Vec<Color>,
    k: usize,
    with_gate: bool,
}

/// Uniform color from the palette of half-length `k`.
#[inline]
pub fn sample_color(rng: &mut Rng, k: usize, with_gate: bool) -> Color {
    let low = if with_gate { GATE_COLOR } else { 0 };
    rng.gen_range(low..2 * k as Color)
}

impl ColorAssignment {
    pub fn random(n: usize, k: usize, with_gate: bool, rng: &mut Rng) -> Self {
        let colors = (0..n).map(|_| sample_color(rng, k, with_gate)).collect();
        ColorAssignment { colors, k, with_gate }
    }

    /// Redraws every color in place.
    pub fn resample(&mut self, rng: &mut Rng) {
        for c in &mut self.colors {
            *c = sample_color(rng, self.k, self.with_gate);
        }
    }

    pub fn from_colors(k: usize, with_gate: bool, colors: Vec<Color>) -> Result<Self> {
        let low = if with_gate { GATE_COLOR } else { 0 };
        if let Some(c) = colors.iter().find(|&&c| c < low || c >= 2 * k as Color) {
            return Err(invalid!("color {c} outside the palette for k = {k}"));
        }
        Ok(ColorAssignment { colors, k, with_gate })
    }

    #[inline]
    pub fn get(&self, v: NodeId) -> Color {
        self.colors[v]
    }

    pub fn set(&mut self, v: NodeId, c: Color) -> Result<()> {
        let low = if self.with_gate { GATE_COLOR } else { 0 };
        if c < low || c >= 2 * self.k as Color {
            return Err(invalid!("color {c} outside the palette for k = {}", self.k));
        }
        self.colors[v] = c;
        Ok(())
    }

    pub fn colors(&self) -> &[Color] {
        &self.colors
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn has_gate_color(&self) -> bool {
        self.with_gate
    }

    pub fn palette_size(&self) -> usize {
        2 * self.k + usize::from(self.with_gate)
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    /// Colors `cycle[j]` with `j` for `j < 2k`.
    pub fn force_cycle(&mut self, cycle: &[NodeId]) -> Result<()> {
        if cycle.len() != 2 * self.k {
            return Err(invalid!("cycle of length {} cannot be well-colored for k = {}", cycle.len(), self.k));
        }
        for (j, &v) in cycle.iter().enumerate() {
            self.colors[v] = j as Color;
        }
        Ok(())
    }

    /// Colors every node of `nodes` with the gate color.
    pub fn force_gate(&mut self, nodes: &[NodeId]) -> Result<()> {
        if !self.with_gate {
            return Err(invalid!("palette has no gate color"));
        }
        for &v in nodes {
            self.colors[v] = GATE_COLOR;
        }
        Ok(())
    }

    /// The mirrored coloring `c -> (2k - c) mod 2k` (gate color kept), which
    /// turns the backward side of a cycle into a forward side.
    pub fn mirrored(&self) -> Self {
        let m = 2 * self.k as Color;
        let colors = self.colors.iter().map(|&c| if c < 0 { c } else { (m - c) % m }).collect();
        ColorAssignment { colors, k: self.k, with_gate: self.with_gate }
    }
}

/// Draws a color assignment for `g` from `seed`.
pub fn assign_colors(g: &Graph, k: usize, include_gate: bool, seed: u64) -> Result<ColorAssignment> {
    if k < 2 {
        return Err(invalid!("k must be at least 2, got {k}"));
    }
    let mut rng = crate::rng::rng_from_seed(seed);
    Ok(ColorAssignment::random(g.node_count(), k, include_gate, &mut rng))
}

/// Where a threshold table comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Provenance {
    /// Computed in this crate from a closed-form rule.
    Builtin,
    /// A placeholder for values published elsewhere; override before use.
    External,
    #[default]
    Custom,
}

/// Per-color forwarding caps for a color-BFS with half-length `k`.
/// `None` is an unbounded cap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThresholdTable {
    k: usize,
    /// Indexed by color; entries `0` and `k` are unused.
    caps: Vec<Option<u64>>,
    symmetric: bool,
    provenance: Provenance,
}

/// Multipliers of the {C12, C14} thresholds: `T_7(i) = f(i) * T_7(i-1)`.
pub const C12_C14_MULTIPLIERS: [u64; 6] = [60, 10, 10, 5, 5, 6];

impl ThresholdTable {
    /// Table for colors `1..2k` with `half[i-1]` used at colors `i` and
    /// `2k - i`.
    pub fn symmetric(k: usize, half: &[Option<u64>]) -> Result<Self> {
        if k < 2 {
            return Err(invalid!("k must be at least 2, got {k}"));
        }
        if half.len() != k - 1 {
            return Err(invalid!("expected {} caps for k = {k}, got {}", k - 1, half.len()));
        }
        if half.contains(&Some(0)) {
            return Err(invalid!("caps must be at least 1"));
        }
        let mut caps = vec![None; 2 * k];
        for (i, &c) in half.iter().enumerate() {
            caps[i + 1] = c;
            caps[2 * k - i - 1] = c;
        }
        Ok(ThresholdTable { k, caps, symmetric: true, provenance: Provenance::Custom })
    }

    /// Table from an explicit `step -> cap` map. With `symmetric` only steps
    /// `1..k` are required and any step in `k+1..2k` must agree with its
    /// mirror; otherwise every step in `1..2k` except `k` is required.
    pub fn from_map(k: usize, map: &BTreeMap<usize, Option<u64>>, symmetric: bool) -> Result<Self> {
        if k < 2 {
            return Err(invalid!("k must be at least 2, got {k}"));
        }
        let mut caps = vec![None; 2 * k];
        for (&step, &cap) in map {
            if step == 0 || step == k || step >= 2 * k {
                return Err(invalid!("step {step} has no cap for k = {k}"));
            }
            if cap == Some(0) {
                return Err(invalid!("cap at step {step} must be at least 1"));
            }
            caps[step] = cap;
        }
        for i in 1..k {
            let (lo, hi) = (map.get(&i), map.get(&(2 * k - i)));
            if symmetric {
                let c = match (lo, hi) {
                    (Some(a), Some(b)) if a != b => {
                        return Err(invalid!("symmetric table disagrees at steps {i} and {}", 2 * k - i))
                    }
                    (Some(a), _) | (None, Some(a)) => *a,
                    (None, None) => return Err(invalid!("missing cap for step {i}")),
                };
                caps[i] = c;
                caps[2 * k - i] = c;
            } else if lo.is_none() || hi.is_none() {
                return Err(invalid!("missing cap for step {} or {}", i, 2 * k - i));
            }
        }
        let symmetric = symmetric || (1..k).all(|i| caps[i] == caps[2 * k - i]);
        Ok(ThresholdTable { k, caps, symmetric, provenance: Provenance::Custom })
    }

    /// Every cap equal to `cap`.
    pub fn uniform(k: usize, cap: Option<u64>) -> Result<Self> {
        ThresholdTable::symmetric(k, &vec![cap; k.saturating_sub(1)])
    }

    /// `T_7(i) = f(i) * T_7(i-1)` with `T_7(0) = 1` and the multipliers
    /// [`C12_C14_MULTIPLIERS`], used for the 14-cycle heavy stage.
    pub fn c14_stage() -> Self {
        let mut half = Vec::with_capacity(6);
        let mut t = 1u64;
        for f in C12_C14_MULTIPLIERS {
            t *= f;
            half.push(Some(t));
        }
        ThresholdTable::symmetric(7, &half).expect("static table").with_provenance(Provenance::Builtin)
    }

    /// All caps 1 at `k = 6`, valid for the 12-cycle stage once the graph is
    /// known to be 14-cycle free.
    pub fn c12_stage_unit() -> Self {
        ThresholdTable::uniform(6, Some(1)).expect("static table").with_provenance(Provenance::Builtin)
    }

    /// `T_6(i) = T_5(i)` for `i <= 4` and `T_6(5) = T_6(4)`.
    pub fn c12_stage_from_c10(t5: &ThresholdTable) -> Result<Self> {
        if t5.k != 5 {
            return Err(invalid!("expected a k = 5 table, got k = {}", t5.k));
        }
        if !t5.symmetric {
            return Err(invalid!("the k = 5 table must be symmetric"));
        }
        let mut half: Vec<Option<u64>> = (1..5).map(|i| t5.caps[i]).collect();
        half.push(t5.caps[4]);
        Ok(ThresholdTable::symmetric(6, &half)?.with_provenance(t5.provenance))
    }

    /// Placeholder tables for `k` in `3..=5`, marked [`Provenance::External`].
    /// `k = 2` returns the single cap `T_2(1) = 1`.
    pub fn external_default(k: usize) -> Result<Self> {
        let half: Vec<Option<u64>> = match k {
            2 => return Ok(ThresholdTable::uniform(2, Some(1))?.with_provenance(Provenance::Builtin)),
            3 => vec![Some(2), Some(6)],
            4 => vec![Some(2), Some(6), Some(24)],
            5 => vec![Some(2), Some(6), Some(24), Some(120)],
            _ => return Err(invalid!("no default threshold table for k = {k}")),
        };
        Ok(ThresholdTable::symmetric(k, &half)?.with_provenance(Provenance::External))
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Cap applied to nodes of color `color`; `None` when unbounded or when
    /// the color never forwards.
    #[inline]
    pub fn cap(&self, color: Color) -> Option<u64> {
        usize::try_from(color).ok().and_then(|c| self.caps.get(c).copied().flatten())
    }

    /// Caps for steps `1..k`, i.e. the forward half.
    pub fn half(&self) -> Vec<Option<u64>> {
        (1..self.k).map(|i| self.caps[i]).collect()
    }

    /// `step -> cap` for every step in `1..2k` except `k`.
    pub fn to_map(&self) -> BTreeMap<usize, Option<u64>> {
        (1..2 * self.k).filter(|&i| i != self.k).map(|i| (i, self.caps[i])).collect()
    }
}

/// Which arm of the color-BFS an identifier travels on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Lane {
    /// Colors `0 -> 1 -> ... -> k`.
    Forward,
    /// Colors `0 -> 2k-1 -> ... -> k`.
    Backward,
}

/// A color-BFS message: one identifier on one lane.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Token {
    pub lane: Lane,
    pub id: NodeId,
}

impl Message for Token {
    fn identifier(&self) -> NodeId {
        self.id
    }
}

/// What a node over its cap does.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum AbortMode {
    /// Forward nothing for the rest of the phase.
    #[default]
    Full,
    /// Forward only the `cap` smallest identifiers.
    Truncate,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct BfsOptions<'a> {
    pub thresholds: Option<&'a ThresholdTable>,
    pub abort_mode: AbortMode,
    /// Restricts the search to the induced subgraph on `true` nodes.
    pub participants: Option<&'a [bool]>,
    pub cost_model: CostModel,
}

/// A rejection at a node colored `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DetectionEvent {
    pub node: NodeId,
    pub identifier: NodeId,
    pub step: usize,
    pub witness: Cycle,
}

/// Identifiers a node received on each lane with their first-arrival
/// predecessor, sorted by identifier.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Arrivals {
    pub forward: Vec<(NodeId, NodeId)>,
    pub backward: Vec<(NodeId, NodeId)>,
}

impl Arrivals {
    fn lane(&self, lane: Lane) -> &[(NodeId, NodeId)] {
        match lane {
            Lane::Forward => &self.forward,
            Lane::Backward => &self.backward,
        }
    }

    fn predecessor(&self, lane: Lane, id: NodeId) -> Option<NodeId> {
        let l = self.lane(lane);
        l.binary_search_by_key(&id, |&(i, _)| i).ok().map(|i| l[i].1)
    }
}

/// Result of one color-BFS phase.
#[derive(Clone, Debug)]
pub struct BfsOutcome {
    /// The rejection at the smallest node id, matched on its smallest
    /// identifier.
    pub detection: Option<DetectionEvent>,
    /// Number of `(node, identifier)` matches in the phase.
    pub matches: usize,
    pub trace: PhaseTrace,
    arrivals: Vec<Arrivals>,
}

impl BfsOutcome {
    /// Distinct identifiers `v` received on `lane`.
    pub fn received(&self, v: NodeId, lane: Lane) -> Vec<NodeId> {
        self.arrivals.get(v).map_or(Vec::new(), |a| a.lane(lane).iter().map(|&(id, _)| id).collect())
    }

    pub fn received_count(&self, v: NodeId, lane: Lane) -> usize {
        self.arrivals.get(v).map_or(0, |a| a.lane(lane).len())
    }

    pub fn rejected(&self) -> bool {
        self.detection.is_some()
    }
}

struct ColorBfs<'a> {
    g: &'a Graph,
    k: usize,
    colors: &'a ColorAssignment,
    sources: &'a [NodeId],
    opts: BfsOptions<'a>,
    arrivals: Vec<Arrivals>,
    matches: Vec<(NodeId, NodeId)>,
}

impl ColorBfs<'_> {
    #[inline]
    fn color_of(&self, v: NodeId) -> Option<Color> {
        if let Some(p) = self.opts.participants {
            if !p[v] {
                return None;
            }
        }
        if self.sources.binary_search(&v).is_ok() {
            Some(0)
        } else {
            Some(self.colors.get(v))
        }
    }

    fn send_to_color(
        &self,
        from: NodeId,
        color: Color,
        tokens: impl Iterator<Item = Token> + Clone,
        out: &mut Outbox<Token>,
    ) {
        for &w in self.g.neighbors(from) {
            if self.color_of(w) == Some(color) {
                for t in tokens.clone() {
                    out.send(w, t);
                }
            }
        }
    }
}

impl Protocol for ColorBfs<'_> {
    type Msg = Token;

    fn initiators(&self) -> Vec<NodeId> {
        self.sources.to_vec()
    }

    fn on_round(&mut self, round: usize, v: NodeId, inbox: &[(NodeId, Token)], out: &mut Outbox<Token>) {
        let Some(c) = self.color_of(v) else { return };
        let k = self.k as Color;
        if round == 0 {
            let me = core::iter::once(Token { lane: Lane::Forward, id: v });
            self.send_to_color(v, 1, me, out);
            let me = core::iter::once(Token { lane: Lane::Backward, id: v });
            self.send_to_color(v, 2 * k - 1, me, out);
            return;
        }
        let state = &mut self.arrivals[v];
        for &(from, tok) in inbox {
            match tok.lane {
                Lane::Forward => state.forward.push((tok.id, from)),
                Lane::Backward => state.backward.push((tok.id, from)),
            }
        }
        // inbox is sorted by sender, so the stable sort keeps the smallest
        // predecessor first for each identifier
        for lane in [&mut state.forward, &mut state.backward] {
            lane.sort_by_key(|&(id, _)| id);
            lane.dedup_by_key(|&mut (id, _)| id);
        }
        if c == k {
            let (f, b) = (&state.forward, &state.backward);
            let (mut i, mut j) = (0, 0);
            while i < f.len() && j < b.len() {
                match f[i].0.cmp(&b[j].0) {
                    core::cmp::Ordering::Less => i += 1,
                    core::cmp::Ordering::Greater => j += 1,
                    core::cmp::Ordering::Equal => {
                        self.matches.push((v, f[i].0));
                        i += 1;
                        j += 1;
                    }
                }
            }
            return;
        }
        let (lane, next) = if (1..k).contains(&c) {
            (Lane::Forward, c + 1)
        } else if (k + 1..2 * k).contains(&c) {
            (Lane::Backward, c - 1)
        } else {
            return;
        };
        let mut ids: Vec<NodeId> = self.arrivals[v].lane(lane).iter().map(|&(id, _)| id).collect();
        if ids.is_empty() {
            return;
        }
        if let Some(cap) = self.opts.thresholds.and_then(|t| t.cap(c)) {
            if ids.len() as u64 > cap {
                out.abort();
                match self.opts.abort_mode {
                    AbortMode::Full => return,
                    AbortMode::Truncate => ids.truncate(cap as usize),
                }
            }
        }
        self.send_to_color(v, next, ids.iter().map(|&id| Token { lane, id }), out);
    }
}

/// Runs one color-BFS phase for `2k`-cycles from `sources`. Sources act as
/// color 0 regardless of their sampled color.
pub fn color_bfs(
    g: &Graph,
    k: usize,
    sources: &[NodeId],
    colors: &ColorAssignment,
    opts: BfsOptions<'_>,
) -> Result<BfsOutcome> {
    if k < 2 {
        return Err(invalid!("k must be at least 2, got {k}"));
    }
    if colors.k() != k || colors.len() != g.node_count() {
        return Err(invalid!("color assignment does not match k = {k} and n = {}", g.node_count()));
    }
    if let Some(t) = opts.thresholds {
        if t.k() != k {
            return Err(invalid!("threshold table is for k = {}, search uses k = {k}", t.k()));
        }
    }
    if let Some(p) = opts.participants {
        if p.len() != g.node_count() {
            return Err(invalid!("participant mask has the wrong length"));
        }
    }
    let mut sorted: Vec<NodeId> = sources.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if let Some(&s) = sorted.iter().find(|&&s| s >= g.node_count() || opts.participants.is_some_and(|p| !p[s])) {
        return Err(invalid!("source {s} is not a participating node"));
    }
    let mut proto = ColorBfs { g, k, colors, sources: &sorted, opts, arrivals: Vec::new(), matches: Vec::new() };
    let last = 2 * k as Color - 1;
    let starts = sorted
        .iter()
        .any(|&s| g.neighbors(s).iter().any(|&w| matches!(proto.color_of(w), Some(c) if c == 1 || c == last)));
    if !starts {
        return Ok(BfsOutcome {
            detection: None,
            matches: 0,
            trace: silent_trace(k, opts.cost_model),
            arrivals: Vec::new(),
        });
    }
    proto.arrivals = vec![Arrivals::default(); g.node_count()];
    let trace = sim::run_phase(g, &mut proto, k, opts.cost_model)?;
    let matches = proto.matches.len();
    let detection = match proto.matches.iter().min() {
        Some(&(node, id)) => Some(DetectionEvent {
            node,
            identifier: id,
            step: k,
            witness: reconstruct_witness(g, k, &proto.arrivals, node, id)?,
        }),
        None => None,
    };
    Ok(BfsOutcome { detection, matches, trace, arrivals: proto.arrivals })
}

/// The trace of a phase in which nothing is sent.
fn silent_trace(k: usize, cost_model: CostModel) -> PhaseTrace {
    let steps: Vec<sim::StepTrace> =
        (0..k).map(|round| sim::StepTrace { round, rounds_charged: 1, ..sim::StepTrace::default() }).collect();
    PhaseTrace { cost_model, steps, total_rounds: k as u64 }
}

fn walk_back(arrivals: &[Arrivals], lane: Lane, from: NodeId, id: NodeId, k: usize) -> Result<Vec<NodeId>> {
    let mut chain = Vec::with_capacity(k);
    let mut cur = from;
    for _ in 0..k {
        let pred = arrivals[cur]
            .predecessor(lane, id)
            .ok_or_else(|| Error::InvalidWitness(alloc::format!("broken back-pointer at node {cur}")))?;
        if pred == id {
            return Ok(chain);
        }
        chain.push(pred);
        cur = pred;
    }
    Err(Error::InvalidWitness(alloc::format!("back-pointer chain from {from} longer than {k}")))
}

fn reconstruct_witness(g: &Graph, k: usize, arrivals: &[Arrivals], node: NodeId, id: NodeId) -> Result<Cycle> {
    let mut fwd = walk_back(arrivals, Lane::Forward, node, id, k)?;
    let bwd = walk_back(arrivals, Lane::Backward, node, id, k)?;
    fwd.reverse();
    let mut nodes = Vec::with_capacity(2 * k);
    nodes.push(id);
    nodes.extend(fwd);
    nodes.push(node);
    nodes.extend(bwd);
    if nodes.len() != 2 * k {
        return Err(Error::InvalidWitness(alloc::format!("witness {nodes:?} has length {} != {}", nodes.len(), 2 * k)));
    }
    let cycle = Cycle::new(nodes)?;
    cycle.validate(g)?;
    Ok(cycle)
}

/// Whether a path `s, w_0, ..., w_{i-1}, target` exists with `w_j` colored
/// `j`. False when `s` is not gate-colored or `target` is not colored `i`.
pub fn well_colored_path_exists(g: &Graph, colors: &ColorAssignment, s: NodeId, target: NodeId, i: usize) -> bool {
    if i == 0 || colors.get(s) != GATE_COLOR || colors.get(target) != i as Color {
        return false;
    }
    let mut frontier: Vec<NodeId> = g.neighbors(s).iter().copied().filter(|&w| colors.get(w) == 0).collect();
    let mut seen = vec![false; g.node_count()];
    for j in 1..i as Color {
        let mut next = Vec::new();
        for &u in &frontier {
            for &w in g.neighbors(u) {
                if colors.get(w) == j && !seen[w] {
                    seen[w] = true;
                    next.push(w);
                }
            }
        }
        frontier = next;
    }
    frontier.iter().any(|&u| g.has_edge(u, target))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::cycle_graph;
    use crate::oracle::{self, OracleLimits};

    fn ident_colors(n: usize, k: usize, f: impl Fn(usize) -> Color) -> ColorAssignment {
        ColorAssignment::from_colors(k, true, (0..n).map(f).collect()).unwrap()
    }

    #[test]
    fn perfect_c8_rejects_at_u4() {
        let g = cycle_graph(8).unwrap();
        let colors = ident_colors(8, 4, |v| v as Color);
        let out = color_bfs(&g, 4, &[0], &colors, BfsOptions::default()).unwrap();
        let det = out.detection.expect("well-colored C_8 is found");
        assert_eq!(det.node, 4);
        assert_eq!(det.identifier, 0);
        assert_eq!(det.witness.nodes(), &[0, 1, 2, 3, 4, 5, 6, 7]);
        // one identifier per step
        assert_eq!(out.trace.steps.len(), 4);
        assert!(out.trace.steps.iter().all(|s| s.max_forwarded == 1));
        assert_eq!(out.trace.total_rounds, 4);
    }

    #[test]
    fn recolored_middle_accepts() {
        let g = cycle_graph(8).unwrap();
        let colors = ident_colors(8, 4, |v| if v == 4 { 0 } else { v as Color });
        let out = color_bfs(&g, 4, &[0], &colors, BfsOptions::default()).unwrap();
        assert!(out.detection.is_none());
    }

    #[test]
    fn theta_graph_witness_is_simple() {
        // two paths of length 3 from 0 to x = 3 plus a chord pattern; k = 3
        // arm A: 0-1-2-3 colors 0,1,2,3 ; arm B: 0-5-4-3 colors 0,5,4,3
        // distractor: 6 colored 1 adjacent to 0 and 2
        let g = Graph::from_edges(7, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 6), (6, 2)]).unwrap();
        let colors = ColorAssignment::from_colors(3, true, vec![0, 1, 2, 3, 4, 5, 1]).unwrap();
        let out = color_bfs(&g, 3, &[0], &colors, BfsOptions::default()).unwrap();
        let det = out.detection.unwrap();
        assert_eq!(det.witness.len(), 6);
        assert!(oracle::confirms(&g, &det.witness, &OracleLimits::default()).unwrap());
        // tie between predecessors 1 and 6 resolved towards the smaller id
        assert_eq!(det.witness.nodes(), &[0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn threshold_abort_blocks_detection() {
        // node 1 (color 1) receives two ids, cap 1 aborts it
        let g = Graph::from_edges(5, [(0, 1), (4, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let colors = ColorAssignment::from_colors(2, true, vec![0, 1, 2, 3, 0]).unwrap();
        let free = color_bfs(&g, 2, &[0, 4], &colors, BfsOptions::default()).unwrap();
        assert!(free.detection.is_some());
        let t = ThresholdTable::uniform(2, Some(1)).unwrap();
        let opts = BfsOptions { thresholds: Some(&t), ..BfsOptions::default() };
        let capped = color_bfs(&g, 2, &[0, 4], &colors, opts).unwrap();
        assert!(capped.detection.is_none());
        assert_eq!(capped.trace.aborted().collect::<Vec<_>>(), vec![1]);
        let opts = BfsOptions { thresholds: Some(&t), abort_mode: AbortMode::Truncate, ..BfsOptions::default() };
        let truncated = color_bfs(&g, 2, &[0, 4], &colors, opts).unwrap();
        assert!(truncated.detection.is_some());
    }

    #[test]
    fn source_override_plays_color_zero() {
        let g = cycle_graph(6).unwrap();
        let colors = ident_colors(6, 3, |v| if v == 0 { 4 } else { v as Color });
        let out = color_bfs(&g, 3, &[0], &colors, BfsOptions::default()).unwrap();
        assert!(out.detection.is_some());
    }

    #[test]
    fn participants_restrict_search() {
        let g = cycle_graph(4).unwrap();
        let colors = ident_colors(4, 2, |v| v as Color);
        let mask = vec![true, true, false, true];
        let opts = BfsOptions { participants: Some(&mask), ..BfsOptions::default() };
        assert!(color_bfs(&g, 2, &[0], &colors, opts).unwrap().detection.is_none());
        assert!(color_bfs(&g, 2, &[2], &colors, opts).is_err());
    }

    #[test]
    fn mismatched_table_is_rejected() {
        let g = cycle_graph(4).unwrap();
        let colors = ident_colors(4, 2, |v| v as Color);
        let t = ThresholdTable::uniform(3, Some(1)).unwrap();
        let opts = BfsOptions { thresholds: Some(&t), ..BfsOptions::default() };
        assert!(color_bfs(&g, 2, &[0], &colors, opts).is_err());
    }

    #[test]
    fn c14_table_values() {
        let t = ThresholdTable::c14_stage();
        assert_eq!(t.half(), vec![Some(60), Some(600), Some(6000), Some(30_000), Some(150_000), Some(900_000)]);
        for i in 1..7 {
            assert_eq!(t.cap(i), t.cap(14 - i));
        }
        assert_eq!(t.cap(7), None);
        assert_eq!(t.cap(-1), None);
    }

    #[test]
    fn c10_extension() {
        let t5 = ThresholdTable::symmetric(5, &[Some(2), Some(3), Some(5), Some(7)]).unwrap();
        let t6 = ThresholdTable::c12_stage_from_c10(&t5).unwrap();
        assert_eq!(t6.half(), vec![Some(2), Some(3), Some(5), Some(7), Some(7)]);
        assert!(ThresholdTable::c12_stage_from_c10(&t6).is_err());
    }

    #[test]
    fn table_from_map_validation() {
        let mut m = BTreeMap::new();
        for i in 1..4 {
            m.insert(i, Some(i as u64));
        }
        let t = ThresholdTable::from_map(4, &m, true).unwrap();
        assert_eq!(t.cap(5), Some(3));
        assert!(ThresholdTable::from_map(4, &m, false).is_err());
        m.insert(4, Some(1));
        assert!(ThresholdTable::from_map(4, &m, true).is_err());
        m.remove(&4);
        m.insert(7, Some(2));
        assert!(ThresholdTable::from_map(4, &m, true).is_err());
        m.insert(7, Some(1));
        assert!(ThresholdTable::from_map(4, &m, true).is_ok());
        m.insert(2, Some(0));
        assert!(ThresholdTable::from_map(4, &m, true).is_err());
    }

    #[test]
    fn well_colored_path_checks() {
        let g = crate::generators::path_graph(3);
        let colors = ColorAssignment::from_colors(3, true, vec![-1, 0, 1]).unwrap();
        assert!(well_colored_path_exists(&g, &colors, 0, 2, 1));
        let colors = ColorAssignment::from_colors(3, true, vec![-1, 5, 1]).unwrap();
        assert!(!well_colored_path_exists(&g, &colors, 0, 2, 1));
    }

    #[test]
    fn mirrored_colors() {
        let c = ColorAssignment::from_colors(2, true, vec![-1, 0, 1, 2, 3]).unwrap();
        assert_eq!(c.mirrored().colors(), &[-1, 0, 3, 2, 1]);
    }
}
