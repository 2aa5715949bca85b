//! Lower-bound instances: `G_k` for `k >= 7`, the `k = 6` variant on a
//! C4-free bipartite graph, and the weighted contraction used to reason
//! about their cycles.
//!
//! Node numbering: the cycle `u_j = j`, then `S`, then `W`, then internal
//! path nodes in `(p, q, j)` order, then private leaves in
//! `(p, q, side, r)` order. Indices `p`, `q`, `r` are 0-based.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::graph::{classify_nodes, Cycle, Graph, NodeId};
use crate::oracle::{self, OracleLimits};

/// What a node of an adversarial instance is.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "kebab-case"))]
pub enum Role {
    /// `u_j` on the planted cycle.
    Cycle { j: usize },
    /// `s^p`, a neighbor of `u_0`.
    Source { p: usize },
    /// `w^q_{k-4}`, a neighbor of `u_{k-3}`.
    Sink { q: usize },
    /// `w_j^{p,q}` on the path from `s^p` to `w^q_{k-4}`.
    Internal { p: usize, q: usize, j: usize },
    /// Private leaf `r` of `w_j^{p,q}`, where `j` is `0` or `k-5`.
    Leaf { p: usize, q: usize, j: usize, r: usize },
}

/// Which bipartite pattern links `S` to `W`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "pattern", rename_all = "kebab-case"))]
pub enum Pattern {
    /// Every pair `(p, q)` gets a path.
    Complete,
    /// Only pairs adjacent in the affine-plane incidence graph of order `d`.
    Incidence { d: usize },
}

/// Internal path `w_0^{p,q}, ..., w_{k-5}^{p,q}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InternalPath {
    pub p: usize,
    pub q: usize,
    pub nodes: Vec<NodeId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GkInstance {
    pub graph: Graph,
    pub k: usize,
    /// `N = |S| = |W|`.
    pub size: usize,
    pub pattern: Pattern,
    pub roles: Vec<Role>,
    /// `C* = (u_0, ..., u_{2k-1})`.
    pub cycle: Cycle,
    /// `S`, indexed by `p`.
    pub sources: Vec<NodeId>,
    /// `W`, indexed by `q`.
    pub sinks: Vec<NodeId>,
    pub paths: Vec<InternalPath>,
}

impl GkInstance {
    pub fn u(&self, j: usize) -> NodeId {
        self.cycle.nodes()[j]
    }

    /// The node where congestion piles up for sources in `S`.
    pub fn probe(&self) -> NodeId {
        self.u(self.k - 3)
    }
}

/// `2k + 2N + (k-4) N^2 + 2 N^3`.
pub fn gk_node_count(k: usize, n: usize) -> usize {
    2 * k + 2 * n + (k - 4) * n * n + 2 * n * n * n
}

fn build(k: usize, size: usize, pattern: Pattern, pairs: &[(usize, usize)]) -> Result<GkInstance> {
    let cycle_len = 2 * k;
    let path_len = k - 4;
    let total = cycle_len + 2 * size + pairs.len() * path_len + pairs.len() * 2 * size;
    let mut roles = Vec::with_capacity(total);
    let mut edges = Vec::with_capacity(total + cycle_len + pairs.len() * 2);
    for j in 0..cycle_len {
        roles.push(Role::Cycle { j });
        edges.push((j, (j + 1) % cycle_len));
    }
    let sources: Vec<NodeId> = (0..size).map(|p| cycle_len + p).collect();
    let sinks: Vec<NodeId> = (0..size).map(|q| cycle_len + size + q).collect();
    for (p, &x) in sources.iter().enumerate() {
        roles.push(Role::Source { p });
        edges.push((0, x));
    }
    for (q, &y) in sinks.iter().enumerate() {
        roles.push(Role::Sink { q });
        edges.push((k - 3, y));
    }
    let mut paths = Vec::with_capacity(pairs.len());
    for &(p, q) in pairs {
        let start = roles.len();
        let nodes: Vec<NodeId> = (start..start + path_len).collect();
        for j in 0..path_len {
            roles.push(Role::Internal { p, q, j });
        }
        edges.push((sources[p], nodes[0]));
        for w in nodes.windows(2) {
            edges.push((w[0], w[1]));
        }
        edges.push((nodes[path_len - 1], sinks[q]));
        paths.push(InternalPath { p, q, nodes });
    }
    for path in &paths {
        for &j in &[0, k - 5] {
            for r in 0..size {
                let leaf = roles.len();
                roles.push(Role::Leaf { p: path.p, q: path.q, j, r });
                edges.push((path.nodes[j], leaf));
            }
        }
    }
    debug_assert_eq!(roles.len(), total);
    let graph = Graph::from_edges(total, edges)?;
    let cycle = Cycle::new((0..cycle_len).collect())?;
    Ok(GkInstance { graph, k, size, pattern, roles, cycle, sources, sinks, paths })
}

/// `G_k` with `|S| = |W| = N` and a path for every pair `(p, q)`.
pub fn generate_gk(k: usize, size: usize) -> Result<GkInstance> {
    if k < 7 {
        return Err(invalid!("G_k needs k >= 7 (got {k}); use generate_g6 for k = 6"));
    }
    if size == 0 {
        return Err(invalid!("N must be at least 1"));
    }
    let pairs: Vec<(usize, usize)> = (0..size).flat_map(|p| (0..size).map(move |q| (p, q))).collect();
    build(k, size, Pattern::Complete, &pairs)
}

pub fn is_prime(d: usize) -> bool {
    d >= 2 && (2..).take_while(|i| i * i <= d).all(|i| !d.is_multiple_of(i))
}

/// Point `(x, y)` of the affine plane of order `d`, as a node index.
pub fn point_index(d: usize, x: usize, y: usize) -> usize {
    x * d + y
}

/// Non-vertical line `y = m x + b`, as a node index after the `d^2` points.
pub fn line_index(d: usize, m: usize, b: usize) -> usize {
    d * d + m * d + b
}

/// Point-line incidences `(point, line - d^2)` of the affine plane over
/// `Z_d` without vertical lines, sorted.
fn incidences(d: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(d * d * d);
    for x in 0..d {
        for y in 0..d {
            for m in 0..d {
                let b = (y + d * d - (m * x) % d) % d;
                out.push((point_index(d, x, y), m * d + b));
            }
        }
    }
    out.sort_unstable();
    out
}

/// The `d`-regular C4-free bipartite incidence graph with parts of size
/// `d^2`: points first, then lines.
pub fn generate_c4free_bipartite(d: usize) -> Result<Graph> {
    if !is_prime(d) {
        return Err(invalid!("d = {d} is not prime"));
    }
    Graph::from_edges(2 * d * d, incidences(d).into_iter().map(|(p, l)| (p, d * d + l)))
}

/// `G_6` where `S` and `W` are the points and lines of the affine plane of
/// order `d` (so `N = d^2`) and paths exist only for incident pairs.
pub fn generate_g6(d: usize) -> Result<GkInstance> {
    if !is_prime(d) {
        return Err(invalid!("d = {d} is not prime"));
    }
    build(6, d * d, Pattern::Incidence { d }, &incidences(d))
}

/// `12 + 2 d^2 + 2 d^3 + 2 d^5`.
pub fn g6_node_count(d: usize) -> usize {
    12 + 2 * d * d + 2 * d * d * d + 2 * d.pow(5)
}

/// Multigraph with positive integer edge weights.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct WeightedGraph {
    pub node_count: usize,
    /// `(u, v, weight)`; parallel edges allowed.
    pub edges: Vec<(NodeId, NodeId, u32)>,
}

/// A simple cycle of a [`WeightedGraph`] as a set of edge indices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct WeightedCycle {
    /// Sorted edge indices.
    pub edges: Vec<usize>,
    pub length: u32,
}

impl WeightedGraph {
    pub fn add_edge(&mut self, u: NodeId, v: NodeId, w: u32) -> usize {
        self.edges.push((u, v, w));
        self.edges.len() - 1
    }

    /// Every simple cycle (two parallel edges count) of total weight at most
    /// `max_len`, once each, sorted.
    pub fn cycles(&self, max_len: u32) -> Vec<WeightedCycle> {
        let mut inc: Vec<Vec<(usize, NodeId)>> = vec![Vec::new(); self.node_count];
        for (e, &(u, v, _)) in self.edges.iter().enumerate() {
            inc[u].push((e, v));
            inc[v].push((e, u));
        }
        let mut found = Vec::new();
        let mut on_path = vec![false; self.node_count];
        let mut stack: Vec<usize> = Vec::new();
        for root in 0..self.node_count {
            on_path[root] = true;
            self.walk(root, root, 0, max_len, &inc, &mut on_path, &mut stack, &mut found);
            on_path[root] = false;
        }
        found.sort();
        found.dedup();
        found
    }

    #[allow(clippy::too_many_arguments)]
    fn walk(
        &self,
        root: NodeId,
        at: NodeId,
        len: u32,
        max_len: u32,
        inc: &[Vec<(usize, NodeId)>],
        on_path: &mut [bool],
        stack: &mut Vec<usize>,
        found: &mut Vec<WeightedCycle>,
    ) {
        for &(e, v) in &inc[at] {
            let l = len + self.edges[e].2;
            if l > max_len || stack.contains(&e) {
                continue;
            }
            if v == root {
                if !stack.is_empty() {
                    let mut edges = stack.clone();
                    edges.push(e);
                    edges.sort_unstable();
                    found.push(WeightedCycle { edges, length: l });
                }
                continue;
            }
            if v < root || on_path[v] {
                continue;
            }
            on_path[v] = true;
            stack.push(e);
            self.walk(root, v, l, max_len, inc, on_path, stack, found);
            stack.pop();
            on_path[v] = false;
        }
    }

    /// `length -> count` over [`WeightedGraph::cycles`].
    pub fn spectrum(&self, max_len: u32) -> BTreeMap<usize, usize> {
        let mut out = BTreeMap::new();
        for c in self.cycles(max_len) {
            *out.entry(c.length as usize).or_insert(0) += 1;
        }
        out
    }
}

/// The contraction of an instance with its distinguished edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Contraction {
    pub graph: WeightedGraph,
    /// Weighted node of `u_0`; `u_{k-3}` is `1`, then `S`, then `W`.
    pub u0: NodeId,
    pub uk3: NodeId,
    /// The arc `u_0, ..., u_{k-3}` (weight `k-3`).
    pub e1: usize,
    /// The arc `u_{k-3}, ..., u_{2k-1}, u_0` (weight `k+3`).
    pub e2: usize,
}

/// Contracts each `S`-`W` path and both arcs of `C*` into weighted edges,
/// discarding private leaves. Paths are traced in the graph itself, so a
/// tampered instance is reported as a shape mismatch.
pub fn contract_to_weighted(inst: &GkInstance) -> Result<Contraction> {
    let g = &inst.graph;
    let k = inst.k;
    let size = inst.size;
    let mismatch = |msg: alloc::string::String| Error::ShapeMismatch(msg);
    if inst.cycle.len() != 2 * k || inst.sources.len() != size || inst.sinks.len() != size {
        return Err(mismatch(format!("instance labels do not describe k = {k}, N = {size}")));
    }
    let u0 = inst.u(0);
    let uk3 = inst.u(k - 3);
    let mut index = BTreeMap::new();
    index.insert(u0, 0);
    index.insert(uk3, 1);
    for (p, &s) in inst.sources.iter().enumerate() {
        index.insert(s, 2 + p);
    }
    for (q, &w) in inst.sinks.iter().enumerate() {
        index.insert(w, 2 + size + q);
    }
    let mut wg = WeightedGraph { node_count: 2 + 2 * size, edges: Vec::new() };

    let on_cycle: Vec<bool> = {
        let mut m = vec![false; g.node_count()];
        for &v in inst.cycle.nodes() {
            m[v] = true;
        }
        m
    };
    let arc = |first: NodeId| -> Result<u32> {
        let (mut prev, mut cur, mut len) = (u0, first, 1u32);
        while cur != uk3 {
            let next: Vec<NodeId> = g.neighbors(cur).iter().copied().filter(|&x| x != prev && on_cycle[x]).collect();
            if next.len() != 1 {
                return Err(mismatch(format!("cycle node {cur} does not continue the cycle uniquely")));
            }
            prev = cur;
            cur = next[0];
            len += 1;
        }
        Ok(len)
    };
    let short = arc(inst.u(1))?;
    let long = arc(inst.u(2 * k - 1))?;
    if short != k as u32 - 3 || long != k as u32 + 3 {
        return Err(mismatch(format!("cycle arcs have lengths {short} and {long}")));
    }
    let e1 = wg.add_edge(0, 1, short);
    let e2 = wg.add_edge(0, 1, long);

    for &s in &inst.sources {
        wg.add_edge(0, index[&s], 1);
    }
    for &w in &inst.sinks {
        wg.add_edge(1, index[&w], 1);
    }
    for &s in &inst.sources {
        for &first in g.neighbors(s) {
            if first == u0 {
                continue;
            }
            let (mut prev, mut cur, mut len) = (s, first, 1u32);
            while !inst.sinks.contains(&cur) {
                let next: Vec<NodeId> =
                    g.neighbors(cur).iter().copied().filter(|&x| x != prev && g.degree(x) > 1).collect();
                if next.len() != 1 || len > 2 * k as u32 {
                    return Err(mismatch(format!("node {cur} on a path from {s} does not continue uniquely")));
                }
                prev = cur;
                cur = next[0];
                len += 1;
            }
            wg.add_edge(index[&s], index[&cur], len);
        }
    }
    Ok(Contraction { graph: wg, u0: 0, uk3: 1, e1, e2 })
}

/// Outcome of the uniqueness check on an instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniquenessReport {
    /// Every `2k`-cycle found by the oracle.
    pub cycles: Vec<Cycle>,
    pub unique: bool,
    pub matches_labeled: bool,
    pub u0_heavy: bool,
    /// Oracle spectrum up to `max_len` equals the weighted spectrum
    /// (`None` when the instance does not contract).
    pub spectrum_agrees: Option<bool>,
}

impl UniquenessReport {
    pub fn verified(&self) -> bool {
        self.unique && self.matches_labeled && self.u0_heavy && self.spectrum_agrees != Some(false)
    }
}

/// Counts `2k`-cycles with the oracle and, when `spectrum_len` is given,
/// compares the oracle and weighted cycle-length spectra up to that length.
pub fn verify_unique_cycle(
    inst: &GkInstance,
    spectrum_len: Option<usize>,
    limits: &OracleLimits,
) -> Result<UniquenessReport> {
    let len = 2 * inst.k;
    let cycles = oracle::enumerate_cycles(&inst.graph, len, limits)?;
    let unique = cycles.len() == 1;
    let matches_labeled = unique && cycles[0] == inst.cycle.canonical();
    let u0_heavy = classify_nodes(&inst.graph, inst.k)?.is_heavy(inst.u(0));
    let spectrum_agrees = match spectrum_len {
        None => None,
        Some(max) => match contract_to_weighted(inst) {
            Ok(c) => {
                let oracle_spec = oracle::cycle_length_spectrum(&inst.graph, max, limits)?;
                Some(oracle_spec == c.graph.spectrum(max as u32))
            }
            Err(Error::ShapeMismatch(_)) => None,
            Err(e) => return Err(e),
        },
    };
    Ok(UniquenessReport { cycles, unique, matches_labeled, u0_heavy, spectrum_agrees })
}
