//! Exhaustive bounded-DFS cycle oracle.
//!
//! Every detector verdict and every structural claim about the adversarial
//! families is checked against this module. It never returns partial
//! results: exceeding the step budget is an error.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{Cycle, Graph, NodeId};

/// Search limits for the oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleLimits {
    /// Longest cycle length the oracle accepts.
    pub max_len: usize,
    /// Maximum number of DFS node expansions per call.
    pub max_steps: u64,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { max_len: 16, max_steps: 100_000_000 }
    }
}

impl OracleLimits {
    fn check_len(&self, len: usize) -> Result<()> {
        if len < 3 || len > self.max_len {
            return Err(Error::LengthOutOfRange { len, cap: self.max_len });
        }
        Ok(())
    }
}

const UNREACHED: usize = usize::MAX;

/// BFS distances to `root` inside the nodes accepted by `allowed`.
fn distances(g: &Graph, root: NodeId, allowed: impl Fn(NodeId) -> bool, dist: &mut [usize]) {
    dist.fill(UNREACHED);
    let mut queue = VecDeque::new();
    dist[root] = 0;
    queue.push_back(root);
    while let Some(u) = queue.pop_front() {
        for &v in g.neighbors(u) {
            if dist[v] == UNREACHED && allowed(v) {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
}

struct Search<'a> {
    g: &'a Graph,
    len: usize,
    root: NodeId,
    min_node: NodeId,
    dist: Vec<usize>,
    on_path: Vec<bool>,
    path: Vec<NodeId>,
    steps: u64,
    budget: u64,
}

impl<'a> Search<'a> {
    fn new(g: &'a Graph, len: usize, budget: u64) -> Self {
        let n = g.node_count();
        Search {
            g,
            len,
            root: 0,
            min_node: 0,
            dist: vec![UNREACHED; n],
            on_path: vec![false; n],
            path: Vec::with_capacity(len),
            steps: 0,
            budget,
        }
    }

    fn reset(&mut self, root: NodeId, min_node: NodeId) {
        self.root = root;
        self.min_node = min_node;
        let min = min_node;
        let g = self.g;
        distances(g, root, |v| v >= min, &mut self.dist);
        self.path.clear();
        self.path.push(root);
        self.on_path[root] = true;
    }

    fn tick(&mut self) -> Result<()> {
        self.steps += 1;
        if self.steps > self.budget {
            return Err(Error::BudgetExceeded { budget: self.budget });
        }
        Ok(())
    }

    /// Extends the current path; `visit` is called with each closed cycle.
    /// Returning `true` from `visit` stops the search.
    fn extend(&mut self, visit: &mut dyn FnMut(&[NodeId]) -> bool) -> Result<bool> {
        self.tick()?;
        let depth = self.path.len() - 1;
        let last = *self.path.last().expect("path holds the root");
        if depth == self.len - 1 {
            if self.g.has_edge(last, self.root) {
                return Ok(visit(&self.path));
            }
            return Ok(false);
        }
        for i in 0..self.g.degree(last) {
            let v = self.g.neighbors(last)[i];
            if v < self.min_node || self.on_path[v] || v == self.root {
                continue;
            }
            // remaining edges after stepping to v: len - depth - 1
            if self.dist[v] == UNREACHED || self.dist[v] > self.len - depth - 1 {
                continue;
            }
            self.on_path[v] = true;
            self.path.push(v);
            let stop = self.extend(visit)?;
            self.path.pop();
            self.on_path[v] = false;
            if stop {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn finish_root(&mut self) {
        self.on_path[self.root] = false;
    }
}

/// Every simple cycle of exactly `len` nodes, each reported once in
/// canonical form, sorted.
pub fn enumerate_cycles(g: &Graph, len: usize, limits: &OracleLimits) -> Result<Vec<Cycle>> {
    limits.check_len(len)?;
    let mut out = Vec::new();
    let mut search = Search::new(g, len, limits.max_steps);
    for root in 0..g.node_count() {
        search.reset(root, root);
        let mut visit = |path: &[NodeId]| {
            // each cycle is seen twice from its minimum node; keep one direction
            if path[1] < path[path.len() - 1] {
                out.push(Cycle::new(path.to_vec()).expect("DFS paths are simple"));
            }
            false
        };
        search.extend(&mut visit)?;
        search.finish_root();
    }
    out.sort();
    Ok(out)
}

/// Number of simple `len`-cycles.
pub fn count_cycles(g: &Graph, len: usize, limits: &OracleLimits) -> Result<usize> {
    enumerate_cycles(g, len, limits).map(|c| c.len())
}

/// Whether some simple cycle of exactly `len` nodes passes through `v`.
pub fn node_in_cycle_of_length(g: &Graph, v: NodeId, len: usize, limits: &OracleLimits) -> Result<bool> {
    limits.check_len(len)?;
    let mut search = Search::new(g, len, limits.max_steps);
    search.reset(v, 0);
    let mut visit = |_: &[NodeId]| true;
    let found = search.extend(&mut visit)?;
    search.finish_root();
    Ok(found)
}

/// Some simple `len`-cycle through `v`, if one exists.
pub fn find_cycle_through(g: &Graph, v: NodeId, len: usize, limits: &OracleLimits) -> Result<Option<Cycle>> {
    limits.check_len(len)?;
    let mut search = Search::new(g, len, limits.max_steps);
    search.reset(v, 0);
    let mut found = None;
    let mut visit = |path: &[NodeId]| {
        found = Some(Cycle::new(path.to_vec()).expect("DFS paths are simple"));
        true
    };
    search.extend(&mut visit)?;
    Ok(found)
}

/// Map `length -> number of cycles` for every length in `3..=max_len`
/// (lengths with no cycle are omitted).
pub fn cycle_length_spectrum(g: &Graph, max_len: usize, limits: &OracleLimits) -> Result<BTreeMap<usize, usize>> {
    let mut spectrum = BTreeMap::new();
    for len in 3..=max_len {
        let c = count_cycles(g, len, limits)?;
        if c > 0 {
            spectrum.insert(len, c);
        }
    }
    Ok(spectrum)
}

/// Whether `cycle` is a cycle of `g` that the oracle also enumerates.
pub fn confirms(g: &Graph, cycle: &Cycle, limits: &OracleLimits) -> Result<bool> {
    if cycle.validate(g).is_err() {
        return Ok(false);
    }
    let all = enumerate_cycles(g, cycle.len(), limits)?;
    Ok(all.binary_search(&cycle.canonical()).is_ok())
}
