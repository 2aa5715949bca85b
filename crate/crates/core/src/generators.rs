//! Benign instance generators. All randomized generators take a 64-bit seed
//! and are bit-for-bit deterministic in it.

use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::error::{invalid, Error, Result};
use crate::graph::{Cycle, Graph, NodeId};
use crate::oracle::{self, OracleLimits};
use crate::rng::rng_from_seed;

/// The cycle graph `C_n` with edges `i -- i+1 (mod n)`.
pub fn cycle_graph(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(invalid!("cycle graph needs at least 3 nodes, got {n}"));
    }
    Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)))
}

/// The path `P_n` on `n` nodes.
pub fn path_graph(n: usize) -> Graph {
    Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).expect("path edges are simple")
}

pub fn complete_graph(n: usize) -> Graph {
    Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).expect("simple")
}

/// `K_{1,leaves}` with the center at node 0.
pub fn star(leaves: usize) -> Graph {
    Graph::from_edges(leaves + 1, (1..=leaves).map(|v| (0, v))).expect("simple")
}

/// Uniform random labelled tree on `n` nodes (random recursive attachment).
pub fn random_tree(n: usize, seed: u64) -> Graph {
    let mut rng = rng_from_seed(seed);
    let mut g = Graph::empty(n);
    for v in 1..n {
        let u = rng.gen_range(0..v);
        g.add_edge(u, v).expect("tree edges are simple");
    }
    g
}

/// Erdős–Rényi `G(n, p)`.
pub fn random_gnp(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid!("edge probability {p} outside [0, 1]"));
    }
    let mut rng = rng_from_seed(seed);
    let mut g = Graph::empty(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(u, v)?;
            }
        }
    }
    Ok(g)
}

/// Uniform random `d`-regular simple graph by the pairing model with
/// rejection; gives up after a bounded number of attempts.
pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<Graph> {
    if d >= n.max(1) || !(n * d).is_multiple_of(2) {
        return Err(invalid!("no {d}-regular simple graph on {n} nodes"));
    }
    const ATTEMPTS: u32 = 10_000;
    let mut rng = rng_from_seed(seed);
    let mut stubs: Vec<NodeId> = (0..n).flat_map(|v| core::iter::repeat_n(v, d)).collect();
    'attempt: for _ in 0..ATTEMPTS {
        stubs.shuffle(&mut rng);
        let mut g = Graph::empty(n);
        for pair in stubs.chunks_exact(2) {
            if g.add_edge(pair[0], pair[1]).is_err() {
                continue 'attempt;
            }
        }
        return Ok(g);
    }
    Err(Error::GenerationFailed {
        attempts: ATTEMPTS,
        reason: format!("pairing model kept producing loops or multi-edges for n={n}, d={d}"),
    })
}

/// Extra pendant neighbors hung on one cycle node to make it heavy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Attachment {
    /// Position `j` of the cycle node `u_j` receiving the pendants.
    pub position: usize,
    pub pendants: usize,
}

/// Parameters of [`plant_cycle`].
#[derive(Clone, Debug, PartialEq)]
pub struct PlantSpec {
    pub n: usize,
    pub len: usize,
    pub attach: Option<Attachment>,
    /// Random chords added on top of the cycle + forest skeleton.
    pub extra_edges: usize,
    /// Require (by oracle re-check) that the planted cycle is the only
    /// `len`-cycle and that no shorter even cycle exists.
    pub clean: bool,
    pub seed: u64,
}

impl PlantSpec {
    pub fn new(n: usize, len: usize, seed: u64) -> Self {
        PlantSpec { n, len, attach: None, extra_edges: 0, clean: true, seed }
    }
}

/// Plants the cycle `u_j = j` for `j < len`. Pendants (if any) come next,
/// then the remaining nodes hang as a random forest off the nodes created
/// before them (never off the attachment node, so its degree stays exact).
pub fn plant_cycle(spec: &PlantSpec) -> Result<(Graph, Cycle)> {
    let PlantSpec { n, len, attach, extra_edges, clean, seed } = *spec;
    if len < 3 || len > n {
        return Err(invalid!("cannot plant a {len}-cycle in {n} nodes"));
    }
    if let Some(a) = attach {
        if a.position >= len || len + a.pendants > n {
            return Err(invalid!("attachment {a:?} does not fit a {len}-cycle in {n} nodes"));
        }
    }
    let cycle = Cycle::new((0..len).collect())?;
    let max_extra = (n * (n - 1) / 2).saturating_sub(n);
    if extra_edges > max_extra {
        return Err(invalid!("{extra_edges} extra edges do not fit in {n} nodes"));
    }
    const ATTEMPTS: u32 = 200;
    for attempt in 0..ATTEMPTS {
        let mut rng = crate::rng::derived_rng(seed, attempt as u64);
        let mut g = cycle_graph(len)?;
        for _ in len..n {
            g.add_node();
        }
        let mut next = len;
        let hub = attach.map(|a| a.position);
        if let Some(a) = attach {
            for _ in 0..a.pendants {
                g.add_edge(a.position, next)?;
                next += 1;
            }
        }
        for v in next..n {
            loop {
                let u = rng.gen_range(0..v);
                if Some(u) != hub {
                    g.add_edge(u, v)?;
                    break;
                }
            }
        }
        let mut added = 0;
        let mut tries = 0usize;
        while added < extra_edges {
            tries += 1;
            if tries > 1000 * (extra_edges + 1) {
                break;
            }
            let u = rng.gen_range(0..n);
            let v = rng.gen_range(0..n);
            if u == v || g.has_edge(u, v) || Some(u) == hub || Some(v) == hub {
                continue;
            }
            g.add_edge(u, v)?;
            added += 1;
        }
        if added < extra_edges {
            continue;
        }
        if !clean || is_clean(&g, &cycle)? {
            return Ok((g, cycle));
        }
    }
    Err(Error::GenerationFailed {
        attempts: ATTEMPTS,
        reason: format!("no clean instance with n={n}, len={len}, extra_edges={extra_edges}"),
    })
}

fn is_clean(g: &Graph, planted: &Cycle) -> Result<bool> {
    let limits = OracleLimits::default();
    let len = planted.len();
    for l in (4..len).step_by(2) {
        if !oracle::enumerate_cycles(g, l, &limits)?.is_empty() {
            return Ok(false);
        }
    }
    let same = oracle::enumerate_cycles(g, len, &limits)?;
    Ok(same.len() == 1 && same[0] == planted.canonical())
}
