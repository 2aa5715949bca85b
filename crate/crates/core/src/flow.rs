//! Integral max-flow (Edmonds–Karp) and internally vertex-disjoint paths.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::graph::NodeId;

/// Directed network with integer capacities. Edge `e` and its residual
/// twin are stored at `e` and `e ^ 1`.
#[derive(Clone, Debug, Default)]
pub struct FlowNetwork {
    adj: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<u64>,
    initial: Vec<u64>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork { adj: vec![Vec::new(); nodes], ..FlowNetwork::default() }
    }

    /// Adds arc `u -> v` and returns its index.
    pub fn add_arc(&mut self, u: usize, v: usize, cap: u64) -> usize {
        let e = self.to.len();
        self.to.extend([v, u]);
        self.cap.extend([cap, 0]);
        self.initial.extend([cap, 0]);
        self.adj[u].push(e);
        self.adj[v].push(e + 1);
        e
    }

    /// Flow currently routed through arc `e`.
    pub fn flow(&self, e: usize) -> u64 {
        self.initial[e] - self.cap[e]
    }

    /// Pushes a maximum flow from `s` to `t` and returns its value.
    pub fn max_flow(&mut self, s: usize, t: usize) -> u64 {
        if s == t {
            return 0;
        }
        let mut total = 0u64;
        let mut parent: Vec<usize> = vec![usize::MAX; self.adj.len()];
        loop {
            parent.fill(usize::MAX);
            let mut queue = VecDeque::from([s]);
            let mut reached = false;
            'bfs: while let Some(u) = queue.pop_front() {
                for &e in &self.adj[u] {
                    let v = self.to[e];
                    if self.cap[e] > 0 && v != s && parent[v] == usize::MAX {
                        parent[v] = e;
                        if v == t {
                            reached = true;
                            break 'bfs;
                        }
                        queue.push_back(v);
                    }
                }
            }
            if !reached {
                return total;
            }
            let mut bottleneck = u64::MAX;
            let mut v = t;
            while v != s {
                let e = parent[v];
                bottleneck = bottleneck.min(self.cap[e]);
                v = self.to[e ^ 1];
            }
            v = t;
            while v != s {
                let e = parent[v];
                self.cap[e] -= bottleneck;
                self.cap[e ^ 1] += bottleneck;
                v = self.to[e ^ 1];
            }
            total += bottleneck;
        }
    }
}

/// Maximum family of `s`-`t` paths in the digraph `arcs` over nodes
/// `0..node_count` that pairwise share only `s` and `t`. Each path is listed
/// from `s` to `t`.
pub fn internally_disjoint_paths(
    node_count: usize,
    arcs: &[(NodeId, NodeId)],
    s: NodeId,
    t: NodeId,
) -> Vec<Vec<NodeId>> {
    // v splits into v_in = 2v and v_out = 2v + 1
    let unbounded = node_count as u64 + 1;
    let mut net = FlowNetwork::new(2 * node_count);
    let mut through = vec![0usize; node_count];
    for (v, slot) in through.iter_mut().enumerate() {
        let c = if v == s || v == t { unbounded } else { 1 };
        *slot = net.add_arc(2 * v, 2 * v + 1, c);
    }
    let mut out_arcs: Vec<Vec<(usize, NodeId)>> = vec![Vec::new(); node_count];
    for &(u, v) in arcs {
        if u == v || v == s || u == t {
            continue;
        }
        let e = net.add_arc(2 * u + 1, 2 * v, 1);
        out_arcs[u].push((e, v));
    }
    let value = net.max_flow(2 * s + 1, 2 * t);
    let mut used = vec![false; net.to.len()];
    let mut paths = Vec::with_capacity(value as usize);
    for _ in 0..value {
        let mut path = vec![s];
        let mut u = s;
        while u != t {
            let &(e, v) = out_arcs[u].iter().find(|&&(e, _)| !used[e] && net.flow(e) > 0).expect("flow conservation");
            used[e] = true;
            path.push(v);
            u = v;
        }
        paths.push(path);
    }
    paths
}
