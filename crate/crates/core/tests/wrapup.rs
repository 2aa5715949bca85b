//! Sources around `u_0` whose thresholded phase misses a well-colored
//! `4l`-cycle in a graph free of shorter `C_{4j}`.

use std::collections::BTreeMap;

use rand::Rng;
use tcycle_core::coloring::{AbortMode, Color, ColorAssignment, GATE_COLOR};
use tcycle_core::detectors::{heavy_phase, incremental_thresholds, Family};
use tcycle_core::graph::classify_nodes;
use tcycle_core::oracle::{self, OracleLimits};
use tcycle_core::rng::rng_from_seed;
use tcycle_core::sim::CostModel;
use tcycle_core::{Graph, NodeId};

struct Instance {
    g: Graph,
    colors: Vec<Color>,
    l: usize,
}

impl Instance {
    /// `C_{4l}` as nodes `0..4l` colored in order.
    fn new(l: usize) -> Self {
        let len = 4 * l;
        let mut g = Graph::empty(len);
        for j in 0..len {
            g.add_edge(j, (j + 1) % len).unwrap();
        }
        Instance { g, colors: (0..len as Color).collect(), l }
    }

    fn node(&mut self, color: Color) -> NodeId {
        self.colors.push(color);
        self.g.add_node()
    }

    fn gate(&mut self) -> NodeId {
        let s = self.node(GATE_COLOR);
        self.g.add_edge(0, s).unwrap();
        s
    }

    /// `m` disjoint well-colored paths from `s` into `u_i` (forward) or into
    /// `u_{4l-i}` (backward); each color-0 node gets a leaf to be heavy.
    fn fan(&mut self, s: NodeId, i: usize, backward: bool, m: usize) {
        let len = 4 * self.l as Color;
        for _ in 0..m {
            let mut prev = s;
            for j in 0..i as Color {
                let c = if backward && j > 0 { len - j } else { j };
                let v = self.node(c);
                self.g.add_edge(prev, v).unwrap();
                if j == 0 {
                    let leaf = self.node(1);
                    self.g.add_edge(v, leaf).unwrap();
                }
                prev = v;
            }
            let target = if backward { 4 * self.l - i } else { i };
            self.g.add_edge(prev, target).unwrap();
        }
    }

    /// Gate-colored leaves on `u_0` until it has the largest degree on the cycle.
    fn balance(&mut self) {
        let top = (1..4 * self.l).map(|j| self.g.degree(j)).max().unwrap();
        while self.g.degree(0) <= top {
            self.gate();
        }
    }
}

struct Outcome {
    blockers: Vec<NodeId>,
    /// cycle node -> blockers whose phase aborted there
    aborted_at: BTreeMap<NodeId, Vec<NodeId>>,
}

fn blocking_sources(inst: &Instance) -> Option<Outcome> {
    let l = inst.l;
    let g = &inst.g;
    let limits = OracleLimits { max_steps: 50_000_000, ..OracleLimits::default() };
    for j in 1..l {
        if oracle::count_cycles(g, 4 * j, &limits).unwrap() > 0 {
            return None;
        }
    }
    let k = 2 * l;
    let colors = ColorAssignment::from_colors(k, true, inst.colors.clone()).unwrap();
    let class = classify_nodes(g, k).unwrap();
    assert!(class.is_heavy(0));
    let table = incremental_thresholds(l, Family::FourL).unwrap();
    let mut out = Outcome { blockers: Vec::new(), aborted_at: BTreeMap::new() };
    for &s in g.neighbors(0) {
        if colors.get(s) != GATE_COLOR || oracle::node_in_cycle_of_length(g, s, 4 * l, &limits).unwrap() {
            continue;
        }
        let phase = heavy_phase(g, &class, &colors, s, Some(&table), AbortMode::Full, CostModel::default()).unwrap();
        if phase.rejected() {
            continue;
        }
        out.blockers.push(s);
        for v in phase.trace.aborted().filter(|&v| v < 4 * l) {
            out.aborted_at.entry(v).or_default().push(s);
        }
    }
    Some(out)
}

#[test]
fn blocking_fans_on_both_arms_give_two_blockers_at_l2() {
    let mut inst = Instance::new(2);
    // u_2 receives 5 > T(2) = 3 identifiers from the first fan, u_6 from the second
    let s = inst.gate();
    inst.fan(s, 2, false, 4);
    let t = inst.gate();
    inst.fan(t, 2, true, 4);
    inst.balance();
    let out = blocking_sources(&inst).expect("instance is C4-free");
    assert_eq!(out.blockers, vec![s, t]);
    assert_eq!(out.aborted_at.get(&2), Some(&vec![s]));
    assert_eq!(out.aborted_at.get(&6), Some(&vec![t]));
    // one blocker per even node of each arm: 2 (l - 1) in total, above l - 1
    assert!(out.blockers.len() > inst.l - 1);
}

#[test]
fn one_fan_below_the_cap_does_not_block() {
    let mut inst = Instance::new(2);
    let s = inst.gate();
    // 3 paths: u_2 receives u_0's identifier plus 2 more, within T(2) = 3
    inst.fan(s, 2, false, 2);
    inst.balance();
    let out = blocking_sources(&inst).unwrap();
    assert!(out.blockers.is_empty());
}

#[test]
fn each_even_cycle_node_blocks_at_most_one_source() {
    let mut checked = 0;
    for seed in 0..150u64 {
        let mut rng = rng_from_seed(seed);
        let l = if seed % 3 == 0 { 3 } else { 2 };
        let mut inst = Instance::new(l);
        let t = incremental_thresholds(l, Family::FourL).unwrap();
        let mut gates: Vec<NodeId> = Vec::new();
        for _ in 0..rng.gen_range(1..=4) {
            let s = if gates.is_empty() || rng.gen_bool(0.6) {
                let s = inst.gate();
                gates.push(s);
                s
            } else {
                gates[rng.gen_range(0..gates.len())]
            };
            let i = 2 * rng.gen_range(1..l) + usize::from(rng.gen_bool(0.25));
            let need = (i as u64 + 1) * t.cap(i as Color - 1).unwrap();
            let m = rng.gen_range(1..=need as usize + 2);
            inst.fan(s, i, rng.gen_bool(0.5), m);
        }
        inst.balance();
        let Some(out) = blocking_sources(&inst) else { continue };
        checked += 1;
        for (&v, srcs) in &out.aborted_at {
            assert_eq!(srcs.len(), 1, "seed {seed}: node {v} aborted for {srcs:?}");
            let pos = v.min(4 * l - v);
            assert!(pos % 2 == 0 && pos >= 2 && pos < 2 * l, "seed {seed}: abort at u_{v}");
        }
        assert!(out.blockers.len() <= 2 * (l - 1), "seed {seed}");
    }
    assert!(checked >= 50, "only {checked} instances were free of shorter members");
}
