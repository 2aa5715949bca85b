//! Round-synchronous CONGEST engine.
//!
//! A phase runs `steps` communication rounds. In round `t` every active node
//! reads the messages delivered to it (those sent in round `t - 1`) and may
//! send messages to its neighbors, which are delivered in round `t + 1`.
//! Round 0 activates the protocol's initiators; afterwards only nodes with a
//! non-empty inbox are scheduled. After the last communication round the
//! engine runs one final delivery round (`t = steps`) in which nodes may
//! only compute; whatever they send then is discarded.
//!
//! Bandwidth is one identifier per edge per round. Cost is charged post hoc
//! from the trace: under [`CostModel::SerializedCongestion`] a step in which
//! some node forwards `m` distinct identifiers costs `m` rounds.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

/// How a communication step is charged.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum CostModel {
    /// Every step costs one round.
    UnitStep,
    /// A step costs the largest number of distinct identifiers any single
    /// node forwards in it (at least one).
    #[default]
    SerializedCongestion,
}

/// A message payload carrying one CONGEST identifier.
pub trait Message: Clone + Ord {
    fn identifier(&self) -> NodeId;
}

impl Message for NodeId {
    fn identifier(&self) -> NodeId {
        *self
    }
}

/// Messages a node emits in one round.
#[derive(Debug)]
pub struct Outbox<M> {
    sends: Vec<(NodeId, M)>,
    aborted: bool,
}

impl<M> Outbox<M> {
    fn new() -> Self {
        Outbox { sends: Vec::new(), aborted: false }
    }

    pub fn send(&mut self, to: NodeId, msg: M) {
        self.sends.push((to, msg));
    }

    /// Records that this node aborted the current phase.
    pub fn abort(&mut self) {
        self.aborted = true;
    }
}

/// A deterministic local algorithm executed by every node.
pub trait Protocol {
    type Msg: Message;

    /// Nodes scheduled in round 0, in any order.
    fn initiators(&self) -> Vec<NodeId>;

    /// `inbox` holds `(sender, message)` pairs sorted by sender then message.
    fn on_round(&mut self, round: usize, node: NodeId, inbox: &[(NodeId, Self::Msg)], out: &mut Outbox<Self::Msg>);
}

/// Load of one communication step.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StepTrace {
    pub round: usize,
    /// Largest number of distinct identifiers forwarded by a single node.
    pub max_forwarded: usize,
    /// Nodes that aborted in this step, sorted.
    pub aborted: Vec<NodeId>,
    pub messages: usize,
    pub rounds_charged: u64,
}

/// Per-step congestion counters of one phase.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PhaseTrace {
    pub cost_model: CostModel,
    pub steps: Vec<StepTrace>,
    pub total_rounds: u64,
}

impl PhaseTrace {
    pub fn aborted(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.steps.iter().flat_map(|s| s.aborted.iter().copied())
    }

    pub fn abort_count(&self) -> usize {
        self.steps.iter().map(|s| s.aborted.len()).sum()
    }

    pub fn total_forwarded(&self) -> usize {
        self.steps.iter().map(|s| s.max_forwarded).sum()
    }
}

/// Executes `steps` communication rounds of `protocol` on `g`.
pub fn run_phase<P: Protocol>(g: &Graph, protocol: &mut P, steps: usize, cost: CostModel) -> Result<PhaseTrace> {
    let n = g.node_count();
    let mut inbox: Vec<Vec<(NodeId, P::Msg)>> = vec![Vec::new(); n];
    let mut next: Vec<Vec<(NodeId, P::Msg)>> = vec![Vec::new(); n];
    let mut active: Vec<NodeId> = protocol.initiators();
    active.sort_unstable();
    active.dedup();
    if let Some(&v) = active.iter().find(|&&v| v >= n) {
        return Err(Error::InvalidParameter(alloc::format!("initiator {v} is not a node")));
    }
    let mut trace = PhaseTrace { cost_model: cost, steps: Vec::with_capacity(steps), total_rounds: 0 };
    let mut out = Outbox::new();
    let mut ids: Vec<NodeId> = Vec::new();
    let mut touched: Vec<NodeId> = Vec::new();

    for round in 0..=steps {
        let mut step = StepTrace { round, ..StepTrace::default() };
        for &v in &active {
            let mut msgs = core::mem::take(&mut inbox[v]);
            msgs.sort_unstable();
            out.sends.clear();
            out.aborted = false;
            protocol.on_round(round, v, &msgs, &mut out);
            if out.aborted {
                step.aborted.push(v);
            }
            if round == steps {
                continue;
            }
            ids.clear();
            for (to, msg) in out.sends.drain(..) {
                if !g.has_edge(v, to) {
                    return Err(Error::NonIncidentEdge { from: v, to, round });
                }
                ids.push(msg.identifier());
                if next[to].is_empty() {
                    touched.push(to);
                }
                next[to].push((v, msg));
                step.messages += 1;
            }
            ids.sort_unstable();
            ids.dedup();
            step.max_forwarded = step.max_forwarded.max(ids.len());
            msgs.clear();
            inbox[v] = msgs;
        }
        if round == steps {
            break;
        }
        step.rounds_charged = match cost {
            CostModel::UnitStep => 1,
            CostModel::SerializedCongestion => step.max_forwarded.max(1) as u64,
        };
        trace.total_rounds += step.rounds_charged;
        trace.steps.push(step);
        core::mem::swap(&mut inbox, &mut next);
        touched.sort_unstable();
        active.clear();
        active.append(&mut touched);
    }
    Ok(trace)
}

/// `min(k * |W|, max_degree^(k-1))`: the round ceiling for an unthresholded
/// color-BFS from `|W|` sources (saturating).
pub fn rounds_upper_bound(k: usize, sources: usize, max_degree: usize) -> u64 {
    let linear = (k as u64).saturating_mul(sources as u64);
    let mut power: u64 = 1;
    for _ in 1..k {
        power = power.saturating_mul(max_degree as u64);
    }
    linear.min(power)
}
