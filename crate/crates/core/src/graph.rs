//! Undirected simple graphs, light/heavy classification and cycles.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};

/// Dense node identifier in `0..node_count`. Doubles as the CONGEST
/// identifier a node sends during color-BFS.
pub type NodeId = usize;

/// Undirected simple graph with sorted adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Graph {
    adj: Vec<Vec<NodeId>>,
    edges: usize,
}

impl Graph {
    pub fn empty(node_count: usize) -> Self {
        Graph { adj: vec![Vec::new(); node_count], edges: 0 }
    }

    /// Builds a graph from an edge list, rejecting self-loops, duplicate
    /// edges and out-of-range endpoints.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut g = Graph::empty(node_count);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_node(&mut self) -> NodeId {
        self.adj.push(Vec::new());
        self.adj.len() - 1
    }

    pub fn add_edge(&mut self, u: NodeId, v: NodeId) -> Result<()> {
        let n = self.adj.len();
        if u >= n || v >= n {
            return Err(Error::InvalidGraph(format!("edge ({u}, {v}) out of range for {n} nodes")));
        }
        if u == v {
            return Err(Error::InvalidGraph(format!("self-loop at node {u}")));
        }
        match self.adj[u].binary_search(&v) {
            Ok(_) => Err(Error::InvalidGraph(format!("duplicate edge ({u}, {v})"))),
            Err(pos) => {
                self.adj[u].insert(pos, v);
                let pos = self.adj[v].binary_search(&u).unwrap_err();
                self.adj[v].insert(pos, u);
                self.edges += 1;
                Ok(())
            }
        }
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges
    }

    #[inline]
    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adj[v]
    }

    #[inline]
    pub fn degree(&self, v: NodeId) -> usize {
        self.adj[v].len()
    }

    #[inline]
    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        u < self.adj.len() && self.adj[u].binary_search(&v).is_ok()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, ns)| ns.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    /// Graph with node `v` renamed to `perm[v]`.
    pub fn relabel(&self, perm: &[NodeId]) -> Result<Graph> {
        let n = self.node_count();
        if perm.len() != n {
            return Err(invalid!("permutation has length {} for {} nodes", perm.len(), n));
        }
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || seen[p] {
                return Err(invalid!("not a permutation of 0..{n}"));
            }
            seen[p] = true;
        }
        Graph::from_edges(n, self.edges().map(|(u, v)| (perm[u], perm[v])))
    }

    /// Checks simplicity and symmetry of the adjacency structure.
    pub fn check_invariants(&self) -> Result<()> {
        let mut count = 0usize;
        for (u, ns) in self.adj.iter().enumerate() {
            for w in ns.windows(2) {
                if w[0] >= w[1] {
                    return Err(Error::InvalidGraph(format!("adjacency of {u} not strictly sorted")));
                }
            }
            for &v in ns {
                if v == u {
                    return Err(Error::InvalidGraph(format!("self-loop at node {u}")));
                }
                if v >= self.adj.len() || self.adj[v].binary_search(&u).is_err() {
                    return Err(Error::InvalidGraph(format!("asymmetric edge ({u}, {v})")));
                }
            }
            count += ns.len();
        }
        if count != 2 * self.edges {
            return Err(Error::InvalidGraph(format!("edge count {} does not match adjacency", self.edges)));
        }
        Ok(())
    }
}

/// `deg <= n^(1/k)`, decided exactly as `deg^k <= n`.
pub fn degree_is_light(deg: usize, n: usize, k: usize) -> bool {
    let mut acc: u128 = 1;
    for _ in 0..k {
        acc = match acc.checked_mul(deg as u128) {
            Some(x) => x,
            None => return false,
        };
        if acc > n as u128 {
            return false;
        }
    }
    true
}

/// Light/heavy split of the nodes against the degree threshold `n^(1/k)`.
/// Ties are light.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeClass {
    heavy: Vec<bool>,
    n: usize,
    k: usize,
}

impl NodeClass {
    pub fn is_heavy(&self, v: NodeId) -> bool {
        self.heavy[v]
    }

    pub fn is_light(&self, v: NodeId) -> bool {
        !self.heavy[v]
    }

    /// Mask of light nodes, `true` = light.
    pub fn light_mask(&self) -> Vec<bool> {
        self.heavy.iter().map(|h| !h).collect()
    }

    pub fn heavy_nodes(&self) -> Vec<NodeId> {
        (0..self.heavy.len()).filter(|&v| self.heavy[v]).collect()
    }

    /// The threshold `n^(1/k)` as a float, for display only.
    pub fn degree_threshold(&self) -> f64 {
        libm::pow(self.n as f64, 1.0 / self.k as f64)
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

/// Classifies every node as light (`deg <= n^(1/k)`) or heavy.
pub fn classify_nodes(g: &Graph, k: usize) -> Result<NodeClass> {
    if k < 2 {
        return Err(invalid!("k must be at least 2, got {k}"));
    }
    if g.node_count() == 0 {
        return Err(invalid!("graph is empty"));
    }
    let n = g.node_count();
    let heavy = (0..n).map(|v| !degree_is_light(g.degree(v), n, k)).collect();
    Ok(NodeClass { heavy, n, k })
}

/// A simple cycle given as its node sequence; consecutive nodes (cyclically)
/// are adjacent in the host graph.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct Cycle(Vec<NodeId>);

impl Cycle {
    pub fn new(nodes: Vec<NodeId>) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(Error::InvalidWitness(format!("cycle of length {} < 3", nodes.len())));
        }
        let mut sorted = nodes.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidWitness(format!("repeated node in {nodes:?}")));
        }
        Ok(Cycle(nodes))
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.0.contains(&v)
    }

    /// Rotation starting at the smallest id, oriented so that the second
    /// node is smaller than the last.
    pub fn canonical(&self) -> Cycle {
        let l = self.0.len();
        let start = (0..l).min_by_key(|&i| self.0[i]).unwrap_or(0);
        let fwd = self.0[(start + 1) % l];
        let bwd = self.0[(start + l - 1) % l];
        let nodes = if fwd <= bwd {
            (0..l).map(|i| self.0[(start + i) % l]).collect()
        } else {
            (0..l).map(|i| self.0[(start + l - i) % l]).collect()
        };
        Cycle(nodes)
    }

    /// Verifies that the cycle exists in `g`.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        let l = self.0.len();
        for i in 0..l {
            let (u, v) = (self.0[i], self.0[(i + 1) % l]);
            if !g.has_edge(u, v) {
                return Err(Error::InvalidWitness(format!("missing edge ({u}, {v}) in cycle {:?}", self.0)));
            }
        }
        Ok(())
    }
}
