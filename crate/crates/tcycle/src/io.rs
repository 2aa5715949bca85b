//! File formats: the plain-text graph format, the JSON label sidecar,
//! threshold tables and verdict reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use tcycle_core::adversarial::{GkInstance, InternalPath, Pattern, Role};
use tcycle_core::coloring::{Provenance, ThresholdTable};
use tcycle_core::{Cycle, Graph, NodeId};

/// Version stamped into every JSON and CSV artifact.
pub const SCHEMA_VERSION: u32 = 1;

/// Parses `"n m"` followed by `m` lines `"u v"` with `u < v`. Blank lines
/// and lines starting with `#` are skipped.
pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut lines =
        text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (line, header) = lines.next().ok_or_else(|| anyhow!("empty graph file"))?;
    let (n, m) = pair(header).with_context(|| format!("line {line}: bad header"))?;
    let mut g = Graph::empty(n);
    let mut seen = 0usize;
    for (line, text) in lines {
        let (u, v) = pair(text).with_context(|| format!("line {line}: bad edge"))?;
        if u >= v {
            bail!("line {line}: edge ({u}, {v}) must satisfy u < v");
        }
        if v >= n {
            bail!("line {line}: node {v} out of range for n = {n}");
        }
        g.add_edge(u, v).with_context(|| format!("line {line}"))?;
        seen += 1;
    }
    if seen != m {
        bail!("header announces {m} edges, file has {seen}");
    }
    g.check_invariants()?;
    Ok(g)
}

fn pair(text: &str) -> Result<(usize, usize)> {
    let mut it = text.split_whitespace();
    let a = it.next().ok_or_else(|| anyhow!("missing field"))?.parse()?;
    let b = it.next().ok_or_else(|| anyhow!("missing field"))?.parse()?;
    if it.next().is_some() {
        bail!("trailing fields");
    }
    Ok((a, b))
}

/// Formats `g` with its edges sorted, after optional `#` comment lines.
pub fn format_graph(g: &Graph, comments: &[String]) -> String {
    let mut edges: Vec<(NodeId, NodeId)> = g.edges().map(|(a, b)| (a.min(b), a.max(b))).collect();
    edges.sort_unstable();
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    let _ = writeln!(out, "{} {}", g.node_count(), edges.len());
    for (u, v) in edges {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

pub fn read_graph(path: &Path) -> Result<Graph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_graph(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_text(path, &to_json(value)?)
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// `path` with its extension replaced by `.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

/// Role map and parameters written next to a generated graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Labels {
    pub schema_version: u32,
    /// Generator name, e.g. `gk`, `g6`, `planted`.
    pub family: String,
    pub params: BTreeMap<String, serde_json::Value>,
    pub node_count: usize,
    pub edge_count: usize,
    /// The labeled cycle `u_0, u_1, ...`, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycle: Option<Vec<NodeId>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sources: Vec<NodeId>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sinks: Vec<NodeId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<Pattern>,
    /// Role of every node, indexed by node id.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub roles: Vec<Role>,
}

impl Labels {
    pub fn new(family: &str, g: &Graph) -> Self {
        Labels {
            schema_version: SCHEMA_VERSION,
            family: family.to_string(),
            params: BTreeMap::new(),
            node_count: g.node_count(),
            edge_count: g.edge_count(),
            cycle: None,
            sources: Vec::new(),
            sinks: Vec::new(),
            pattern: None,
            roles: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn of_instance(family: &str, inst: &GkInstance) -> Self {
        let mut l = Labels::new(family, &inst.graph).param("k", inst.k).param("N", inst.size);
        l.cycle = Some(inst.cycle.nodes().to_vec());
        l.sources = inst.sources.clone();
        l.sinks = inst.sinks.clone();
        l.pattern = Some(inst.pattern);
        l.roles = inst.roles.clone();
        l
    }

    pub fn check(&self, g: &Graph) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            bail!("labels schema_version {} is not {SCHEMA_VERSION}", self.schema_version);
        }
        if self.node_count != g.node_count() || self.edge_count != g.edge_count() {
            bail!(
                "labels describe {} nodes / {} edges, graph has {} / {}",
                self.node_count,
                self.edge_count,
                g.node_count(),
                g.edge_count()
            );
        }
        let all = self.cycle.iter().flatten().chain(&self.sources).chain(&self.sinks);
        if let Some(v) = all.copied().find(|&v| v >= g.node_count()) {
            bail!("labeled node {v} out of range");
        }
        Ok(())
    }

    pub fn labeled_cycle(&self) -> Result<Cycle> {
        let nodes = self.cycle.clone().ok_or_else(|| anyhow!("labels carry no cycle"))?;
        Ok(Cycle::new(nodes)?)
    }

    /// Rebuilds the adversarial instance from its role map.
    pub fn to_instance(&self, graph: Graph) -> Result<GkInstance> {
        self.check(&graph)?;
        if self.roles.len() != graph.node_count() {
            bail!("labels need one role per node for an adversarial instance");
        }
        let cycle = self.labeled_cycle()?;
        let k = cycle.len() / 2;
        let mut by_pair: BTreeMap<(usize, usize), BTreeMap<usize, NodeId>> = BTreeMap::new();
        for (v, role) in self.roles.iter().enumerate() {
            if let Role::Internal { p, q, j } = *role {
                by_pair.entry((p, q)).or_default().insert(j, v);
            }
        }
        let paths = by_pair
            .into_iter()
            .map(|((p, q), nodes)| InternalPath { p, q, nodes: nodes.into_values().collect() })
            .collect();
        Ok(GkInstance {
            graph,
            k,
            size: self.sources.len(),
            pattern: self.pattern.unwrap_or(Pattern::Complete),
            roles: self.roles.clone(),
            cycle,
            sources: self.sources.clone(),
            sinks: self.sinks.clone(),
            paths,
        })
    }
}

/// JSON form of a threshold table: `{"k": 7, "caps": {"1": 60}, "symmetric": true}`.
/// A `null` cap is unbounded.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableFile {
    pub k: usize,
    pub caps: BTreeMap<String, Option<u64>>,
    #[serde(default = "yes")]
    pub symmetric: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

fn yes() -> bool {
    true
}

impl TableFile {
    pub fn from_table(t: &ThresholdTable) -> Self {
        let caps = if t.is_symmetric() {
            t.half().iter().enumerate().map(|(i, c)| ((i + 1).to_string(), *c)).collect()
        } else {
            t.to_map().into_iter().map(|(i, c)| (i.to_string(), c)).collect()
        };
        TableFile { k: t.k(), caps, symmetric: t.is_symmetric(), provenance: Some(t.provenance()) }
    }

    pub fn to_table(&self) -> Result<ThresholdTable> {
        let mut map = BTreeMap::new();
        for (key, cap) in &self.caps {
            let i: usize = key.parse().with_context(|| format!("cap key {key:?} is not a color"))?;
            map.insert(i, *cap);
        }
        let t = ThresholdTable::from_map(self.k, &map, self.symmetric)?;
        Ok(t.with_provenance(self.provenance.unwrap_or(Provenance::Custom)))
    }
}

pub fn read_table(path: &Path) -> Result<ThresholdTable> {
    read_json::<TableFile>(path)?.to_table().with_context(|| format!("threshold table {}", path.display()))
}
