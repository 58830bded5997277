//! Input/output directed graphs and the reachability primitives the rest of
//! the crate is built on.
//!
//! An [`IodGraph`] is a simple digraph whose nodes carry one of three roles.
//! Input nodes never receive edges, output nodes never emit them, and every
//! graph has at least one of each. Self-loops are allowed on intermediate
//! nodes only.
//!
//! Graphs arrive from the outside as a [`GraphDocument`], which may be
//! arbitrarily malformed; [`validate`] reports every violated constraint and
//! [`IodGraph::from_document`] only succeeds on a clean report. Once built,
//! nodes are stored in lexicographic id order and addressed by their index in
//! that order, so index order and id order coincide everywhere.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nodeset::NodeSet;

pub const FORMAT_VERSION: u32 = 1;

/// Directed edge between two node indices of one graph.
pub type Edge = (usize, usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeRole {
    Input,
    Output,
    Intermediate,
}

impl fmt::Display for NodeRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NodeRole::Input => "input",
            NodeRole::Output => "output",
            NodeRole::Intermediate => "intermediate",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    pub role: NodeRole,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag: Option<String>,
}

impl Node {
    pub fn new(id: impl Into<String>, role: NodeRole) -> Self {
        Node {
            id: id.into(),
            role,
            tag: None,
        }
    }

    pub fn tagged(mut self, tag: impl Into<String>) -> Self {
        self.tag = Some(tag.into());
        self
    }
}

fn default_version() -> u32 {
    FORMAT_VERSION
}

/// Unvalidated wire form of a graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDocument {
    #[serde(default = "default_version")]
    pub format_version: u32,
    pub nodes: Vec<Node>,
    pub edges: Vec<(String, String)>,
}

/// One violated IOD graph constraint.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    DuplicateNode { node: String },
    ConflictingRoles { node: String },
    UnknownEndpoint { edge: (String, String), node: String },
    DuplicateEdge { edge: (String, String) },
    InputHasIncoming { node: String, edge: (String, String) },
    OutputHasOutgoing { node: String, edge: (String, String) },
    SelfLoopOnNonIntermediate { node: String },
    NoInput,
    NoOutput,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateNode { node } => write!(f, "node `{node}` declared twice"),
            Violation::ConflictingRoles { node } => {
                write!(f, "node `{node}` declared as both input and output")
            }
            Violation::UnknownEndpoint { edge, node } => {
                write!(f, "edge {}->{} references unknown node `{node}`", edge.0, edge.1)
            }
            Violation::DuplicateEdge { edge } => {
                write!(f, "edge {}->{} appears more than once", edge.0, edge.1)
            }
            Violation::InputHasIncoming { node, edge } => {
                write!(f, "input `{node}` has incoming edge {}->{}", edge.0, edge.1)
            }
            Violation::OutputHasOutgoing { node, edge } => {
                write!(f, "output `{node}` has outgoing edge {}->{}", edge.0, edge.1)
            }
            Violation::SelfLoopOnNonIntermediate { node } => {
                write!(f, "self-loop on non-intermediate node `{node}`")
            }
            Violation::NoInput => f.write_str("graph has no input node"),
            Violation::NoOutput => f.write_str("graph has no output node"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks every IOD graph constraint on a raw document.
pub fn validate(doc: &GraphDocument) -> ValidationReport {
    let mut violations = Vec::new();
    let mut roles: HashMap<&str, NodeRole> = HashMap::new();
    for node in &doc.nodes {
        match roles.get(node.id.as_str()) {
            None => {
                roles.insert(&node.id, node.role);
            }
            Some(&prev) => {
                let pair = [prev, node.role];
                if pair.contains(&NodeRole::Input) && pair.contains(&NodeRole::Output) {
                    violations.push(Violation::ConflictingRoles {
                        node: node.id.clone(),
                    });
                } else {
                    violations.push(Violation::DuplicateNode {
                        node: node.id.clone(),
                    });
                }
            }
        }
    }

    let mut seen: HashSet<(&str, &str)> = HashSet::new();
    for (src, dst) in &doc.edges {
        let edge = (src.clone(), dst.clone());
        let mut known = true;
        for end in [src, dst] {
            if !roles.contains_key(end.as_str()) {
                violations.push(Violation::UnknownEndpoint {
                    edge: edge.clone(),
                    node: end.clone(),
                });
                known = false;
            }
        }
        if !seen.insert((src, dst)) {
            violations.push(Violation::DuplicateEdge { edge: edge.clone() });
        }
        if !known {
            continue;
        }
        if roles[dst.as_str()] == NodeRole::Input {
            violations.push(Violation::InputHasIncoming {
                node: dst.clone(),
                edge: edge.clone(),
            });
        }
        if roles[src.as_str()] == NodeRole::Output {
            violations.push(Violation::OutputHasOutgoing {
                node: src.clone(),
                edge: edge.clone(),
            });
        }
        if src == dst && roles[src.as_str()] != NodeRole::Intermediate {
            violations.push(Violation::SelfLoopOnNonIntermediate { node: src.clone() });
        }
    }

    if !roles.values().any(|&r| r == NodeRole::Input) {
        violations.push(Violation::NoInput);
    }
    if !roles.values().any(|&r| r == NodeRole::Output) {
        violations.push(Violation::NoOutput);
    }
    ValidationReport { violations }
}

/// A validated input/output directed graph. Immutable once built.
#[derive(Clone)]
pub struct IodGraph {
    nodes: Vec<Node>,
    index: HashMap<String, usize>,
    edges: Vec<Edge>,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
}

impl PartialEq for IodGraph {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.edges == other.edges
    }
}

impl Eq for IodGraph {}

impl fmt::Debug for IodGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IodGraph")
            .field("nodes", &self.nodes)
            .field("edges", &self.edge_ids().collect::<Vec<_>>())
            .finish()
    }
}

impl IodGraph {
    pub fn from_document(doc: &GraphDocument) -> Result<Self> {
        let report = validate(doc);
        if !report.is_ok() {
            return Err(Error::InvalidGraph(report));
        }
        let mut nodes = doc.nodes.clone();
        nodes.sort_by(|a, b| a.id.cmp(&b.id));
        let index: HashMap<String, usize> = nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.id.clone(), i))
            .collect();
        let mut edges: Vec<Edge> = doc
            .edges
            .iter()
            .map(|(s, d)| (index[s], index[d]))
            .collect();
        edges.sort_unstable();
        let mut succ = vec![Vec::new(); nodes.len()];
        let mut pred = vec![Vec::new(); nodes.len()];
        for &(s, d) in &edges {
            succ[s].push(d);
            pred[d].push(s);
        }
        Ok(IodGraph {
            nodes,
            index,
            edges,
            succ,
            pred,
        })
    }

    pub fn from_parts(
        nodes: impl IntoIterator<Item = Node>,
        edges: impl IntoIterator<Item = (String, String)>,
    ) -> Result<Self> {
        Self::from_document(&GraphDocument {
            format_version: FORMAT_VERSION,
            nodes: nodes.into_iter().collect(),
            edges: edges.into_iter().collect(),
        })
    }

    pub fn builder() -> GraphBuilder {
        GraphBuilder::default()
    }

    /// Canonical document: nodes and edges in lexicographic order.
    pub fn to_document(&self) -> GraphDocument {
        GraphDocument {
            format_version: FORMAT_VERSION,
            nodes: self.nodes.clone(),
            edges: self.edge_ids().map(|(s, d)| (s.to_owned(), d.to_owned())).collect(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, idx: usize) -> &Node {
        &self.nodes[idx]
    }

    pub fn id(&self, idx: usize) -> &str {
        &self.nodes[idx].id
    }

    pub fn role(&self, idx: usize) -> NodeRole {
        self.nodes[idx].role
    }

    pub fn tag(&self, idx: usize) -> Option<&str> {
        self.nodes[idx].tag.as_deref()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn require(&self, id: &str) -> Result<usize> {
        self.index_of(id).ok_or_else(|| Error::UnknownNode(id.to_owned()))
    }

    /// Sorted by `(src, dst)`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.edges.iter().map(|&(s, d)| (self.id(s), self.id(d)))
    }

    pub fn has_edge(&self, src: usize, dst: usize) -> bool {
        self.edges.binary_search(&(src, dst)).is_ok()
    }

    pub fn successors(&self, idx: usize) -> &[usize] {
        &self.succ[idx]
    }

    pub fn predecessors(&self, idx: usize) -> &[usize] {
        &self.pred[idx]
    }

    pub fn indices_with_role(&self, role: NodeRole) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(move |&i| self.nodes[i].role == role)
    }

    pub fn inputs(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices_with_role(NodeRole::Input)
    }

    pub fn outputs(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices_with_role(NodeRole::Output)
    }

    pub fn intermediates(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices_with_role(NodeRole::Intermediate)
    }

    pub fn role_set(&self, role: NodeRole) -> NodeSet {
        NodeSet::from_indices(self.node_count(), self.indices_with_role(role))
    }

    pub fn empty_set(&self) -> NodeSet {
        NodeSet::empty(self.node_count())
    }

    pub fn set_of_ids<'a>(&self, ids: impl IntoIterator<Item = &'a str>) -> Result<NodeSet> {
        let mut set = self.empty_set();
        for id in ids {
            set.insert(self.require(id)?);
        }
        Ok(set)
    }

    pub fn ids_of(&self, set: &NodeSet) -> Vec<String> {
        set.iter().map(|i| self.id(i).to_owned()).collect()
    }

    /// Nodes reachable from `sources` by directed paths of length zero or more.
    pub fn reachable_from(&self, sources: &NodeSet) -> NodeSet {
        self.sweep(sources, None, &self.succ)
    }

    /// Nodes from which some node of `targets` is reachable.
    pub fn reaches(&self, targets: &NodeSet) -> NodeSet {
        self.sweep(targets, None, &self.pred)
    }

    /// Forward reachability using only paths whose nodes all lie in `within`.
    /// Sources outside `within` are ignored.
    pub fn reachable_within(&self, sources: &NodeSet, within: &NodeSet) -> NodeSet {
        self.sweep(sources, Some(within), &self.succ)
    }

    /// Backward counterpart of [`IodGraph::reachable_within`].
    pub fn reaches_within(&self, targets: &NodeSet, within: &NodeSet) -> NodeSet {
        self.sweep(targets, Some(within), &self.pred)
    }

    fn sweep(&self, start: &NodeSet, within: Option<&NodeSet>, adj: &[Vec<usize>]) -> NodeSet {
        let allowed = |n: usize| within.is_none_or(|w| w.contains(n));
        let mut seen = self.empty_set();
        let mut stack: Vec<usize> = Vec::new();
        for s in start.iter().filter(|&s| allowed(s)) {
            if seen.insert(s) {
                stack.push(s);
            }
        }
        while let Some(n) = stack.pop() {
            for &m in &adj[n] {
                if allowed(m) && seen.insert(m) {
                    stack.push(m);
                }
            }
        }
        seen
    }

    pub fn reachable_from_ids(&self, sources: &[&str]) -> Result<BTreeSet<String>> {
        let set = self.set_of_ids(sources.iter().copied())?;
        Ok(self.ids_of(&self.reachable_from(&set)).into_iter().collect())
    }

    pub fn reaches_ids(&self, targets: &[&str]) -> Result<BTreeSet<String>> {
        let set = self.set_of_ids(targets.iter().copied())?;
        Ok(self.ids_of(&self.reaches(&set)).into_iter().collect())
    }

    /// `true` iff the graph has no directed cycle (self-loops count).
    pub fn is_feed_forward(&self) -> bool {
        let mut indegree: Vec<usize> = self.pred.iter().map(Vec::len).collect();
        let mut ready: Vec<usize> = (0..self.node_count()).filter(|&i| indegree[i] == 0).collect();
        let mut removed = 0;
        while let Some(n) = ready.pop() {
            removed += 1;
            for &m in &self.succ[n] {
                indegree[m] -= 1;
                if indegree[m] == 0 {
                    ready.push(m);
                }
            }
        }
        removed == self.node_count()
    }

    /// Reverses every edge and swaps the input and output roles.
    pub fn transpose(&self) -> IodGraph {
        let nodes = self.nodes.iter().map(|n| Node {
            role: match n.role {
                NodeRole::Input => NodeRole::Output,
                NodeRole::Output => NodeRole::Input,
                NodeRole::Intermediate => NodeRole::Intermediate,
            },
            ..n.clone()
        });
        let edges = self.edge_ids().map(|(s, d)| (d.to_owned(), s.to_owned()));
        IodGraph::from_parts(nodes, edges).expect("transpose of a valid graph is valid")
    }

    /// Drops the given nodes and every edge touching them.
    pub fn without_nodes(&self, drop: &NodeSet) -> Result<IodGraph> {
        let nodes = (0..self.node_count())
            .filter(|&i| !drop.contains(i))
            .map(|i| self.nodes[i].clone());
        let edges = self
            .edges
            .iter()
            .filter(|(s, d)| !drop.contains(*s) && !drop.contains(*d))
            .map(|&(s, d)| (self.id(s).to_owned(), self.id(d).to_owned()));
        IodGraph::from_parts(nodes, edges)
    }

    pub fn role_counts(&self) -> BTreeMap<NodeRole, usize> {
        let mut counts = BTreeMap::new();
        for n in &self.nodes {
            *counts.entry(n.role).or_insert(0) += 1;
        }
        counts
    }
}

/// Incremental construction helper, mostly for fixtures and tests.
#[derive(Clone, Debug, Default)]
pub struct GraphBuilder {
    nodes: Vec<Node>,
    edges: Vec<(String, String)>,
}

impl GraphBuilder {
    pub fn node(mut self, node: Node) -> Self {
        self.nodes.push(node);
        self
    }

    pub fn input(self, id: impl Into<String>) -> Self {
        self.node(Node::new(id, NodeRole::Input))
    }

    pub fn output(self, id: impl Into<String>) -> Self {
        self.node(Node::new(id, NodeRole::Output))
    }

    pub fn intermediate(self, id: impl Into<String>) -> Self {
        self.node(Node::new(id, NodeRole::Intermediate))
    }

    pub fn edge(mut self, src: impl Into<String>, dst: impl Into<String>) -> Self {
        self.edges.push((src.into(), dst.into()));
        self
    }

    pub fn edges<S: Into<String>>(mut self, edges: impl IntoIterator<Item = (S, S)>) -> Self {
        self.edges
            .extend(edges.into_iter().map(|(s, d)| (s.into(), d.into())));
        self
    }

    pub fn document(self) -> GraphDocument {
        GraphDocument {
            format_version: FORMAT_VERSION,
            nodes: self.nodes,
            edges: self.edges,
        }
    }

    pub fn build(self) -> Result<IodGraph> {
        IodGraph::from_document(&self.document())
    }
}

/// Number of distinct edge slots a simple IOD graph with the given node
/// counts can use: input to intermediate or output, intermediate to
/// intermediate (with or without self-loops), intermediate to output.
pub fn edge_universe_size(inputs: u64, outputs: u64, intermediates: u64, self_loops: bool) -> u64 {
    let inner = intermediates * intermediates - if self_loops { 0 } else { intermediates };
    inputs * (intermediates + outputs) + inner + intermediates * outputs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> IodGraph {
        IodGraph::builder()
            .input("i")
            .intermediate("a")
            .output("o")
            .edge("i", "a")
            .edge("a", "o")
            .build()
            .unwrap()
    }

    #[test]
    fn minimal_graph_is_valid() {
        let doc = IodGraph::builder().input("i").output("o").edge("i", "o").document();
        assert!(validate(&doc).is_ok());
    }

    #[test]
    fn reversed_edge_violates_both_ends() {
        let doc = IodGraph::builder().input("i").output("o").edge("o", "i").document();
        let report = validate(&doc);
        assert!(report.violations.contains(&Violation::InputHasIncoming {
            node: "i".into(),
            edge: ("o".into(), "i".into()),
        }));
        assert!(report.violations.contains(&Violation::OutputHasOutgoing {
            node: "o".into(),
            edge: ("o".into(), "i".into()),
        }));
        assert_eq!(report.violations.len(), 2);
    }

    #[test]
    fn missing_output_is_reported() {
        let doc = IodGraph::builder().input("i").document();
        assert_eq!(validate(&doc).violations, vec![Violation::NoOutput]);
    }

    #[test]
    fn structural_violations() {
        let doc = IodGraph::builder()
            .input("i")
            .output("o")
            .node(Node::new("i", NodeRole::Output))
            .intermediate("a")
            .intermediate("a")
            .edge("i", "a")
            .edge("i", "a")
            .edge("a", "ghost")
            .document();
        let v = validate(&doc).violations;
        assert!(v.contains(&Violation::ConflictingRoles { node: "i".into() }));
        assert!(v.contains(&Violation::DuplicateNode { node: "a".into() }));
        assert!(v.contains(&Violation::DuplicateEdge {
            edge: ("i".into(), "a".into())
        }));
        assert!(v.contains(&Violation::UnknownEndpoint {
            edge: ("a".into(), "ghost".into()),
            node: "ghost".into()
        }));
    }

    #[test]
    fn self_loops_only_on_intermediates() {
        let ok = IodGraph::builder().input("i").intermediate("a").output("o").edge("a", "a");
        assert!(validate(&ok.document()).is_ok());
        let bad = IodGraph::builder().input("i").output("o").edge("i", "i").document();
        assert!(validate(&bad)
            .violations
            .contains(&Violation::SelfLoopOnNonIntermediate { node: "i".into() }));
    }

    #[test]
    fn feed_forward_detection() {
        assert!(chain().is_feed_forward());
        let two_cycle = IodGraph::builder()
            .input("i")
            .intermediate("a")
            .intermediate("b")
            .output("o")
            .edges([("a", "b"), ("b", "a")])
            .build()
            .unwrap();
        assert!(!two_cycle.is_feed_forward());
        let self_loop = IodGraph::builder()
            .input("i")
            .intermediate("a")
            .output("o")
            .edge("a", "a")
            .build()
            .unwrap();
        assert!(!self_loop.is_feed_forward());
    }

    #[test]
    fn reachability_examples() {
        let g = chain();
        let all: BTreeSet<String> = ["a", "i", "o"].iter().map(|s| s.to_string()).collect();
        assert_eq!(g.reachable_from_ids(&["i"]).unwrap(), all);
        assert_eq!(g.reachable_from_ids(&["o"]).unwrap().len(), 1);
        assert_eq!(g.reaches_ids(&["o"]).unwrap(), all);
        assert_eq!(g.reaches_ids(&["i"]).unwrap().len(), 1);

        let looped = IodGraph::builder()
            .input("i")
            .intermediate("a")
            .output("o")
            .edges([("i", "a"), ("a", "a")])
            .build()
            .unwrap();
        let got = looped.reachable_from_ids(&["i"]).unwrap();
        assert_eq!(got.into_iter().collect::<Vec<_>>(), vec!["a", "i"]);

        let split = IodGraph::builder()
            .input("i")
            .intermediate("a")
            .intermediate("b")
            .output("o")
            .edges([("i", "a"), ("b", "o")])
            .build()
            .unwrap();
        let back = split.reaches_ids(&["o"]).unwrap();
        assert_eq!(back.into_iter().collect::<Vec<_>>(), vec!["b", "o"]);

        assert!(matches!(g.reachable_from_ids(&["zz"]), Err(Error::UnknownNode(_))));
    }

    #[test]
    fn edge_universe_counts() {
        assert_eq!(edge_universe_size(3, 2, 9, true), 132);
        assert_eq!(edge_universe_size(1, 1, 0, true), 1);
        assert_eq!(edge_universe_size(1, 1, 0, false), 1);
        assert_eq!(edge_universe_size(3, 2, 9, false), 123);
    }

    #[test]
    fn canonical_order() {
        let g = IodGraph::builder()
            .output("z")
            .input("b")
            .input("a")
            .edges([("b", "z"), ("a", "z")])
            .build()
            .unwrap();
        let doc = g.to_document();
        let ids: Vec<_> = doc.nodes.iter().map(|n| n.id.as_str()).collect();
        assert_eq!(ids, vec!["a", "b", "z"]);
        assert_eq!(doc.edges[0], ("a".to_string(), "z".to_string()));
    }
}
