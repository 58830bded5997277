//! IO partitions, their separating membranes, contiguousness, and lazy
//! enumeration of every partition of a graph.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, IodGraph, NodeRole};
use crate::nodeset::NodeSet;

/// Two-part split of a graph's nodes: inputs on the `psi` side, outputs on
/// the `omega` side.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IoPartition {
    psi: NodeSet,
    omega: NodeSet,
}

impl IoPartition {
    pub fn new(graph: &IodGraph, psi: NodeSet) -> Result<Self> {
        if psi.universe() != graph.node_count() {
            return Err(Error::InvalidPartition(format!(
                "node set sized for {} nodes, graph has {}",
                psi.universe(),
                graph.node_count()
            )));
        }
        let omega = psi.complement();
        let part = IoPartition { psi, omega };
        part.check(graph)?;
        Ok(part)
    }

    pub fn from_ids<'a>(graph: &IodGraph, psi: impl IntoIterator<Item = &'a str>) -> Result<Self> {
        Self::new(graph, graph.set_of_ids(psi)?)
    }

    /// The partition with `psi` equal to the input set.
    pub fn inputs_only(graph: &IodGraph) -> Self {
        Self::new(graph, graph.role_set(NodeRole::Input)).expect("inputs-only split is valid")
    }

    /// The partition with `omega` equal to the output set.
    pub fn outputs_only(graph: &IodGraph) -> Self {
        Self::new(graph, graph.role_set(NodeRole::Output).complement())
            .expect("outputs-only split is valid")
    }

    /// Verifies this partition belongs to `graph`.
    pub fn check(&self, graph: &IodGraph) -> Result<()> {
        if self.psi.universe() != graph.node_count() {
            return Err(Error::InvalidPartition(
                "partition does not belong to this graph".into(),
            ));
        }
        if let Some(i) = graph.inputs().find(|&i| !self.psi.contains(i)) {
            return Err(Error::InvalidPartition(format!(
                "input `{}` is not in the input part",
                graph.id(i)
            )));
        }
        if let Some(o) = graph.outputs().find(|&o| self.psi.contains(o)) {
            return Err(Error::InvalidPartition(format!(
                "output `{}` is in the input part",
                graph.id(o)
            )));
        }
        Ok(())
    }

    pub fn psi(&self) -> &NodeSet {
        &self.psi
    }

    pub fn omega(&self) -> &NodeSet {
        &self.omega
    }

    pub fn psi_ids(&self, graph: &IodGraph) -> Vec<String> {
        graph.ids_of(&self.psi)
    }

    pub fn omega_ids(&self, graph: &IodGraph) -> Vec<String> {
        graph.ids_of(&self.omega)
    }
}

pub fn make_partition(graph: &IodGraph, psi: &[&str]) -> Result<IoPartition> {
    IoPartition::from_ids(graph, psi.iter().copied())
}

/// Cut edges of a partition: forward links go from `psi` to `omega`,
/// backward links the other way. Both lists are sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Membrane {
    pub forward: Vec<Edge>,
    pub backward: Vec<Edge>,
}

impl Membrane {
    pub fn len(&self) -> usize {
        self.forward.len() + self.backward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn membrane(graph: &IodGraph, part: &IoPartition) -> Result<Membrane> {
    part.check(graph)?;
    let mut m = Membrane::default();
    for &(s, d) in graph.edges() {
        match (part.psi.contains(s), part.psi.contains(d)) {
            (true, false) => m.forward.push((s, d)),
            (false, true) => m.backward.push((s, d)),
            _ => {}
        }
    }
    Ok(m)
}

/// Every non-input node of `psi` is reachable from an input along a path
/// that stays inside `psi`.
pub fn is_input_contiguous(graph: &IodGraph, part: &IoPartition) -> bool {
    let inputs = graph.role_set(NodeRole::Input);
    let reached = graph.reachable_within(&inputs, &part.psi);
    part.psi.is_subset(&reached)
}

/// Every non-output node of `omega` reaches an output along a path that
/// stays inside `omega`.
pub fn is_output_contiguous(graph: &IodGraph, part: &IoPartition) -> bool {
    let outputs = graph.role_set(NodeRole::Output);
    let reaching = graph.reaches_within(&outputs, &part.omega);
    part.omega.is_subset(&reaching)
}

pub fn is_contiguous(graph: &IodGraph, part: &IoPartition) -> bool {
    is_input_contiguous(graph, part) && is_output_contiguous(graph, part)
}

/// Nodes of `omega` with no path to an output inside `omega`.
pub fn output_contiguity_witnesses(graph: &IodGraph, part: &IoPartition) -> Vec<String> {
    let outputs = graph.role_set(NodeRole::Output);
    let reaching = graph.reaches_within(&outputs, &part.omega);
    part.omega
        .iter()
        .filter(|&n| !reaching.contains(n))
        .map(|n| graph.id(n).to_owned())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PartitionFilter {
    All,
    InputContiguous,
    OutputContiguous,
    Contiguous,
    /// Nodes sharing a layer always land in the same part.
    LayerRespecting(HashMap<String, usize>),
}

enum CompiledFilter {
    All,
    InputContiguous,
    OutputContiguous,
    Contiguous,
    Layers(Vec<usize>),
}

/// Lazy stream over IO partitions in lexicographic order of intermediate
/// membership: the intermediate with the smallest id is the most
/// significant position and "in `omega`" sorts before "in `psi`".
pub struct Partitions<'g> {
    graph: &'g IodGraph,
    intermediates: Vec<usize>,
    base: NodeSet,
    next: u64,
    end: u64,
    filter: CompiledFilter,
}

impl<'g> Partitions<'g> {
    /// Number of candidates before filtering, `2^m`.
    pub fn candidate_count(&self) -> u64 {
        self.end
    }

    fn build(&self, code: u64) -> IoPartition {
        let m = self.intermediates.len();
        let mut psi = self.base.clone();
        for (pos, &n) in self.intermediates.iter().enumerate() {
            if code >> (m - 1 - pos) & 1 == 1 {
                psi.insert(n);
            }
        }
        let omega = psi.complement();
        IoPartition { psi, omega }
    }

    fn accepts(&self, part: &IoPartition) -> bool {
        match &self.filter {
            CompiledFilter::All => true,
            CompiledFilter::InputContiguous => is_input_contiguous(self.graph, part),
            CompiledFilter::OutputContiguous => is_output_contiguous(self.graph, part),
            CompiledFilter::Contiguous => is_contiguous(self.graph, part),
            CompiledFilter::Layers(layer_of) => {
                let mut side: HashMap<usize, bool> = HashMap::new();
                (0..self.graph.node_count()).all(|n| {
                    let in_psi = part.psi.contains(n);
                    *side.entry(layer_of[n]).or_insert(in_psi) == in_psi
                })
            }
        }
    }
}

impl Iterator for Partitions<'_> {
    type Item = IoPartition;

    fn next(&mut self) -> Option<IoPartition> {
        while self.next < self.end {
            let part = self.build(self.next);
            self.next += 1;
            if self.accepts(&part) {
                return Some(part);
            }
        }
        None
    }
}

pub fn enumerate_partitions<'g>(graph: &'g IodGraph, filter: &PartitionFilter) -> Result<Partitions<'g>> {
    let intermediates: Vec<usize> = graph.intermediates().collect();
    if intermediates.len() >= 64 {
        return Err(Error::BudgetExceeded {
            required: 1u128 << intermediates.len().min(127),
            budget: 1u128 << 63,
        });
    }
    let filter = match filter {
        PartitionFilter::All => CompiledFilter::All,
        PartitionFilter::InputContiguous => CompiledFilter::InputContiguous,
        PartitionFilter::OutputContiguous => CompiledFilter::OutputContiguous,
        PartitionFilter::Contiguous => CompiledFilter::Contiguous,
        PartitionFilter::LayerRespecting(layers) => {
            let mut layer_of = Vec::with_capacity(graph.node_count());
            for node in graph.nodes() {
                match layers.get(&node.id) {
                    Some(&l) => layer_of.push(l),
                    None => {
                        return Err(Error::InvalidConfig(format!(
                            "layer map has no entry for node `{}`",
                            node.id
                        )))
                    }
                }
            }
            CompiledFilter::Layers(layer_of)
        }
    };
    Ok(Partitions {
        graph,
        end: 1u64 << intermediates.len(),
        intermediates,
        base: graph.role_set(NodeRole::Input),
        next: 0,
        filter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions;

    fn ids(g: &IodGraph, edges: &[Edge]) -> Vec<(String, String)> {
        edges
            .iter()
            .map(|&(s, d)| (g.id(s).to_owned(), g.id(d).to_owned()))
            .collect()
    }

    fn pairs(list: &[(&str, &str)]) -> Vec<(String, String)> {
        list.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }

    #[test]
    fn partition_construction() {
        let g = constructions::perceptron(2, 2, 1);
        let p = make_partition(&g, &["i1", "i2"]).unwrap();
        assert_eq!(p.omega_ids(&g), vec!["h1", "h2", "o1"]);
        let q = make_partition(&g, &["i1", "i2", "h1", "h2"]).unwrap();
        assert_eq!(q, IoPartition::outputs_only(&g));
        assert!(matches!(
            make_partition(&g, &["i1", "i2", "o1"]),
            Err(Error::InvalidPartition(_))
        ));
        assert!(matches!(
            make_partition(&g, &["i1"]),
            Err(Error::InvalidPartition(_))
        ));
        assert!(matches!(
            make_partition(&g, &["i1", "i2", "nope"]),
            Err(Error::UnknownNode(_))
        ));
    }

    #[test]
    fn example_output_parent_membrane() {
        let g = constructions::crossover_example_output_parent();
        let p = make_partition(&g, &["I'1", "I'2", "I'3", "V", "W"]).unwrap();
        let m = membrane(&g, &p).unwrap();
        assert_eq!(ids(&g, &m.forward), pairs(&[("I'3", "Y"), ("V", "X"), ("W", "Y")]));
        assert_eq!(ids(&g, &m.backward), pairs(&[("X", "W")]));
    }

    #[test]
    fn trivial_membranes() {
        let g = IodGraph::builder().input("i").output("o").edge("i", "o").build().unwrap();
        let m = membrane(&g, &IoPartition::outputs_only(&g)).unwrap();
        assert_eq!(ids(&g, &m.forward), pairs(&[("i", "o")]));
        assert!(m.backward.is_empty());

        let halves = IodGraph::builder()
            .input("i")
            .intermediate("a")
            .intermediate("b")
            .output("o")
            .edges([("i", "a"), ("b", "o")])
            .build()
            .unwrap();
        let m = membrane(&halves, &make_partition(&halves, &["i", "a"]).unwrap()).unwrap();
        assert!(m.is_empty());
    }

    #[test]
    fn mismatched_partition_is_rejected() {
        let g = constructions::perceptron(2, 2, 1);
        let other = IodGraph::builder().input("i").output("o").build().unwrap();
        let p = IoPartition::inputs_only(&other);
        assert!(membrane(&g, &p).is_err());
    }

    #[test]
    fn contiguity_examples() {
        let g = constructions::perceptron(2, 2, 1);
        let p = IoPartition::inputs_only(&g);
        assert!(is_input_contiguous(&g, &p));
        assert!(is_output_contiguous(&g, &IoPartition::outputs_only(&g)));

        // `a` sits in psi but is only fed from omega.
        let fed_from_omega = IodGraph::builder()
            .input("i")
            .intermediate("a")
            .intermediate("b")
            .output("o")
            .edges([("i", "b"), ("b", "a"), ("a", "o")])
            .build()
            .unwrap();
        let p = make_partition(&fed_from_omega, &["i", "a"]).unwrap();
        assert!(!is_input_contiguous(&fed_from_omega, &p));

        let (mixed, mixed_part) = constructions::mixed_partition_example();
        assert!(is_input_contiguous(&mixed, &mixed_part));
        assert!(!is_output_contiguous(&mixed, &mixed_part));
        assert_eq!(output_contiguity_witnesses(&mixed, &mixed_part), vec!["C"]);

        let chain = IodGraph::builder()
            .input("i")
            .intermediate("a")
            .output("o")
            .edges([("i", "a"), ("a", "o")])
            .build()
            .unwrap();
        let p = make_partition(&chain, &["i"]).unwrap();
        assert!(is_output_contiguous(&chain, &p));
    }

    #[test]
    fn enumeration_counts_and_order() {
        let g = constructions::perceptron(1, 4, 1);
        let all: Vec<_> = enumerate_partitions(&g, &PartitionFilter::All).unwrap().collect();
        assert_eq!(all.len(), 16);
        assert_eq!(all[0], IoPartition::inputs_only(&g));
        assert_eq!(all[15], IoPartition::outputs_only(&g));
        // the second partition adds only the last intermediate, h4
        assert_eq!(all[1].psi_ids(&g), vec!["h4", "i1"]);

        let bare = IodGraph::builder().input("i").output("o").build().unwrap();
        let only: Vec<_> = enumerate_partitions(&bare, &PartitionFilter::All).unwrap().collect();
        assert_eq!(only.len(), 1);
        assert_eq!(only[0].psi_ids(&bare), vec!["i"]);
        assert_eq!(only[0].omega_ids(&bare), vec!["o"]);
    }

    #[test]
    fn layer_filter() {
        let g = constructions::perceptron(2, 3, 2);
        let layers = constructions::perceptron_layers(2, 3, 2);
        let got: Vec<_> = enumerate_partitions(&g, &PartitionFilter::LayerRespecting(layers))
            .unwrap()
            .collect();
        assert_eq!(got.len(), 2);

        let mut partial = constructions::perceptron_layers(2, 3, 2);
        partial.remove("h1");
        assert!(enumerate_partitions(&g, &PartitionFilter::LayerRespecting(partial)).is_err());
    }
}
