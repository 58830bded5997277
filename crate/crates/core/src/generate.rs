//! Random IOD graphs for property tests, benchmarks and seeded populations.

use std::ops::RangeInclusive;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::dangling_nodes;
use crate::crossover::{CrossoverPair, NodeNaming};
use crate::graph::IodGraph;
use crate::nodeset::NodeSet;
use crate::partition::{enumerate_partitions, IoPartition, PartitionFilter};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomGraphSpec {
    pub inputs: RangeInclusive<usize>,
    pub outputs: RangeInclusive<usize>,
    pub intermediates: RangeInclusive<usize>,
    /// Probability of each admissible link.
    pub density: f64,
    pub self_loops: bool,
    /// Only links from lower- to higher-numbered intermediates.
    pub acyclic: bool,
}

impl Default for RandomGraphSpec {
    fn default() -> Self {
        RandomGraphSpec {
            inputs: 1..=3,
            outputs: 1..=3,
            intermediates: 0..=6,
            density: 0.3,
            self_loops: true,
            acyclic: false,
        }
    }
}

impl RandomGraphSpec {
    pub fn acyclic(mut self) -> Self {
        self.acyclic = true;
        self.self_loops = false;
        self
    }

    pub fn with_density(mut self, density: f64) -> Self {
        self.density = density;
        self
    }

    pub fn with_intermediates(mut self, range: RangeInclusive<usize>) -> Self {
        self.intermediates = range;
        self
    }
}

/// Node ids are `i1..`, `n1..` and `o1..`.
pub fn random_graph<R: Rng + ?Sized>(rng: &mut R, spec: &RandomGraphSpec) -> IodGraph {
    let ni = rng.gen_range(spec.inputs.clone());
    let no = rng.gen_range(spec.outputs.clone());
    let nm = rng.gen_range(spec.intermediates.clone());
    let mut b = IodGraph::builder();
    let input = |k: usize| format!("i{}", k + 1);
    let output = |k: usize| format!("o{}", k + 1);
    let inter = |k: usize| format!("n{}", k + 1);
    for k in 0..ni {
        b = b.input(input(k));
    }
    for k in 0..no {
        b = b.output(output(k));
    }
    for k in 0..nm {
        b = b.intermediate(inter(k));
    }
    let p = spec.density.clamp(0.0, 1.0);
    for s in 0..ni {
        for d in 0..nm {
            if rng.gen_bool(p) {
                b = b.edge(input(s), inter(d));
            }
        }
        for d in 0..no {
            if rng.gen_bool(p) {
                b = b.edge(input(s), output(d));
            }
        }
    }
    for s in 0..nm {
        for d in 0..nm {
            let allowed = if spec.acyclic {
                s < d
            } else {
                s != d || spec.self_loops
            };
            if allowed && rng.gen_bool(p) {
                b = b.edge(inter(s), inter(d));
            }
        }
        for d in 0..no {
            if rng.gen_bool(p) {
                b = b.edge(inter(s), output(d));
            }
        }
    }
    b.build().expect("generated graphs are valid by construction")
}

/// Removes every dangling intermediate. Nodes on an input-output path stay
/// on it, so one pass leaves a graph meeting the no-dangling-nodes condition.
pub fn prune_dangling(graph: &IodGraph) -> IodGraph {
    graph
        .without_nodes(&dangling_nodes(graph))
        .expect("removing intermediates keeps a valid graph")
}

/// Inputs plus each intermediate independently with probability one half.
pub fn random_partition<R: Rng + ?Sized>(rng: &mut R, graph: &IodGraph) -> IoPartition {
    let mut psi = NodeSet::from_indices(graph.node_count(), graph.inputs());
    for n in graph.intermediates() {
        if rng.gen_bool(0.5) {
            psi.insert(n);
        }
    }
    IoPartition::new(graph, psi).expect("inputs-plus-intermediates is a valid partition")
}

/// Draws parents and partitions until a crossover-compatible combination
/// turns up. The output parent's partition is chosen uniformly among its
/// compatible ones (it must have at most 16 intermediates).
pub fn random_compatible_pair<R: Rng + ?Sized>(
    rng: &mut R,
    input_spec: &RandomGraphSpec,
    output_spec: &RandomGraphSpec,
    naming: NodeNaming,
    max_tries: usize,
) -> Option<(IodGraph, IoPartition, IodGraph, IoPartition)> {
    for _ in 0..max_tries {
        let a = random_graph(rng, input_spec);
        let pa = random_partition(rng, &a);
        let b = random_graph(rng, output_spec);
        if b.intermediates().count() > 16 {
            continue;
        }
        let options: Vec<IoPartition> = enumerate_partitions(&b, &PartitionFilter::All)
            .ok()?
            .filter(|pb| CrossoverPair::new(&a, &pa, &b, pb, naming).is_ok_and(|pair| pair.is_compatible()))
            .collect();
        if options.is_empty() {
            continue;
        }
        let pb = options[rng.gen_range(0..options.len())].clone();
        return Some((a, pa, b, pb));
    }
    None
}
