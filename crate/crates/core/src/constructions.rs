//! Named example graphs and the crossover constructions built from them.
//!
//! Every builder is deterministic and uses readable ids (`i1`, `p_1_2`,
//! `phi_1_2`, ...) so fixtures can be diffed. Parent pairs use id sets that
//! are disjoint where the crossover requires it, so children can be built
//! with [`NodeNaming::Raw`] and keep the ids shown here.

use std::collections::HashMap;

use crate::analysis::Informativeness;
use crate::crossover::{CrossoverPair, IdEdge, LinkPairing, MatchingSpec, NodeNaming};
use crate::error::{Error, Result};
use crate::graph::IodGraph;
use crate::partition::{make_partition, IoPartition};

fn e(a: &str, b: &str) -> IdEdge {
    (a.to_owned(), b.to_owned())
}

/// Two parents, one partition each, a membrane and the informativeness the
/// child is expected to have.
#[derive(Clone, Debug)]
pub struct ConstructionOutput {
    pub name: &'static str,
    pub input_parent: IodGraph,
    pub output_parent: IodGraph,
    pub input_partition: IoPartition,
    pub output_partition: IoPartition,
    pub membrane: LinkPairing,
    pub expected: Informativeness,
}

impl ConstructionOutput {
    pub fn pair(&self, naming: NodeNaming) -> Result<CrossoverPair<'_>> {
        CrossoverPair::new(
            &self.input_parent,
            &self.input_partition,
            &self.output_parent,
            &self.output_partition,
            naming,
        )
    }

    pub fn child(&self, naming: NodeNaming) -> Result<IodGraph> {
        let pair = self.pair(naming)?;
        let m = pair.build_membrane(&MatchingSpec::explicit(self.membrane.clone()))?;
        Ok(pair.child(&m)?.graph)
    }
}

/// Fully connected `ni`-`nh`-`no` network: `i*` feed every `h*`, which feed
/// every `o*`.
pub fn perceptron(ni: usize, nh: usize, no: usize) -> IodGraph {
    let mut b = IodGraph::builder();
    for i in 1..=ni {
        b = b.input(format!("i{i}"));
    }
    for h in 1..=nh {
        b = b.intermediate(format!("h{h}"));
    }
    for o in 1..=no {
        b = b.output(format!("o{o}"));
    }
    for h in 1..=nh {
        for i in 1..=ni {
            b = b.edge(format!("i{i}"), format!("h{h}"));
        }
        for o in 1..=no {
            b = b.edge(format!("h{h}"), format!("o{o}"));
        }
    }
    b.build().expect("perceptron is a valid IOD graph")
}

pub fn perceptron_layers(ni: usize, nh: usize, no: usize) -> HashMap<String, usize> {
    let mut layers = HashMap::new();
    layers.extend((1..=ni).map(|i| (format!("i{i}"), 0)));
    layers.extend((1..=nh).map(|h| (format!("h{h}"), 1)));
    layers.extend((1..=no).map(|o| (format!("o{o}"), 2)));
    layers
}

fn layer_id(sizes: &[usize], layer: usize, n: usize) -> String {
    if layer == 0 {
        format!("i{n}")
    } else if layer == sizes.len() - 1 {
        format!("o{n}")
    } else {
        format!("h{layer}_{n}")
    }
}

/// Strictly layered network with layer widths `sizes` (first layer inputs,
/// last outputs). Links between consecutive layers are kept when the
/// matching bit of `mask` (cycled) is set; every node additionally keeps one
/// incoming and one outgoing link so nothing is cut off.
pub fn sparse_perceptron(sizes: &[usize], mask: u64) -> IodGraph {
    assert!(sizes.len() >= 2, "need an input and an output layer");
    let mut b = IodGraph::builder();
    for (l, &w) in sizes.iter().enumerate() {
        for n in 1..=w {
            let id = layer_id(sizes, l, n);
            b = match l {
                0 => b.input(id),
                _ if l == sizes.len() - 1 => b.output(id),
                _ => b.intermediate(id),
            };
        }
    }
    let mut bit = 0u32;
    for l in 0..sizes.len() - 1 {
        let (w, next) = (sizes[l], sizes[l + 1]);
        for s in 0..w {
            for d in 0..next {
                let keep = mask >> (bit % 64) & 1 == 1 || d == s % next || s == d % w;
                bit += 1;
                if keep {
                    b = b.edge(layer_id(sizes, l, s + 1), layer_id(sizes, l + 1, d + 1));
                }
            }
        }
    }
    b.build().expect("layered network is a valid IOD graph")
}

pub fn sparse_perceptron_layers(sizes: &[usize]) -> HashMap<String, usize> {
    let mut layers = HashMap::new();
    for (l, &w) in sizes.iter().enumerate() {
        for n in 1..=w {
            layers.insert(layer_id(sizes, l, n), l);
        }
    }
    layers
}

/// `I1` reaches `O2` (and `O1`), `I2` is isolated: partially informative.
pub fn partially_informative_example() -> IodGraph {
    two_input_builder().build().expect("valid")
}

/// The same graph with `I2 -> W` added, which makes it very informative.
pub fn partially_informative_example_with_extra_edge() -> IodGraph {
    two_input_builder().edge("I2", "W").build().expect("valid")
}

fn two_input_builder() -> crate::graph::GraphBuilder {
    IodGraph::builder()
        .input("I1")
        .input("I2")
        .intermediate("V")
        .intermediate("W")
        .intermediate("X")
        .intermediate("Y")
        .intermediate("Z")
        .output("O1")
        .output("O2")
        .edges([
            ("I1", "V"),
            ("V", "W"),
            ("W", "Y"),
            ("Y", "Z"),
            ("Z", "O2"),
            ("V", "X"),
            ("X", "O1"),
        ])
}

/// `A` is a dead end and `D` is fed by nothing; `B` lies on a path.
pub fn dangling_example() -> IodGraph {
    IodGraph::builder()
        .input("I1")
        .intermediate("A")
        .intermediate("B")
        .intermediate("D")
        .output("O1")
        .edges([("I1", "A"), ("I1", "B"), ("B", "O1"), ("D", "O1")])
        .build()
        .expect("valid")
}

/// Input-contiguous but not output-contiguous: `C` sits in omega and only
/// leads back into psi.
pub fn mixed_partition_example() -> (IodGraph, IoPartition) {
    let g = IodGraph::builder()
        .input("I1")
        .intermediate("A")
        .intermediate("C")
        .output("O1")
        .edges([("I1", "A"), ("A", "O1"), ("A", "C"), ("C", "A")])
        .build()
        .expect("valid");
    let p = make_partition(&g, &["I1", "A"]).expect("valid partition");
    (g, p)
}

pub fn crossover_example_input_parent() -> IodGraph {
    IodGraph::builder()
        .input("I1")
        .input("I2")
        .input("I3")
        .intermediate("A")
        .intermediate("B")
        .intermediate("C")
        .intermediate("D")
        .intermediate("E")
        .output("O1")
        .output("O2")
        .edges([
            ("I1", "A"),
            ("I2", "B"),
            ("B", "A"),
            ("I3", "D"),
            ("B", "D"),
            ("A", "C"),
            ("D", "E"),
            ("D", "O2"),
            ("C", "A"),
            ("C", "O1"),
            ("E", "O1"),
            ("E", "O2"),
        ])
        .build()
        .expect("valid")
}

pub fn crossover_example_output_parent() -> IodGraph {
    IodGraph::builder()
        .input("I'1")
        .input("I'2")
        .input("I'3")
        .intermediate("V")
        .intermediate("W")
        .intermediate("X")
        .intermediate("Y")
        .intermediate("Z")
        .output("O1")
        .output("O2")
        .edges([
            ("I'1", "V"),
            ("I'2", "W"),
            ("V", "X"),
            ("W", "Y"),
            ("I'3", "Y"),
            ("X", "W"),
            ("X", "Z"),
            ("Y", "Z"),
            ("Z", "O1"),
            ("Y", "O2"),
        ])
        .build()
        .expect("valid")
}

/// The worked crossover example: three forward links and one backward link
/// on each side. The input part keeps `D` and leaves `C` to omega, which is
/// what the listed forward links `(A,C), (D,E), (D,O2)` require.
pub fn crossover_example_pair() -> ConstructionOutput {
    let input_parent = crossover_example_input_parent();
    let output_parent = crossover_example_output_parent();
    let input_partition = make_partition(&input_parent, &["I1", "I2", "I3", "A", "B", "D"]).expect("valid");
    let output_partition = make_partition(&output_parent, &["I'1", "I'2", "I'3", "V", "W"]).expect("valid");
    ConstructionOutput {
        name: "crossover-example",
        input_parent,
        output_parent,
        input_partition,
        output_partition,
        membrane: crossover_example_membrane(),
        expected: Informativeness::Full,
    }
}

/// Membrane `{(A,Y), (D,Y), (D,X), (X,A)}` as a link pairing.
pub fn crossover_example_membrane() -> LinkPairing {
    LinkPairing {
        forward: vec![
            (e("A", "C"), e("I'3", "Y")),
            (e("D", "E"), e("V", "X")),
            (e("D", "O2"), e("W", "Y")),
        ],
        backward: vec![(e("X", "W"), e("C", "A"))],
    }
}

fn theorem1_keeps(level: Informativeness, i: usize, k: usize) -> bool {
    match level {
        Informativeness::Full => true,
        Informativeness::Very => k == 1,
        Informativeness::Partial => i == 1 && k == 1,
        Informativeness::Non => false,
    }
}

/// Two parents of the requested informativeness whose crossover child is
/// non-informative.
///
/// The input parent has a path `i -> p_i_k -> o_k` for every input/output
/// pair (truncated after `p_i_k` to lower the level) and a false input
/// `phi_i_k -> o_k` per pair; its input part is everything but the outputs.
/// The output parent mirrors the paths with `q_i_k` and has a false output
/// `i -> phi'_i_k` for every complete path of the input parent; its input
/// part is just the inputs. The membrane sends each complete `p` path into
/// a false output and each false input into a `q` path.
pub fn build_theorem1_pair(j: usize, k: usize, level: Informativeness) -> Result<ConstructionOutput> {
    if j == 0 || k == 0 {
        return Err(Error::Construction("need at least one input and one output".into()));
    }
    match level {
        Informativeness::Very if k < 2 => {
            return Err(Error::Construction(
                "a very (not fully) informative parent needs at least two outputs".into(),
            ))
        }
        Informativeness::Partial if j < 2 => {
            return Err(Error::Construction(
                "a partially informative parent needs at least two inputs".into(),
            ))
        }
        _ => {}
    }

    let mut g = IodGraph::builder();
    let mut h = IodGraph::builder();
    for i in 1..=j {
        g = g.input(format!("i{i}"));
        h = h.input(format!("i{i}"));
    }
    for o in 1..=k {
        g = g.output(format!("o{o}"));
        h = h.output(format!("o{o}"));
    }
    let mut pairing = LinkPairing::default();
    for i in 1..=j {
        for o in 1..=k {
            let complete = theorem1_keeps(level, i, o);
            let (inp, out) = (format!("i{i}"), format!("o{o}"));
            let (p, phi) = (format!("p_{i}_{o}"), format!("phi_{i}_{o}"));
            let (q, phi_out) = (format!("q_{i}_{o}"), format!("phi'_{i}_{o}"));

            g = g.intermediate(&p).intermediate(&phi).edge(&inp, &p).edge(&phi, &out);
            h = h.intermediate(&q).edge(&inp, &q);
            if complete {
                g = g.edge(&p, &out);
                h = h.edge(&q, &out).intermediate(&phi_out).edge(&inp, &phi_out);
                pairing.forward.push((e(&p, &out), e(&inp, &phi_out)));
            }
            pairing.forward.push((e(&phi, &out), e(&inp, &q)));
        }
    }
    let input_parent = g.build()?;
    let output_parent = h.build()?;
    Ok(ConstructionOutput {
        name: "theorem1",
        input_partition: IoPartition::outputs_only(&input_parent),
        output_partition: IoPartition::inputs_only(&output_parent),
        input_parent,
        output_parent,
        membrane: pairing,
        expected: Informativeness::Non,
    })
}

/// Two fully informative parents with node-disjoint unique paths
/// `i_s -> a_s_t -> o_t` and `i_s -> b_s_t -> o_t`, and a membrane that
/// routes every path leaving input `i_t` to output `o_t` of the output
/// parent. The child is very but not fully informative.
pub fn build_theorem5_pair(n: usize) -> Result<ConstructionOutput> {
    if n < 2 {
        return Err(Error::Construction("needs at least two inputs and outputs".into()));
    }
    let mut g = IodGraph::builder();
    let mut h = IodGraph::builder();
    for s in 1..=n {
        g = g.input(format!("i{s}")).output(format!("o{s}"));
        h = h.input(format!("i{s}")).output(format!("o{s}"));
    }
    for s in 1..=n {
        for t in 1..=n {
            let (a, b) = (format!("a_{s}_{t}"), format!("b_{s}_{t}"));
            g = g.intermediate(&a).edge(format!("i{s}"), &a).edge(&a, format!("o{t}"));
            h = h.intermediate(&b).edge(format!("i{s}"), &b).edge(&b, format!("o{t}"));
        }
    }
    // Input i_t is matched with output o'_t; for each s the cut link of
    // path (i_t, o_s) is joined to the cut link of path (i'_s, o'_t).
    let mut pairing = LinkPairing::default();
    for t in 1..=n {
        for s in 1..=n {
            pairing.forward.push((
                e(&format!("a_{t}_{s}"), &format!("o{s}")),
                e(&format!("i{s}"), &format!("b_{s}_{t}")),
            ));
        }
    }
    let input_parent = g.build()?;
    let output_parent = h.build()?;
    Ok(ConstructionOutput {
        name: "theorem5",
        input_partition: IoPartition::outputs_only(&input_parent),
        output_partition: IoPartition::inputs_only(&output_parent),
        input_parent,
        output_parent,
        membrane: pairing,
        expected: Informativeness::Very,
    })
}

/// Both parents connect `I1 -> O1` and `I2 -> O2`, but through differently
/// named middles. Returns `(bad, good)`: the bad membrane crosses the
/// wires, the good one `{(N1,N4), (N2,N3)}` keeps them straight.
pub fn build_competing_conventions_pair() -> (ConstructionOutput, ConstructionOutput) {
    let g = IodGraph::builder()
        .input("I1")
        .input("I2")
        .intermediate("N1")
        .intermediate("N2")
        .output("O1")
        .output("O2")
        .edges([("I1", "N1"), ("N1", "O1"), ("I2", "N2"), ("N2", "O2")])
        .build()
        .expect("valid");
    let h = IodGraph::builder()
        .input("I1")
        .input("I2")
        .intermediate("N3")
        .intermediate("N4")
        .output("O1")
        .output("O2")
        .edges([("I1", "N4"), ("N4", "O1"), ("I2", "N3"), ("N3", "O2")])
        .build()
        .expect("valid");
    let gp = make_partition(&g, &["I1", "I2", "N1", "N2"]).expect("valid");
    let hp = make_partition(&h, &["I1", "I2"]).expect("valid");
    let build = |pairing: LinkPairing| ConstructionOutput {
        name: "competing-conventions",
        input_parent: g.clone(),
        output_parent: h.clone(),
        input_partition: gp.clone(),
        output_partition: hp.clone(),
        membrane: pairing,
        expected: Informativeness::Very,
    };
    let bad = build(LinkPairing {
        forward: vec![
            (e("N1", "O1"), e("I2", "N3")),
            (e("N2", "O2"), e("I1", "N4")),
        ],
        backward: vec![],
    });
    let good = build(LinkPairing {
        forward: vec![
            (e("N1", "O1"), e("I1", "N4")),
            (e("N2", "O2"), e("I2", "N3")),
        ],
        backward: vec![],
    });
    (bad, good)
}

/// Two non-informative parents (each with dangling nodes) whose child is
/// fully informative: the input parent contributes `I1 -> A`, the output
/// parent `E -> O1`, and the membrane joins `A` to `E`.
pub fn build_non_to_fully_pair() -> ConstructionOutput {
    let g = IodGraph::builder()
        .input("I1")
        .intermediate("A")
        .intermediate("B")
        .output("O1")
        .edges([("I1", "A"), ("A", "B")])
        .build()
        .expect("valid");
    let h = IodGraph::builder()
        .input("I1")
        .intermediate("C")
        .intermediate("D")
        .intermediate("E")
        .output("O1")
        .edges([("I1", "C"), ("D", "E"), ("E", "O1")])
        .build()
        .expect("valid");
    let gp = make_partition(&g, &["I1", "A"]).expect("valid");
    let hp = make_partition(&h, &["I1", "C", "D"]).expect("valid");
    ConstructionOutput {
        name: "non-to-fully",
        input_parent: g,
        output_parent: h,
        input_partition: gp,
        output_partition: hp,
        membrane: LinkPairing {
            forward: vec![(e("A", "B"), e("D", "E"))],
            backward: vec![],
        },
        expected: Informativeness::Full,
    }
}
