//! Crossover of two IOD graphs.
//!
//! The input parent contributes the `psi` side of one IO partition, the
//! output parent the `omega` side of another. The two sides are joined by a
//! crossover membrane: every forward link `f` of the input parent is paired
//! with a distinct forward link `f'` of the output parent and replaced by
//! `(source(f), dest(f'))`; every backward link `b'` of the output parent is
//! paired with a distinct backward link `b` of the input parent and replaced
//! by `(source(b'), dest(b))`. Pairings exist exactly when both partitions
//! cut the same number of forward and backward links.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::graph::{Edge, GraphDocument, IodGraph, Node, FORMAT_VERSION};
use crate::partition::{enumerate_partitions, is_contiguous, membrane, IoPartition, Membrane, PartitionFilter};

/// How child node ids are formed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeNaming {
    /// Output-parent ids get a `'` suffix (repeated as often as needed to
    /// avoid every input-side id), so the two sides never share an id.
    #[default]
    Qualified,
    /// Ids are kept verbatim and the parts must be literally disjoint.
    Raw,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "clause", rename_all = "snake_case")]
pub enum Incompatibility {
    /// Input part of the input parent shares ids with the output part of the
    /// output parent.
    PsiMeetsOmegaPrime { shared: Vec<String> },
    PsiPrimeMeetsOmega { shared: Vec<String> },
    ForwardCount { input_parent: usize, output_parent: usize },
    BackwardCount { input_parent: usize, output_parent: usize },
}

impl fmt::Display for Incompatibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Incompatibility::PsiMeetsOmegaPrime { shared } => {
                write!(f, "input part overlaps the other output part at {shared:?}")
            }
            Incompatibility::PsiPrimeMeetsOmega { shared } => {
                write!(f, "other input part overlaps the output part at {shared:?}")
            }
            Incompatibility::ForwardCount {
                input_parent,
                output_parent,
            } => write!(f, "forward link counts differ ({input_parent} vs {output_parent})"),
            Incompatibility::BackwardCount {
                input_parent,
                output_parent,
            } => write!(f, "backward link counts differ ({input_parent} vs {output_parent})"),
        }
    }
}

pub type IdEdge = (String, String);

/// Explicit link pairing by node ids. `forward` holds `(f, f')` with `f`
/// from the input parent; `backward` holds `(b', b)` with `b'` from the
/// output parent.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkPairing {
    pub forward: Vec<(IdEdge, IdEdge)>,
    pub backward: Vec<(IdEdge, IdEdge)>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatchingMode {
    /// Links paired in lexicographic order.
    #[default]
    Sequential,
    /// Uniformly random pairing drawn from a seeded generator.
    SeededRandom(u64),
    Explicit(LinkPairing),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchingSpec {
    pub mode: MatchingMode,
    /// Spliced links may only join nodes carrying equal tags.
    #[serde(default)]
    pub tag_constrained: bool,
}

impl MatchingSpec {
    pub fn sequential() -> Self {
        MatchingSpec::default()
    }

    pub fn seeded(seed: u64) -> Self {
        MatchingSpec {
            mode: MatchingMode::SeededRandom(seed),
            tag_constrained: false,
        }
    }

    pub fn explicit(pairing: LinkPairing) -> Self {
        MatchingSpec {
            mode: MatchingMode::Explicit(pairing),
            tag_constrained: false,
        }
    }

    pub fn with_tags(mut self) -> Self {
        self.tag_constrained = true;
        self
    }
}

/// A concrete pairing of cut links. Edges are node-index pairs in their own
/// parent graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CrossoverMembrane {
    /// `(f, f')`: `f` from the input parent, `f'` from the output parent.
    pub forward: Vec<(Edge, Edge)>,
    /// `(b', b)`: `b'` from the output parent, `b` from the input parent.
    pub backward: Vec<(Edge, Edge)>,
}

impl CrossoverMembrane {
    /// `(source(f), dest(f'))`: input-parent index to output-parent index.
    pub fn spliced_forward(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.forward.iter().map(|&(f, fp)| (f.0, fp.1))
    }

    /// `(source(b'), dest(b))`: output-parent index to input-parent index.
    pub fn spliced_backward(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.backward.iter().map(|&(bp, b)| (bp.0, b.1))
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty() && self.backward.is_empty()
    }

    fn key(&self) -> (Vec<Edge>, Vec<Edge>) {
        let mut f: Vec<_> = self.spliced_forward().collect();
        let mut b: Vec<_> = self.spliced_backward().collect();
        f.sort_unstable();
        f.dedup();
        b.sort_unstable();
        b.dedup();
        (f, b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParentRole {
    Input,
    Output,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Origin {
    pub parent: ParentRole,
    pub id: String,
}

#[derive(Clone, Debug)]
pub struct Child {
    pub graph: IodGraph,
    /// Child id to the parent node it came from.
    pub origin: BTreeMap<String, Origin>,
}

/// Two parents with one IO partition each; the unit every crossover
/// operation works on.
pub struct CrossoverPair<'a> {
    input: &'a IodGraph,
    input_part: &'a IoPartition,
    output: &'a IodGraph,
    output_part: &'a IoPartition,
    naming: NodeNaming,
    cut_in: Membrane,
    cut_out: Membrane,
}

impl<'a> CrossoverPair<'a> {
    pub fn new(
        input: &'a IodGraph,
        input_part: &'a IoPartition,
        output: &'a IodGraph,
        output_part: &'a IoPartition,
        naming: NodeNaming,
    ) -> Result<Self> {
        let cut_in = membrane(input, input_part)?;
        let cut_out = membrane(output, output_part)?;
        Ok(CrossoverPair {
            input,
            input_part,
            output,
            output_part,
            naming,
            cut_in,
            cut_out,
        })
    }

    pub fn input_membrane(&self) -> &Membrane {
        &self.cut_in
    }

    pub fn output_membrane(&self) -> &Membrane {
        &self.cut_out
    }

    pub fn naming(&self) -> NodeNaming {
        self.naming
    }

    /// Checks the compatibility clauses in order and reports the first one
    /// that fails. Id disjointness is only checked under raw naming.
    pub fn compatibility(&self) -> std::result::Result<(), Incompatibility> {
        if self.naming == NodeNaming::Raw {
            let shared = shared_ids(self.input, self.input_part.psi(), self.output, self.output_part.omega());
            if !shared.is_empty() {
                return Err(Incompatibility::PsiMeetsOmegaPrime { shared });
            }
            let shared = shared_ids(self.output, self.output_part.psi(), self.input, self.input_part.omega());
            if !shared.is_empty() {
                return Err(Incompatibility::PsiPrimeMeetsOmega { shared });
            }
        }
        if self.cut_in.forward.len() != self.cut_out.forward.len() {
            return Err(Incompatibility::ForwardCount {
                input_parent: self.cut_in.forward.len(),
                output_parent: self.cut_out.forward.len(),
            });
        }
        if self.cut_in.backward.len() != self.cut_out.backward.len() {
            return Err(Incompatibility::BackwardCount {
                input_parent: self.cut_in.backward.len(),
                output_parent: self.cut_out.backward.len(),
            });
        }
        Ok(())
    }

    pub fn is_compatible(&self) -> bool {
        self.compatibility().is_ok()
    }

    pub fn ensure_compatible(&self) -> Result<()> {
        self.compatibility().map_err(Error::Incompatible)
    }

    pub fn build_membrane(&self, spec: &MatchingSpec) -> Result<CrossoverMembrane> {
        self.ensure_compatible()?;
        let f_in = &self.cut_in.forward;
        let f_out = &self.cut_out.forward;
        let b_in = &self.cut_in.backward;
        let b_out = &self.cut_out.backward;

        let membrane = match &spec.mode {
            MatchingMode::Explicit(pairing) => self.resolve_explicit(pairing)?,
            mode => {
                let mut f_order: Vec<usize> = (0..f_out.len()).collect();
                let mut b_order: Vec<usize> = (0..b_in.len()).collect();
                if let MatchingMode::SeededRandom(seed) = mode {
                    let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                    f_order.shuffle(&mut rng);
                    b_order.shuffle(&mut rng);
                }
                if spec.tag_constrained {
                    // forward: source(f) in the input parent vs dest(f') in the output parent
                    let f_match = tag_matching(
                        f_in.len(),
                        &f_order,
                        |i, j| self.input.tag(f_in[i].0) == self.output.tag(f_out[j].1),
                    )
                    .ok_or(Error::TagMatchingInfeasible { kind: "forward" })?;
                    // backward: source(b') in the output parent vs dest(b) in the input parent
                    let b_match = tag_matching(
                        b_out.len(),
                        &b_order,
                        |i, j| self.output.tag(b_out[i].0) == self.input.tag(b_in[j].1),
                    )
                    .ok_or(Error::TagMatchingInfeasible { kind: "backward" })?;
                    f_order = f_match;
                    b_order = b_match;
                }
                CrossoverMembrane {
                    forward: (0..f_in.len()).map(|i| (f_in[i], f_out[f_order[i]])).collect(),
                    backward: (0..b_out.len()).map(|i| (b_out[i], b_in[b_order[i]])).collect(),
                }
            }
        };
        if spec.tag_constrained {
            self.check_tags(&membrane)?;
        }
        Ok(membrane)
    }

    fn check_tags(&self, m: &CrossoverMembrane) -> Result<()> {
        if m.spliced_forward().any(|(s, d)| self.input.tag(s) != self.output.tag(d)) {
            return Err(Error::TagMatchingInfeasible { kind: "forward" });
        }
        if m.spliced_backward().any(|(s, d)| self.output.tag(s) != self.input.tag(d)) {
            return Err(Error::TagMatchingInfeasible { kind: "backward" });
        }
        Ok(())
    }

    fn resolve_explicit(&self, pairing: &LinkPairing) -> Result<CrossoverMembrane> {
        let edge = |g: &IodGraph, (s, d): &IdEdge| -> Result<Edge> { Ok((g.require(s)?, g.require(d)?)) };
        let mut m = CrossoverMembrane {
            forward: Vec::with_capacity(pairing.forward.len()),
            backward: Vec::with_capacity(pairing.backward.len()),
        };
        for (f, fp) in &pairing.forward {
            m.forward.push((edge(self.input, f)?, edge(self.output, fp)?));
        }
        for (bp, b) in &pairing.backward {
            m.backward.push((edge(self.output, bp)?, edge(self.input, b)?));
        }
        self.check_membrane(&m)?;
        m.forward.sort_unstable();
        m.backward.sort_unstable();
        Ok(m)
    }

    /// Verifies the pairing is a pair of bijections between the cut links.
    pub fn check_membrane(&self, m: &CrossoverMembrane) -> Result<()> {
        fn same_multiset(mut got: Vec<Edge>, want: &[Edge], what: &str) -> Result<()> {
            got.sort_unstable();
            if got != want {
                return Err(Error::InvalidMembrane(format!(
                    "{what} links are not a one-to-one cover of the cut"
                )));
            }
            Ok(())
        }
        same_multiset(m.forward.iter().map(|p| p.0).collect(), &self.cut_in.forward, "input-parent forward")?;
        same_multiset(m.forward.iter().map(|p| p.1).collect(), &self.cut_out.forward, "output-parent forward")?;
        same_multiset(m.backward.iter().map(|p| p.0).collect(), &self.cut_out.backward, "output-parent backward")?;
        same_multiset(m.backward.iter().map(|p| p.1).collect(), &self.cut_in.backward, "input-parent backward")?;
        Ok(())
    }

    /// Every pairing, `|F|! * |B|!` of them, in lexicographic permutation
    /// order.
    pub fn membranes(&self) -> Result<MembraneIter<'_>> {
        self.ensure_compatible()?;
        Ok(MembraneIter {
            pair: self,
            f_perm: (0..self.cut_out.forward.len()).collect(),
            b_perm: (0..self.cut_in.backward.len()).collect(),
            done: false,
        })
    }

    /// Pairings that yield distinct spliced edge sets.
    pub fn distinct_membranes(&self) -> Result<impl Iterator<Item = CrossoverMembrane> + '_> {
        let mut seen = HashSet::new();
        Ok(self.membranes()?.filter(move |m| seen.insert(m.key())))
    }

    /// `|F|! * |B|!`, saturating.
    pub fn membrane_count(&self) -> u128 {
        factorial(self.cut_in.forward.len()).saturating_mul(factorial(self.cut_in.backward.len()))
    }

    fn prime_suffix(&self) -> String {
        if self.naming == NodeNaming::Raw {
            return String::new();
        }
        let psi_ids: HashSet<&str> = self.input_part.psi().iter().map(|n| self.input.id(n)).collect();
        let mut suffix = String::from("'");
        while self
            .output_part
            .omega()
            .iter()
            .any(|n| psi_ids.contains(format!("{}{suffix}", self.output.id(n)).as_str()))
        {
            suffix.push('\'');
        }
        suffix
    }

    /// Child as an unvalidated document, plus the origin of every node.
    pub fn child_document(&self, m: &CrossoverMembrane) -> Result<(GraphDocument, BTreeMap<String, Origin>)> {
        self.ensure_compatible()?;
        self.check_membrane(m)?;
        let suffix = self.prime_suffix();
        let in_id = |n: usize| self.input.id(n).to_owned();
        let out_id = |n: usize| format!("{}{suffix}", self.output.id(n));

        let mut nodes = Vec::new();
        let mut origin = BTreeMap::new();
        for n in self.input_part.psi().iter() {
            nodes.push(self.input.node(n).clone());
            origin.insert(
                in_id(n),
                Origin {
                    parent: ParentRole::Input,
                    id: in_id(n),
                },
            );
        }
        for n in self.output_part.omega().iter() {
            let src = self.output.node(n);
            nodes.push(Node {
                id: out_id(n),
                ..src.clone()
            });
            origin.insert(
                out_id(n),
                Origin {
                    parent: ParentRole::Output,
                    id: src.id.clone(),
                },
            );
        }

        let psi = self.input_part.psi();
        let omega = self.output_part.omega();
        let mut edges: BTreeSet<IdEdge> = BTreeSet::new();
        for &(s, d) in self.input.edges() {
            if psi.contains(s) && psi.contains(d) {
                edges.insert((in_id(s), in_id(d)));
            }
        }
        for &(s, d) in self.output.edges() {
            if omega.contains(s) && omega.contains(d) {
                edges.insert((out_id(s), out_id(d)));
            }
        }
        for (s, d) in m.spliced_forward() {
            edges.insert((in_id(s), out_id(d)));
        }
        for (s, d) in m.spliced_backward() {
            edges.insert((out_id(s), in_id(d)));
        }
        let doc = GraphDocument {
            format_version: FORMAT_VERSION,
            nodes,
            edges: edges.into_iter().collect(),
        };
        Ok((doc, origin))
    }

    pub fn child(&self, m: &CrossoverMembrane) -> Result<Child> {
        let (doc, origin) = self.child_document(m)?;
        Ok(Child {
            graph: IodGraph::from_document(&doc)?,
            origin,
        })
    }

    /// Membrane in id form, for records and CLI output.
    pub fn pairing_ids(&self, m: &CrossoverMembrane) -> LinkPairing {
        let e = |g: &IodGraph, (s, d): Edge| (g.id(s).to_owned(), g.id(d).to_owned());
        LinkPairing {
            forward: m.forward.iter().map(|&(f, fp)| (e(self.input, f), e(self.output, fp))).collect(),
            backward: m.backward.iter().map(|&(bp, b)| (e(self.output, bp), e(self.input, b))).collect(),
        }
    }

    /// Spliced edges under the child's node ids.
    pub fn spliced_ids(&self, m: &CrossoverMembrane) -> Vec<IdEdge> {
        let suffix = self.prime_suffix();
        let mut out: Vec<IdEdge> = m
            .spliced_forward()
            .map(|(s, d)| (self.input.id(s).to_owned(), format!("{}{suffix}", self.output.id(d))))
            .chain(
                m.spliced_backward()
                    .map(|(s, d)| (format!("{}{suffix}", self.output.id(s)), self.input.id(d).to_owned())),
            )
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

fn shared_ids(a: &IodGraph, a_set: &crate::nodeset::NodeSet, b: &IodGraph, b_set: &crate::nodeset::NodeSet) -> Vec<String> {
    a_set
        .iter()
        .map(|n| a.id(n))
        .filter(|id| b.index_of(id).is_some_and(|m| b_set.contains(m)))
        .map(str::to_owned)
        .collect()
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).fold(1u128, |acc, k| acc.saturating_mul(k))
}

/// Kuhn's augmenting-path matching. Left vertices `0..left` are matched to
/// right vertices, trying candidates in `right_order`. Returns the right
/// vertex for each left vertex, or `None` when no perfect matching exists.
fn tag_matching(left: usize, right_order: &[usize], ok: impl Fn(usize, usize) -> bool) -> Option<Vec<usize>> {
    let adj: Vec<Vec<usize>> = (0..left)
        .map(|i| right_order.iter().copied().filter(|&j| ok(i, j)).collect())
        .collect();
    let right = right_order.len();
    let mut owner: Vec<Option<usize>> = vec![None; right];

    fn augment(v: usize, adj: &[Vec<usize>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for &r in &adj[v] {
            if seen[r] {
                continue;
            }
            seen[r] = true;
            if owner[r].is_none_or(|w| augment(w, adj, seen, owner)) {
                owner[r] = Some(v);
                return true;
            }
        }
        false
    }

    for v in 0..left {
        let mut seen = vec![false; right];
        if !augment(v, &adj, &mut seen, &mut owner) {
            return None;
        }
    }
    let mut result = vec![0; left];
    for (r, w) in owner.iter().enumerate() {
        if let Some(v) = w {
            result[*v] = r;
        }
    }
    Some(result)
}

/// Rearranges into the next lexicographic permutation; `false` (and the
/// sorted order) once the last permutation has been passed.
fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        p.reverse();
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

pub struct MembraneIter<'p> {
    pair: &'p CrossoverPair<'p>,
    f_perm: Vec<usize>,
    b_perm: Vec<usize>,
    done: bool,
}

impl Iterator for MembraneIter<'_> {
    type Item = CrossoverMembrane;

    fn next(&mut self) -> Option<CrossoverMembrane> {
        if self.done {
            return None;
        }
        let cut_in = &self.pair.cut_in;
        let cut_out = &self.pair.cut_out;
        let m = CrossoverMembrane {
            forward: self
                .f_perm
                .iter()
                .enumerate()
                .map(|(i, &j)| (cut_in.forward[i], cut_out.forward[j]))
                .collect(),
            backward: self
                .b_perm
                .iter()
                .enumerate()
                .map(|(i, &j)| (cut_out.backward[i], cut_in.backward[j]))
                .collect(),
        };
        if !next_permutation(&mut self.b_perm) && !next_permutation(&mut self.f_perm) {
            self.done = true;
        }
        Some(m)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PartitionStrategy {
    Explicit {
        input_psi: Vec<String>,
        output_psi: Vec<String>,
    },
    /// Draws random intermediate subsets until both sides are contiguous and
    /// compatible.
    RandomContiguous { attempts: usize },
    /// Lists contiguous partitions of both parents (examining at most
    /// `max_partitions` candidates each) and picks a compatible pair.
    ExhaustiveContiguous { max_partitions: usize },
}

impl Default for PartitionStrategy {
    fn default() -> Self {
        PartitionStrategy::ExhaustiveContiguous { max_partitions: 4096 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossoverStrategy {
    #[serde(default)]
    pub partitions: PartitionStrategy,
    #[serde(default)]
    pub matching: MatchingSpec,
    #[serde(default)]
    pub naming: NodeNaming,
}

/// Everything needed to rebuild a child from its parents.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossoverRecord {
    pub format_version: u32,
    pub input_parent: String,
    pub output_parent: String,
    pub naming: NodeNaming,
    pub input_psi: Vec<String>,
    pub output_psi: Vec<String>,
    pub membrane: LinkPairing,
    pub spliced: Vec<IdEdge>,
    pub seed: Option<u64>,
    pub child: GraphDocument,
    pub origin: BTreeMap<String, Origin>,
}

impl CrossoverRecord {
    pub fn child_graph(&self) -> Result<IodGraph> {
        IodGraph::from_document(&self.child)
    }
}

fn random_contiguous(graph: &IodGraph, rng: &mut ChaCha8Rng) -> Option<IoPartition> {
    let mut psi = graph.role_set(crate::graph::NodeRole::Input);
    for n in graph.intermediates() {
        if rng.gen_bool(0.5) {
            psi.insert(n);
        }
    }
    let part = IoPartition::new(graph, psi).ok()?;
    is_contiguous(graph, &part).then_some(part)
}

fn contiguous_candidates(graph: &IodGraph, limit: usize) -> Result<Vec<IoPartition>> {
    Ok(enumerate_partitions(graph, &PartitionFilter::All)?
        .take(limit)
        .filter(|p| is_contiguous(graph, p))
        .collect())
}

fn finish(
    input: &IodGraph,
    output: &IodGraph,
    pair: &CrossoverPair<'_>,
    m: &CrossoverMembrane,
    seed: u64,
) -> Result<CrossoverRecord> {
    let child = pair.child(m)?;
    Ok(CrossoverRecord {
        format_version: FORMAT_VERSION,
        input_parent: "input".into(),
        output_parent: "output".into(),
        naming: pair.naming,
        input_psi: pair.input_part.psi_ids(input),
        output_psi: pair.output_part.psi_ids(output),
        membrane: pair.pairing_ids(m),
        spliced: pair.spliced_ids(m),
        seed: Some(seed),
        child: child.graph.to_document(),
        origin: child.origin,
    })
}

/// End-to-end crossover: choose partitions, build a membrane and assemble
/// the child. Fully determined by the parents, the strategy and `seed`.
pub fn crossover(input: &IodGraph, output: &IodGraph, strategy: &CrossoverStrategy, seed: u64) -> Result<CrossoverRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match &strategy.partitions {
        PartitionStrategy::Explicit { input_psi, output_psi } => {
            let a = IoPartition::from_ids(input, input_psi.iter().map(String::as_str))?;
            let b = IoPartition::from_ids(output, output_psi.iter().map(String::as_str))?;
            let pair = CrossoverPair::new(input, &a, output, &b, strategy.naming)?;
            let m = pair.build_membrane(&strategy.matching)?;
            finish(input, output, &pair, &m, seed)
        }
        PartitionStrategy::RandomContiguous { attempts } => {
            let mut last_err = None;
            for _ in 0..*attempts {
                let (Some(a), Some(b)) = (random_contiguous(input, &mut rng), random_contiguous(output, &mut rng)) else {
                    continue;
                };
                let pair = CrossoverPair::new(input, &a, output, &b, strategy.naming)?;
                if !pair.is_compatible() {
                    continue;
                }
                match pair.build_membrane(&strategy.matching) {
                    Ok(m) => return finish(input, output, &pair, &m, seed),
                    Err(e) => last_err = Some(e),
                }
            }
            Err(last_err.unwrap_or(Error::NoCompatiblePartitions { examined: *attempts }))
        }
        PartitionStrategy::ExhaustiveContiguous { max_partitions } => {
            let a_list = contiguous_candidates(input, *max_partitions)?;
            let b_list = contiguous_candidates(output, *max_partitions)?;
            let mut candidates = Vec::new();
            for (i, a) in a_list.iter().enumerate() {
                for (j, b) in b_list.iter().enumerate() {
                    if CrossoverPair::new(input, a, output, b, strategy.naming)?.is_compatible() {
                        candidates.push((i, j));
                    }
                }
            }
            candidates.shuffle(&mut rng);
            let mut last_err = None;
            for (i, j) in candidates {
                let pair = CrossoverPair::new(input, &a_list[i], output, &b_list[j], strategy.naming)?;
                match pair.build_membrane(&strategy.matching) {
                    Ok(m) => return finish(input, output, &pair, &m, seed),
                    Err(e) => last_err = Some(e),
                }
            }
            Err(last_err.unwrap_or(Error::NoCompatiblePartitions {
                examined: a_list.len() * b_list.len(),
            }))
        }
    }
}

/// Rebuilds the child described by `record` from the same parents.
pub fn replay(input: &IodGraph, output: &IodGraph, record: &CrossoverRecord) -> Result<IodGraph> {
    let a = IoPartition::from_ids(input, record.input_psi.iter().map(String::as_str))?;
    let b = IoPartition::from_ids(output, record.output_psi.iter().map(String::as_str))?;
    let pair = CrossoverPair::new(input, &a, output, &b, record.naming)?;
    let m = pair.build_membrane(&MatchingSpec::explicit(record.membrane.clone()))?;
    Ok(pair.child(&m)?.graph)
}

/// Runs many independent crossovers; pair `k` uses seed `base_seed + k`.
pub fn crossover_many(
    pairs: &[(&IodGraph, &IodGraph)],
    strategy: &CrossoverStrategy,
    base_seed: u64,
    exec: Execution,
) -> Vec<Result<CrossoverRecord>> {
    exec.map_indices(pairs.len(), |k| {
        let (a, b) = pairs[k];
        crossover(a, b, strategy, base_seed.wrapping_add(k as u64))
    })
}
