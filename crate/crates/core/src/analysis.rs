//! Informativeness, actionability and the no-dangling-nodes condition.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::graph::IodGraph;
use crate::nodeset::NodeSet;

/// How thoroughly inputs are connected to outputs. The derived ordering
/// follows the implication chain `Fully => Very => Partially`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Informativeness {
    Non,
    Partial,
    Very,
    Full,
}

/// Output-side mirror of [`Informativeness`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Actionability {
    Non,
    Partial,
    Very,
    Full,
}

macro_rules! level_display {
    ($ty:ty) => {
        impl $ty {
            pub const ALL: [$ty; 4] = [<$ty>::Non, <$ty>::Partial, <$ty>::Very, <$ty>::Full];

            pub fn as_str(self) -> &'static str {
                match self {
                    <$ty>::Non => "non",
                    <$ty>::Partial => "partial",
                    <$ty>::Very => "very",
                    <$ty>::Full => "full",
                }
            }

            pub fn rank(self) -> u8 {
                self as u8
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl std::str::FromStr for $ty {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                Self::ALL
                    .into_iter()
                    .find(|l| l.as_str() == s)
                    .ok_or_else(|| format!("unknown level `{s}`"))
            }
        }
    };
}

level_display!(Informativeness);
level_display!(Actionability);

/// For each input, the set of outputs it reaches (as output positions in
/// `graph.outputs()` order).
struct Coverage {
    per_input: Vec<Vec<bool>>,
    outputs: usize,
}

fn coverage(graph: &IodGraph) -> Coverage {
    let outputs: Vec<usize> = graph.outputs().collect();
    let per_input = graph
        .inputs()
        .map(|i| {
            let reach = graph.reachable_from(&NodeSet::from_indices(graph.node_count(), [i]));
            outputs.iter().map(|&o| reach.contains(o)).collect()
        })
        .collect();
    Coverage {
        per_input,
        outputs: outputs.len(),
    }
}

impl Coverage {
    fn any(&self) -> bool {
        self.per_input.iter().any(|row| row.iter().any(|&b| b))
    }

    fn all(&self) -> bool {
        self.per_input.iter().all(|row| row.iter().all(|&b| b))
    }

    fn every_input_reaches_some(&self) -> bool {
        self.per_input.iter().all(|row| row.iter().any(|&b| b))
    }

    fn every_output_reached(&self) -> bool {
        (0..self.outputs).all(|o| self.per_input.iter().any(|row| row[o]))
    }
}

/// Strongest informativeness level that holds. One forward sweep per input.
pub fn informativeness(graph: &IodGraph) -> Informativeness {
    let cov = coverage(graph);
    if !cov.any() {
        Informativeness::Non
    } else if cov.all() {
        Informativeness::Full
    } else if cov.every_input_reaches_some() {
        Informativeness::Very
    } else {
        Informativeness::Partial
    }
}

pub fn actionability(graph: &IodGraph) -> Actionability {
    let cov = coverage(graph);
    if !cov.any() {
        Actionability::Non
    } else if cov.all() {
        Actionability::Full
    } else if cov.every_output_reached() {
        Actionability::Very
    } else {
        Actionability::Partial
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DanglingReport {
    pub satisfied: bool,
    pub dangling: Vec<String>,
}

/// Intermediate nodes that lie on no input-to-output path.
pub fn dangling_nodes(graph: &IodGraph) -> NodeSet {
    let mut on_path = graph.reachable_from(&graph.role_set(crate::graph::NodeRole::Input));
    on_path.intersect_with(&graph.reaches(&graph.role_set(crate::graph::NodeRole::Output)));
    NodeSet::from_indices(
        graph.node_count(),
        graph.intermediates().filter(|&n| !on_path.contains(n)),
    )
}

pub fn no_dangling_nodes(graph: &IodGraph) -> DanglingReport {
    let dangling = graph.ids_of(&dangling_nodes(graph));
    DanglingReport {
        satisfied: dangling.is_empty(),
        dangling,
    }
}

pub fn satisfies_no_dangling_nodes(graph: &IodGraph) -> bool {
    dangling_nodes(graph).is_empty()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub informativeness: Informativeness,
    pub actionability: Actionability,
    pub no_dangling_nodes: bool,
    pub dangling: Vec<String>,
}

pub fn classify(graph: &IodGraph) -> Classification {
    let report = no_dangling_nodes(graph);
    Classification {
        informativeness: informativeness(graph),
        actionability: actionability(graph),
        no_dangling_nodes: report.satisfied,
        dangling: report.dangling,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions as fixtures;

    #[test]
    fn perceptron_is_fully_informative() {
        let g = fixtures::perceptron(3, 4, 2);
        assert_eq!(informativeness(&g), Informativeness::Full);
        assert_eq!(actionability(&g), Actionability::Full);
    }

    #[test]
    fn one_silent_input_is_partial() {
        let g = IodGraph::builder()
            .input("i1")
            .input("i2")
            .output("o")
            .edge("i1", "o")
            .build()
            .unwrap();
        assert_eq!(informativeness(&g), Informativeness::Partial);
        assert_eq!(actionability(&g), Actionability::Very);
    }

    #[test]
    fn edgeless_is_non() {
        let g = IodGraph::builder().input("i").output("o").build().unwrap();
        assert_eq!(informativeness(&g), Informativeness::Non);
        assert_eq!(actionability(&g), Actionability::Non);
    }

    #[test]
    fn parallel_wires_are_very() {
        let g = IodGraph::builder()
            .input("i1")
            .input("i2")
            .output("o1")
            .output("o2")
            .edges([("i1", "o1"), ("i2", "o2")])
            .build()
            .unwrap();
        assert_eq!(informativeness(&g), Informativeness::Very);
        assert_eq!(actionability(&g), Actionability::Very);
    }

    #[test]
    fn dangling_examples() {
        let g = fixtures::dangling_example();
        assert_eq!(no_dangling_nodes(&g).dangling, vec!["A", "D"]);

        let direct = IodGraph::builder().input("i").output("o").edge("i", "o").build().unwrap();
        assert!(no_dangling_nodes(&direct).satisfied);

        let isolated = IodGraph::builder()
            .input("i")
            .intermediate("a")
            .intermediate("b")
            .output("o")
            .edges([("i", "a"), ("a", "o")])
            .build()
            .unwrap();
        let report = no_dangling_nodes(&isolated);
        assert!(!report.satisfied);
        assert_eq!(report.dangling, vec!["b"]);
    }

    #[test]
    fn two_input_example_shape() {
        let g = fixtures::partially_informative_example();
        assert_eq!(informativeness(&g), Informativeness::Partial);
        assert!(g.reachable_from_ids(&["I1"]).unwrap().contains("O2"));
        let reach = g.reachable_from_ids(&["I2"]).unwrap();
        assert!(!reach.contains("O1") && !reach.contains("O2"));
        let fixed = fixtures::partially_informative_example_with_extra_edge();
        assert_eq!(informativeness(&fixed), Informativeness::Very);
    }
}
