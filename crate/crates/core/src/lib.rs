//! IOD graphs (input-output directed graphs), their informativeness and
//! actionability, IO partitions, and the crossover operator that recombines
//! two graphs across partition membranes.
//!
//! ```
//! use iodgraph::{classify, IodGraph, Informativeness};
//!
//! let g = IodGraph::builder()
//!     .input("i")
//!     .intermediate("h")
//!     .output("o")
//!     .edges([("i", "h"), ("h", "o")])
//!     .build()
//!     .unwrap();
//! assert_eq!(classify(&g).informativeness, Informativeness::Full);
//! ```

pub mod analysis;
pub mod census;
pub mod constructions;
pub mod crossover;
pub mod error;
pub mod evolution;
pub mod exec;
pub mod generate;
pub mod graph;
pub mod io;
pub mod nodeset;
pub mod partition;

pub use analysis::{actionability, classify, informativeness, Actionability, Classification, Informativeness};
pub use crossover::{crossover, CrossoverPair, CrossoverRecord, CrossoverStrategy, MatchingSpec, NodeNaming};
pub use error::{Error, Result};
pub use exec::Execution;
pub use graph::{validate, GraphDocument, IodGraph, Node, NodeRole};
pub use nodeset::NodeSet;
pub use partition::{IoPartition, Membrane, PartitionFilter};
