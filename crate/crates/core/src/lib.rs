//! Exact graph coloring by branch-and-price with ZDD-based pricing.
//!
//! The solver formulates coloring as set covering over the maximal
//! independent sets of the graph, solves the LP relaxation by column
//! generation, and prices columns with a zero-suppressed binary decision
//! diagram that stores every maximal independent set. Generated columns
//! are removed from the diagram in place, so pricing stays exact under
//! plain 0-1 variable branching. Subproblem selection supports DFS,
//! best-first, and cyclic best-first search with depth or
//! positive-assignment contours.

pub mod bitset;
pub mod bnp;
pub mod graph;
pub mod mis;
pub mod rmp;
pub mod zdd;

pub use bitset::BitSet;
pub use graph::Graph;
pub use zdd::{NodeId, Zdd};
