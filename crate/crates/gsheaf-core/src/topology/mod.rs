//! Finite topological spaces, density, and filters of opens.

mod filter;
mod points;
mod space;

pub use filter::{enumerate_filters, maximal_filters, validate_filter, Filter};
pub use points::{PointSet, MAX_POINTS};
pub use space::{enumerate_topologies, FiniteSpace, TopologyError};
