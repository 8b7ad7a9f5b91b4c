//! Finite groups, structures acted on by them, and the maps and
//! colimit constructions between such structures.

mod colimit;
mod constructions;
mod group;
pub(crate) mod gstructure;
mod morphism;

pub use colimit::{colimit, Colimit, DirectedSystem, Germ, SystemEdge};
pub use constructions::{
    image_substructure, orbit_structure, quotient_by_partition, quotient_structure,
    ImageFactorization, OrbitQuotient, QuotientFactorization,
};
pub use group::{permutations, FiniteGroup};
pub use gstructure::{EvalError, GStructure, InvarianceMode};
pub use morphism::{find_isomorphism, GMorphism, MorphismClass};
