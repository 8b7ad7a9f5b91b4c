//! Finite model theory for group-equivariant structures glued along a finite
//! topological space.
//!
//! The crate is organized bottom-up:
//!
//! * [`logic`] — signatures, terms, formulas, a text grammar for both, the
//!   double-negation translation, and bounded exhaustive enumeration.
//! * [`structures`] — finite groups, G-structures (structures with a group
//!   action commuting with the symbols), morphisms and their classification,
//!   images, quotients, orbit structures, and colimits of directed systems.
//! * [`topology`] — finite topological spaces given by explicit open
//!   families, plus filters of opens.
//! * [`presheaf`] — presheaves of G-structures: one structure per nonempty
//!   open, restriction maps along inclusions, gluing diagnostics, stalks.
//! * [`forcing`] — the point and open forcing relations, generic filters,
//!   generic models, and checkers for the semantic theorems the rest of the
//!   crate is built to probe.
//!
//! Everything works on small explicit data (universes, tables, bitmask point
//! sets) and is deterministic: iteration orders are fixed, searches scan
//! candidates in a pinned order, and reports quote concrete witnesses that can
//! be replayed through the public operations.
//!
//! The crate is `no_std` (with `alloc`); IO, serialization, and random
//! generation live in the companion CLI crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod logic;
pub mod report;
pub mod structures;
pub mod topology;
pub mod presheaf;
pub mod forcing;

pub use report::{CheckReport, Violation};
