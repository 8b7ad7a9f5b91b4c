//! IO companion to `gsheaf-core`: the JSON document format, random
//! instance generation, counterexample search, and the command line.

pub mod cli;
pub mod document;
pub mod generate;
pub mod search;
