//! Graph C*-algebras, their linear quantum symmetries, and a bounded derivation engine
//! for the relations those symmetries satisfy.

pub mod action;
pub mod derivation;
pub mod free_algebra;
pub mod graph;
pub mod hom_verifier;
pub mod linalg;
pub mod maps;
pub mod path_algebra;
pub mod presentations;
pub mod rep_finder;
pub mod scalar;
pub mod states;
