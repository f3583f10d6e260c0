//! Data words, class register automata, and a Hanf-locality compiler from
//! existential MSO sentences to automata.
//!
//! The crate is organized bottom-up:
//!
//! * [`word`], [`signature`], [`graph`]: data words, relation signatures and
//!   the graph abstraction `G(w)`.
//! * [`spheres`]: B-spheres, canonical keys, Hanf types, overlap coloring.
//! * [`logic`]: MSO formulas, parser, classifier, brute-force evaluator.
//! * [`automata`]: class register automata, runs, membership, closure.
//! * [`sphere_automaton`]: the on-the-fly sphere automaton and its canonical run.
//! * [`hanf`]: kernel rewriting, Hanf parameters, β tables, compiled membership.
//! * [`corpus`]: built-in words, formulas and automata.
//! * [`oracle`]: the cross-validation suite used by tests and the CLI.

pub mod automata;
pub mod boolexpr;
pub mod corpus;
pub mod graph;
pub mod hanf;
pub mod logic;
pub mod oracle;
pub mod signature;
pub mod sphere_automaton;
pub mod spheres;
pub mod word;

pub use graph::{build_graph, DwGraph, GraphError};
pub use signature::{axiom_check, interpret, Signature};
pub use word::{Alphabet, DataWord, Label, Letter, Partition, Value};
