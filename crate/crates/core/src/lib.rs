//! Workbench for bimodal logics whose second modality is the difference
//! modality `<!=>`.
//!
//! The crate provides the formula language and its axiom generators
//! ([`formula`]), finite Kripke semantics ([`kripke`]), graph oracles for
//! colourability and connectivity ([`graph`]), filtrations
//! ([`filtration`]), p-morphisms and the repairing constructions
//! ([`morphism`]), bounded decision procedures for the logics of
//! non-k-colourable and connected graphs ([`decide`]), JSON interchange
//! ([`json`]) and the command-line front end ([`cli`]).

pub mod cli;
pub mod decide;
pub mod error;
pub mod filtration;
pub mod formula;
pub mod graph;
pub mod json;
pub mod kripke;
pub mod morphism;
pub mod pointset;

pub use error::{Error, Result};
pub use formula::{axiom, AxiomId, Formula, FormulaSet};
pub use kripke::{Frame, Model, SecondRelation};
pub use pointset::PointSet;
