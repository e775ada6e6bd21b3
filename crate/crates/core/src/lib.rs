//! Inductive logic programming over stratified Datalog with negation:
//! abduction, kernel construction, kernel pruning and anytime induction,
//! plus a shallow chunker learned from dependency-parsed text.

pub mod bias;
pub mod chunking;
pub mod cli;
pub mod error;
pub mod harness;
pub mod induction;
pub mod eval;
pub mod kernel;
pub mod logic;
pub mod pipeline;

pub use error::{Error, Result};

pub(crate) fn serialize_display<T: std::fmt::Display, S: serde::Serializer>(
    value: &T,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(value)
}
