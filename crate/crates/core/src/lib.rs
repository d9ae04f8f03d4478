//! Grammar-constrained geodesics over semantic networks.

pub mod engine;
pub mod geodesics;
pub mod grammar;
pub mod path_encoding;
pub(crate) mod syntax;
pub mod triple_store;
pub mod vocab;
