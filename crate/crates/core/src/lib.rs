//! First-order decomposition trees for parfactor models.
//!
//! The pipeline: parse a model, normalize it, build an FO-dtree, compute node
//! properties symbolically, decide liftability, read off an ordered plan of
//! lifted operations, bound its cost by the lifted width, and execute it.
//! A propositional engine over the grounding serves as the reference.

pub mod analysis;
pub mod build;
pub mod combinat;
pub mod corpus;
pub mod error;
pub mod fotree;
pub mod io;
pub mod lve;
pub mod model;
pub mod propositional;

pub use error::{Error, Result};
