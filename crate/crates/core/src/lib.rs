//! Independent Cascade simulations on partially observed networks.
//!
//! An oracle network is hidden in part; diffusions are run both on the full
//! network and on the visible remainder from the same seeds. Oracle cascades
//! are split into observed, phantom and hidden mass, and the partial cascade
//! is corrected towards the oracle size.

pub mod cascade;
pub mod correction;
pub mod diffusion;
pub mod error;
pub mod experiment;
pub mod generators;
pub mod graph;
pub mod metrics;
pub mod partial;
pub mod random;
pub mod seeding;

pub use error::{Error, Result};
pub use graph::{Graph, NodeId};
