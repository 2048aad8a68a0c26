//! Matchings of the complete graph on hypercube vertices, their extension to
//! Hamiltonian cycles, and a brute-force search oracle used to verify every
//! construction independently.

pub mod certificate;
pub mod constructors;
pub mod cube;
pub mod dot;
pub mod error;
pub mod extender;
pub mod gen;
pub mod layers;
pub mod matching;
pub mod oracle;
pub mod property_h;
pub mod suite;

pub use cube::{Dimension, Edge, Vertex};
pub use error::{Error, Result};
pub use matching::{Matching, Slot};
