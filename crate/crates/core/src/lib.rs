pub mod error;
pub mod linalg;
pub mod pairspace;
pub mod states;
pub mod cli;
pub mod cpcheck;
pub mod decoherence;
pub mod output;
pub mod qnd;
pub mod quadrature;
pub mod scattering;
pub mod symmap;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, Ket};
pub use pairspace::{PairBasis, Parity};
