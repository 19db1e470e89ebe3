//! Band and band-dominated operators on l^p(Z^N, C^d): truncations, lower
//! norms and approximation numbers, limit operators, Fredholm criteria and a
//! gallery of reference instances.

pub mod bandop;
pub mod error;
pub mod fredholmlab;
pub mod gallery;
pub mod lattice;
pub mod limitops;
pub mod linalg;
pub mod moduli;

pub use bandop::{BandOperator, CoefficientSequence, TruncatedMatrix};
pub use error::{Error, Result};
pub use lattice::{LatticeVector, MultiIndex, NormTag, PNorm, SiteBox, Window};
