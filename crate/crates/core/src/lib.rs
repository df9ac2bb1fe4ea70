//! Enumeration of the decompositions `1 = 1/x_1 + ... + 1/x_n` where every
//! denominator is `p^a q^b` for two fixed coprime bases, each occurring at
//! least once.
//!
//! A solution is recorded as a table `k_{a,b}` counting the copies of
//! `1/(p^a q^b)`. [`enumerator`] builds every table row by row from the top,
//! carrying the pushed-down mass between rows; [`oracle`] is an unrelated
//! brute-force search over exact rationals used to certify it.

pub mod bounds;
pub mod enumerator;
pub mod error;
pub mod model;
pub mod moves;
pub mod numtheory;
pub mod oracle;

pub use error::{Error, Result};
pub use model::{canonical_key, grid_sum, verify, Params, RowVec, SolutionGrid, SolutionKind};
