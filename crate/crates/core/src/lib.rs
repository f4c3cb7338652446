//! Exact and certified computation of dynamical entropies.

pub mod adjoint;
pub mod error;
pub mod exact_poly;
pub mod growth;
pub mod linalg;
pub mod linear_entropy;
pub mod mahler;
pub mod numeric;
pub mod root_solver;
pub mod set_entropy;
pub mod shift_entropy;
pub mod spectrum;

pub use error::{Error, Result};
pub use exact_poly::{IntPolynomial, RatPolynomial};
pub use linalg::{Lattice, RatMatrix};
pub use mahler::EntropyValue;
