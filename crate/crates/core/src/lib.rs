//! Finite-dimensional associative algebras over the rationals, multilinear
//! polynomial identities, and codimension sequences.

pub mod algebra;
pub mod asymptotics;
pub mod codim;
pub mod error;
pub mod kemer;
pub mod linalg;
pub mod multilinear;
pub mod paths;
pub mod scalar;

pub use algebra::{ParValue, StructureAlgebra, WedderburnData};
pub use error::{Error, Result};
pub use linalg::Subspace;
pub use scalar::Scalar;
