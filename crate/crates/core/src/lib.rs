//! Numerical kernels for congruence Kloosterman sums, Diophantine majorants,
//! Jacobi theta sums and value counting of inhomogeneous indefinite forms.

pub mod diophantine;
pub mod error;
pub mod fenwick;
pub mod numtheory;
pub mod oppenheim;
pub mod quadrature;
pub mod kloosterman;
pub mod lattice;
pub mod sl2geom;
pub mod summation;
pub mod theta;

pub use error::{Error, Result};
