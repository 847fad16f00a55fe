//! Exact hermitian-square factorization of positive semidefinite matrix
//! polynomials over the rationals and Gaussian rationals.

pub mod approx;
pub mod error;
pub mod factorize;
pub mod generate;
pub mod io;
pub mod local;
pub mod matpoly;
pub mod matrix;
pub mod poly;
pub mod polecancel;
pub mod ratfn;
pub mod roots;
pub mod scalar;
pub mod smith;
pub mod splitoff;
pub mod twosquares;

pub use error::{Error, Result};
pub use poly::Poly;
pub use ratfn::RatFn;
pub use scalar::{Gauss, Rat, Scalar};

pub type RealPoly = Poly<Rat>;
pub type ComplexPoly = Poly<Gauss>;
