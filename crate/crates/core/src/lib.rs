//! Exact symbolic engine for the rational R-matrix deformation of the
//! Heisenberg vertex algebra.

pub mod braiding;
pub mod checks;
pub mod codec;
pub mod error;
pub mod fock;
pub mod heis;
pub mod heis_module;
pub mod hseries;
pub mod kernel;
pub mod laurent;
pub mod report;
pub mod rmatrix;
pub mod sample;
pub mod scalar;
pub mod tensor;
pub mod vertex;

pub use braiding::Braider;
pub use error::{Error, Result};
pub use fock::{FieldResult, Generator, Monomial, State};
pub use hseries::{HSeries, EXACT};
pub use kernel::Kernel;
pub use laurent::{binomial_expand, substitute_shift, Caps, Laurent, Region};
pub use report::{AxiomReport, Status};
pub use scalar::{binomial, parse_rational, rat, ri, CPoly, Coeff, Rational};
