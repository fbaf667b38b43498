//! Exact computational algebra for fractional factorial experiments.
//!
//! The crate covers design ideals and Gröbner bases, confounding via ideal
//! membership, indicator functions and design classification, Markov bases
//! for Poisson log-linear models with Metropolis–Hastings conditional tests,
//! and a desk-scale D-optimal design search.

pub mod conditional;
pub mod design;
pub mod division;
pub mod error;
pub mod field;
pub mod fixtures;
pub mod groebner;
pub mod ideal;
pub mod indicator;
pub mod monomial;
pub mod order;
pub mod poly;
pub mod search;

pub use design::{Coding, Design};
pub use error::{Error, Result};
pub use field::{Cyclotomic, Field, Rational};
pub use monomial::Monomial;
pub use order::{OrderKind, TermOrder};
pub use poly::Polynomial;
