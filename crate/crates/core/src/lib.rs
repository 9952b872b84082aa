//! Totient and divisor-sum analogues over F_q[T].
//!
//! The crate evaluates `phi`, `sigma` and their variants on polynomials over
//! small finite fields, searches exhaustively for pairs with `phi(F) = sigma(G)`,
//! and decomposes every such pair into an exceptional part plus telescoping
//! prime-ladder families, with an independent certificate checker.

pub mod arith;
pub mod certificate;
pub mod cli;
pub mod error;
pub mod exceptional;
pub mod factor;
pub mod family;
pub mod field;
pub mod irreducible;
pub mod poly;
pub mod search;
pub mod text;
pub mod zsigmondy;

pub use error::{Error, Result};
pub use factor::{factor, mobius, Factorization};
pub use field::{Elem, FieldSpec};
pub use irreducible::{build_table, count_irreducibles, IrreducibleTable};
pub use poly::Polynomial;
pub use text::{format_poly, parse_poly};
