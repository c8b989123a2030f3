//! Exact enumeration of Waring subspaces, Waring identifiability and the
//! associated orbit-counting polynomials for Veronese varieties and other
//! finite point sets over finite fields.

pub mod budget;
pub mod codes;
pub mod constructions;
pub mod error;
pub mod gf;
pub mod group;
pub mod pencils;
pub mod projspace;
pub mod veronese;
pub mod waring;

pub use budget::Budget;
pub use error::{Error, Result};
pub use gf::{Fe, Gf};
