//! Strongly regular Cayley graphs from cyclotomic data over finite fields:
//! field arithmetic, exact character sums, connection-set constructions and
//! spectrum-based verification.

pub mod arith;
pub mod constructions;
pub mod chars;
pub mod cyclotomy;
pub mod error;
pub mod verify;
pub mod field;

pub use error::{Error, Result};
pub use field::{build_field, build_field_with, FieldCtx, FieldElem, FieldOptions, FieldSpec};
