//! Finite-field rigidity laboratory.
//!
//! Explicit fields `F_{p^n}`, unions of multiplicative cosets, direction sets
//! of functions on `AG(2, q)`, multiplicative character sums with their Weil
//! type bounds, and clique searches in Cayley graphs on `F_{q^2}`. The
//! searches verify rigidity statements of Carlitz-McConnel type
//! exhaustively on desk-scale fields.

pub mod arith;
pub mod bitset;
pub mod charsum;
pub mod clique;
pub mod directions;
pub mod error;
pub mod example;
pub mod field;
pub mod mult;
pub mod parallel;
pub mod search;

pub use directions::{DirectionSet, LinearizedMap, PointSet};
pub use error::{Error, Result};
pub use field::{build_field, build_field_of_order, Element, FieldCtx, FieldSpec, DEFAULT_FIELD_CAP};
pub use mult::{CharacterRef, CosetSpec, CosetUnion};
