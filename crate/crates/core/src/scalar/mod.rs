//! Closed-form scalar fields on a chart `(x^1, .., x^n, t)` with exact
//! partial differentiation.

mod expr;
pub mod parse;
mod sample;
mod tape;

pub use expr::{Func, Node, ScalarExpr, Var};
pub use parse::parse_scalar;
pub use sample::{Point, SampleBox};
pub use tape::Tape;
