//! Operator algebra: canonical forms, products, orders and symbol maps.

mod matrix;
mod operator;
mod symbol;
mod terms;

pub use matrix::{DStarCheck, OpMatrix};
pub use operator::RegOperator;
pub use symbol::{poisson_bracket, CommPoly, StarSymbol, SymbolMatrix, SymbolPoly};
pub use terms::Key;
