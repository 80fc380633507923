//! Exact symbolic computation for systems of linear differential operators
//! with regular singularities along normally crossing walls `t_i = 0`.
//!
//! Layers, bottom-up:
//! - [`coeffield`]: scalars in `ℚ(i)(z)`;
//! - [`series`]: truncated power series in wall variables `t` over polynomials in `x`;
//! - [`opalg`]: operators `Σ a(t,x) ϑ^α ∂_x^β`, matrices of them, and symbol maps;
//! - [`indicial`]: indicial matrices, resonances, spectral hypotheses;
//! - [`holonomic`]: constant-coefficient systems and their solution spaces;
//! - [`frobenius`]: series solutions, log terms, induced equations, parameter families;
//! - [`integrable`]: catalog operators and the two-variable splitting test.

pub mod coeffield;
pub mod error;
pub mod frobenius;
pub mod holonomic;
pub mod indicial;
pub mod integrable;
pub mod linalg;
pub mod opalg;
pub mod parse;
pub mod poly;
pub mod series;

pub use coeffield::{GaussRat, LaurentJet, Scalar};
pub use error::{Error, Result};
pub use poly::{MultiIndex, Poly};
pub use series::TruncSeries;
