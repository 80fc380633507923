//! Exact scalars: Gaussian rationals and rational functions of one
//! deformation parameter `z` over them.

mod gauss;
mod laurent;
pub mod roots;
mod scalar;
mod upoly;

pub use gauss::GaussRat;
pub use laurent::LaurentJet;
pub use scalar::{Mode, Scalar};
pub use upoly::UPoly;

pub(crate) use gauss::forward_owned;
