//! Solver for the characteristic initial value problem of the Euler-Darboux
//! equation `V_xy - (V_x + V_y) / (2 (1 - x - y)) = 0` on the triangle
//! `x, y >= 0, x + y < 1`, with near-diagonal expansions and the Weyl scalars
//! of the associated colliding plane wave spacetime.

// `!(a < b)` is used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod abel;
pub mod asymptotics;
pub mod error;
pub mod goursat;
pub mod oracle;
pub mod quadrature;
pub mod special;
pub mod verify;
pub mod weyl;

pub use error::{Error, Result};
pub use quadrature::QuadratureConfig;
