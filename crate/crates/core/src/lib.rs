//! Numerical evaluation of the multilinear maximal operators S^m_α, which
//! interpolate between the multilinear Hardy–Littlewood maximal function
//! (α = 0) and the multilinear spherical maximal function (α = 1).

pub mod error;
pub mod field;
pub mod fourier;
pub mod inequality;
pub mod lp;
pub mod maxf;
pub mod operator;
pub mod quadrature;
pub mod runner;
pub mod special;

pub use error::{Error, Result};
pub use field::{product_eval, Field, FieldKind, FieldTuple};
