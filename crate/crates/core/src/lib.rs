// NaN-rejecting guards are written as negated comparisons on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod model;
pub mod numerics;
pub mod rigidity;
pub mod sobolev;
pub mod talenti;

pub use error::{Error, Result};
