// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod eigen;
pub mod error;
pub mod hp;
pub mod jost;
pub mod measure;
pub mod oprl;
pub mod opuc;
pub mod poly;
pub mod quad;
pub mod series;
pub mod szego;

pub use error::{Error, Result};
