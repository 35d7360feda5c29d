#![allow(clippy::needless_range_loop)]
// `!(x <= bound)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod clifford;
pub mod dirac;
pub mod error;
pub mod fields;
pub mod fixtures;
pub mod forms;
pub mod geometry;
pub mod suite;
pub mod teleparallel;

pub use error::{Error, Result};
