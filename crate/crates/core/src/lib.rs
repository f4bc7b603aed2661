#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod continuation;
pub mod dependence;
pub mod error;
pub mod exppoly;
pub(crate) mod json;
pub mod vectors;

pub use error::{Error, Result};
