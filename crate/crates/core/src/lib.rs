#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod estimates;
pub mod grid;
pub mod io;
pub mod norms;
pub mod outer;
pub mod par;
pub mod solver;

pub use error::{Error, Result};
