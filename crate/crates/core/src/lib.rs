#![allow(
    clippy::neg_cmp_op_on_partial_ord,
    clippy::needless_range_loop,
    clippy::excessive_precision
)]

pub mod analyze;
pub mod conflict;
pub mod contamination;
pub mod error;
pub mod models;
pub mod numerics;
pub mod rb_core;
pub mod reproduce;

pub use error::{Error, Result};
