//! Energy-change statistics of open quantum systems under end-point (EPM),
//! two-point (TPM) and eigenstate-resolved (MLL) measurement schemes.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channels;
pub mod error;
pub mod models;
pub mod protocols;
pub mod qcore;
pub mod sampling;

pub use error::{Error, Result};
