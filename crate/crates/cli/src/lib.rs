//! Configuration, output formatting, the claim registry, and the command
//! drivers behind the `otlab` binary.

// `!(x > 0.0)` guards reject NaN along with the out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod claims;
pub mod commands;
pub mod config;
pub mod output;
