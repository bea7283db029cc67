#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod control;
pub mod dynamics;
pub mod engine;
pub mod error;
pub mod estimation;
pub mod optimizer;
pub mod planner;
pub mod sim;

pub use error::{Error, Result};
