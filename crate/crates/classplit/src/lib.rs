//! Input formats, reports and the command line for `classplit`.
//!
//! The algorithms live in [`classplit_core`]; this crate reads class
//! descriptions, JSON graphs and similarity matrices, and renders results.

pub mod cli;
pub mod ingest;
pub mod report;

pub use classplit_core as core;
