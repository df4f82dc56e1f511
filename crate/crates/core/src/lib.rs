//! Core algorithms for splitting a low-cohesion class into concept clusters.
//!
//! The pipeline has two stages. First the class is screened with LCOM and TCC
//! ([`cohesion`]). A class flagged as low-cohesive is then decomposed: every
//! member gets a property set, members are compared with the Jaccard
//! coefficient ([`similarity`]), grouped by agglomerative clustering cut at a
//! similarity threshold ([`clustering`]), and the small leftover clusters are
//! folded into their best host using the CIM metrics ([`merging`]).
//! [`pipeline`] wires the stages together.
//!
//! The crate is `no_std` and only needs `alloc`. Parsing, file formats and the
//! command line live in the `classplit` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod clustering;
pub mod cohesion;
mod error;
pub mod merging;
pub mod model;
pub mod pipeline;
pub mod similarity;

pub use error::{Error, Result};
pub use model::{ClassGraph, ClassGraphBuilder, Cluster, Member, MemberId, MemberKind, Partition};
