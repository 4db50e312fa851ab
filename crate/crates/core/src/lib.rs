//! Unconditionally secure authentication of subspace codes sent over
//! linear network coding.
//!
//! The crate covers the finite-field and linear-algebra substrate, linear
//! codes and their access structures, elliptic-curve AG codes, the tagging
//! and verification protocol, a DAG network-coding simulator, and the
//! coalition attacks used to stress the scheme.

pub mod field;
pub mod linalg;
pub mod rng;
pub mod codes;
pub mod ec;
pub mod scheme;
pub mod network;
pub mod adversary;
pub mod params;
