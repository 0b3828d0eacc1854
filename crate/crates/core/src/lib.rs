//! Feedforward neural networks with logistic units, trained either by online
//! backpropagation or by an inertia-weight particle swarm searching the flat
//! weight vector, plus the tabular pipeline around them: correlation-based
//! feature selection, rating-scale labeling, preprocessing, and strict or
//! tolerant class scoring.
//!
//! The crate is `no_std` and needs only `alloc`. File formats, CSV and the
//! command-line front end live in the `swarmnet` crate.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod backprop;
pub mod data;
pub mod error;
pub mod eval;
pub mod network;
pub mod pso;
pub mod rng;
pub mod select;

pub use error::{Error, Result};
pub use network::{Network, Pattern, Topology, WeightVector};
