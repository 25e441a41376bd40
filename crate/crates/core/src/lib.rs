//! Physical resource estimation for fault-tolerant quantum algorithms.
//!
//! The pipeline runs from algorithm counts ([`psspc`]) through code and
//! distance selection ([`qec`]) and T-factory design ([`factory`]) to a
//! [`estimator::PhysicalEstimate`] of qubits and runtime.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod apps;
pub mod error;
pub mod estimator;
pub mod factory;
pub mod job;
pub mod psspc;
pub mod qec;
pub mod qubit;
pub mod report;
pub mod units;

pub use error::{Error, Result};
