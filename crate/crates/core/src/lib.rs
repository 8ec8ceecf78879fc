//! Deterministic discrete-event simulator for wireless sensor networks with
//! interchangeable energy models, plus the benchmark harness around it.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod energy;
pub mod evalkit;
pub mod harness;
pub mod mac;
pub mod medium;
pub mod network;
pub mod scenario;
pub mod sim;
