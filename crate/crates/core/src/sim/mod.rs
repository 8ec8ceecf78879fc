//! Discrete-event core: virtual clock, event queue and seeded randomness.

mod engine;
mod rng;
mod time;

pub use engine::{Engine, Event, EventHandle, EventKind, Handler, NodeId, Scheduler, SimError};
pub use rng::{mix64, RngStream};
pub use time::SimTime;
