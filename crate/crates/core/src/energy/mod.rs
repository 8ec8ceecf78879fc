//! Energy models: radio state machine, hierarchical storage/consumer/generator
//! network, and per-component activity accounting.
//!
//! All three consume the same radio activity (state changes and discrete
//! activities) through [`BoundModel`] and write into an [`EnergyTrace`].

mod bound;
mod component;
mod hierarchical;
mod power;
mod state_machine;
mod trace;

pub use bound::{attach_model, BoundModel, EnergyParams, HierarchicalBinding, ModelKind};
pub use component::{ca_charge, Activity, ActivityCostTable, ComponentAccountingModel};
pub use hierarchical::{hm_step, Flow, HierarchicalModel, StorageEvent, UnitMode};
pub use power::{RadioPowerTable, RadioState};
pub use state_machine::{sm_transition, StateMachineModel};
pub use trace::{energy_report, Category, EnergyReport, EnergyTrace, ReportRow, TraceEntry};

use crate::sim::SimTime;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum EnergyError {
    #[error("transition at {now} precedes the last update at {last}")]
    TimeReversed { now: SimTime, last: SimTime },
    #[error("unknown activity `{0}`")]
    UnknownActivity(String),
    #[error("unknown energy model `{0}` (expected sm, hier, hier-charge or comp)")]
    UnknownModel(String),
    #[error("the {0} model cannot carry an energy harvester")]
    HarvesterUnsupported(ModelKind),
    #[error("invalid energy parameter `{field}`: {reason}")]
    InvalidParam { field: &'static str, reason: String },
    #[error("energy trace is still open")]
    TraceOpen,
    #[error("report interval {interval} is not a multiple of the trace bucket {bucket}")]
    IntervalMismatch { interval: SimTime, bucket: SimTime },
}
