//! Experiment builders: the two-node ping pair and the BC-mesh scaling grid.

mod file;
mod plan;
mod topology;

pub use file::{MediumConfig, ScenarioFile, ScenarioKind};
pub use plan::{guard_slot, mesh_traffic_plan, Request, TrafficPlan};
pub use topology::{build_mesh, NodePos, Topology, BC_GAP_M, BC_SIDE_M};

use crate::energy::{EnergyParams, ModelKind, RadioPowerTable};
use crate::mac::{MacError, PhyKind, ProfileId};
use crate::medium::propagation_delay_time;
use crate::sim::SimTime;

pub const PING_PAYLOADS: [u32; 9] = [10, 20, 30, 40, 50, 60, 70, 80, 90];
pub const PING_FREQUENCIES: [f64; 3] = [0.1, 1.0, 2.0];
pub const MESH_BC_COUNTS: [u32; 8] = [1, 2, 4, 8, 16, 32, 64, 128];

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ScenarioError {
    #[error("invalid `{field}`: {reason}")]
    Invalid { field: &'static str, reason: String },
    #[error("request/reply exchange ({exchange}) does not fit in the ping period ({period})")]
    ExchangeExceedsPeriod { exchange: SimTime, period: SimTime },
    #[error(transparent)]
    Mac(#[from] MacError),
    #[error("{0}")]
    Parse(String),
}

impl ScenarioError {
    pub(crate) fn invalid(field: &'static str, reason: String) -> Self {
        ScenarioError::Invalid { field, reason }
    }
}

/// Default radio power table for a profile's PHY.
pub fn default_power_table(profile: ProfileId) -> RadioPowerTable {
    match profile.kind() {
        PhyKind::Dot11b => RadioPowerTable::DOT11B,
        PhyKind::Dot154 => RadioPowerTable::DOT154,
    }
}

/// Two nodes `distance_m` apart; A pings B every `1/frequency_hz` seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct PingScenario {
    pub payload_bytes: u32,
    pub frequency_hz: f64,
    pub duration_s: f64,
    pub distance_m: f64,
}

impl Default for PingScenario {
    fn default() -> Self {
        Self {
            payload_bytes: 10,
            frequency_hz: 1.0,
            duration_s: 100.0,
            distance_m: 10.0,
        }
    }
}

/// `bc_count` four-node squares, all-pairs echo for `rounds` rounds.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshScenario {
    pub bc_count: u32,
    pub frequency_hz: f64,
    pub rounds: u32,
    pub payload_bytes: u32,
}

impl Default for MeshScenario {
    fn default() -> Self {
        Self {
            bc_count: 1,
            frequency_hz: 1.0,
            rounds: 100,
            payload_bytes: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioSpec {
    Ping(PingScenario),
    Mesh(MeshScenario),
}

/// A validated, immutable experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub seed: u64,
    pub model: ModelKind,
    pub profile: ProfileId,
    pub power: RadioPowerTable,
    pub energy: EnergyParams,
    pub medium: MediumConfig,
    pub spec: ScenarioSpec,
}

impl Scenario {
    pub fn ping(profile: ProfileId, ping: PingScenario) -> Self {
        Self {
            name: format!(
                "ping-{}-{}B-{}Hz",
                profile.name().replace('/', "-"),
                ping.payload_bytes,
                ping.frequency_hz
            ),
            seed: 1,
            model: ModelKind::StateMachine,
            profile,
            power: default_power_table(profile),
            energy: EnergyParams::default(),
            medium: MediumConfig::default(),
            spec: ScenarioSpec::Ping(ping),
        }
    }

    pub fn mesh(profile: ProfileId, mesh: MeshScenario) -> Self {
        Self {
            name: format!("mesh-bc{}", mesh.bc_count),
            seed: 1,
            model: ModelKind::StateMachine,
            profile,
            power: default_power_table(profile),
            energy: EnergyParams::default(),
            medium: MediumConfig::default(),
            spec: ScenarioSpec::Mesh(mesh),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_model(mut self, model: ModelKind) -> Self {
        self.model = model;
        self
    }

    pub fn kind(&self) -> ScenarioKind {
        match self.spec {
            ScenarioSpec::Ping(_) => ScenarioKind::Ping,
            ScenarioSpec::Mesh(_) => ScenarioKind::Mesh,
        }
    }

    pub fn payload_bytes(&self) -> u32 {
        match &self.spec {
            ScenarioSpec::Ping(p) => p.payload_bytes,
            ScenarioSpec::Mesh(m) => m.payload_bytes,
        }
    }

    pub fn frequency_hz(&self) -> f64 {
        match &self.spec {
            ScenarioSpec::Ping(p) => p.frequency_hz,
            ScenarioSpec::Mesh(m) => m.frequency_hz,
        }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        self.power
            .validate()
            .map_err(|e| ScenarioError::invalid("power", e.to_string()))?;
        self.medium
            .path_loss
            .validate()
            .map_err(|e| ScenarioError::invalid("medium", e.to_string()))?;
        self.build().map(|_| ())
    }

    /// Node layout and echo schedule for this scenario.
    pub fn build(&self) -> Result<(Topology, TrafficPlan), ScenarioError> {
        match &self.spec {
            ScenarioSpec::Ping(p) => build_ping_pair(self.profile, p),
            ScenarioSpec::Mesh(m) => {
                let topo = build_mesh(m.bc_count)?;
                if m.payload_bytes == 0 {
                    return Err(ScenarioError::invalid("payload_bytes", "must be at least 1".into()));
                }
                let plan = mesh_traffic_plan(
                    &topo,
                    &self.profile.profile(),
                    m.payload_bytes,
                    m.rounds,
                    m.frequency_hz,
                )?;
                Ok((topo, plan))
            }
        }
    }
}

/// Node A at (0, 0), node B at (distance, 0); A sends every period, B replies.
pub fn build_ping_pair(profile: ProfileId, ping: &PingScenario) -> Result<(Topology, TrafficPlan), ScenarioError> {
    if !(1..=90).contains(&ping.payload_bytes) {
        return Err(ScenarioError::invalid(
            "payload_bytes",
            format!("must be within 1..=90, got {}", ping.payload_bytes),
        ));
    }
    if !(ping.frequency_hz > 0.0 && ping.frequency_hz.is_finite()) {
        return Err(ScenarioError::invalid(
            "frequency_hz",
            format!("must be > 0, got {}", ping.frequency_hz),
        ));
    }
    if !(ping.duration_s >= 0.0 && ping.duration_s.is_finite()) {
        return Err(ScenarioError::invalid(
            "duration_s",
            format!("must be >= 0, got {}", ping.duration_s),
        ));
    }
    if !(ping.distance_m > 0.0 && ping.distance_m.is_finite()) {
        return Err(ScenarioError::invalid(
            "distance_m",
            format!("must be > 0, got {}", ping.distance_m),
        ));
    }
    let topo = Topology {
        nodes: vec![
            NodePos { id: 0, x: 0.0, y: 0.0 },
            NodePos {
                id: 1,
                x: ping.distance_m,
                y: 0.0,
            },
        ],
    };
    let period = SimTime::from_secs_f64(1.0 / ping.frequency_hz);
    let exchange = crate::mac::worst_case_exchange(&profile.profile(), ping.payload_bytes)?.times(2)
        + propagation_delay_time(ping.distance_m).times(2);
    if exchange >= period {
        return Err(ScenarioError::ExchangeExceedsPeriod { exchange, period });
    }
    let duration = SimTime::from_secs_f64(ping.duration_s);
    let count = duration.as_nanos().div_ceil(period.as_nanos());
    Ok((
        topo,
        TrafficPlan::Periodic {
            src: 0,
            dst: 1,
            period,
            count,
        },
    ))
}
