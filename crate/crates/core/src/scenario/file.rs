//! TOML scenario files.
//!
//! ```toml
//! kind = "ping"              # or "mesh"
//! name = "ping-dot11b-ns2"   # optional
//! profile = "dot11b/ns2"     # dot11b/ns2 | dot11b/omnet | dot154/default
//! seed = 1
//! model = "sm"               # sm | hier | hier-charge | comp
//! payload_bytes = 10
//! frequency_hz = 1.0
//! duration_s = 100.0         # ping only
//! distance_m = 10.0          # ping only
//! # bc_count = 4             # mesh only
//! # rounds = 100             # mesh only
//!
//! [power]                    # optional; defaults follow the profile's PHY
//! tx_w = 0.75
//! rx_w = 0.22
//! sleep_w = 0.0002
//! idle_w = 0.0002
//!
//! [energy]                   # optional
//! initial_energy_j = 1000.0
//!
//! [medium]                   # optional
//! sensitivity_dbm = -85.0
//! [medium.path_loss]
//! model = "free-space"
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::energy::{EnergyParams, ModelKind, RadioPowerTable};
use crate::mac::ProfileId;
use crate::medium::{PathLossParams, DEFAULT_SENSITIVITY_DBM};

use super::{default_power_table, MeshScenario, PingScenario, Scenario, ScenarioError, ScenarioSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioKind {
    Ping,
    Mesh,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Ping => "ping",
            ScenarioKind::Mesh => "mesh",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MediumConfig {
    pub sensitivity_dbm: f64,
    pub path_loss: PathLossParams,
}

impl Default for MediumConfig {
    fn default() -> Self {
        Self {
            sensitivity_dbm: DEFAULT_SENSITIVITY_DBM,
            path_loss: PathLossParams::default(),
        }
    }
}

/// On-disk shape of a scenario; see the module docs for the format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub kind: ScenarioKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub profile: ProfileId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payload_bytes: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frequency_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bc_count: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rounds: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power: Option<RadioPowerTable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy: Option<EnergyParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub medium: Option<MediumConfig>,
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        toml::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario files always serialize")
    }

    pub fn into_scenario(self) -> Result<Scenario, ScenarioError> {
        let reject = |field: &'static str, present: bool| {
            if present {
                Err(ScenarioError::invalid(
                    field,
                    format!("does not apply to {} scenarios", self.kind.name()),
                ))
            } else {
                Ok(())
            }
        };
        let spec = match self.kind {
            ScenarioKind::Ping => {
                reject("bc_count", self.bc_count.is_some())?;
                reject("rounds", self.rounds.is_some())?;
                let d = PingScenario::default();
                ScenarioSpec::Ping(PingScenario {
                    payload_bytes: self.payload_bytes.unwrap_or(d.payload_bytes),
                    frequency_hz: self.frequency_hz.unwrap_or(d.frequency_hz),
                    duration_s: self.duration_s.unwrap_or(d.duration_s),
                    distance_m: self.distance_m.unwrap_or(d.distance_m),
                })
            }
            ScenarioKind::Mesh => {
                reject("duration_s", self.duration_s.is_some())?;
                reject("distance_m", self.distance_m.is_some())?;
                let d = MeshScenario::default();
                ScenarioSpec::Mesh(MeshScenario {
                    bc_count: self.bc_count.unwrap_or(d.bc_count),
                    frequency_hz: self.frequency_hz.unwrap_or(d.frequency_hz),
                    rounds: self.rounds.unwrap_or(d.rounds),
                    payload_bytes: self.payload_bytes.unwrap_or(d.payload_bytes),
                })
            }
        };
        let mut scenario = match &spec {
            ScenarioSpec::Ping(p) => Scenario::ping(self.profile, p.clone()),
            ScenarioSpec::Mesh(m) => Scenario::mesh(self.profile, m.clone()),
        };
        if let Some(name) = self.name {
            scenario.name = name;
        }
        scenario.seed = self.seed.unwrap_or(scenario.seed);
        scenario.model = self.model.unwrap_or_default();
        scenario.power = self.power.unwrap_or_else(|| default_power_table(self.profile));
        scenario.energy = self.energy.unwrap_or_default();
        scenario.medium = self.medium.unwrap_or_default();
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn from_scenario(s: &Scenario) -> Self {
        let mut f = ScenarioFile {
            kind: s.kind(),
            name: Some(s.name.clone()),
            profile: s.profile,
            seed: Some(s.seed),
            model: Some(s.model),
            payload_bytes: Some(s.payload_bytes()),
            frequency_hz: Some(s.frequency_hz()),
            duration_s: None,
            distance_m: None,
            bc_count: None,
            rounds: None,
            power: Some(s.power),
            energy: Some(s.energy.clone()),
            medium: Some(s.medium.clone()),
        };
        match &s.spec {
            ScenarioSpec::Ping(p) => {
                f.duration_s = Some(p.duration_s);
                f.distance_m = Some(p.distance_m);
            }
            ScenarioSpec::Mesh(m) => {
                f.bc_count = Some(m.bc_count);
                f.rounds = Some(m.rounds);
            }
        }
        f
    }
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Scenario, ScenarioError> {
        ScenarioFile::parse(text)?.into_scenario()
    }

    pub fn load(path: &Path) -> Result<Scenario, ScenarioError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| ScenarioError::Parse(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            ScenarioError::Parse(msg) => ScenarioError::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        ScenarioFile::from_scenario(self).to_toml()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::medium::PathLossModel;

    #[test]
    fn minimal_ping_file() {
        let s = Scenario::from_toml("kind = \"ping\"\nprofile = \"dot11b/ns2\"\n").unwrap();
        assert_eq!(s.profile, ProfileId::Dot11bNs2);
        assert_eq!(s.power, RadioPowerTable::DOT11B);
        assert_eq!(s.spec, ScenarioSpec::Ping(PingScenario::default()));
        assert_eq!(s.model, ModelKind::StateMachine);
    }

    #[test]
    fn full_mesh_file() {
        let text = r#"
kind = "mesh"
profile = "dot154/default"
bc_count = 4
rounds = 3
model = "hier"
seed = 9

[energy]
initial_energy_j = 50.0
harvester_w = 0.001

[medium]
sensitivity_dbm = -90.0
[medium.path_loss]
model = "log-normal-shadowing"
sigma_db = 0.0
"#;
        let s = Scenario::from_toml(text).unwrap();
        assert_eq!(s.power, RadioPowerTable::DOT154);
        assert_eq!(s.medium.path_loss.model, PathLossModel::LogNormalShadowing);
        assert_eq!(s.energy.harvester_w, Some(0.001));
        let ScenarioSpec::Mesh(m) = &s.spec else { panic!() };
        assert_eq!((m.bc_count, m.rounds), (4, 3));
    }

    #[test]
    fn round_trip_through_toml() {
        let s = Scenario::mesh(
            ProfileId::Dot11bOmnet,
            MeshScenario {
                bc_count: 2,
                ..MeshScenario::default()
            },
        )
        .with_seed(77)
        .with_model(ModelKind::ComponentAccounting);
        let back = Scenario::from_toml(&s.to_toml()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn errors_name_the_line_or_field() {
        let err =
            Scenario::from_toml("kind = \"ping\"\nprofile = \"dot11b/ns2\"\npayload_bytes = \"ten\"\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 3"), "{msg}");
        assert!(msg.contains("payload_bytes"), "{msg}");

        let err = Scenario::from_toml("kind = \"ping\"\nprofile = \"dot11b/ns2\"\ncolour = 1\n").unwrap_err();
        assert!(err.to_string().contains("colour"), "{err}");

        let err = Scenario::from_toml("kind = \"ping\"\nprofile = \"wifi\"\n").unwrap_err();
        assert!(err.to_string().contains("wifi"), "{err}");

        let err = Scenario::from_toml("kind = \"mesh\"\nprofile = \"dot11b/ns2\"\ndistance_m = 3.0\n").unwrap_err();
        assert_eq!(
            err,
            ScenarioError::Invalid {
                field: "distance_m",
                reason: "does not apply to mesh scenarios".into()
            }
        );

        let err = Scenario::from_toml("kind = \"ping\"\nprofile = \"dot11b/ns2\"\nfrequency_hz = -1.0\n").unwrap_err();
        assert!(matches!(
            err,
            ScenarioError::Invalid {
                field: "frequency_hz",
                ..
            }
        ));
    }

    #[test]
    fn activity_costs_load_from_file() {
        let text = r#"
kind = "ping"
profile = "dot11b/ns2"
model = "comp"
[energy.activity_costs]
"radio.send" = 2e-4
"radio.receive" = 1e-4
"#;
        let s = Scenario::from_toml(text).unwrap();
        assert_eq!(s.energy.activity_costs.0.len(), 2);
    }
}
