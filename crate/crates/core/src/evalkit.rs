//! Qualitative simulator descriptors and the criterion-by-simulator
//! comparison matrix.
//!
//! Descriptors use the same TOML format as scenario files:
//!
//! ```toml
//! name = "NS2"
//! nature = "simulator"            # simulator | emulator
//! sim_type = "discrete-event"     # discrete-event | continuous | hybrid
//! license = "GNU GPLv2 license"
//! platforms = ["Linux"]
//! heterogeneity = false
//! design_philosophy = "single-level"  # single-level | multi-level | cross-level
//! modelling = true
//! mobility = true
//!
//! [ui]
//! gui = true
//! languages = ["C++", "OTcl"]
//!
//! [medium]
//! path_loss = ["free space"]
//!
//! [energy]
//! battery = "ideal"               # none | ideal | full
//! rf_states = true
//! harvester = false
//! limitations = "Cannot model sensing and processing units"
//!
//! [protocols.layers]
//! network = ["IPv4"]
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum DescriptorError {
    #[error("{source_name}: {message}")]
    Syntax { source_name: String, message: String },
    #[error("{source_name}: `{path}`: {message}")]
    Schema {
        source_name: String,
        path: String,
        message: String,
    },
    #[error("{0}: cannot read: {1}")]
    Io(String, String),
    #[error("a comparison needs at least two descriptors, got {0}")]
    TooFew(usize),
    #[error("no bundled descriptor named `{0}`")]
    UnknownBundled(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Nature {
    Simulator,
    Emulator,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimType {
    DiscreteEvent,
    Continuous,
    Hybrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DesignPhilosophy {
    SingleLevel,
    MultiLevel,
    CrossLevel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Battery {
    None,
    /// Linear, ideal battery only.
    Ideal,
    Full,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserInterface {
    pub gui: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gui_note: Option<String>,
    #[serde(default)]
    pub languages: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumModels {
    #[serde(default)]
    pub path_loss: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub other: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergySupport {
    pub battery: Battery,
    pub rf_states: bool,
    pub harvester: bool,
    /// Free text, carried verbatim.
    #[serde(default)]
    pub limitations: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Protocols {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    /// Layer name → protocols.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub layers: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulatorDescriptor {
    pub name: String,
    pub nature: Nature,
    pub sim_type: SimType,
    /// Free text, carried verbatim.
    pub license: String,
    pub platforms: Vec<String>,
    pub heterogeneity: bool,
    pub design_philosophy: DesignPhilosophy,
    pub modelling: bool,
    pub mobility: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mobility_note: Option<String>,
    pub ui: UserInterface,
    #[serde(default)]
    pub medium: MediumModels,
    pub energy: EnergySupport,
    #[serde(default)]
    pub protocols: Protocols,
}

impl SimulatorDescriptor {
    pub fn parse(text: &str, source_name: &str) -> Result<Self, DescriptorError> {
        let syntax = |e: toml::de::Error| DescriptorError::Syntax {
            source_name: source_name.to_owned(),
            message: e.to_string().trim_end().to_owned(),
        };
        let de = toml::de::Deserializer::parse(text).map_err(syntax)?;
        let d: Self = serde_path_to_error::deserialize(de).map_err(|e| DescriptorError::Schema {
            source_name: source_name.to_owned(),
            path: e.path().to_string(),
            message: e.inner().message().to_owned(),
        })?;
        d.validate(source_name)?;
        Ok(d)
    }

    pub fn validate(&self, source_name: &str) -> Result<(), DescriptorError> {
        let fail = |path: &str, message: &str| {
            Err(DescriptorError::Schema {
                source_name: source_name.to_owned(),
                path: path.to_owned(),
                message: message.to_owned(),
            })
        };
        if self.name.trim().is_empty() {
            return fail("name", "must not be empty");
        }
        if self.platforms.is_empty() {
            return fail("platforms", "list at least one platform");
        }
        let lim = self.energy.limitations.to_lowercase();
        if self.energy.harvester && lim.contains("harvest") && (lim.contains("cannot") || lim.contains("no ")) {
            return fail("energy.harvester", "limitations state that harvesting is not modelled");
        }
        if let Some(layer) = self
            .protocols
            .layers
            .iter()
            .find(|(k, _)| k.trim().is_empty())
            .map(|(k, _)| k)
        {
            return fail(&format!("protocols.layers.{layer}"), "layer name must not be empty");
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("descriptor serialises")
    }
}

pub fn load_descriptor(path: &Path) -> Result<SimulatorDescriptor, DescriptorError> {
    let name = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| DescriptorError::Io(name.clone(), e.to_string()))?;
    SimulatorDescriptor::parse(&text, &name)
}

const BUNDLED: [(&str, &str); 3] = [
    ("tossim", include_str!("../data/descriptors/tossim.toml")),
    ("ns2", include_str!("../data/descriptors/ns2.toml")),
    ("omnetpp", include_str!("../data/descriptors/omnetpp.toml")),
];

/// Keys of the shipped descriptors.
pub fn bundled_names() -> impl Iterator<Item = &'static str> {
    BUNDLED.iter().map(|(k, _)| *k)
}

pub fn bundled_descriptor(key: &str) -> Result<SimulatorDescriptor, DescriptorError> {
    let (k, text) = BUNDLED
        .iter()
        .find(|(k, _)| *k == key)
        .ok_or_else(|| DescriptorError::UnknownBundled(key.to_owned()))?;
    SimulatorDescriptor::parse(text, &format!("bundled:{k}"))
}

/// TOSSIM, NS2 and OMNeT++/INET.
pub fn bundled_descriptors() -> Vec<SimulatorDescriptor> {
    bundled_names()
        .map(|k| bundled_descriptor(k).expect("bundled descriptors are valid"))
        .collect()
}

/// Comparison rows, in their fixed order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Criterion {
    Nature,
    SimType,
    License,
    UserInterface,
    Platforms,
    Heterogeneity,
    DesignPhilosophy,
    Modelling,
    Mobility,
    WirelessMedium,
    Energy,
    Protocols,
}

impl Criterion {
    pub const ALL: [Criterion; 12] = [
        Criterion::Nature,
        Criterion::SimType,
        Criterion::License,
        Criterion::UserInterface,
        Criterion::Platforms,
        Criterion::Heterogeneity,
        Criterion::DesignPhilosophy,
        Criterion::Modelling,
        Criterion::Mobility,
        Criterion::WirelessMedium,
        Criterion::Energy,
        Criterion::Protocols,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Criterion::Nature => "Nature of the simulator",
            Criterion::SimType => "Type of the simulator",
            Criterion::License => "License",
            Criterion::UserInterface => "User Interface",
            Criterion::Platforms => "Supported platforms",
            Criterion::Heterogeneity => "Heterogeneity",
            Criterion::DesignPhilosophy => "Design philosophy",
            Criterion::Modelling => "Modelling",
            Criterion::Mobility => "Mobility model",
            Criterion::WirelessMedium => "Wireless medium model",
            Criterion::Energy => "Energy model",
            Criterion::Protocols => "Supported technology and protocols",
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "Yes"
    } else {
        "No"
    }
}

/// "a", "a and b", "a, b and c".
fn and_list(items: &[String]) -> String {
    match items {
        [] => String::new(),
        [one] => one.clone(),
        [init @ .., last] => format!("{} and {last}", init.join(", ")),
    }
}

const LAYER_ORDER: [&str; 5] = ["application", "transport", "network", "link", "routing"];

fn layer_label(layer: &str) -> String {
    let mut c = layer.chars();
    let head: String = c.next().map(|f| f.to_uppercase().collect()).unwrap_or_default();
    match layer {
        "routing" => "Routing Protocols".into(),
        _ => format!("{head}{} Layer", c.as_str()),
    }
}

/// The text of one matrix cell.
pub fn cell(d: &SimulatorDescriptor, criterion: Criterion) -> String {
    match criterion {
        Criterion::Nature => match d.nature {
            Nature::Simulator => "Simulator".into(),
            Nature::Emulator => "Emulator".into(),
        },
        Criterion::SimType => match d.sim_type {
            SimType::DiscreteEvent => "discrete-event".into(),
            SimType::Continuous => "continuous".into(),
            SimType::Hybrid => "hybrid".into(),
        },
        Criterion::License => d.license.clone(),
        Criterion::UserInterface => {
            let gui = match (&d.ui.gui_note, d.ui.gui) {
                (Some(note), _) => format!("GUI: {note}."),
                (None, true) => "GUI: Yes.".into(),
                (None, false) => "GUI: No.".into(),
            };
            format!("{gui} Supported languages: {}", and_list(&d.ui.languages))
        }
        Criterion::Platforms => and_list(&d.platforms),
        Criterion::Heterogeneity => yes_no(d.heterogeneity).into(),
        Criterion::DesignPhilosophy => match d.design_philosophy {
            DesignPhilosophy::SingleLevel => "single-level".into(),
            DesignPhilosophy::MultiLevel => "multi-level".into(),
            DesignPhilosophy::CrossLevel => "cross-level".into(),
        },
        Criterion::Modelling => if d.modelling { "Available" } else { "Not available" }.into(),
        Criterion::Mobility => match (&d.mobility_note, d.mobility) {
            (Some(note), true) => format!("Yes, {note}"),
            _ => yes_no(d.mobility).into(),
        },
        Criterion::WirelessMedium => {
            let mut s = format!("Path loss models: {}", d.medium.path_loss.join(", "));
            if !d.medium.other.is_empty() {
                s.push_str(&format!(" Other models: {}", d.medium.other.join(", ")));
            }
            s
        }
        Criterion::Energy => {
            let battery = match d.energy.battery {
                Battery::None => "No",
                Battery::Ideal => "Only for Ideal Battery",
                Battery::Full => "Yes",
            };
            let mut s = format!("Battery model: {battery} RF states: {}", yes_no(d.energy.rf_states));
            s.push_str(&format!(" Harvester: {}", yes_no(d.energy.harvester)));
            if !d.energy.limitations.is_empty() {
                s.push_str(&format!(" Limitations: {}", d.energy.limitations));
            }
            s
        }
        Criterion::Protocols => {
            let mut parts: Vec<String> = d.protocols.note.iter().cloned().collect();
            let known = LAYER_ORDER.iter().filter_map(|l| d.protocols.layers.get_key_value(*l));
            let others = d
                .protocols
                .layers
                .iter()
                .filter(|(k, _)| !LAYER_ORDER.contains(&k.as_str()));
            for (layer, list) in known.chain(others) {
                parts.push(format!("{}: {}", layer_label(layer), list.join(", ")));
            }
            parts.join(" ")
        }
    }
}

/// Criterion-by-simulator matrix; columns follow the input order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComparisonTable {
    pub simulators: Vec<String>,
    pub rows: Vec<(Criterion, Vec<String>)>,
}

pub fn comparison_table(descriptors: &[SimulatorDescriptor]) -> Result<ComparisonTable, DescriptorError> {
    if descriptors.len() < 2 {
        return Err(DescriptorError::TooFew(descriptors.len()));
    }
    Ok(ComparisonTable {
        simulators: descriptors.iter().map(|d| d.name.clone()).collect(),
        rows: Criterion::ALL
            .iter()
            .map(|&c| (c, descriptors.iter().map(|d| cell(d, c)).collect()))
            .collect(),
    })
}

impl ComparisonTable {
    pub fn cell(&self, criterion: Criterion, simulator: &str) -> Option<&str> {
        let col = self.simulators.iter().position(|s| s == simulator)?;
        let row = self.rows.iter().find(|(c, _)| *c == criterion)?;
        Some(row.1[col].as_str())
    }

    /// Markdown table.
    pub fn to_markdown(&self) -> String {
        let esc = |s: &str| s.replace('|', "\\|");
        let mut out = format!(
            "| Criterion | {} |\n",
            self.simulators.iter().map(|s| esc(s)).collect::<Vec<_>>().join(" | ")
        );
        out.push_str(&format!("|---|{}\n", "---|".repeat(self.simulators.len())));
        for (c, cells) in &self.rows {
            out.push_str(&format!(
                "| {} | {} |\n",
                c.label(),
                cells.iter().map(|s| esc(s)).collect::<Vec<_>>().join(" | ")
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_load_and_validate() {
        let all = bundled_descriptors();
        assert_eq!(all.len(), 3);
        let ns2 = bundled_descriptor("ns2").unwrap();
        assert_eq!(ns2.nature, Nature::Simulator);
        assert_eq!(ns2.energy.battery, Battery::Ideal);
        let tossim = bundled_descriptor("tossim").unwrap();
        assert_eq!(tossim.energy.battery, Battery::None);
        assert!(tossim.energy.rf_states);
        assert!(!tossim.energy.harvester);
    }

    #[test]
    fn closed_enum_rejected_with_path() {
        let text = bundled_descriptor("ns2")
            .unwrap()
            .to_toml()
            .replace("\"single-level\"", "\"quantum\"");
        match SimulatorDescriptor::parse(&text, "t.toml") {
            Err(DescriptorError::Schema { path, message, .. }) => {
                assert_eq!(path, "design_philosophy");
                assert!(message.contains("quantum"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn nested_path_reported() {
        let text = bundled_descriptor("ns2")
            .unwrap()
            .to_toml()
            .replace("battery = \"ideal\"", "battery = \"lithium\"");
        let err = SimulatorDescriptor::parse(&text, "t.toml").unwrap_err();
        assert!(
            matches!(&err, DescriptorError::Schema { path, .. } if path == "energy.battery"),
            "{err}"
        );
    }

    #[test]
    fn harvester_contradiction_rejected() {
        let mut d = bundled_descriptor("tossim").unwrap();
        d.energy.harvester = true;
        let err = SimulatorDescriptor::parse(&d.to_toml(), "t").unwrap_err();
        assert!(matches!(err, DescriptorError::Schema { path, .. } if path == "energy.harvester"));
    }

    #[test]
    fn round_trip() {
        for d in bundled_descriptors() {
            assert_eq!(SimulatorDescriptor::parse(&d.to_toml(), "rt").unwrap(), d);
        }
    }

    #[test]
    fn row_order_is_fixed() {
        let mut ds = bundled_descriptors();
        let a = comparison_table(&ds).unwrap();
        ds.reverse();
        let b = comparison_table(&ds).unwrap();
        let order = |t: &ComparisonTable| t.rows.iter().map(|r| r.0).collect::<Vec<_>>();
        assert_eq!(order(&a), Criterion::ALL);
        assert_eq!(order(&a), order(&b));
        assert_eq!(b.simulators[0], "OMNeT++/INET");
    }

    #[test]
    fn needs_two() {
        let one = vec![bundled_descriptor("ns2").unwrap()];
        assert_eq!(comparison_table(&one), Err(DescriptorError::TooFew(1)));
        let twice = vec![one[0].clone(), one[0].clone()];
        let t = comparison_table(&twice).unwrap();
        assert!(t.rows.iter().all(|(_, cells)| cells[0] == cells[1]));
    }

    #[test]
    fn list_formatting() {
        let v = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        assert_eq!(and_list(&v(&["a"])), "a");
        assert_eq!(and_list(&v(&["a", "b", "c"])), "a, b and c");
    }
}
