use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::EnergyError;

/// A (component, activity) pair that carries a fixed energy cost per occurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Activity {
    McuIdle,
    McuStandby,
    McuExtendedStandby,
    McuEnergySaving,
    McuOn,
    McuDown,
    McuAdc,
    Led0,
    Led1,
    Led2,
    RadioSend,
    RadioReceive,
    RadioSynchronize,
    MemoryRead,
    MemoryWrite,
}

impl Activity {
    pub const ALL: [Activity; 15] = [
        Activity::McuIdle,
        Activity::McuStandby,
        Activity::McuExtendedStandby,
        Activity::McuEnergySaving,
        Activity::McuOn,
        Activity::McuDown,
        Activity::McuAdc,
        Activity::Led0,
        Activity::Led1,
        Activity::Led2,
        Activity::RadioSend,
        Activity::RadioReceive,
        Activity::RadioSynchronize,
        Activity::MemoryRead,
        Activity::MemoryWrite,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn component(self) -> &'static str {
        self.key().split_once('.').map(|(c, _)| c).unwrap_or("")
    }

    pub fn key(self) -> &'static str {
        match self {
            Activity::McuIdle => "mcu.idle",
            Activity::McuStandby => "mcu.standby",
            Activity::McuExtendedStandby => "mcu.extended-standby",
            Activity::McuEnergySaving => "mcu.energy-saving",
            Activity::McuOn => "mcu.on",
            Activity::McuDown => "mcu.down",
            Activity::McuAdc => "mcu.adc",
            Activity::Led0 => "led0.on",
            Activity::Led1 => "led1.on",
            Activity::Led2 => "led2.on",
            Activity::RadioSend => "radio.send",
            Activity::RadioReceive => "radio.receive",
            Activity::RadioSynchronize => "radio.synchronize",
            Activity::MemoryRead => "memory.read",
            Activity::MemoryWrite => "memory.write",
        }
    }

    pub fn lookup(component: &str, activity: &str) -> Result<Activity, EnergyError> {
        Activity::ALL
            .into_iter()
            .find(|a| a.component() == component && a.key()[component.len() + 1..] == *activity)
            .ok_or_else(|| EnergyError::UnknownActivity(format!("{component}.{activity}")))
    }
}

impl fmt::Display for Activity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Activity {
    type Err = EnergyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Activity::ALL
            .into_iter()
            .find(|a| a.key() == s)
            .ok_or_else(|| EnergyError::UnknownActivity(s.to_string()))
    }
}

impl Serialize for Activity {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.key())
    }
}

impl<'de> Deserialize<'de> for Activity {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Joules charged per occurrence of each activity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ActivityCostTable(pub BTreeMap<Activity, f64>);

impl Default for ActivityCostTable {
    /// Placeholder per-occurrence costs; scenario files override them.
    fn default() -> Self {
        use Activity::*;
        let costs = [
            (McuIdle, 1.0e-6),
            (McuStandby, 0.5e-6),
            (McuExtendedStandby, 0.4e-6),
            (McuEnergySaving, 0.2e-6),
            (McuOn, 5.0e-6),
            (McuDown, 0.1e-6),
            (McuAdc, 2.0e-6),
            (Led0, 1.0e-6),
            (Led1, 1.0e-6),
            (Led2, 1.0e-6),
            (RadioSend, 100.0e-6),
            (RadioReceive, 50.0e-6),
            (RadioSynchronize, 10.0e-6),
            (MemoryRead, 0.1e-6),
            (MemoryWrite, 0.2e-6),
        ];
        ActivityCostTable(costs.into_iter().collect())
    }
}

impl ActivityCostTable {
    pub fn validate(&self) -> Result<(), EnergyError> {
        for (a, c) in &self.0 {
            if !(*c >= 0.0 && c.is_finite()) {
                return Err(EnergyError::InvalidParam {
                    field: "activity_costs",
                    reason: format!("{a} cost must be finite and >= 0, got {c}"),
                });
            }
        }
        Ok(())
    }
}

/// Per-component activity accounting without any storage model.
///
/// Occurrences are counted per activity; energy is `cost · count`, so the
/// result depends only on how often an activity happened, never on frame
/// length or bitrate.
#[derive(Debug, Clone)]
pub struct ComponentAccountingModel {
    costs: [Option<f64>; 15],
    counts: [u64; 15],
}

impl ComponentAccountingModel {
    pub fn new(table: &ActivityCostTable) -> Self {
        let mut costs = [None; 15];
        for (a, c) in &table.0 {
            costs[a.index()] = Some(*c);
        }
        Self { costs, counts: [0; 15] }
    }

    pub fn charge(&mut self, activity: Activity, count: u64) -> Result<f64, EnergyError> {
        let cost =
            self.costs[activity.index()].ok_or_else(|| EnergyError::UnknownActivity(activity.key().to_string()))?;
        self.counts[activity.index()] += count;
        Ok(cost * count as f64)
    }

    pub fn count(&self, activity: Activity) -> u64 {
        self.counts[activity.index()]
    }

    pub fn accumulator(&self, activity: Activity) -> f64 {
        self.costs[activity.index()].unwrap_or(0.0) * self.counts[activity.index()] as f64
    }

    /// Sum over every component accumulator.
    pub fn total(&self) -> f64 {
        Activity::ALL.iter().map(|&a| self.accumulator(a)).sum()
    }

    pub fn component_total(&self, component: &str) -> f64 {
        Activity::ALL
            .iter()
            .filter(|a| a.component() == component)
            .map(|&a| self.accumulator(a))
            .sum()
    }
}

/// Charges `count` occurrences of `component.activity`.
pub fn ca_charge(
    model: &mut ComponentAccountingModel,
    component: &str,
    activity: &str,
    count: u64,
) -> Result<f64, EnergyError> {
    model.charge(Activity::lookup(component, activity)?, count)
}
