use serde::{Deserialize, Serialize};

use super::EnergyError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RadioState {
    Tx,
    Rx,
    Idle,
    Sleep,
}

impl RadioState {
    pub const ALL: [RadioState; 4] = [RadioState::Tx, RadioState::Rx, RadioState::Idle, RadioState::Sleep];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            RadioState::Tx => "tx",
            RadioState::Rx => "rx",
            RadioState::Idle => "idle",
            RadioState::Sleep => "sleep",
        }
    }
}

/// Radio power draw per state, in watts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadioPowerTable {
    pub tx_w: f64,
    pub rx_w: f64,
    pub sleep_w: f64,
    pub idle_w: f64,
}

impl RadioPowerTable {
    /// HDG204 802.11b module.
    pub const DOT11B: RadioPowerTable = RadioPowerTable {
        tx_w: 0.750,
        rx_w: 0.220,
        sleep_w: 0.0002,
        idle_w: 0.0002,
    };

    /// CC2420 802.15.4 transceiver.
    pub const DOT154: RadioPowerTable = RadioPowerTable {
        tx_w: 0.052,
        rx_w: 0.059,
        sleep_w: 0.000_06,
        idle_w: 0.000_06,
    };

    pub fn power(&self, state: RadioState) -> f64 {
        match state {
            RadioState::Tx => self.tx_w,
            RadioState::Rx => self.rx_w,
            RadioState::Idle => self.idle_w,
            RadioState::Sleep => self.sleep_w,
        }
    }

    pub fn validate(&self) -> Result<(), EnergyError> {
        for state in RadioState::ALL {
            let p = self.power(state);
            if !(p > 0.0 && p.is_finite()) {
                return Err(EnergyError::InvalidParam {
                    field: "power",
                    reason: format!("{} power must be finite and > 0, got {p}", state.name()),
                });
            }
        }
        Ok(())
    }
}

// the 802.15.4 radio draws more receiving than transmitting
const _: () = assert!(RadioPowerTable::DOT154.rx_w > RadioPowerTable::DOT154.tx_w);
