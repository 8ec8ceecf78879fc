use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::MacError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhyKind {
    /// 802.11b DSSS, CSMA/CA with RTS/CTS.
    Dot11b,
    /// 802.15.4 O-QPSK 2.4 GHz, unslotted CSMA/CA with CCA.
    Dot154,
}

impl PhyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PhyKind::Dot11b => "dot11b",
            PhyKind::Dot154 => "dot154",
        }
    }
}

/// Named PHY/MAC timing presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProfileId {
    Dot11bNs2,
    Dot11bOmnet,
    Dot154Default,
}

impl ProfileId {
    pub const ALL: [ProfileId; 3] = [ProfileId::Dot11bNs2, ProfileId::Dot11bOmnet, ProfileId::Dot154Default];

    pub fn name(self) -> &'static str {
        match self {
            ProfileId::Dot11bNs2 => "dot11b/ns2",
            ProfileId::Dot11bOmnet => "dot11b/omnet",
            ProfileId::Dot154Default => "dot154/default",
        }
    }

    pub fn profile(self) -> PhyProfile {
        match self {
            ProfileId::Dot11bNs2 => PhyProfile::dot11b(self, 55),
            ProfileId::Dot11bOmnet => PhyProfile::dot11b(self, 65),
            ProfileId::Dot154Default => PhyProfile::dot154(self),
        }
    }

    pub fn kind(self) -> PhyKind {
        match self {
            ProfileId::Dot11bNs2 | ProfileId::Dot11bOmnet => PhyKind::Dot11b,
            ProfileId::Dot154Default => PhyKind::Dot154,
        }
    }
}

impl fmt::Display for ProfileId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProfileId {
    type Err = MacError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ProfileId::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| MacError::UnknownProfile(s.to_string()))
    }
}

impl Serialize for ProfileId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for ProfileId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// PHY and MAC timing constants. Durations are in microseconds.
#[derive(Debug, Clone, PartialEq)]
pub struct PhyProfile {
    pub id: ProfileId,
    pub kind: PhyKind,
    pub bitrate_bps: f64,
    /// Preamble plus PHY header (802.11b long PLCP, 802.15.4 SHR+PHR).
    pub preamble_us: f64,
    /// Bytes added to the application payload to form the data frame.
    pub overhead_bytes: u32,
    pub rts_bytes: u32,
    pub cts_bytes: u32,
    pub ack_bytes: u32,
    pub sifs_us: u64,
    pub difs_us: u64,
    /// Backoff slot (802.11b slot time, 802.15.4 unit backoff period).
    pub slot_us: u64,
    pub cw_min: u32,
    pub cw_max: u32,
    pub cca_us: u64,
    pub turnaround_us: u64,
    pub min_be: u32,
    pub max_be: u32,
}

impl PhyProfile {
    fn dot11b(id: ProfileId, overhead_bytes: u32) -> Self {
        Self {
            id,
            kind: PhyKind::Dot11b,
            bitrate_bps: 11e6,
            preamble_us: 192.0,
            overhead_bytes,
            rts_bytes: 20,
            cts_bytes: 14,
            ack_bytes: 14,
            sifs_us: 10,
            difs_us: 50,
            slot_us: 20,
            cw_min: 31,
            cw_max: 1023,
            cca_us: 0,
            turnaround_us: 0,
            min_be: 0,
            max_be: 0,
        }
    }

    fn dot154(id: ProfileId) -> Self {
        // 62.5 ksym/s, 2 symbols per byte
        Self {
            id,
            kind: PhyKind::Dot154,
            bitrate_bps: 250e3,
            preamble_us: 192.0,
            overhead_bytes: 16,
            rts_bytes: 0,
            cts_bytes: 0,
            ack_bytes: 11,
            sifs_us: 0,
            difs_us: 0,
            slot_us: 320,
            cw_min: 0,
            cw_max: 0,
            cca_us: 128,
            turnaround_us: 192,
            min_be: 3,
            max_be: 5,
        }
    }

    pub fn data_frame_bytes(&self, payload_bytes: u32) -> u32 {
        self.overhead_bytes + payload_bytes
    }

    /// Largest contention window (in slots) for the given attempt.
    pub fn contention_window(&self, attempt: u32) -> u64 {
        match self.kind {
            PhyKind::Dot11b => {
                let cw = (u64::from(self.cw_min) + 1)
                    .checked_shl(attempt.min(32))
                    .unwrap_or(u64::MAX)
                    - 1;
                cw.min(u64::from(self.cw_max))
            }
            PhyKind::Dot154 => {
                let be = (self.min_be.saturating_add(attempt)).min(self.max_be);
                (1u64 << be) - 1
            }
        }
    }
}
