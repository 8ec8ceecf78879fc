//! Frame airtimes and channel-access exchange timelines for 802.11b and 802.15.4.

mod exchange;
mod profile;

pub use exchange::{
    build_cca_exchange, build_exchange, build_rts_cts_exchange, draw_backoff, draw_backoff_slots, worst_case_exchange,
    Direction, ExchangeTimeline, FrameRole, FrameSpec, Phase, PhaseKind,
};
pub use profile::{PhyKind, PhyProfile, ProfileId};

use crate::sim::SimTime;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum MacError {
    #[error("unknown PHY profile `{0}` (expected dot11b/ns2, dot11b/omnet or dot154/default)")]
    UnknownProfile(String),
    #[error("exchange requires a {expected} profile, got {got}")]
    WrongProfile { expected: &'static str, got: &'static str },
    #[error("payload must be at least one byte")]
    EmptyPayload,
    #[error("frame length must be at least one byte")]
    EmptyFrame,
}

/// On-air time of a frame in microseconds, unrounded.
pub fn compute_airtime(profile: &PhyProfile, frame_bytes: u32) -> Result<f64, MacError> {
    if frame_bytes == 0 {
        return Err(MacError::EmptyFrame);
    }
    let mbps = profile.bitrate_bps / 1e6;
    Ok(profile.preamble_us + 8.0 * f64::from(frame_bytes) / mbps)
}

/// Airtime rounded to the nearest nanosecond, as used by the event clock.
pub fn frame_duration(profile: &PhyProfile, frame_bytes: u32) -> Result<SimTime, MacError> {
    compute_airtime(profile, frame_bytes).map(SimTime::from_micros_f64)
}

/// Display rounding for reports: whole microseconds, floored.
pub fn reported_airtime_us(airtime_us: f64) -> u64 {
    airtime_us.floor() as u64
}
