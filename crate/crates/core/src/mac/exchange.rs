use crate::energy::RadioState;
use crate::sim::{RngStream, SimTime};

use super::{compute_airtime, frame_duration, MacError, PhyKind, PhyProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FrameRole {
    Rts,
    Cts,
    Data,
    Ack,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameSpec {
    pub role: FrameRole,
    pub total_bytes: u32,
    pub airtime_us: f64,
}

impl FrameSpec {
    pub fn new(profile: &PhyProfile, role: FrameRole, total_bytes: u32) -> Result<Self, MacError> {
        Ok(Self {
            role,
            total_bytes,
            airtime_us: compute_airtime(profile, total_bytes)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhaseKind {
    Difs,
    Backoff,
    Tx(FrameRole),
    Sifs,
    Turnaround,
    Cca,
}

/// Which side of the exchange is active during a phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Sender,
    Receiver,
    BothIdle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Phase {
    pub kind: PhaseKind,
    pub duration: SimTime,
    pub direction: Direction,
    /// Frame size on air for transmit phases, zero otherwise.
    pub frame_bytes: u32,
}

impl Phase {
    fn idle(kind: PhaseKind, duration: SimTime) -> Self {
        Self {
            kind,
            duration,
            direction: Direction::BothIdle,
            frame_bytes: 0,
        }
    }

    /// Radio states of (sender, receiver) while this phase is on air.
    pub fn radio_states(&self) -> (RadioState, RadioState) {
        match (self.kind, self.direction) {
            (PhaseKind::Tx(_), Direction::Sender) => (RadioState::Tx, RadioState::Rx),
            (PhaseKind::Tx(_), Direction::Receiver) => (RadioState::Rx, RadioState::Tx),
            (PhaseKind::Cca, _) => (RadioState::Rx, RadioState::Idle),
            _ => (RadioState::Idle, RadioState::Idle),
        }
    }
}

/// Timed phase sequence of one channel-access exchange, sender-initiated.
#[derive(Debug, Clone, PartialEq)]
pub struct ExchangeTimeline {
    pub profile: super::ProfileId,
    pub phases: Vec<Phase>,
    pub total: SimTime,
}

impl ExchangeTimeline {
    fn from_phases(profile: super::ProfileId, phases: Vec<Phase>) -> Self {
        let total = phases.iter().fold(SimTime::ZERO, |acc, p| acc + p.duration);
        Self { profile, phases, total }
    }

    /// Phases paired with their start offset from the beginning of the exchange.
    pub fn offsets(&self) -> impl Iterator<Item = (SimTime, &Phase)> {
        self.phases.iter().scan(SimTime::ZERO, |t, p| {
            let start = *t;
            *t += p.duration;
            Some((start, p))
        })
    }

    pub fn frames(&self) -> impl Iterator<Item = &Phase> {
        self.phases.iter().filter(|p| matches!(p.kind, PhaseKind::Tx(_)))
    }

    pub fn data_phase(&self) -> Option<&Phase> {
        self.phases.iter().find(|p| p.kind == PhaseKind::Tx(FrameRole::Data))
    }
}

fn tx(profile: &PhyProfile, role: FrameRole, bytes: u32, direction: Direction) -> Result<Phase, MacError> {
    Ok(Phase {
        kind: PhaseKind::Tx(role),
        duration: frame_duration(profile, bytes)?,
        direction,
        frame_bytes: bytes,
    })
}

fn expect_kind(profile: &PhyProfile, kind: PhyKind) -> Result<(), MacError> {
    if profile.kind != kind {
        return Err(MacError::WrongProfile {
            expected: kind.as_str(),
            got: profile.id.name(),
        });
    }
    Ok(())
}

/// DIFS, backoff, RTS, SIFS, CTS, SIFS, DATA, SIFS, ACK.
pub fn build_rts_cts_exchange(
    profile: &PhyProfile,
    payload_bytes: u32,
    backoff: SimTime,
) -> Result<ExchangeTimeline, MacError> {
    expect_kind(profile, PhyKind::Dot11b)?;
    if payload_bytes == 0 {
        return Err(MacError::EmptyPayload);
    }
    let sifs = SimTime::from_micros(profile.sifs_us);
    let phases = vec![
        Phase::idle(PhaseKind::Difs, SimTime::from_micros(profile.difs_us)),
        Phase::idle(PhaseKind::Backoff, backoff),
        tx(profile, FrameRole::Rts, profile.rts_bytes, Direction::Sender)?,
        Phase::idle(PhaseKind::Sifs, sifs),
        tx(profile, FrameRole::Cts, profile.cts_bytes, Direction::Receiver)?,
        Phase::idle(PhaseKind::Sifs, sifs),
        tx(
            profile,
            FrameRole::Data,
            profile.data_frame_bytes(payload_bytes),
            Direction::Sender,
        )?,
        Phase::idle(PhaseKind::Sifs, sifs),
        tx(profile, FrameRole::Ack, profile.ack_bytes, Direction::Receiver)?,
    ];
    Ok(ExchangeTimeline::from_phases(profile.id, phases))
}

/// Unslotted CSMA/CA: backoff, CCA, turnaround, DATA, turnaround, ACK.
pub fn build_cca_exchange(
    profile: &PhyProfile,
    payload_bytes: u32,
    backoff_periods: u32,
) -> Result<ExchangeTimeline, MacError> {
    expect_kind(profile, PhyKind::Dot154)?;
    if payload_bytes == 0 {
        return Err(MacError::EmptyPayload);
    }
    let turnaround = SimTime::from_micros(profile.turnaround_us);
    let phases = vec![
        Phase::idle(
            PhaseKind::Backoff,
            SimTime::from_micros(profile.slot_us).times(u64::from(backoff_periods)),
        ),
        Phase {
            kind: PhaseKind::Cca,
            duration: SimTime::from_micros(profile.cca_us),
            direction: Direction::Sender,
            frame_bytes: 0,
        },
        Phase::idle(PhaseKind::Turnaround, turnaround),
        tx(
            profile,
            FrameRole::Data,
            profile.data_frame_bytes(payload_bytes),
            Direction::Sender,
        )?,
        Phase::idle(PhaseKind::Turnaround, turnaround),
        tx(profile, FrameRole::Ack, profile.ack_bytes, Direction::Receiver)?,
    ];
    Ok(ExchangeTimeline::from_phases(profile.id, phases))
}

/// Backoff slots drawn uniformly in `0..=CW(attempt)`.
pub fn draw_backoff_slots(profile: &PhyProfile, rng: &mut RngStream, attempt: u32) -> u64 {
    rng.uniform_inclusive(profile.contention_window(attempt))
}

pub fn draw_backoff(profile: &PhyProfile, rng: &mut RngStream, attempt: u32) -> SimTime {
    SimTime::from_micros(profile.slot_us).times(draw_backoff_slots(profile, rng, attempt))
}

/// Builds the profile's exchange with a freshly drawn backoff.
pub fn build_exchange(
    profile: &PhyProfile,
    payload_bytes: u32,
    rng: &mut RngStream,
    attempt: u32,
) -> Result<ExchangeTimeline, MacError> {
    let slots = draw_backoff_slots(profile, rng, attempt);
    match profile.kind {
        PhyKind::Dot11b => build_rts_cts_exchange(
            profile,
            payload_bytes,
            SimTime::from_micros(profile.slot_us).times(slots),
        ),
        PhyKind::Dot154 => build_cca_exchange(profile, payload_bytes, slots as u32),
    }
}

/// Exchange length with the largest first-attempt backoff.
pub fn worst_case_exchange(profile: &PhyProfile, payload_bytes: u32) -> Result<SimTime, MacError> {
    let max_slots = profile.contention_window(0);
    let timeline = match profile.kind {
        PhyKind::Dot11b => build_rts_cts_exchange(
            profile,
            payload_bytes,
            SimTime::from_micros(profile.slot_us).times(max_slots),
        )?,
        PhyKind::Dot154 => build_cca_exchange(profile, payload_bytes, max_slots as u32)?,
    };
    Ok(timeline.total)
}
