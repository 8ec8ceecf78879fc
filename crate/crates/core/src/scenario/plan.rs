use crate::mac::{worst_case_exchange, PhyProfile};
use crate::medium::propagation_delay_time;
use crate::sim::{NodeId, SimTime};

use super::{ScenarioError, Topology};

/// One echo request: `src` pings `dst` at `time`; `dst` answers with the same message.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Request {
    pub index: u64,
    pub time: SimTime,
    pub src: NodeId,
    pub dst: NodeId,
}

/// Echo-request schedule, addressable by request index so that large plans
/// never need to be materialized.
#[derive(Debug, Clone, PartialEq)]
pub enum TrafficPlan {
    /// `src` sends to `dst` every `period`, starting at zero.
    Periodic {
        src: NodeId,
        dst: NodeId,
        period: SimTime,
        count: u64,
    },
    /// Every node pings every other node once per round. Requests are spaced
    /// `slot` apart in (round, src, dst) order, which staggers node `i`'s first
    /// request by `i·(N−1)` slots.
    AllPairs {
        nodes: u32,
        rounds: u32,
        round_period: SimTime,
        slot: SimTime,
    },
}

impl TrafficPlan {
    pub fn request_count(&self) -> u64 {
        match *self {
            TrafficPlan::Periodic { count, .. } => count,
            TrafficPlan::AllPairs { nodes, rounds, .. } => {
                let n = u64::from(nodes);
                u64::from(rounds) * n * n.saturating_sub(1)
            }
        }
    }

    /// Echo messages carried by the plan: every request plus its reply.
    pub fn message_count(&self) -> u64 {
        2 * self.request_count()
    }

    pub fn request(&self, index: u64) -> Option<Request> {
        if index >= self.request_count() {
            return None;
        }
        Some(match *self {
            TrafficPlan::Periodic { src, dst, period, .. } => Request {
                index,
                time: period.times(index),
                src,
                dst,
            },
            TrafficPlan::AllPairs {
                nodes,
                round_period,
                slot,
                ..
            } => {
                let n = u64::from(nodes);
                let per_round = n * (n - 1);
                let (round, within) = (index / per_round, index % per_round);
                let src = within / (n - 1);
                let k = within % (n - 1);
                let dst = if k < src { k } else { k + 1 };
                Request {
                    index,
                    time: round_period.times(round) + slot.times(within),
                    src: src as NodeId,
                    dst: dst as NodeId,
                }
            }
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = Request> + '_ {
        (0..self.request_count()).filter_map(move |i| self.request(i))
    }

    /// Width of one reporting interval (ping period or mesh round).
    pub fn interval(&self) -> SimTime {
        match *self {
            TrafficPlan::Periodic { period, .. } => period,
            TrafficPlan::AllPairs { round_period, .. } => round_period,
        }
    }
}

/// Guard slot for one request/reply pair: twice the worst-case exchange
/// (largest first-attempt backoff) plus the longest propagation delay.
pub fn guard_slot(profile: &PhyProfile, payload_bytes: u32, topology: &Topology) -> Result<SimTime, ScenarioError> {
    let worst = worst_case_exchange(profile, payload_bytes)?;
    let delay = propagation_delay_time(topology.max_distance()) + SimTime::from_nanos(1);
    Ok(worst.times(2) + delay.times(2))
}

/// All-pairs echo plan for a mesh. The round lasts `1/frequency` unless a
/// full sweep of guard slots needs longer, in which case it stretches.
pub fn mesh_traffic_plan(
    topology: &Topology,
    profile: &PhyProfile,
    payload_bytes: u32,
    rounds: u32,
    frequency_hz: f64,
) -> Result<TrafficPlan, ScenarioError> {
    if rounds < 1 {
        return Err(ScenarioError::invalid("rounds", "must be at least 1".into()));
    }
    if !(frequency_hz > 0.0 && frequency_hz.is_finite()) {
        return Err(ScenarioError::invalid(
            "frequency_hz",
            format!("must be > 0, got {frequency_hz}"),
        ));
    }
    let n = topology.len() as u64;
    if n < 2 {
        return Err(ScenarioError::invalid(
            "nodes",
            "a mesh needs at least two nodes".into(),
        ));
    }
    let slot = guard_slot(profile, payload_bytes, topology)?;
    let sweep = slot.times(n * (n - 1));
    let nominal = SimTime::from_secs_f64(1.0 / frequency_hz);
    Ok(TrafficPlan::AllPairs {
        nodes: n as u32,
        rounds,
        round_period: nominal.max(sweep),
        slot,
    })
}
