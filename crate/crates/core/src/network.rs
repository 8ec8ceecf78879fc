//! Executes a scenario: echo traffic over the MAC exchange model, with every
//! node's radio activity driving its attached energy model.

use crate::energy::{attach_model, Activity, BoundModel, Category, EnergyError, EnergyTrace, RadioState};
use crate::mac::{build_exchange, Direction, ExchangeTimeline, MacError, PhaseKind, PhyProfile};
use crate::medium::{dbm_to_watts, draw_shadowing_db, in_range, propagation_delay_time, MediumError, PathLossModel};
use crate::scenario::{Scenario, ScenarioError, Topology, TrafficPlan};
use crate::sim::{Engine, Event, EventKind, NodeId, RngStream, Scheduler, SimTime};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum RunError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Energy(#[from] EnergyError),
    #[error(transparent)]
    Mac(#[from] MacError),
    #[error(transparent)]
    Medium(#[from] MediumError),
    #[error("node {0} does not exist")]
    NoSuchNode(NodeId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Message {
    pub src: NodeId,
    pub dst: NodeId,
    pub reply: bool,
    /// Index of the originating request in the traffic plan.
    pub request: u64,
}

/// Engine payload: one event per message, fired when the sender's
/// application hands the frame to the MAC.
pub type Payload = Message;

/// Message-level counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunStats {
    pub requests_sent: u64,
    pub replies_sent: u64,
    pub delivered: u64,
    pub dropped_depleted: u64,
    pub dropped_unreachable: u64,
    /// Exchanges that had to wait for the medium.
    pub deferrals: u64,
}

struct Network {
    profile: PhyProfile,
    payload_bytes: u32,
    plan: TrafficPlan,
    nodes: usize,
    models: Vec<BoundModel>,
    rngs: Vec<RngStream>,
    /// Row-major N×N propagation delays.
    delays: Vec<SimTime>,
    reachable: Vec<bool>,
    medium_free_at: SimTime,
    last_activity: SimTime,
    trace: EnergyTrace,
    stats: RunStats,
    error: Option<RunError>,
}

fn pair_mut<T>(v: &mut [T], a: usize, b: usize) -> (&mut T, &mut T) {
    assert_ne!(a, b);
    if a < b {
        let (lo, hi) = v.split_at_mut(b);
        (&mut lo[a], &mut hi[0])
    } else {
        let (lo, hi) = v.split_at_mut(a);
        (&mut hi[0], &mut lo[b])
    }
}

impl Network {
    fn link(&self, a: NodeId, b: NodeId) -> usize {
        a as usize * self.nodes + b as usize
    }

    fn schedule_request(&mut self, index: u64, sched: &mut Scheduler<Payload>) {
        if let Some(req) = self.plan.request(index) {
            let msg = Message {
                src: req.src,
                dst: req.dst,
                reply: false,
                request: req.index,
            };
            sched
                .schedule(req.time, EventKind::AppSend, req.src, msg)
                .expect("plan times are non-decreasing");
        }
    }

    // The medium is serialised: an exchange starts once the previous one has
    // finished, so every model sees its transitions in time order even though
    // the whole timeline is applied when the send event fires.
    fn on_send(&mut self, msg: Message, sched: &mut Scheduler<Payload>) -> Result<(), RunError> {
        if !msg.reply {
            self.schedule_request(msg.request + 1, sched);
        }
        let (src, dst) = (msg.src, msg.dst);
        if self.models[src as usize].is_depleted() || self.models[dst as usize].is_depleted() {
            self.stats.dropped_depleted += 1;
            return Ok(());
        }
        if !self.reachable[self.link(src, dst)] {
            self.stats.dropped_unreachable += 1;
            return Ok(());
        }
        let timeline = build_exchange(&self.profile, self.payload_bytes, &mut self.rngs[src as usize], 0)?;
        let now = sched.now();
        let start = now.max(self.medium_free_at);
        if start > now {
            self.stats.deferrals += 1;
        }
        let end = start + timeline.total;
        self.medium_free_at = end;
        if msg.reply {
            self.stats.replies_sent += 1;
        } else {
            self.stats.requests_sent += 1;
        }
        self.apply(src, dst, start, &timeline)?;
        self.last_activity = self.last_activity.max(end);
        self.stats.delivered += 1;
        if !msg.reply {
            let arrival = end + self.delays[self.link(src, dst)];
            let reply = Message {
                src: dst,
                dst: src,
                reply: true,
                request: msg.request,
            };
            sched
                .schedule(arrival, EventKind::AppSend, dst, reply)
                .expect("arrival is after now");
        }
        Ok(())
    }

    fn apply(&mut self, src: NodeId, dst: NodeId, start: SimTime, timeline: &ExchangeTimeline) -> Result<(), RunError> {
        let (sender, receiver) = pair_mut(&mut self.models, src as usize, dst as usize);
        let trace = &mut self.trace;
        for (offset, phase) in timeline.offsets() {
            let at = start + offset;
            let (s_state, r_state) = phase.radio_states();
            sender.set_radio_state(src, s_state, at, trace)?;
            receiver.set_radio_state(dst, r_state, at, trace)?;
            match (phase.kind, phase.direction) {
                (PhaseKind::Tx(_), Direction::Sender) => {
                    sender.activity(src, Activity::RadioSend, 1, at, trace)?;
                    receiver.activity(dst, Activity::RadioReceive, 1, at, trace)?;
                }
                (PhaseKind::Tx(_), Direction::Receiver) => {
                    receiver.activity(dst, Activity::RadioSend, 1, at, trace)?;
                    sender.activity(src, Activity::RadioReceive, 1, at, trace)?;
                }
                (PhaseKind::Cca, _) => sender.activity(src, Activity::RadioSynchronize, 1, at, trace)?,
                _ => {}
            }
        }
        let end = start + timeline.total;
        sender.set_radio_state(src, RadioState::Idle, end, trace)?;
        receiver.set_radio_state(dst, RadioState::Idle, end, trace)?;
        Ok(())
    }
}

impl crate::sim::Handler<Payload> for Network {
    fn handle(&mut self, event: Event<Payload>, sched: &mut Scheduler<Payload>) {
        if self.error.is_some() {
            return;
        }
        if let Err(e) = self.on_send(event.payload, sched) {
            self.error = Some(e);
        }
    }
}

/// Per-node model totals at the end of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeEnergy {
    pub node: NodeId,
    pub totals: Vec<(Category, f64)>,
    pub consumed_j: f64,
    pub residual_j: Option<f64>,
    /// Native coulomb count of the charge-current model.
    pub charge_c: Option<f64>,
    pub depleted: bool,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub topology: Topology,
    pub plan: TrafficPlan,
    pub events: u64,
    pub end: SimTime,
    pub stats: RunStats,
    pub trace: EnergyTrace,
    pub energy: Vec<NodeEnergy>,
    /// Wall-clock time spent inside the event loop.
    pub loop_wall: std::time::Duration,
}

impl RunOutcome {
    /// Reporting interval: the ping period or the mesh round.
    pub fn interval(&self) -> SimTime {
        self.plan.interval()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Keep every raw trace entry (memory grows with the event count).
    pub keep_trace_entries: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            keep_trace_entries: true,
        }
    }
}

/// Runs a scenario to completion.
///
/// The run ends at the scenario horizon (ping duration or `rounds` mesh
/// rounds), extended if an exchange started before the horizon is still on
/// air; every model is closed at that instant.
pub fn run(scenario: &Scenario, options: RunOptions) -> Result<RunOutcome, RunError> {
    let (topology, plan) = scenario.build()?;
    let n = topology.len();
    let models = (0..n)
        .map(|_| attach_model(scenario.model, &scenario.power, &scenario.energy))
        .collect::<Result<Vec<_>, _>>()?;
    let rngs = (0..n)
        .map(|i| RngStream::for_node(scenario.seed, i as NodeId))
        .collect();

    let sensitivity = dbm_to_watts(scenario.medium.sensitivity_dbm);
    let pl = &scenario.medium.path_loss;
    let mut delays = vec![SimTime::ZERO; n * n];
    let mut reachable = vec![false; n * n];
    for a in 0..n {
        for b in a + 1..n {
            let d = topology.distance(a as NodeId, b as NodeId);
            let shadow = if pl.model == PathLossModel::LogNormalShadowing {
                draw_shadowing_db(
                    &mut RngStream::for_link(scenario.seed, a as NodeId, b as NodeId),
                    pl.sigma_db,
                )
            } else {
                0.0
            };
            let dist = if pl.model == PathLossModel::LogNormalShadowing {
                d.max(pl.ref_distance_m)
            } else {
                d
            };
            let ok = in_range(scenario.power.tx_w, pl, dist, sensitivity, shadow)?;
            let delay = propagation_delay_time(d);
            for (i, j) in [(a, b), (b, a)] {
                delays[i * n + j] = delay;
                reachable[i * n + j] = ok;
            }
        }
    }

    let horizon = match &scenario.spec {
        crate::scenario::ScenarioSpec::Ping(p) => SimTime::from_secs_f64(p.duration_s),
        crate::scenario::ScenarioSpec::Mesh(m) => plan.interval().times(u64::from(m.rounds)),
    };
    let interval = plan.interval();
    let mut net = Network {
        profile: scenario.profile.profile(),
        payload_bytes: scenario.payload_bytes(),
        plan,
        nodes: n,
        models,
        rngs,
        delays,
        reachable,
        medium_free_at: SimTime::ZERO,
        last_activity: SimTime::ZERO,
        trace: EnergyTrace::new(n, interval, options.keep_trace_entries),
        stats: RunStats::default(),
        error: None,
    };

    let mut engine: Engine<Payload> = Engine::new();
    net.schedule_request(0, &mut engine.sched);
    let started = std::time::Instant::now();
    let mut events = engine.run_until(horizon, &mut net);
    events += engine.run_to_completion(&mut net);
    let loop_wall = started.elapsed();
    if let Some(e) = net.error.take() {
        return Err(e);
    }

    let end = horizon.max(net.last_activity);
    for (i, m) in net.models.iter_mut().enumerate() {
        m.close(i as NodeId, end, &mut net.trace)?;
    }
    net.trace.close(end);
    let energy = net
        .models
        .iter()
        .enumerate()
        .map(|(i, m)| NodeEnergy {
            node: i as NodeId,
            totals: m.totals(),
            consumed_j: m.consumed(),
            residual_j: m.residual_energy(),
            charge_c: m.charge_drawn(),
            depleted: m.is_depleted(),
        })
        .collect();
    Ok(RunOutcome {
        topology,
        plan: net.plan,
        events,
        end,
        stats: net.stats,
        trace: net.trace,
        energy,
        loop_wall,
    })
}

/// Engine events generated per echo message (request or reply).
pub const EVENTS_PER_MESSAGE: u64 = 1;
