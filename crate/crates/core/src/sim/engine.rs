use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::SimTime;

pub type NodeId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    FrameTxStart,
    FrameRxEnd,
    Timer,
    AppSend,
    EnergySample,
    RunEnd,
}

#[derive(Debug, Clone)]
pub struct Event<P> {
    pub time: SimTime,
    pub seq: u64,
    pub kind: EventKind,
    pub node: NodeId,
    pub payload: P,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EventHandle {
    pub time: SimTime,
    pub seq: u64,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SimError {
    #[error("cannot schedule at {at} while the clock is at {now}")]
    InThePast { at: SimTime, now: SimTime },
}

struct Queued<P>(Event<P>);

impl<P> PartialEq for Queued<P> {
    fn eq(&self, other: &Self) -> bool {
        self.0.seq == other.0.seq
    }
}

impl<P> Eq for Queued<P> {}

impl<P> PartialOrd for Queued<P> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<P> Ord for Queued<P> {
    // BinaryHeap is a max-heap; invert so the smallest (time, seq) pops first.
    fn cmp(&self, other: &Self) -> Ordering {
        (other.0.time, other.0.seq).cmp(&(self.0.time, self.0.seq))
    }
}

/// Virtual clock plus pending-event queue ordered by (time, seq).
pub struct Scheduler<P> {
    now: SimTime,
    next_seq: u64,
    queue: BinaryHeap<Queued<P>>,
}

impl<P> Default for Scheduler<P> {
    fn default() -> Self {
        Self::new()
    }
}

impl<P> Scheduler<P> {
    pub fn new() -> Self {
        Self {
            now: SimTime::ZERO,
            next_seq: 0,
            queue: BinaryHeap::new(),
        }
    }

    pub fn now(&self) -> SimTime {
        self.now
    }

    pub fn pending(&self) -> usize {
        self.queue.len()
    }

    pub fn schedule(
        &mut self,
        time: SimTime,
        kind: EventKind,
        node: NodeId,
        payload: P,
    ) -> Result<EventHandle, SimError> {
        if time < self.now {
            return Err(SimError::InThePast {
                at: time,
                now: self.now,
            });
        }
        let seq = self.next_seq;
        self.next_seq += 1;
        self.queue.push(Queued(Event {
            time,
            seq,
            kind,
            node,
            payload,
        }));
        Ok(EventHandle { time, seq })
    }

    pub fn schedule_in(
        &mut self,
        delay: SimTime,
        kind: EventKind,
        node: NodeId,
        payload: P,
    ) -> Result<EventHandle, SimError> {
        self.schedule(self.now + delay, kind, node, payload)
    }

    fn pop_due(&mut self, end: SimTime) -> Option<Event<P>> {
        if self.queue.peek()?.0.time > end {
            return None;
        }
        let Queued(ev) = self.queue.pop()?;
        self.now = ev.time;
        Some(ev)
    }
}

pub trait Handler<P> {
    fn handle(&mut self, event: Event<P>, sched: &mut Scheduler<P>);
}

impl<P, F> Handler<P> for F
where
    F: FnMut(Event<P>, &mut Scheduler<P>),
{
    fn handle(&mut self, event: Event<P>, sched: &mut Scheduler<P>) {
        self(event, sched)
    }
}

/// Single-threaded run loop.
pub struct Engine<P> {
    pub sched: Scheduler<P>,
    processed: u64,
}

impl<P> Default for Engine<P> {
    fn default() -> Self {
        Self::new()
    }
}

impl<P> Engine<P> {
    pub fn new() -> Self {
        Self {
            sched: Scheduler::new(),
            processed: 0,
        }
    }

    pub fn now(&self) -> SimTime {
        self.sched.now
    }

    pub fn schedule(
        &mut self,
        time: SimTime,
        kind: EventKind,
        node: NodeId,
        payload: P,
    ) -> Result<EventHandle, SimError> {
        self.sched.schedule(time, kind, node, payload)
    }

    /// Total events processed over the engine's lifetime.
    pub fn processed(&self) -> u64 {
        self.processed
    }

    /// Processes every event with `time <= end`, then parks the clock at `end`.
    /// Returns the number of events processed by this call.
    pub fn run_until<H: Handler<P>>(&mut self, end: SimTime, handler: &mut H) -> u64 {
        let mut count = 0u64;
        let mut last = (self.sched.now, 0u64);
        while let Some(ev) = self.sched.pop_due(end) {
            debug_assert!(count == 0 || (ev.time, ev.seq) > last, "event processed out of order");
            last = (ev.time, ev.seq);
            handler.handle(ev, &mut self.sched);
            count += 1;
        }
        if self.sched.now < end {
            self.sched.now = end;
        }
        self.processed += count;
        count
    }

    /// Drains the queue without parking the clock. Returns events processed.
    pub fn run_to_completion<H: Handler<P>>(&mut self, handler: &mut H) -> u64 {
        let mut count = 0;
        while let Some(next) = self.sched.queue.peek().map(|q| q.0.time) {
            count += self.run_until(next, handler);
        }
        count
    }
}
