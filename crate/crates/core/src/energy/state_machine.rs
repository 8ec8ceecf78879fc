use crate::sim::SimTime;

use super::{EnergyError, RadioPowerTable, RadioState};

/// Radio state machine with per-state energy accumulators.
///
/// Dwell time is accumulated in integer nanoseconds per state and energy is
/// derived as `power · dwell`, so two nodes that spent the same time in each
/// state report bit-identical energy regardless of transition order.
#[derive(Debug, Clone)]
pub struct StateMachineModel {
    initial_energy: f64,
    power: RadioPowerTable,
    aux_power: f64,
    state: RadioState,
    state_entry: SimTime,
    dwell_ns: [u64; 4],
    aux_ns: u64,
    depleted_at: Option<SimTime>,
}

impl StateMachineModel {
    pub fn new(initial_energy: f64, power: RadioPowerTable) -> Self {
        Self {
            initial_energy,
            power,
            aux_power: 0.0,
            state: RadioState::Idle,
            state_entry: SimTime::ZERO,
            dwell_ns: [0; 4],
            aux_ns: 0,
            depleted_at: None,
        }
    }

    /// Constant auxiliary draw (MCU, sensors) charged alongside the radio.
    pub fn with_aux_power(mut self, watts: f64) -> Self {
        self.aux_power = watts;
        self
    }

    pub fn state(&self) -> RadioState {
        self.state
    }

    pub fn state_entry_time(&self) -> SimTime {
        self.state_entry
    }

    pub fn initial_energy(&self) -> f64 {
        self.initial_energy
    }

    pub fn power_table(&self) -> &RadioPowerTable {
        &self.power
    }

    pub fn dwell(&self, state: RadioState) -> SimTime {
        SimTime::from_nanos(self.dwell_ns[state.index()])
    }

    pub fn accumulator(&self, state: RadioState) -> f64 {
        self.power.power(state) * self.dwell_ns[state.index()] as f64 * 1e-9
    }

    pub fn aux_energy(&self) -> f64 {
        self.aux_power * self.aux_ns as f64 * 1e-9
    }

    pub fn consumed(&self) -> f64 {
        RadioState::ALL.iter().map(|&s| self.accumulator(s)).sum::<f64>() + self.aux_energy()
    }

    pub fn residual(&self) -> f64 {
        self.initial_energy - self.consumed()
    }

    pub fn depleted_at(&self) -> Option<SimTime> {
        self.depleted_at
    }

    pub fn is_depleted(&self) -> bool {
        self.depleted_at.is_some()
    }

    /// Charges the dwell in the current state up to `now`, then enters `new_state`.
    /// Returns `(radio_charge, aux_charge)` in joules.
    pub fn transition_split(&mut self, new_state: RadioState, now: SimTime) -> Result<(f64, f64), EnergyError> {
        let dwell = now.checked_sub(self.state_entry).ok_or(EnergyError::TimeReversed {
            now,
            last: self.state_entry,
        })?;
        let old = self.state;
        let (before_radio, before_aux) = (self.accumulator(old), self.aux_energy());
        if self.depleted_at.is_none() && dwell > SimTime::ZERO {
            let mut served = dwell.as_nanos();
            let draw = self.power.power(old) + self.aux_power;
            let residual = self.residual();
            if draw * served as f64 * 1e-9 > residual {
                served = ((residual.max(0.0) / draw) * 1e9).floor() as u64;
                // guard against the float product landing one ns past the budget
                while served > 0 && draw * served as f64 * 1e-9 > residual {
                    served -= 1;
                }
                self.depleted_at = Some(self.state_entry + SimTime::from_nanos(served));
            }
            self.dwell_ns[old.index()] += served;
            self.aux_ns += served;
        }
        self.state = new_state;
        self.state_entry = now;
        Ok((self.accumulator(old) - before_radio, self.aux_energy() - before_aux))
    }

    /// Returns the total joules charged for the dwell that just ended.
    pub fn transition(&mut self, new_state: RadioState, now: SimTime) -> Result<f64, EnergyError> {
        self.transition_split(new_state, now).map(|(r, a)| r + a)
    }
}

pub fn sm_transition(model: &mut StateMachineModel, new_state: RadioState, now: SimTime) -> Result<f64, EnergyError> {
    model.transition(new_state, now)
}
