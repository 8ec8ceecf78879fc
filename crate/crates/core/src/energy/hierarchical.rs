use crate::sim::SimTime;

use super::EnergyError;

/// Unit system of a hierarchical model, fixed at construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UnitMode {
    /// Flows in watts, storage in joules.
    PowerEnergy,
    /// Flows in amperes, storage in coulombs, at a constant nominal voltage.
    ChargeCurrent { nominal_voltage: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Flow {
    pub id: String,
    /// W in power-energy mode, A in charge-current mode.
    pub rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StorageEvent {
    Depleted,
    Full,
}

/// What one integration step did, in the model's native unit.
#[derive(Debug, Clone, Copy, Default)]
struct StepOutcome {
    /// Time during which consumers were served, seconds.
    served: f64,
    stored_gen: f64,
    spilled: f64,
    hit: Option<(f64, StorageEvent)>,
}

/// Joule storage driven by watt flows.
#[derive(Debug, Clone)]
struct EnergyStore {
    capacity_j: f64,
    residual_j: f64,
}

impl EnergyStore {
    fn step(&mut self, drain_w: f64, gen_w: f64, dt: f64) -> StepOutcome {
        let net_w = gen_w - drain_w;
        if net_w < 0.0 {
            let t_empty = self.residual_j / -net_w;
            if t_empty <= dt {
                self.residual_j = 0.0;
                return StepOutcome {
                    served: t_empty,
                    stored_gen: gen_w * t_empty,
                    spilled: 0.0,
                    hit: Some((t_empty, StorageEvent::Depleted)),
                };
            }
            self.residual_j += net_w * dt;
            return StepOutcome {
                served: dt,
                stored_gen: gen_w * dt,
                spilled: 0.0,
                hit: None,
            };
        }
        let headroom_j = self.capacity_j - self.residual_j;
        let gained_j = net_w * dt;
        if gained_j > headroom_j {
            let t_full = if net_w > 0.0 { headroom_j / net_w } else { dt };
            self.residual_j = self.capacity_j;
            let spilled = gained_j - headroom_j;
            StepOutcome {
                served: dt,
                stored_gen: gen_w * dt - spilled,
                spilled,
                hit: Some((t_full, StorageEvent::Full)),
            }
        } else {
            self.residual_j += gained_j;
            StepOutcome {
                served: dt,
                stored_gen: gen_w * dt,
                spilled: 0.0,
                hit: None,
            }
        }
    }
}

/// Coulomb storage driven by ampere flows.
#[derive(Debug, Clone)]
struct ChargeStore {
    capacity_c: f64,
    residual_c: f64,
}

impl ChargeStore {
    fn step(&mut self, drain_a: f64, gen_a: f64, dt: f64) -> StepOutcome {
        let net_a = gen_a - drain_a;
        if net_a < 0.0 {
            let t_empty = self.residual_c / -net_a;
            if t_empty <= dt {
                self.residual_c = 0.0;
                return StepOutcome {
                    served: t_empty,
                    stored_gen: gen_a * t_empty,
                    spilled: 0.0,
                    hit: Some((t_empty, StorageEvent::Depleted)),
                };
            }
            self.residual_c -= drain_a * dt - gen_a * dt;
            return StepOutcome {
                served: dt,
                stored_gen: gen_a * dt,
                spilled: 0.0,
                hit: None,
            };
        }
        let room_c = self.capacity_c - self.residual_c;
        let charge_in_c = gen_a * dt - drain_a * dt;
        if charge_in_c > room_c {
            let t_full = if net_a > 0.0 { room_c / net_a } else { dt };
            self.residual_c = self.capacity_c;
            let spilled = charge_in_c - room_c;
            StepOutcome {
                served: dt,
                stored_gen: gen_a * dt - spilled,
                spilled,
                hit: Some((t_full, StorageEvent::Full)),
            }
        } else {
            self.residual_c += charge_in_c;
            StepOutcome {
                served: dt,
                stored_gen: gen_a * dt,
                spilled: 0.0,
                hit: None,
            }
        }
    }
}

#[derive(Debug, Clone)]
enum Store {
    Energy(EnergyStore),
    Charge(ChargeStore, f64),
}

/// Storage with consumers and generators operating in parallel.
#[derive(Debug, Clone)]
pub struct HierarchicalModel {
    store: Store,
    consumers: Vec<Flow>,
    generators: Vec<Flow>,
    efficiency: f64,
    /// Native units drawn from storage per consumer.
    drawn: Vec<f64>,
    stored_gen: f64,
    spilled: f64,
    elapsed: f64,
    events: Vec<(f64, StorageEvent)>,
    clock: SimTime,
}

impl HierarchicalModel {
    /// `capacity` and `initial` are in J (power mode) or C (charge mode).
    pub fn new(mode: UnitMode, capacity: f64, initial: f64) -> Result<Self, EnergyError> {
        if !(capacity > 0.0) || !(0.0..=capacity).contains(&initial) {
            return Err(EnergyError::InvalidParam {
                field: "storage",
                reason: format!("need 0 <= initial ({initial}) <= capacity ({capacity}), capacity > 0"),
            });
        }
        let store = match mode {
            UnitMode::PowerEnergy => Store::Energy(EnergyStore {
                capacity_j: capacity,
                residual_j: initial,
            }),
            UnitMode::ChargeCurrent { nominal_voltage } => {
                if !(nominal_voltage > 0.0) {
                    return Err(EnergyError::InvalidParam {
                        field: "nominal_voltage",
                        reason: format!("must be > 0, got {nominal_voltage}"),
                    });
                }
                Store::Charge(
                    ChargeStore {
                        capacity_c: capacity,
                        residual_c: initial,
                    },
                    nominal_voltage,
                )
            }
        };
        Ok(Self {
            store,
            consumers: Vec::new(),
            generators: Vec::new(),
            efficiency: 1.0,
            drawn: Vec::new(),
            stored_gen: 0.0,
            spilled: 0.0,
            elapsed: 0.0,
            events: Vec::new(),
            clock: SimTime::ZERO,
        })
    }

    /// Regulator efficiency applied to consumer drain (drain = demand / efficiency).
    pub fn with_efficiency(mut self, efficiency: f64) -> Result<Self, EnergyError> {
        if !(efficiency > 0.0 && efficiency <= 1.0) {
            return Err(EnergyError::InvalidParam {
                field: "efficiency",
                reason: format!("must be in (0, 1], got {efficiency}"),
            });
        }
        self.efficiency = efficiency;
        Ok(self)
    }

    pub fn mode(&self) -> UnitMode {
        match self.store {
            Store::Energy(_) => UnitMode::PowerEnergy,
            Store::Charge(_, v) => UnitMode::ChargeCurrent { nominal_voltage: v },
        }
    }

    pub fn add_consumer(&mut self, id: impl Into<String>, rate: f64) -> usize {
        self.consumers.push(Flow { id: id.into(), rate });
        self.drawn.push(0.0);
        self.consumers.len() - 1
    }

    pub fn add_generator(&mut self, id: impl Into<String>, rate: f64) -> usize {
        self.generators.push(Flow { id: id.into(), rate });
        self.generators.len() - 1
    }

    pub fn set_consumer_rate(&mut self, idx: usize, rate: f64) {
        self.consumers[idx].rate = rate;
    }

    pub fn set_generator_rate(&mut self, idx: usize, rate: f64) {
        self.generators[idx].rate = rate;
    }

    pub fn consumers(&self) -> &[Flow] {
        &self.consumers
    }

    pub fn generators(&self) -> &[Flow] {
        &self.generators
    }

    pub fn capacity(&self) -> f64 {
        match &self.store {
            Store::Energy(s) => s.capacity_j,
            Store::Charge(s, _) => s.capacity_c,
        }
    }

    /// Residual in the native unit (J or C).
    pub fn residual(&self) -> f64 {
        match &self.store {
            Store::Energy(s) => s.residual_j,
            Store::Charge(s, _) => s.residual_c,
        }
    }

    /// Converts a native quantity to joules.
    pub fn to_joules(&self, native: f64) -> f64 {
        match self.store {
            Store::Energy(_) => native,
            Store::Charge(_, v) => native * v,
        }
    }

    pub fn residual_energy(&self) -> f64 {
        self.to_joules(self.residual())
    }

    /// Native quantity drawn from storage for consumer `idx`.
    pub fn drawn(&self, idx: usize) -> f64 {
        self.drawn[idx]
    }

    pub fn drawn_energy(&self, idx: usize) -> f64 {
        self.to_joules(self.drawn[idx])
    }

    pub fn total_drawn(&self) -> f64 {
        self.drawn.iter().sum()
    }

    pub fn stored_generation(&self) -> f64 {
        self.stored_gen
    }

    pub fn spilled(&self) -> f64 {
        self.spilled
    }

    pub fn events(&self) -> &[(f64, StorageEvent)] {
        &self.events
    }

    pub fn is_depleted(&self) -> bool {
        self.events.iter().any(|(_, e)| *e == StorageEvent::Depleted)
    }

    pub fn clock(&self) -> SimTime {
        self.clock
    }

    fn demand(&self) -> f64 {
        self.consumers.iter().map(|c| c.rate).sum::<f64>() / self.efficiency
    }

    fn supply(&self) -> f64 {
        self.generators.iter().map(|g| g.rate).sum()
    }

    /// Seconds until the storage runs dry at the current flows, if it drains.
    pub fn time_to_depletion(&self) -> Option<f64> {
        let net = self.supply() - self.demand();
        (net < 0.0).then(|| self.residual() / -net)
    }

    /// Integrates all flows over `dt` seconds and returns the new residual.
    pub fn step(&mut self, dt: f64) -> f64 {
        debug_assert!(dt >= 0.0);
        if dt == 0.0 {
            return self.residual();
        }
        let depleted = self.is_depleted();
        let drain = if depleted { 0.0 } else { self.demand() };
        let supply = self.supply();
        let outcome = match &mut self.store {
            Store::Energy(s) => s.step(drain, supply, dt),
            Store::Charge(s, _) => s.step(drain, supply, dt),
        };
        if !depleted {
            for (acc, c) in self.drawn.iter_mut().zip(&self.consumers) {
                *acc += c.rate / self.efficiency * outcome.served;
            }
        }
        self.stored_gen += outcome.stored_gen;
        self.spilled += outcome.spilled;
        if let Some((at, ev)) = outcome.hit {
            let already = self.events.last().map(|(_, e)| *e == ev).unwrap_or(false);
            if !already {
                self.events.push((self.elapsed + at, ev));
            }
        }
        self.elapsed += dt;
        self.residual()
    }

    /// Steps from the internal clock to `now`.
    pub fn advance_to(&mut self, now: SimTime) -> Result<f64, EnergyError> {
        let dt = now
            .checked_sub(self.clock)
            .ok_or(EnergyError::TimeReversed { now, last: self.clock })?;
        self.clock = now;
        Ok(self.step(dt.as_nanos() as f64 * 1e-9))
    }
}

pub fn hm_step(model: &mut HierarchicalModel, dt: f64) -> f64 {
    model.step(dt)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_drain_depletes_on_time() {
        let mut m = HierarchicalModel::new(UnitMode::PowerEnergy, 1.0, 1.0).unwrap();
        m.add_consumer("load", 0.5);
        m.add_generator("harvester", 0.2);
        assert!((m.time_to_depletion().unwrap() - 1.0 / 0.3).abs() < 1e-12);
        m.step(10.0);
        assert_eq!(m.residual(), 0.0);
        let (at, ev) = m.events()[0];
        assert_eq!(ev, StorageEvent::Depleted);
        assert!((at - 10.0 / 3.0).abs() < 1e-12);
        // consumer served only until depletion
        assert!((m.drawn(0) - 0.5 / 0.3).abs() < 1e-12);
    }

    #[test]
    fn balanced_flows_keep_residual_constant() {
        let mut m = HierarchicalModel::new(UnitMode::PowerEnergy, 2.0, 1.5).unwrap();
        m.add_consumer("load", 0.3);
        m.add_generator("harvester", 0.3);
        for _ in 0..100 {
            m.step(0.25);
        }
        assert_eq!(m.residual(), 1.5);
    }

    #[test]
    fn charge_mode_matches_power_mode() {
        let v = 3.0;
        let mut q = HierarchicalModel::new(UnitMode::ChargeCurrent { nominal_voltage: v }, 1.0, 1.0).unwrap();
        q.add_consumer("load", 0.1);
        let mut e = HierarchicalModel::new(UnitMode::PowerEnergy, 3.0, 3.0).unwrap();
        e.add_consumer("load", 0.3);
        for _ in 0..7 {
            q.step(0.9);
            e.step(0.9);
        }
        let qe = q.drawn_energy(0);
        assert!((qe - e.drawn_energy(0)).abs() / qe < 1e-9);
        assert!((q.residual_energy() - e.residual_energy()).abs() < 1e-9);
    }

    #[test]
    fn clamps_at_capacity_and_reports_full() {
        let mut m = HierarchicalModel::new(UnitMode::PowerEnergy, 1.0, 0.9).unwrap();
        m.add_generator("harvester", 1.0);
        m.step(1.0);
        assert_eq!(m.residual(), 1.0);
        assert!((m.spilled() - 0.9).abs() < 1e-12);
        assert_eq!(m.events()[0].1, StorageEvent::Full);
        assert!((m.events()[0].0 - 0.1).abs() < 1e-12);
    }

    #[test]
    fn efficiency_scales_drain() {
        let mut m = HierarchicalModel::new(UnitMode::PowerEnergy, 10.0, 10.0)
            .unwrap()
            .with_efficiency(0.5)
            .unwrap();
        m.add_consumer("load", 1.0);
        m.step(1.0);
        assert!((m.residual() - 8.0).abs() < 1e-12);
        assert!(HierarchicalModel::new(UnitMode::PowerEnergy, 1.0, 1.0)
            .unwrap()
            .with_efficiency(0.0)
            .is_err());
    }

    #[test]
    fn invalid_storage_rejected() {
        assert!(HierarchicalModel::new(UnitMode::PowerEnergy, 1.0, 2.0).is_err());
        assert!(HierarchicalModel::new(UnitMode::ChargeCurrent { nominal_voltage: 0.0 }, 1.0, 1.0).is_err());
    }

    #[test]
    fn conservation_with_generation() {
        let mut m = HierarchicalModel::new(UnitMode::PowerEnergy, 5.0, 4.0).unwrap();
        let c = m.add_consumer("radio", 0.2);
        m.add_generator("harvester", 0.05);
        for i in 0..1000 {
            m.set_consumer_rate(c, if i % 3 == 0 { 0.75 } else { 0.0002 });
            m.step(1e-3);
        }
        let lhs = 4.0 - m.residual();
        let rhs = m.total_drawn() - m.stored_generation();
        assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1e-3));
    }
}
