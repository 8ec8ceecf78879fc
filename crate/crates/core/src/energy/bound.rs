use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::sim::{NodeId, SimTime};

use super::{
    Activity, ActivityCostTable, Category, ComponentAccountingModel, EnergyError, EnergyTrace, HierarchicalModel,
    RadioPowerTable, RadioState, StateMachineModel, UnitMode,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum ModelKind {
    #[default]
    #[serde(rename = "sm")]
    StateMachine,
    #[serde(rename = "hier")]
    Hierarchical,
    /// Hierarchical model built on the charge/current unit system.
    #[serde(rename = "hier-charge")]
    HierarchicalCharge,
    #[serde(rename = "comp")]
    ComponentAccounting,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [
        ModelKind::StateMachine,
        ModelKind::Hierarchical,
        ModelKind::HierarchicalCharge,
        ModelKind::ComponentAccounting,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::StateMachine => "sm",
            ModelKind::Hierarchical => "hier",
            ModelKind::HierarchicalCharge => "hier-charge",
            ModelKind::ComponentAccounting => "comp",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = EnergyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| EnergyError::UnknownModel(s.to_string()))
    }
}

/// Model parameters shared by every node of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnergyParams {
    /// Initial (and, for hierarchical storage, maximum) energy in joules.
    pub initial_energy_j: f64,
    /// Constant auxiliary draw in watts.
    pub aux_power_w: f64,
    /// Constant harvester supply in watts. Hierarchical models only.
    pub harvester_w: Option<f64>,
    /// Regulator efficiency on hierarchical drain.
    pub efficiency: f64,
    /// Nominal voltage for the charge/current unit system.
    pub nominal_voltage: f64,
    pub activity_costs: ActivityCostTable,
}

impl Default for EnergyParams {
    fn default() -> Self {
        Self {
            initial_energy_j: 1000.0,
            aux_power_w: 0.0,
            harvester_w: None,
            efficiency: 1.0,
            nominal_voltage: 3.0,
            activity_costs: ActivityCostTable::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct HierarchicalBinding {
    pub model: HierarchicalModel,
    power: RadioPowerTable,
    radio: usize,
    aux: usize,
    state: RadioState,
    since: SimTime,
    /// Joules drawn by the radio consumer per radio state.
    per_state: [f64; 4],
    aux_j: f64,
    harvested_j: f64,
}

impl HierarchicalBinding {
    fn rate_for(&self, watts: f64) -> f64 {
        match self.model.mode() {
            UnitMode::PowerEnergy => watts,
            UnitMode::ChargeCurrent { nominal_voltage } => watts / nominal_voltage,
        }
    }

    fn advance(&mut self, node: NodeId, now: SimTime, trace: &mut EnergyTrace) -> Result<(), EnergyError> {
        let (r0, a0, g0) = (
            self.model.drawn(self.radio),
            self.model.drawn(self.aux),
            self.model.stored_generation(),
        );
        self.model.advance_to(now)?;
        let radio = self.model.to_joules(self.model.drawn(self.radio) - r0);
        let aux = self.model.to_joules(self.model.drawn(self.aux) - a0);
        let harvested = self.model.to_joules(self.model.stored_generation() - g0);
        self.per_state[self.state.index()] += radio;
        self.aux_j += aux;
        self.harvested_j += harvested;
        trace.record(node, self.since, now, Category::Radio(self.state), radio);
        trace.record(node, self.since, now, Category::Aux, aux);
        trace.record(node, self.since, now, Category::Harvest, harvested);
        self.since = now;
        Ok(())
    }
}

/// An energy model attached to a node and driven by its radio activity.
#[derive(Debug, Clone)]
pub enum BoundModel {
    StateMachine(StateMachineModel),
    Hierarchical(Box<HierarchicalBinding>),
    Component(Box<ComponentAccountingModel>),
}

/// Builds the model a node will carry for the whole run.
pub fn attach_model(
    kind: ModelKind,
    power: &RadioPowerTable,
    params: &EnergyParams,
) -> Result<BoundModel, EnergyError> {
    power.validate()?;
    if !(params.initial_energy_j > 0.0) {
        return Err(EnergyError::InvalidParam {
            field: "initial_energy_j",
            reason: format!("must be > 0, got {}", params.initial_energy_j),
        });
    }
    if !(params.aux_power_w >= 0.0) {
        return Err(EnergyError::InvalidParam {
            field: "aux_power_w",
            reason: format!("must be >= 0, got {}", params.aux_power_w),
        });
    }
    match kind {
        ModelKind::StateMachine => {
            if params.harvester_w.is_some() {
                return Err(EnergyError::HarvesterUnsupported(kind));
            }
            Ok(BoundModel::StateMachine(
                StateMachineModel::new(params.initial_energy_j, *power).with_aux_power(params.aux_power_w),
            ))
        }
        ModelKind::ComponentAccounting => {
            if params.harvester_w.is_some() {
                return Err(EnergyError::HarvesterUnsupported(kind));
            }
            params.activity_costs.validate()?;
            Ok(BoundModel::Component(Box::new(ComponentAccountingModel::new(
                &params.activity_costs,
            ))))
        }
        ModelKind::Hierarchical | ModelKind::HierarchicalCharge => {
            let (mode, scale) = if kind == ModelKind::Hierarchical {
                (UnitMode::PowerEnergy, 1.0)
            } else {
                let v = params.nominal_voltage;
                (UnitMode::ChargeCurrent { nominal_voltage: v }, 1.0 / v)
            };
            let capacity = params.initial_energy_j * scale;
            let mut model = HierarchicalModel::new(mode, capacity, capacity)?.with_efficiency(params.efficiency)?;
            let radio = model.add_consumer("radio", power.idle_w * scale);
            let aux = model.add_consumer("aux", params.aux_power_w * scale);
            if let Some(h) = params.harvester_w {
                if !(h >= 0.0) {
                    return Err(EnergyError::InvalidParam {
                        field: "harvester_w",
                        reason: format!("must be >= 0, got {h}"),
                    });
                }
                model.add_generator("harvester", h * scale);
            }
            Ok(BoundModel::Hierarchical(Box::new(HierarchicalBinding {
                model,
                power: *power,
                radio,
                aux,
                state: RadioState::Idle,
                since: SimTime::ZERO,
                per_state: [0.0; 4],
                aux_j: 0.0,
                harvested_j: 0.0,
            })))
        }
    }
}

impl BoundModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            BoundModel::StateMachine(_) => ModelKind::StateMachine,
            BoundModel::Hierarchical(h) => match h.model.mode() {
                UnitMode::PowerEnergy => ModelKind::Hierarchical,
                UnitMode::ChargeCurrent { .. } => ModelKind::HierarchicalCharge,
            },
            BoundModel::Component(_) => ModelKind::ComponentAccounting,
        }
    }

    /// Radio enters `state` at `now`. Component accounting ignores radio states.
    pub fn set_radio_state(
        &mut self,
        node: NodeId,
        state: RadioState,
        now: SimTime,
        trace: &mut EnergyTrace,
    ) -> Result<(), EnergyError> {
        match self {
            BoundModel::StateMachine(m) => {
                if m.state() == state {
                    return Ok(());
                }
                let (old, since) = (m.state(), m.state_entry_time());
                let (radio, aux) = m.transition_split(state, now)?;
                trace.record(node, since, now, Category::Radio(old), radio);
                trace.record(node, since, now, Category::Aux, aux);
                Ok(())
            }
            BoundModel::Hierarchical(h) => {
                if h.state == state {
                    return Ok(());
                }
                h.advance(node, now, trace)?;
                h.state = state;
                let rate = h.rate_for(h.power.power(state));
                h.model.set_consumer_rate(h.radio, rate);
                Ok(())
            }
            BoundModel::Component(_) => Ok(()),
        }
    }

    /// A discrete activity occurred. Only component accounting charges these.
    pub fn activity(
        &mut self,
        node: NodeId,
        activity: Activity,
        count: u64,
        now: SimTime,
        trace: &mut EnergyTrace,
    ) -> Result<(), EnergyError> {
        if let BoundModel::Component(m) = self {
            let charged = m.charge(activity, count)?;
            trace.record(node, now, now, Category::Activity(activity), charged);
        }
        Ok(())
    }

    /// Charges everything outstanding up to `now`.
    pub fn close(&mut self, node: NodeId, now: SimTime, trace: &mut EnergyTrace) -> Result<(), EnergyError> {
        match self {
            BoundModel::StateMachine(m) => {
                let (old, since) = (m.state(), m.state_entry_time());
                let (radio, aux) = m.transition_split(old, now)?;
                trace.record(node, since, now, Category::Radio(old), radio);
                trace.record(node, since, now, Category::Aux, aux);
                Ok(())
            }
            BoundModel::Hierarchical(h) => h.advance(node, now, trace),
            BoundModel::Component(_) => Ok(()),
        }
    }

    pub fn is_depleted(&self) -> bool {
        match self {
            BoundModel::StateMachine(m) => m.is_depleted(),
            BoundModel::Hierarchical(h) => h.model.is_depleted(),
            BoundModel::Component(_) => false,
        }
    }

    /// Residual stored energy in joules; `None` for models without storage.
    pub fn residual_energy(&self) -> Option<f64> {
        match self {
            BoundModel::StateMachine(m) => Some(m.residual()),
            BoundModel::Hierarchical(h) => Some(h.model.residual_energy()),
            BoundModel::Component(_) => None,
        }
    }

    /// Coulombs drawn by all consumers; only for the charge-current model.
    pub fn charge_drawn(&self) -> Option<f64> {
        match self {
            BoundModel::Hierarchical(h) if matches!(h.model.mode(), UnitMode::ChargeCurrent { .. }) => {
                Some(h.model.total_drawn())
            }
            _ => None,
        }
    }

    /// Model-side totals per category in joules, zero categories omitted.
    pub fn totals(&self) -> Vec<(Category, f64)> {
        let mut out = Vec::new();
        match self {
            BoundModel::StateMachine(m) => {
                for s in RadioState::ALL {
                    out.push((Category::Radio(s), m.accumulator(s)));
                }
                out.push((Category::Aux, m.aux_energy()));
            }
            BoundModel::Hierarchical(h) => {
                for s in RadioState::ALL {
                    out.push((Category::Radio(s), h.per_state[s.index()]));
                }
                out.push((Category::Aux, h.aux_j));
                out.push((Category::Harvest, h.harvested_j));
            }
            BoundModel::Component(m) => {
                for a in Activity::ALL {
                    out.push((Category::Activity(a), m.accumulator(a)));
                }
            }
        }
        out.retain(|(_, v)| *v != 0.0);
        out
    }

    /// Total consumed energy in joules (harvest excluded).
    pub fn consumed(&self) -> f64 {
        match self {
            BoundModel::StateMachine(m) => m.consumed(),
            _ => self
                .totals()
                .into_iter()
                .filter(|(c, _)| c.is_consumption())
                .map(|(_, v)| v)
                .sum(),
        }
    }
}
