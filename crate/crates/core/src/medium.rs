//! Wireless propagation: path loss, propagation delay and reachability.

use std::f64::consts::PI;

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::sim::{RngStream, SimTime};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const DEFAULT_FREQUENCY_HZ: f64 = 2.4e9;
pub const DEFAULT_SENSITIVITY_DBM: f64 = -85.0;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum MediumError {
    #[error("distance must be positive, got {0} m")]
    NonPositiveDistance(f64),
    #[error("distance {distance} m is below the reference distance {d0} m")]
    BelowReferenceDistance { distance: f64, d0: f64 },
    #[error("invalid path-loss parameter `{field}`: {reason}")]
    InvalidParam { field: &'static str, reason: &'static str },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PathLossModel {
    #[default]
    FreeSpace,
    TwoRayGround,
    LogNormalShadowing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathLossParams {
    pub model: PathLossModel,
    pub tx_gain: f64,
    pub rx_gain: f64,
    pub frequency_hz: f64,
    /// Antenna heights in meters (two-ray only).
    pub tx_height_m: f64,
    pub rx_height_m: f64,
    /// Reference distance d0 in meters (log-normal only).
    pub ref_distance_m: f64,
    /// Loss at d0 in dB. `None` means the free-space loss at d0.
    pub ref_loss_db: Option<f64>,
    pub exponent: f64,
    pub sigma_db: f64,
}

impl Default for PathLossParams {
    fn default() -> Self {
        Self {
            model: PathLossModel::FreeSpace,
            tx_gain: 1.0,
            rx_gain: 1.0,
            frequency_hz: DEFAULT_FREQUENCY_HZ,
            tx_height_m: 1.5,
            rx_height_m: 1.5,
            ref_distance_m: 1.0,
            ref_loss_db: None,
            exponent: 2.0,
            sigma_db: 4.0,
        }
    }
}

impl PathLossParams {
    pub fn validate(&self) -> Result<(), MediumError> {
        let bad = |field, reason| Err(MediumError::InvalidParam { field, reason });
        if !(self.frequency_hz > 0.0) {
            return bad("frequency_hz", "must be > 0");
        }
        if !(self.tx_gain > 0.0) {
            return bad("tx_gain", "must be > 0");
        }
        if !(self.rx_gain > 0.0) {
            return bad("rx_gain", "must be > 0");
        }
        if !(self.ref_distance_m > 0.0) {
            return bad("ref_distance_m", "must be > 0");
        }
        if !(self.exponent > 0.0) {
            return bad("exponent", "must be > 0");
        }
        if !(self.sigma_db >= 0.0) {
            return bad("sigma_db", "must be >= 0");
        }
        if self.model == PathLossModel::TwoRayGround && !(self.tx_height_m > 0.0 && self.rx_height_m > 0.0) {
            return bad("tx_height_m/rx_height_m", "antenna heights must be > 0");
        }
        Ok(())
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.frequency_hz
    }

    /// Distance beyond which the ground-reflected ray dominates: 4π·ht·hr/λ.
    pub fn crossover_distance(&self) -> f64 {
        4.0 * PI * self.tx_height_m * self.rx_height_m / self.wavelength()
    }

    pub fn reference_loss_db(&self) -> f64 {
        self.ref_loss_db
            .unwrap_or_else(|| 20.0 * (4.0 * PI * self.ref_distance_m / self.wavelength()).log10())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub tx_power: f64,
    pub rx_power: f64,
    pub distance: f64,
    pub delay: f64,
}

pub fn watts_to_dbm(w: f64) -> f64 {
    10.0 * (w * 1e3).log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0) / 1e3
}

/// Friis: Pt·Gt·Gr·(λ/(4πd))².
pub fn free_space_rx_power(tx_power: f64, params: &PathLossParams, distance: f64) -> Result<f64, MediumError> {
    if !(distance > 0.0) {
        return Err(MediumError::NonPositiveDistance(distance));
    }
    let ratio = params.wavelength() / (4.0 * PI * distance);
    Ok(tx_power * params.tx_gain * params.rx_gain * ratio * ratio)
}

/// Raw ground-reflection formula Pt·Gt·Gr·ht²·hr²/d⁴, valid far from the transmitter.
pub fn two_ray_far_field_rx_power(tx_power: f64, params: &PathLossParams, distance: f64) -> Result<f64, MediumError> {
    if !(distance > 0.0) {
        return Err(MediumError::NonPositiveDistance(distance));
    }
    let hh = params.tx_height_m * params.rx_height_m;
    Ok(tx_power * params.tx_gain * params.rx_gain * hh * hh / distance.powi(4))
}

/// Two-ray ground: free-space inside the crossover distance, d⁻⁴ beyond it.
pub fn two_ray_ground_rx_power(tx_power: f64, params: &PathLossParams, distance: f64) -> Result<f64, MediumError> {
    if distance < params.crossover_distance() {
        free_space_rx_power(tx_power, params, distance)
    } else {
        two_ray_far_field_rx_power(tx_power, params, distance)
    }
}

/// Log-distance path loss plus a shadowing term: PL(d0) + 10·n·log10(d/d0) + X.
pub fn log_normal_path_loss_db(
    params: &PathLossParams,
    distance: f64,
    shadowing_draw_db: f64,
) -> Result<f64, MediumError> {
    if distance < params.ref_distance_m {
        return Err(MediumError::BelowReferenceDistance {
            distance,
            d0: params.ref_distance_m,
        });
    }
    Ok(params.reference_loss_db()
        + 10.0 * params.exponent * (distance / params.ref_distance_m).log10()
        + shadowing_draw_db)
}

/// Zero-mean Gaussian shadowing draw in dB with standard deviation `sigma_db`.
pub fn draw_shadowing_db(rng: &mut RngStream, sigma_db: f64) -> f64 {
    if sigma_db == 0.0 {
        return 0.0;
    }
    Normal::new(0.0, sigma_db)
        .expect("sigma validated non-negative")
        .sample(rng.inner())
}

/// Received power for any model. `shadowing_db` is only used by log-normal.
pub fn rx_power(tx_power: f64, params: &PathLossParams, distance: f64, shadowing_db: f64) -> Result<f64, MediumError> {
    match params.model {
        PathLossModel::FreeSpace => free_space_rx_power(tx_power, params, distance),
        PathLossModel::TwoRayGround => two_ray_ground_rx_power(tx_power, params, distance),
        PathLossModel::LogNormalShadowing => {
            let pl = log_normal_path_loss_db(params, distance, shadowing_db)?;
            let gain_db = 10.0 * (params.tx_gain * params.rx_gain).log10();
            Ok(dbm_to_watts(watts_to_dbm(tx_power) + gain_db - pl))
        }
    }
}

pub fn propagation_delay(distance: f64) -> f64 {
    distance / SPEED_OF_LIGHT
}

pub fn propagation_delay_time(distance: f64) -> SimTime {
    SimTime::from_secs_f64(propagation_delay(distance))
}

/// True iff the received power reaches `sensitivity` (watts).
pub fn in_range(
    tx_power: f64,
    params: &PathLossParams,
    distance: f64,
    sensitivity: f64,
    shadowing_db: f64,
) -> Result<bool, MediumError> {
    if sensitivity <= 0.0 {
        return Ok(true);
    }
    Ok(rx_power(tx_power, params, distance, shadowing_db)? >= sensitivity)
}

pub fn link_budget(
    tx_power: f64,
    params: &PathLossParams,
    distance: f64,
    shadowing_db: f64,
) -> Result<LinkBudget, MediumError> {
    Ok(LinkBudget {
        tx_power,
        rx_power: rx_power(tx_power, params, distance, shadowing_db)?,
        distance,
        delay: propagation_delay(distance),
    })
}
