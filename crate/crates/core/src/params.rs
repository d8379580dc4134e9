//! Physical and protocol constants shared by every allocator.
//!
//! [`SystemParams`] keeps the transmit SNR in linear units. The on-disk
//! configuration ([`ParamsConfig`]) expresses it in dB and is converted once
//! when loaded.

use serde::{Deserialize, Serialize};

use crate::error::ParamError;

/// All constants of the link model and the cycle structure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Subcarrier spacing in Hz (informational).
    pub subcarrier_spacing: f64,
    /// RU duration in seconds.
    pub slot_duration: f64,
    /// Channel bandwidth in Hz.
    pub bandwidth: f64,
    /// Transmit SNR, linear.
    pub transmit_snr: f64,
    /// Path loss exponent.
    pub pathloss_exp: f64,
    /// Upper bound of the per-channel interference term `Y_c`.
    pub max_interf: f64,
    /// Packet size in bits.
    pub packet_bits: f64,
    /// Slots per cycle.
    pub cycle_slots: u32,
    /// Delivery deadline in slots.
    pub delay_slots: u32,
    /// Target packet success probability.
    pub reliability: f64,
    /// Largest issue-time distance allowed between paired devices.
    pub pairing_limit: u32,
    /// Deployment radius in meters.
    pub area_radius: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        ParamsConfig::default().into_params()
    }
}

impl SystemParams {
    /// Channel uses per RU, `B * tau`.
    pub fn symbols_per_ru(&self) -> f64 {
        self.bandwidth * self.slot_duration
    }

    // Negated comparisons also reject NaN.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<(), ParamError> {
        let q = self.symbols_per_ru();
        if !(q > 0.0 && q.is_finite()) {
            return Err(ParamError::Invalid(format!("B*tau must be positive, got {q}")));
        }
        if !(self.reliability > 0.0 && self.reliability < 1.0) {
            return Err(ParamError::Invalid(format!("reliability must lie in (0, 1), got {}", self.reliability)));
        }
        if self.delay_slots < 1 || self.delay_slots > self.cycle_slots {
            return Err(ParamError::Invalid(format!(
                "delay must satisfy 1 <= delay <= T, got delay={} T={}",
                self.delay_slots, self.cycle_slots
            )));
        }
        if self.pairing_limit > self.delay_slots {
            return Err(ParamError::Invalid(format!(
                "pairing limit {} exceeds delay {}",
                self.pairing_limit, self.delay_slots
            )));
        }
        if !(self.transmit_snr > 0.0) {
            return Err(ParamError::Invalid("transmit SNR must be positive".into()));
        }
        if !(self.max_interf >= 0.0) {
            return Err(ParamError::Invalid("max interference must be non-negative".into()));
        }
        if !(self.packet_bits >= 1.0) {
            return Err(ParamError::Invalid("packet must carry at least one bit".into()));
        }
        if !(self.area_radius > 0.0) {
            return Err(ParamError::Invalid("area radius must be positive".into()));
        }
        Ok(())
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}

/// Key/value configuration file layout. Every key is optional; missing keys
/// take the reference deployment values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsConfig {
    pub omega_hz: f64,
    pub tau_s: f64,
    pub bandwidth_hz: f64,
    pub gamma_t_db: f64,
    pub alpha: f64,
    pub y_max: f64,
    pub packet_bits: f64,
    pub cycle_slots: u32,
    pub delta_slots: u32,
    pub rho: f64,
    pub pairing_limit: u32,
    pub radius_m: f64,
}

impl Default for ParamsConfig {
    fn default() -> Self {
        Self {
            omega_hz: 15e3,
            tau_s: 0.144e-3,
            bandwidth_hz: 180e3,
            gamma_t_db: 100.0,
            alpha: 3.0,
            y_max: 4.0,
            packet_bits: 100.0,
            cycle_slots: 70,
            delta_slots: 35,
            rho: 0.99999,
            pairing_limit: 15,
            radius_m: 50.0,
        }
    }
}

impl ParamsConfig {
    pub fn into_params(self) -> SystemParams {
        SystemParams {
            subcarrier_spacing: self.omega_hz,
            slot_duration: self.tau_s,
            bandwidth: self.bandwidth_hz,
            transmit_snr: db_to_linear(self.gamma_t_db),
            pathloss_exp: self.alpha,
            max_interf: self.y_max,
            packet_bits: self.packet_bits,
            cycle_slots: self.cycle_slots,
            delay_slots: self.delta_slots,
            reliability: self.rho,
            pairing_limit: self.pairing_limit,
            area_radius: self.radius_m,
        }
    }

    pub fn from_params(p: &SystemParams) -> Self {
        Self {
            omega_hz: p.subcarrier_spacing,
            tau_s: p.slot_duration,
            bandwidth_hz: p.bandwidth,
            gamma_t_db: linear_to_db(p.transmit_snr),
            alpha: p.pathloss_exp,
            y_max: p.max_interf,
            packet_bits: p.packet_bits,
            cycle_slots: p.cycle_slots,
            delta_slots: p.delay_slots,
            rho: p.reliability,
            pairing_limit: p.pairing_limit,
            radius_m: p.area_radius,
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self, ParamError> {
        toml::from_str(text).map_err(|e| ParamError::Parse(e.to_string()))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }

    /// Parses, converts and validates in one step.
    pub fn load(text: &str) -> Result<SystemParams, ParamError> {
        let params = Self::from_toml_str(text)?.into_params();
        params.validate()?;
        Ok(params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_reference_deployment() {
        let p = SystemParams::default();
        assert!((p.symbols_per_ru() - 25.92).abs() < 1e-12);
        assert!((p.transmit_snr - 1e10).abs() < 1.0);
        assert_eq!(p.cycle_slots, 70);
        assert_eq!(p.delay_slots, 35);
        assert_eq!(p.pairing_limit, 15);
        p.validate().unwrap();
    }

    #[test]
    fn partial_config_keeps_defaults() {
        let p = ParamsConfig::load("delta_slots = 20\ngamma_t_db = 90.0\n").unwrap();
        assert_eq!(p.delay_slots, 20);
        assert!((p.transmit_snr - 1e9).abs() < 1e-3);
        assert_eq!(p.cycle_slots, 70);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(ParamsConfig::load("rho = 1.0").is_err());
        assert!(ParamsConfig::load("delta_slots = 80").is_err());
        assert!(ParamsConfig::load("pairing_limit = 40").is_err());
        assert!(ParamsConfig::load("unknown_key = 3").is_err());
    }

    #[test]
    fn toml_round_trip() {
        let cfg = ParamsConfig::default();
        let back = ParamsConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
        assert_eq!(cfg, back);
    }
}
