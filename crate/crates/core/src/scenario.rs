//! Deployments: device placement, issue times and channel interference.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::error::SimError;
use crate::params::SystemParams;

/// Devices closer than this to the access point are redrawn.
pub const MIN_DISTANCE: f64 = 0.1;

/// RNG stream ids; each random quantity family has its own stream so that
/// changing one count does not reshuffle the others.
pub mod stream {
    pub const DEVICES: u64 = 1;
    pub const CHANNELS: u64 = 2;
    pub const FADING: u64 = 3;
}

/// Deterministic generator for `(seed, stream)`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Device {
    pub id: usize,
    /// Distance to the access point in meters.
    pub distance: f64,
    /// Slot in `1..=T` at which the packet is generated each cycle.
    pub issue_time: u32,
    /// Slots available for delivery.
    pub delay_bound: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    pub id: usize,
    /// `1 + Y_c`, the noise-plus-interference factor.
    pub interf: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FadingMode {
    /// Fading is independent across channels.
    #[default]
    Independent,
    /// One fading realisation is shared by all channels of a device.
    Correlated,
}

impl FromStr for FadingMode {
    type Err = SimError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "independent" => Ok(Self::Independent),
            "correlated" => Ok(Self::Correlated),
            other => Err(SimError::Scenario(format!("unknown fading mode `{other}`"))),
        }
    }
}

impl fmt::Display for FadingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Independent => "independent",
            Self::Correlated => "correlated",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub params: SystemParams,
    pub devices: Vec<Device>,
    pub channels: Vec<Channel>,
    pub fading: FadingMode,
    pub seed: u64,
}

impl Scenario {
    /// Builds a scenario from explicit devices and channels, checking ranges.
    // Negated comparisons also reject NaN.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn new(params: SystemParams, devices: Vec<Device>, channels: Vec<Channel>) -> Result<Self, SimError> {
        params.validate()?;
        for (i, d) in devices.iter().enumerate() {
            if d.id != i {
                return Err(SimError::Scenario(format!("device ids must be 0..N, got {} at {i}", d.id)));
            }
            if !(d.distance > 0.0) {
                return Err(SimError::Scenario(format!("device {i} has distance {}", d.distance)));
            }
            if d.issue_time < 1 || d.issue_time > params.cycle_slots {
                return Err(SimError::Scenario(format!(
                    "device {i} issue time {} outside 1..={}",
                    d.issue_time, params.cycle_slots
                )));
            }
            if d.delay_bound < 1 || d.delay_bound > params.cycle_slots {
                return Err(SimError::Scenario(format!("device {i} has delay bound {}", d.delay_bound)));
            }
        }
        for (c, ch) in channels.iter().enumerate() {
            if ch.id != c {
                return Err(SimError::Scenario(format!("channel ids must be 0..C, got {} at {c}", ch.id)));
            }
            if !(ch.interf >= 1.0) {
                return Err(SimError::Scenario(format!("channel {c} has factor {}", ch.interf)));
            }
        }
        Ok(Self { params, devices, channels, fading: FadingMode::Independent, seed: 0 })
    }

    pub fn with_fading(mut self, fading: FadingMode) -> Self {
        self.fading = fading;
        self
    }
}

/// Random deployment: positions uniform over the disk of radius `L` (only the
/// radial coordinate matters to the link model), issue
/// times uniform over the cycle and interference factors `1 + U[0, Y_M]`.
///
/// Devices are drawn sequentially from their own stream, so the first `n`
/// devices of a larger deployment with the same seed are identical.
pub fn generate_scenario(seed: u64, n_devices: usize, n_channels: usize, params: &SystemParams) -> Scenario {
    assert!(n_devices >= 1 && n_channels >= 1, "need at least one device and one channel");
    let mut rng = rng_for(seed, stream::DEVICES);
    let devices = (0..n_devices)
        .map(|id| {
            let distance = loop {
                let d = params.area_radius * rng.random::<f64>().sqrt();
                if d >= MIN_DISTANCE {
                    break d;
                }
            };
            let issue_time = rng.random_range(1..=params.cycle_slots);
            Device { id, distance, issue_time, delay_bound: params.delay_slots }
        })
        .collect();

    let mut rng = rng_for(seed, stream::CHANNELS);
    let channels =
        (0..n_channels).map(|id| Channel { id, interf: 1.0 + params.max_interf * rng.random::<f64>() }).collect();

    Scenario { params: params.clone(), devices, channels, fading: FadingMode::Independent, seed }
}
