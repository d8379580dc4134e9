use thiserror::Error;

#[derive(Debug, Error)]
pub enum ParamError {
    #[error("invalid parameters: {0}")]
    Invalid(String),
    #[error("cannot parse configuration: {0}")]
    Parse(String),
}

/// Failure of the adaptive quadrature to reach the requested tolerance.
#[derive(Debug, Clone, Error, PartialEq)]
#[error(
    "quadrature did not converge on [{lower}, {upper}]: estimate {estimate:e}, \
     error bound {error_bound:e} after {evaluations} evaluations"
)]
pub struct QuadratureError {
    pub lower: f64,
    pub upper: f64,
    pub estimate: f64,
    pub error_bound: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum LinkError {
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("no RU count up to {limit} reaches the target reliability")]
    Unreachable { limit: u32 },
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum PairError {
    #[error("pair needs more than {delay} RUs on channel {channel}")]
    ExceedsDelay { channel: usize, delay: u32 },
    #[error("a device cannot be paired with itself")]
    SameDevice,
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error(transparent)]
    Link(#[from] LinkError),
    #[error("invalid scenario: {0}")]
    Scenario(String),
    #[error("malformed sweep table: {0}")]
    Table(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// A schedule that breaks one of the structural or reliability rules.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum ScheduleViolation {
    #[error("slot {slot} on channel {channel} is owned twice")]
    DoubleBooked { channel: usize, slot: u32 },
    #[error("occupancy map disagrees with assignments at channel {channel}, slot {slot}")]
    Inconsistent { channel: usize, slot: u32 },
    #[error("device {device} uses slot {slot} outside its window")]
    OutsideWindow { device: usize, slot: u32 },
    #[error("device {device} has delay {delay} above its bound {bound}")]
    DelayExceeded { device: usize, delay: u32, bound: u32 },
    #[error("device {device} spans {channels} channels")]
    MultiChannel { device: usize, channels: usize },
    #[error("device {device} succeeds with probability {prob} below {target}")]
    Unreliable { device: usize, prob: f64, target: f64 },
    #[error("device {device} carries {bits} bits instead of the packet size")]
    WrongBits { device: usize, bits: f64 },
    #[error("device {device} is {state}")]
    BadOutcome { device: usize, state: &'static str },
}
