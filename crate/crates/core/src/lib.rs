//! Uplink resource allocation for periodic short-packet traffic.
//!
//! The crate covers the link model ([`link`]), two-user sharing with
//! successive interference cancellation ([`sic`]), exact matching solvers
//! ([`matching`]), the allocators ([`alloc`]) and an experiment harness
//! ([`experiment`], [`metrics`], [`reliability`]).

pub mod alloc;
pub mod correlated;
pub mod error;
pub mod experiment;
pub mod format;
pub mod link;
pub mod matching;
pub mod metrics;
pub mod params;
pub mod quadrature;
pub mod reliability;
pub mod scenario;
pub mod schedule;
pub mod sic;

pub use error::{LinkError, PairError, ParamError, QuadratureError, SimError};
pub use params::{ParamsConfig, SystemParams};
pub use scenario::{generate_scenario, Channel, Device, FadingMode, Scenario};
