//! Allocators turning a [`Scenario`](crate::scenario::Scenario) into a
//! [`Schedule`](crate::schedule::Schedule).

pub mod bca;
pub mod demand;
pub mod fsa;
pub mod gba;
pub mod gba_sic;
pub mod split;
pub mod timeline;

pub use bca::bca;
pub use demand::{DemandModel, DemandTable};
pub use fsa::fsa;
pub use gba::gba;
pub use gba_sic::gba_sic;
