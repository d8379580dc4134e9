use crate::error::LinkError;
use crate::link::{min_rus, min_rus_exact};
use crate::scenario::Scenario;

/// Which link model turns reliability into an RU count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DemandModel {
    /// Closed-form threshold model.
    Threshold,
    /// Numerically integrated finite blocklength error.
    Exact,
}

/// `F(c, i)` for every device and channel of a scenario. Unreachable demands
/// are stored as `u32::MAX`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemandTable {
    rus: Vec<Vec<u32>>,
}

impl DemandTable {
    pub fn build(scenario: &Scenario, model: DemandModel) -> Result<Self, LinkError> {
        let p = &scenario.params;
        let rus = scenario
            .devices
            .iter()
            .map(|d| {
                scenario
                    .channels
                    .iter()
                    .map(|c| match model {
                        DemandModel::Threshold => Ok(min_rus(d.distance, c.interf, p)),
                        DemandModel::Exact => match min_rus_exact(d.distance, c.interf, p) {
                            Err(LinkError::Unreachable { .. }) => Ok(u32::MAX),
                            other => other,
                        },
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { rus })
    }

    /// Table from explicit values, indexed `[device][channel]`.
    pub fn from_rows(rus: Vec<Vec<u32>>) -> Self {
        Self { rus }
    }

    pub fn get(&self, device: usize, channel: usize) -> u32 {
        self.rus[device][channel]
    }

    pub fn device_count(&self) -> usize {
        self.rus.len()
    }
}
