//! Best channel allocation: devices in issue order, each placed on the channel
//! where its transmission would complete first.

use crate::alloc::demand::DemandTable;
use crate::alloc::gba::Placement;
use crate::alloc::timeline::{cycle_slot, ChannelState};
use crate::scenario::Scenario;
use crate::schedule::Schedule;

/// A device as seen by the sequential allocator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BcaTask {
    pub issue: u32,
    pub delay: u32,
    /// RUs needed on every channel.
    pub demands: Vec<u32>,
}

/// Channel and times the task would get, given the current channel states.
/// Ties on completion go to the lowest channel id.
pub fn best_channel(task: &BcaTask, states: &[ChannelState]) -> Option<Placement> {
    let deadline = task.issue as i64 + task.delay as i64;
    let mut best: Option<Placement> = None;
    for (c, state) in states.iter().enumerate() {
        let demand = task.demands[c];
        if demand > task.delay {
            continue;
        }
        let start = (task.issue as i64).max(state.last_busy() + 1);
        let Some(times) = state.find_slots(start, demand, deadline) else { continue };
        let finish = times.last().copied().unwrap_or(start - 1);
        let better = match &best {
            None => true,
            Some(b) => finish < b.times.last().copied().unwrap_or(i64::MIN),
        };
        if better {
            best = Some(Placement { channel: c, times });
        }
    }
    best
}

/// Places `tasks` in the given order on top of `states`.
pub fn run_bca(tasks: &[BcaTask], states: &mut [ChannelState]) -> Vec<Option<Placement>> {
    tasks
        .iter()
        .map(|task| {
            let placement = best_channel(task, states)?;
            states[placement.channel].occupy(&placement.times);
            Some(placement)
        })
        .collect()
}

/// Device indices by `(issue time, id)`.
pub fn issue_order(scenario: &Scenario) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scenario.devices.len()).collect();
    order.sort_by_key(|&i| (scenario.devices[i].issue_time, i));
    order
}

pub fn bca(scenario: &Scenario, demands: &DemandTable) -> Schedule {
    let p = &scenario.params;
    let order = issue_order(scenario);
    let tasks: Vec<BcaTask> = order
        .iter()
        .map(|&i| {
            let d = &scenario.devices[i];
            BcaTask {
                issue: d.issue_time,
                delay: d.delay_bound,
                demands: (0..scenario.channels.len()).map(|c| demands.get(i, c)).collect(),
            }
        })
        .collect();
    let mut states = vec![ChannelState::new(p.cycle_slots); scenario.channels.len()];
    let placed = run_bca(&tasks, &mut states);
    let mut schedule = Schedule::new(scenario.devices.len(), scenario.channels.len(), p.cycle_slots);
    for (&i, placement) in order.iter().zip(placed) {
        match placement {
            Some(pl) => {
                let bits = p.packet_bits / pl.times.len() as f64;
                for &s in &pl.times {
                    schedule.assign_solo(i, pl.channel, cycle_slot(s, p.cycle_slots), bits);
                }
                schedule.mark_served(i, scenario.devices[i].issue_time);
            }
            None => schedule.mark_excluded(i),
        }
    }
    schedule
}
