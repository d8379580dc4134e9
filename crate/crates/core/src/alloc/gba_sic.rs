//! Graph-based allocation over equivalent devices: matched pairs share RUs
//! through successive interference cancellation, everyone else is scheduled
//! alone.

use crate::alloc::demand::DemandTable;
use crate::alloc::gba::{run_gba, ChannelTask, GbaRun, GbaTask, Placement};
use crate::alloc::timeline::cycle_slot;
use crate::scenario::Scenario;
use crate::schedule::Schedule;
use crate::sic::{build_pairing, ChannelWindow, EquivalentDevice, Members, PairingContext, PairingPlan};

fn task_for(eq: &EquivalentDevice, delta: u32) -> GbaTask {
    GbaTask {
        per_channel: eq
            .windows
            .iter()
            .map(|w| {
                let demand = w.demand();
                (demand <= w.delay).then_some(ChannelTask { issue: w.issue, delay: w.delay, demand })
            })
            .collect(),
        weight_delay: delta,
    }
}

/// Splits a pair's allocated times into `(time, shared)` roles: exclusive
/// RUs that fall before the nearer member's issue time come first, then the
/// shared block, then the remaining exclusive RUs.
pub fn pair_roles(window: &ChannelWindow, times: &[i64]) -> Vec<(i64, bool)> {
    let early = times.iter().filter(|&&s| s < window.near_issue).count().min(window.exclusive as usize);
    times.iter().enumerate().map(|(k, &s)| (s, k >= early && k < early + window.shared as usize)).collect()
}

#[derive(Debug, Clone)]
pub struct SicTrace {
    pub plan: PairingPlan,
    pub run: GbaRun,
}

pub fn gba_sic(scenario: &Scenario, demands: &DemandTable) -> Schedule {
    gba_sic_trace(scenario, demands).0
}

/// [`gba_sic`] with the pairing plan and phase record.
pub fn gba_sic_trace(scenario: &Scenario, demands: &DemandTable) -> (Schedule, SicTrace) {
    let p = &scenario.params;
    let t = p.cycle_slots;
    let plan = build_pairing(&PairingContext::new(scenario, demands));
    let tasks: Vec<GbaTask> = plan.devices.iter().map(|eq| task_for(eq, p.delay_slots)).collect();
    let run = run_gba(&tasks, scenario.channels.len(), t);

    let mut schedule = Schedule::new(scenario.devices.len(), scenario.channels.len(), t);
    for (eq, placement) in plan.devices.iter().zip(&run.placements) {
        match (eq.members, placement) {
            (Members::Single(i), Some(Placement { channel, times })) => {
                let bits = p.packet_bits / times.len() as f64;
                for &s in times {
                    schedule.assign_solo(i, *channel, cycle_slot(s, t), bits);
                }
                schedule.mark_served(i, scenario.devices[i].issue_time);
            }
            (Members::Pair { near, far }, Some(Placement { channel, times })) => {
                let w = eq.windows[*channel];
                let near_bits = p.packet_bits / w.shared as f64;
                let far_bits = p.packet_bits / w.demand() as f64;
                for (s, shared) in pair_roles(&w, times) {
                    if shared {
                        schedule.assign_shared(near, far, *channel, cycle_slot(s, t), near_bits, far_bits);
                    } else {
                        schedule.assign_exclusive(far, *channel, cycle_slot(s, t), far_bits);
                    }
                }
                schedule.mark_served(near, scenario.devices[near].issue_time);
                schedule.mark_served(far, scenario.devices[far].issue_time);
            }
            (Members::Single(i), None) => schedule.mark_excluded(i),
            (Members::Pair { near, far }, None) => {
                schedule.mark_excluded(near);
                schedule.mark_excluded(far);
            }
        }
    }
    (schedule, SicTrace { plan, run })
}
