//! Graph-based allocation: repeated maximum-weight matching between channels
//! and the devices still waiting for RUs.
//!
//! Each phase builds a bipartite graph whose edge `(c, i)` exists when device
//! `i` still fits on channel `c` behind the channel's last busy slot, weighted
//! by the slots left on `c` afterwards. The matched devices are committed,
//! devices without any edge are dropped, and the loop repeats.

use crate::alloc::demand::DemandTable;
use crate::alloc::timeline::{cycle_slot, ChannelState};
use crate::matching::{max_weight_bipartite_matching, WeightedBipartiteGraph, WeightedEdge};
use crate::scenario::Scenario;
use crate::schedule::Schedule;

/// What a task needs on one channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChannelTask {
    /// Earliest slot, in `1..=T`.
    pub issue: u32,
    /// Window length; every RU must lie before `issue + delay`.
    pub delay: u32,
    pub demand: u32,
}

/// A schedulable entity: a device, or a pair of devices sharing RUs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GbaTask {
    /// `None` where the task cannot use the channel at all.
    pub per_channel: Vec<Option<ChannelTask>>,
    /// Offset `Delta` in the edge weight.
    pub weight_delay: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placement {
    pub channel: usize,
    /// Linear times in increasing order.
    pub times: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GbaRun {
    /// Per task; `None` for excluded tasks.
    pub placements: Vec<Option<Placement>>,
    /// Matched `(channel, task)` pairs of every phase, sorted by channel.
    pub phases: Vec<Vec<(usize, usize)>>,
}

/// Candidate placement of `task` on a channel in its current state, with the
/// edge weight.
pub fn edge(task: &GbaTask, channel: usize, state: &ChannelState) -> Option<(i64, Vec<i64>)> {
    let ct = task.per_channel[channel]?;
    let base = state.last_busy().max(ct.issue as i64 - 1);
    let times = state.find_slots(base + 1, ct.demand, ct.issue as i64 + ct.delay as i64)?;
    let weight = state.cycle() as i64 + task.weight_delay as i64 - (base + ct.demand as i64);
    debug_assert!(weight >= 1, "non-positive weight {weight}");
    Some((weight, times))
}

/// Runs the phase loop with the exact Hungarian solver.
pub fn run_gba(tasks: &[GbaTask], n_channels: usize, cycle: u32) -> GbaRun {
    run_gba_with(tasks, n_channels, cycle, max_weight_bipartite_matching)
}

/// Phase loop with a caller supplied matching solver.
pub fn run_gba_with<M>(tasks: &[GbaTask], n_channels: usize, cycle: u32, matcher: M) -> GbaRun
where
    M: Fn(&WeightedBipartiteGraph) -> Vec<WeightedEdge>,
{
    let mut states = vec![ChannelState::new(cycle); n_channels];
    let mut placements: Vec<Option<Placement>> = vec![None; tasks.len()];
    let mut phases = Vec::new();
    let mut remaining: Vec<usize> = (0..tasks.len()).collect();

    while !remaining.is_empty() {
        let mut graph = WeightedBipartiteGraph::new(n_channels, remaining.len());
        let mut candidates = vec![Vec::new(); remaining.len()];
        let mut degree = vec![0usize; remaining.len()];
        for (r, &task) in remaining.iter().enumerate() {
            for (c, state) in states.iter().enumerate() {
                if let Some((w, times)) = edge(&tasks[task], c, state) {
                    graph.add_edge(c, r, w);
                    candidates[r].push((c, times));
                    degree[r] += 1;
                }
            }
        }
        if degree.iter().all(|&d| d == 0) {
            break;
        }
        let matched = matcher(&graph);
        assert!(!matched.is_empty(), "matching is empty although edges exist");
        let mut phase = Vec::with_capacity(matched.len());
        let mut done = vec![false; remaining.len()];
        for e in &matched {
            let task = remaining[e.right];
            let times = candidates[e.right]
                .iter()
                .find(|(c, _)| *c == e.left)
                .map(|(_, t)| t.clone())
                .expect("matched a non-edge");
            states[e.left].occupy(&times);
            placements[task] = Some(Placement { channel: e.left, times });
            phase.push((e.left, task));
            done[e.right] = true;
        }
        phase.sort_unstable();
        phases.push(phase);
        // Drop matched tasks and tasks with no edge; the latter can only lose
        // edges as channels fill up.
        remaining = remaining.iter().enumerate().filter(|&(r, _)| !done[r] && degree[r] > 0).map(|(_, &t)| t).collect();
    }
    GbaRun { placements, phases }
}

/// One task per device, each with its own issue time and delay on every channel.
pub fn device_tasks(scenario: &Scenario, demands: &DemandTable) -> Vec<GbaTask> {
    scenario
        .devices
        .iter()
        .map(|d| GbaTask {
            per_channel: (0..scenario.channels.len())
                .map(|c| {
                    let demand = demands.get(d.id, c);
                    (demand <= d.delay_bound).then_some(ChannelTask {
                        issue: d.issue_time,
                        delay: d.delay_bound,
                        demand,
                    })
                })
                .collect(),
            weight_delay: d.delay_bound,
        })
        .collect()
}

/// Graph-based allocation over single devices.
pub fn gba(scenario: &Scenario, demands: &DemandTable) -> Schedule {
    gba_trace(scenario, demands).0
}

/// [`gba`] together with the phase record.
pub fn gba_trace(scenario: &Scenario, demands: &DemandTable) -> (Schedule, GbaRun) {
    let p = &scenario.params;
    let run = run_gba(&device_tasks(scenario, demands), scenario.channels.len(), p.cycle_slots);
    let mut schedule = Schedule::new(scenario.devices.len(), scenario.channels.len(), p.cycle_slots);
    for (i, placement) in run.placements.iter().enumerate() {
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
    (schedule, run)
}
