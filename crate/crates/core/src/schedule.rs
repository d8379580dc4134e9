//! Per-cycle RU ownership and per-device outcomes.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::ScheduleViolation;
use crate::link::{decode_prob, snr_threshold};
use crate::scenario::{FadingMode, Scenario};
use crate::sic::pair_success_prob;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    /// The device is alone on the RU.
    Solo,
    /// Both members of a pair transmit on the RU.
    Shared,
    /// Only the farther member of a pair transmits on the RU.
    Exclusive,
}

impl Role {
    pub fn as_str(&self) -> &'static str {
        match self {
            Role::Solo => "solo",
            Role::Shared => "shared",
            Role::Exclusive => "exclusive",
        }
    }
}

/// One RU held by a device.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Assignment {
    pub channel: usize,
    /// Slot in `1..=T`.
    pub slot: u32,
    pub bits: f64,
    pub role: Role,
    /// The other member on a shared RU.
    pub partner: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SlotOwner {
    Free,
    Solo(usize),
    Shared { near: usize, far: usize },
    Exclusive(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pending,
    Served { completion_slot: u32, delay: u32 },
    Excluded,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Schedule {
    cycle_slots: u32,
    n_channels: usize,
    occupancy: Vec<SlotOwner>,
    assignments: Vec<Vec<Assignment>>,
    outcomes: Vec<Outcome>,
}

/// One line of the tabular schedule dump; shared RUs give one row per member.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScheduleRow {
    pub channel: usize,
    pub slot: u32,
    pub owner: usize,
    pub role: Role,
    pub bits: f64,
}

impl Schedule {
    pub fn new(n_devices: usize, n_channels: usize, cycle_slots: u32) -> Self {
        Self {
            cycle_slots,
            n_channels,
            occupancy: vec![SlotOwner::Free; n_channels * cycle_slots as usize],
            assignments: vec![Vec::new(); n_devices],
            outcomes: vec![Outcome::Pending; n_devices],
        }
    }

    pub fn cycle_slots(&self) -> u32 {
        self.cycle_slots
    }

    pub fn channel_count(&self) -> usize {
        self.n_channels
    }

    pub fn device_count(&self) -> usize {
        self.outcomes.len()
    }

    fn index(&self, channel: usize, slot: u32) -> usize {
        assert!(slot >= 1 && slot <= self.cycle_slots, "slot {slot} outside the cycle");
        channel * self.cycle_slots as usize + (slot - 1) as usize
    }

    pub fn owner(&self, channel: usize, slot: u32) -> SlotOwner {
        self.occupancy[self.index(channel, slot)]
    }

    pub fn is_free(&self, channel: usize, slot: u32) -> bool {
        self.owner(channel, slot) == SlotOwner::Free
    }

    fn claim(&mut self, channel: usize, slot: u32, owner: SlotOwner) {
        let idx = self.index(channel, slot);
        assert_eq!(self.occupancy[idx], SlotOwner::Free, "channel {channel} slot {slot} already taken");
        self.occupancy[idx] = owner;
    }

    pub fn assign_solo(&mut self, device: usize, channel: usize, slot: u32, bits: f64) {
        self.claim(channel, slot, SlotOwner::Solo(device));
        self.assignments[device].push(Assignment { channel, slot, bits, role: Role::Solo, partner: None });
    }

    pub fn assign_shared(&mut self, near: usize, far: usize, channel: usize, slot: u32, near_bits: f64, far_bits: f64) {
        self.claim(channel, slot, SlotOwner::Shared { near, far });
        self.assignments[near].push(Assignment {
            channel,
            slot,
            bits: near_bits,
            role: Role::Shared,
            partner: Some(far),
        });
        self.assignments[far].push(Assignment {
            channel,
            slot,
            bits: far_bits,
            role: Role::Shared,
            partner: Some(near),
        });
    }

    pub fn assign_exclusive(&mut self, device: usize, channel: usize, slot: u32, bits: f64) {
        self.claim(channel, slot, SlotOwner::Exclusive(device));
        self.assignments[device].push(Assignment { channel, slot, bits, role: Role::Exclusive, partner: None });
    }

    /// Marks `device` served; its delay is the largest cyclic offset of its
    /// RUs from `issue_time`, plus one.
    pub fn mark_served(&mut self, device: usize, issue_time: u32) {
        let t = self.cycle_slots;
        let (offset, slot) = self.assignments[device]
            .iter()
            .map(|a| ((a.slot + t - issue_time) % t, a.slot))
            .max()
            .expect("served device holds no RU");
        self.outcomes[device] = Outcome::Served { completion_slot: slot, delay: offset + 1 };
    }

    pub fn mark_excluded(&mut self, device: usize) {
        assert!(self.assignments[device].is_empty(), "excluded device {device} holds RUs");
        self.outcomes[device] = Outcome::Excluded;
    }

    pub fn outcome(&self, device: usize) -> Outcome {
        self.outcomes[device]
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn assignments(&self, device: usize) -> &[Assignment] {
        &self.assignments[device]
    }

    pub fn is_served(&self, device: usize) -> bool {
        matches!(self.outcomes[device], Outcome::Served { .. })
    }

    pub fn delay(&self, device: usize) -> Option<u32> {
        match self.outcomes[device] {
            Outcome::Served { delay, .. } => Some(delay),
            _ => None,
        }
    }

    pub fn served_count(&self) -> usize {
        (0..self.outcomes.len()).filter(|&d| self.is_served(d)).count()
    }

    pub fn used_rus(&self) -> usize {
        self.occupancy.iter().filter(|o| **o != SlotOwner::Free).count()
    }

    /// Rows ordered by (channel, slot, owner).
    pub fn rows(&self) -> Vec<ScheduleRow> {
        let mut rows: Vec<ScheduleRow> = self
            .assignments
            .iter()
            .enumerate()
            .flat_map(|(owner, list)| {
                list.iter().map(move |a| ScheduleRow {
                    channel: a.channel,
                    slot: a.slot,
                    owner,
                    role: a.role,
                    bits: a.bits,
                })
            })
            .collect();
        rows.sort_by_key(|r| (r.channel, r.slot, r.owner));
        rows
    }
}

/// Formula-level success probability of a device under `schedule`.
///
/// RUs on one channel see the same fading, so a channel succeeds with the
/// probability of its hardest RU; channels combine by product under
/// independent fading and by minimum under correlated fading. For a farther
/// pair member whose exclusive RUs carry no more bits than its shared ones,
/// the shared success event already implies the exclusive one.
pub fn analytic_success(schedule: &Schedule, scenario: &Scenario, device: usize) -> f64 {
    let p = &scenario.params;
    let dev = &scenario.devices[device];
    let mut per_channel: BTreeMap<usize, f64> = BTreeMap::new();
    for a in schedule.assignments(device) {
        let interf = scenario.channels[a.channel].interf;
        let prob = match (a.role, a.partner) {
            (Role::Shared, Some(other)) => {
                let other_bits = schedule
                    .assignments(other)
                    .iter()
                    .find(|b| b.channel == a.channel && b.slot == a.slot)
                    .map(|b| b.bits)
                    .expect("shared RU missing on partner");
                pair_success_prob(
                    snr_threshold(a.bits, p),
                    snr_threshold(other_bits, p),
                    dev.distance,
                    scenario.devices[other].distance,
                    interf,
                    p,
                )
            }
            _ => decode_prob(a.bits, dev.distance, interf, p),
        };
        let slot = per_channel.entry(a.channel).or_insert(1.0);
        *slot = slot.min(prob);
    }
    match scenario.fading {
        FadingMode::Independent => per_channel.values().product(),
        FadingMode::Correlated => per_channel.values().copied().fold(1.0, f64::min),
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CheckOptions {
    /// Every device must stay on one channel.
    pub single_channel: bool,
    /// Required analytic success; `None` skips the check.
    pub reliability: Option<f64>,
}

/// Checks the structural invariants of `schedule` and, optionally, that
/// every served device meets the reliability target.
pub fn check_schedule(schedule: &Schedule, scenario: &Scenario, opts: CheckOptions) -> Result<(), ScheduleViolation> {
    let t = schedule.cycle_slots();
    // Rebuild the occupancy from the per-device lists.
    let mut seen: BTreeMap<(usize, u32), Vec<(usize, Role)>> = BTreeMap::new();
    for d in 0..schedule.device_count() {
        for a in schedule.assignments(d) {
            seen.entry((a.channel, a.slot)).or_default().push((d, a.role));
        }
    }
    for (&(channel, slot), users) in &seen {
        let ok = match users.as_slice() {
            [(d, Role::Solo)] => schedule.owner(channel, slot) == SlotOwner::Solo(*d),
            [(d, Role::Exclusive)] => schedule.owner(channel, slot) == SlotOwner::Exclusive(*d),
            [(a, Role::Shared), (b, Role::Shared)] => match schedule.owner(channel, slot) {
                SlotOwner::Shared { near, far } => (near == *a && far == *b) || (near == *b && far == *a),
                _ => false,
            },
            _ => return Err(ScheduleViolation::DoubleBooked { channel, slot }),
        };
        if !ok {
            return Err(ScheduleViolation::Inconsistent { channel, slot });
        }
    }
    let owned = schedule.used_rus();
    if owned != seen.len() {
        let (channel, slot) = (0..schedule.channel_count())
            .flat_map(|c| (1..=t).map(move |s| (c, s)))
            .find(|&(c, s)| !schedule.is_free(c, s) && !seen.contains_key(&(c, s)))
            .unwrap();
        return Err(ScheduleViolation::Inconsistent { channel, slot });
    }

    for (d, dev) in scenario.devices.iter().enumerate() {
        let list = schedule.assignments(d);
        match schedule.outcome(d) {
            Outcome::Pending => return Err(ScheduleViolation::BadOutcome { device: d, state: "pending" }),
            Outcome::Excluded => {
                if !list.is_empty() {
                    return Err(ScheduleViolation::BadOutcome { device: d, state: "excluded but holds RUs" });
                }
                continue;
            }
            Outcome::Served { delay, .. } => {
                for a in list {
                    if (a.slot + t - dev.issue_time) % t >= dev.delay_bound {
                        return Err(ScheduleViolation::OutsideWindow { device: d, slot: a.slot });
                    }
                }
                if delay > dev.delay_bound {
                    return Err(ScheduleViolation::DelayExceeded { device: d, delay, bound: dev.delay_bound });
                }
            }
        }
        let bits: f64 = list.iter().map(|a| a.bits).sum();
        if (bits - scenario.params.packet_bits).abs() > 1e-6 {
            return Err(ScheduleViolation::WrongBits { device: d, bits });
        }
        if opts.single_channel {
            let mut channels: Vec<usize> = list.iter().map(|a| a.channel).collect();
            channels.sort_unstable();
            channels.dedup();
            if channels.len() > 1 {
                return Err(ScheduleViolation::MultiChannel { device: d, channels: channels.len() });
            }
        }
        if let Some(target) = opts.reliability {
            let prob = analytic_success(schedule, scenario, d);
            if prob < target {
                return Err(ScheduleViolation::Unreliable { device: d, prob, target });
            }
        }
    }
    Ok(())
}
