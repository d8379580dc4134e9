//! Frequency spanning allocation: each device, in issue order, takes the
//! earliest free RUs of its window on any channel until the packet, split
//! optimally over the held RUs, is reliable enough.

use crate::alloc::bca::issue_order;
use crate::alloc::split::{independent_packet_prob, optimal_bit_split, ChannelGroup};
use crate::alloc::timeline::cycle_slot;
use crate::correlated::{correlated_optimal_split, correlated_packet_prob};
use crate::scenario::{FadingMode, Scenario};
use crate::schedule::Schedule;

/// Bits per held channel and the resulting packet success.
fn evaluate(scenario: &Scenario, distance: f64, groups: &[ChannelGroup]) -> (Vec<f64>, f64) {
    let p = &scenario.params;
    let q = p.symbols_per_ru();
    match scenario.fading {
        FadingMode::Independent => {
            let bits = optimal_bit_split(groups, p.packet_bits, q);
            let prob = independent_packet_prob(groups, &bits, distance, p);
            (bits, prob)
        }
        FadingMode::Correlated => {
            let bits = correlated_optimal_split(groups, p.packet_bits, q).bits;
            let prob = correlated_packet_prob(groups, &bits, distance, p);
            (bits, prob)
        }
    }
}

/// Channel indices by `(interference, id)`.
pub fn channel_order(scenario: &Scenario) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scenario.channels.len()).collect();
    order.sort_by(|&a, &b| scenario.channels[a].interf.total_cmp(&scenario.channels[b].interf).then(a.cmp(&b)));
    order
}

/// Allocation with the bit split matching `scenario.fading`.
pub fn fsa(scenario: &Scenario) -> Schedule {
    let p = &scenario.params;
    let t = p.cycle_slots;
    let channels = channel_order(scenario);
    let mut schedule = Schedule::new(scenario.devices.len(), scenario.channels.len(), t);

    for i in issue_order(scenario) {
        let dev = &scenario.devices[i];
        // Free RUs of the window, earliest first, cleaner channel first.
        let candidates: Vec<(usize, u32)> = (dev.issue_time..dev.issue_time + dev.delay_bound)
            .flat_map(|s| channels.iter().map(move |&c| (c, cycle_slot(s as i64, t))))
            .filter(|&(c, slot)| schedule.is_free(c, slot))
            .collect();

        let mut held: Vec<(usize, u32)> = Vec::new();
        let mut used: Vec<usize> = Vec::new();
        let mut counts = vec![0u32; scenario.channels.len()];
        let mut accepted = None;
        for &(c, slot) in &candidates {
            held.push((c, slot));
            if counts[c] == 0 {
                used.push(c);
            }
            counts[c] += 1;
            let groups: Vec<ChannelGroup> =
                used.iter().map(|&c| ChannelGroup { rus: counts[c], interf: scenario.channels[c].interf }).collect();
            let (bits, prob) = evaluate(scenario, dev.distance, &groups);
            if prob > p.reliability {
                accepted = Some(bits);
                break;
            }
        }

        match accepted {
            Some(bits) => {
                for (&c, &k) in used.iter().zip(&bits) {
                    // A channel left without bits keeps its RUs free.
                    if k <= 0.0 {
                        continue;
                    }
                    let per_ru = k / counts[c] as f64;
                    for &(hc, slot) in &held {
                        if hc == c {
                            schedule.assign_solo(i, c, slot, per_ru);
                        }
                    }
                }
                schedule.mark_served(i, dev.issue_time);
            }
            None => schedule.mark_excluded(i),
        }
    }
    schedule
}
