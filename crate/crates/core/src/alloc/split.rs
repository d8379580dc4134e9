//! Bit allocation across channels when a packet spans several channels with
//! independent fading.
//!
//! With `r_c` RUs on channel `c`, the packet success probability is the
//! product of the per-channel terms, so maximising it means minimising
//! `sum_c Lambda_c (2^(k_c / (r_c q)) - 1)` subject to `sum_c k_c = l`. The
//! stationary point has a closed form; channels that end up with a negative
//! share are dropped one at a time and their (negative) share is spread over
//! the survivors in proportion to their RU counts.

use crate::link::decode_prob;
use crate::params::SystemParams;

/// RUs a device holds on one channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelGroup {
    pub rus: u32,
    pub interf: f64,
}

/// Unconstrained stationary point over all groups (may contain negative
/// entries).
pub fn stationary_split(groups: &[ChannelGroup], packet_bits: f64, q: f64) -> Vec<f64> {
    let total: f64 = groups.iter().map(|g| g.rus as f64).sum();
    assert!(total >= 1.0, "at least one RU is required");
    let mean_log = groups.iter().map(|g| g.rus as f64 * (g.rus as f64 / g.interf).log2()).sum::<f64>() / total;
    groups
        .iter()
        .map(|g| {
            let r = g.rus as f64;
            r * (packet_bits / total + q * ((r / g.interf).log2() - mean_log))
        })
        .collect()
}

/// Real-valued optimal split; channels that would receive a negative share get
/// exactly zero.
pub fn optimal_split_real(groups: &[ChannelGroup], packet_bits: f64, q: f64) -> Vec<f64> {
    let mut bits = stationary_split(groups, packet_bits, q);
    let mut active: Vec<bool> = groups.iter().map(|g| g.rus > 0).collect();
    let mut remaining: f64 = groups.iter().map(|g| g.rus as f64).sum();
    loop {
        let worst =
            (0..bits.len()).filter(|&c| active[c] && bits[c] < 0.0).min_by(|&a, &b| bits[a].total_cmp(&bits[b]));
        let Some(c) = worst else { break };
        let removed = bits[c];
        let r_removed = groups[c].rus as f64;
        active[c] = false;
        bits[c] = 0.0;
        remaining -= r_removed;
        for j in 0..bits.len() {
            if active[j] {
                bits[j] += groups[j].rus as f64 / remaining * removed;
            }
        }
    }
    bits
}

/// Rounds a split to integers keeping the total: floors everything, then hands
/// the leftover bits to the largest fractional parts (lower index first on
/// ties).
pub fn round_split(real: &[f64], packet_bits: f64) -> Vec<f64> {
    let total = packet_bits.round();
    let mut out: Vec<f64> = real.iter().map(|k| k.max(0.0).floor()).collect();
    let mut leftover = (total - out.iter().sum::<f64>()).round() as i64;
    let mut order: Vec<usize> = (0..real.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = real[a].max(0.0) - real[a].max(0.0).floor();
        let fb = real[b].max(0.0) - real[b].max(0.0).floor();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    let mut i = 0;
    while leftover > 0 {
        out[order[i % order.len()]] += 1.0;
        leftover -= 1;
        i += 1;
    }
    // Only reachable if rounding pushed the floors above the total.
    while leftover < 0 {
        let c = (0..out.len()).rev().max_by(|&a, &b| out[a].total_cmp(&out[b])).unwrap();
        out[c] -= 1.0;
        leftover += 1;
    }
    out
}

/// Integer optimal split used by the frequency-spanning allocator.
pub fn optimal_bit_split(groups: &[ChannelGroup], packet_bits: f64, q: f64) -> Vec<f64> {
    round_split(&optimal_split_real(groups, packet_bits, q), packet_bits)
}

/// Packet success with independent fading across channels: product of the
/// per-channel success terms.
pub fn independent_packet_prob(groups: &[ChannelGroup], bits: &[f64], distance: f64, params: &SystemParams) -> f64 {
    groups
        .iter()
        .zip(bits)
        .filter(|(g, _)| g.rus > 0)
        .map(|(g, &k)| decode_prob(k / g.rus as f64, distance, g.interf, params))
        .product()
}
