//! Bit allocation when the fading realisation is identical on every channel.
//!
//! A packet spread over several channels then fails as soon as the worst
//! channel fails, so the best split equalises the per-channel thresholds
//! `Lambda_c (2^(k_c / (r_c q)) - 1)`. Every share is a monotone function of
//! `k_1`, and `k_1` is found by bisection on the packet size constraint.

use crate::alloc::split::{round_split, ChannelGroup};
use crate::link::mean_snr;
use crate::params::SystemParams;

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatedSplit {
    /// Real-valued bits per channel group.
    pub bits: Vec<f64>,
    /// Common value of `Lambda_c (2^(k_c / (r_c q)) - 1)`.
    pub exponent: f64,
}

impl CorrelatedSplit {
    /// Packet success `exp(-exponent / (Gamma_T d^-alpha))`.
    pub fn success_prob(&self, distance: f64, params: &SystemParams) -> f64 {
        (-self.exponent / mean_snr(distance, 1.0, params)).exp()
    }

    /// Integer version of the split. Exponents are no longer equal after
    /// rounding; evaluate it with [`correlated_packet_prob`].
    pub fn rounded(&self, packet_bits: f64) -> Vec<f64> {
        round_split(&self.bits, packet_bits)
    }
}

fn channel_exponent(g: &ChannelGroup, bits: f64, q: f64) -> f64 {
    g.interf * ((bits / (g.rus as f64 * q)).exp2() - 1.0)
}

/// Success probability of the worst channel.
pub fn correlated_packet_prob(groups: &[ChannelGroup], bits: &[f64], distance: f64, params: &SystemParams) -> f64 {
    let q = params.symbols_per_ru();
    let worst =
        groups.iter().zip(bits).filter(|(g, _)| g.rus > 0).map(|(g, &k)| channel_exponent(g, k, q)).fold(0.0, f64::max);
    (-worst / mean_snr(distance, 1.0, params)).exp()
}

/// Share of channel `g` that yields the common exponent `e`.
fn share_for_exponent(g: &ChannelGroup, e: f64, q: f64) -> f64 {
    g.rus as f64 * q * (e / g.interf).ln_1p() / std::f64::consts::LN_2
}

/// Equal-exponent split for `packet_bits` over `groups`.
pub fn correlated_optimal_split(groups: &[ChannelGroup], packet_bits: f64, q: f64) -> CorrelatedSplit {
    assert!(!groups.is_empty() && groups.iter().any(|g| g.rus > 0));
    let first = groups.iter().position(|g| g.rus > 0).unwrap();
    let g1 = groups[first];
    if groups.iter().filter(|g| g.rus > 0).count() == 1 {
        let bits = groups.iter().map(|g| if g.rus > 0 { packet_bits } else { 0.0 }).collect();
        return CorrelatedSplit { bits, exponent: channel_exponent(&g1, packet_bits, q) };
    }
    let total_for = |k1: f64| -> (f64, f64) {
        let e = channel_exponent(&g1, k1, q);
        let sum = groups.iter().filter(|g| g.rus > 0).map(|g| share_for_exponent(g, e, q)).sum::<f64>();
        (sum, e)
    };

    // The total is increasing in k1, is 0 at k1 = 0 and at least l at k1 = l.
    let (mut lo, mut hi) = (0.0, packet_bits);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if total_for(mid).0 < packet_bits {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let k1 = 0.5 * (lo + hi);
    let (_, exponent) = total_for(k1);
    let bits = groups.iter().map(|g| if g.rus > 0 { share_for_exponent(g, exponent, q) } else { 0.0 }).collect();
    CorrelatedSplit { bits, exponent }
}
