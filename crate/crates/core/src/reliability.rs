//! Monte Carlo check of a schedule: simulate many cycles with fresh fading
//! and count per-device packet successes.

use rand::Rng;
use rand_distr::Exp1;
use serde::Serialize;

use crate::link::{mean_snr, snr_threshold};
use crate::scenario::{rng_for, stream, FadingMode, Scenario};
use crate::schedule::{analytic_success, Role, Schedule};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviceReliability {
    pub device: usize,
    pub analytic: f64,
    pub empirical: f64,
    /// Binomial standard deviation of the empirical rate around `analytic`.
    pub sigma: f64,
    /// `empirical >= analytic - 3 sigma`.
    pub ok: bool,
}

/// One RU as the simulator needs it.
#[derive(Debug, Clone, Copy)]
struct Ru {
    channel: usize,
    threshold: f64,
    /// Partner device and its threshold on a shared RU.
    partner: Option<(usize, f64)>,
}

/// Successive decoding of `own` against `other` on one RU.
pub fn sic_decodes(own_snr: f64, other_snr: f64, theta_own: f64, theta_other: f64) -> bool {
    own_snr >= theta_own * (1.0 + other_snr) || (other_snr >= theta_other * (1.0 + own_snr) && own_snr >= theta_own)
}

/// Simulates `trials` cycles. Fading is `Exp(1)` per device and channel,
/// constant over the cycle (one draw per device for correlated fading).
/// Only served devices are reported.
pub fn validate_reliability(
    schedule: &Schedule,
    scenario: &Scenario,
    trials: u64,
    seed: u64,
) -> Vec<DeviceReliability> {
    let p = &scenario.params;
    let n = scenario.devices.len();
    let c = scenario.channels.len();
    let served: Vec<usize> = (0..n).filter(|&d| schedule.is_served(d)).collect();
    let rus: Vec<Vec<Ru>> = (0..n)
        .map(|d| {
            schedule
                .assignments(d)
                .iter()
                .map(|a| Ru {
                    channel: a.channel,
                    threshold: snr_threshold(a.bits, p),
                    partner: match (a.role, a.partner) {
                        (Role::Shared, Some(o)) => {
                            let bits = schedule
                                .assignments(o)
                                .iter()
                                .find(|b| b.channel == a.channel && b.slot == a.slot)
                                .map(|b| b.bits)
                                .expect("shared RU missing on partner");
                            Some((o, snr_threshold(bits, p)))
                        }
                        _ => None,
                    },
                })
                .collect()
        })
        .collect();
    let mean: Vec<Vec<f64>> = scenario
        .devices
        .iter()
        .map(|d| scenario.channels.iter().map(|ch| mean_snr(d.distance, ch.interf, p)).collect())
        .collect();

    let mut rng = rng_for(seed, stream::FADING);
    let mut fading = vec![0.0f64; n * c];
    let mut wins = vec![0u64; n];
    for _ in 0..trials {
        for d in 0..n {
            match scenario.fading {
                FadingMode::Independent => {
                    for k in 0..c {
                        fading[d * c + k] = rng.sample(Exp1);
                    }
                }
                FadingMode::Correlated => {
                    let x: f64 = rng.sample(Exp1);
                    fading[d * c..(d + 1) * c].fill(x);
                }
            }
        }
        for &d in &served {
            let ok = rus[d].iter().all(|ru| {
                let own = mean[d][ru.channel] * fading[d * c + ru.channel];
                match ru.partner {
                    None => own >= ru.threshold,
                    Some((o, theta_o)) => {
                        let other = mean[o][ru.channel] * fading[o * c + ru.channel];
                        sic_decodes(own, other, ru.threshold, theta_o)
                    }
                }
            });
            wins[d] += ok as u64;
        }
    }

    served
        .into_iter()
        .map(|d| {
            let analytic = analytic_success(schedule, scenario, d);
            let empirical = wins[d] as f64 / trials as f64;
            let sigma = (analytic * (1.0 - analytic) / trials as f64).sqrt();
            DeviceReliability { device: d, analytic, empirical, sigma, ok: empirical >= analytic - 3.0 * sigma }
        })
        .collect()
}
