//! Summary statistics of one schedule.

use serde::Serialize;

use crate::scenario::Scenario;
use crate::schedule::Schedule;

/// Radial bins used for the fairness index and the distance profile.
pub const DISTANCE_BINS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub fraction_served: f64,
    /// Mean delay over served devices, in slots.
    pub mean_delay: f64,
    /// Largest delay over served devices, in slots.
    pub max_delay: u32,
    /// Mean delay plus half a cycle.
    pub mean_aoi: f64,
    /// Jain index over the per-bin served fractions.
    pub jain_bin: f64,
    /// Jain index over per-device 0/1 service.
    pub jain_dev: f64,
    /// Served fraction per radial bin, `None` for empty bins.
    pub distance_profile: Vec<Option<f64>>,
    pub runtime_s: f64,
}

/// `(sum x)^2 / (n sum x^2)`; 1 for an all-zero vector.
pub fn jain_index(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 1.0;
    }
    let sum: f64 = values.iter().sum();
    let sq: f64 = values.iter().map(|x| x * x).sum();
    if sq == 0.0 {
        return 1.0;
    }
    // Rounding can push a constant vector a hair above 1.
    (sum * sum / (values.len() as f64 * sq)).min(1.0)
}

/// Bin of `distance` among [`DISTANCE_BINS`] equal-width rings of `[0, radius]`.
pub fn distance_bin(distance: f64, radius: f64) -> usize {
    ((distance / radius * DISTANCE_BINS as f64) as usize).min(DISTANCE_BINS - 1)
}

pub fn distance_profile(schedule: &Schedule, scenario: &Scenario) -> Vec<Option<f64>> {
    let mut served = [0usize; DISTANCE_BINS];
    let mut total = [0usize; DISTANCE_BINS];
    for d in &scenario.devices {
        let b = distance_bin(d.distance, scenario.params.area_radius);
        total[b] += 1;
        served[b] += schedule.is_served(d.id) as usize;
    }
    (0..DISTANCE_BINS).map(|b| (total[b] > 0).then(|| served[b] as f64 / total[b] as f64)).collect()
}

/// Jain index of the seed-averaged distance profile: each bin's served
/// fraction is averaged over the runs where the bin is not empty.
pub fn profile_jain(profiles: &[Vec<Option<f64>>]) -> f64 {
    let mean: Vec<f64> = (0..DISTANCE_BINS)
        .filter_map(|b| {
            let xs: Vec<f64> = profiles.iter().filter_map(|p| p.get(b).copied().flatten()).collect();
            (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
        })
        .collect();
    jain_index(&mean)
}

pub fn compute_metrics(schedule: &Schedule, scenario: &Scenario, runtime_s: f64) -> MetricsReport {
    let n = scenario.devices.len();
    let delays: Vec<u32> = (0..n).filter_map(|d| schedule.delay(d)).collect();
    let served = delays.len();
    let mean_delay = if served > 0 { delays.iter().map(|&d| d as f64).sum::<f64>() / served as f64 } else { 0.0 };
    let profile = distance_profile(schedule, scenario);
    let bins: Vec<f64> = profile.iter().flatten().copied().collect();
    let per_device: Vec<f64> = (0..n).map(|d| schedule.is_served(d) as u8 as f64).collect();
    MetricsReport {
        fraction_served: served as f64 / n as f64,
        mean_delay,
        max_delay: delays.iter().copied().max().unwrap_or(0),
        mean_aoi: mean_delay + scenario.params.cycle_slots as f64 / 2.0,
        jain_bin: jain_index(&bins),
        jain_dev: jain_index(&per_device),
        distance_profile: profile,
        runtime_s,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::SystemParams;
    use crate::scenario::{Channel, Device};

    #[test]
    fn jain_bounds() {
        assert_eq!(jain_index(&[0.7; 5]), 1.0);
        assert!((jain_index(&[1.0, 0.0, 0.0, 0.0]) - 0.25).abs() < 1e-15);
        assert_eq!(jain_index(&[0.0, 0.0]), 1.0);
    }

    #[test]
    fn averaged_profile_index() {
        let a = vec![Some(1.0), Some(0.0), None];
        let b = vec![Some(1.0), Some(1.0), None];
        // Means (1.0, 0.5) over the two non-empty bins.
        let expect = 1.5 * 1.5 / (2.0 * 1.25);
        assert!((profile_jain(&[a, b]) - expect).abs() < 1e-15);
    }

    #[test]
    fn bins_cover_radius() {
        assert_eq!(distance_bin(0.1, 50.0), 0);
        assert_eq!(distance_bin(4.99, 50.0), 0);
        assert_eq!(distance_bin(5.0, 50.0), 1);
        assert_eq!(distance_bin(50.0, 50.0), 9);
    }

    #[test]
    fn uniform_delay_report() {
        let p = SystemParams::default();
        let devices: Vec<Device> = (0..3)
            .map(|id| Device { id, distance: 10.0 + 15.0 * id as f64, issue_time: 1 + 10 * id as u32, delay_bound: 35 })
            .collect();
        let sc = Scenario::new(p, devices, vec![Channel { id: 0, interf: 1.0 }]).unwrap();
        let mut s = Schedule::new(3, 1, 70);
        for d in 0..3 {
            let t = sc.devices[d].issue_time;
            s.assign_solo(d, 0, t + 1, 100.0);
            s.mark_served(d, t);
        }
        let m = compute_metrics(&s, &sc, 0.0);
        assert_eq!(m.fraction_served, 1.0);
        assert_eq!((m.mean_delay, m.max_delay), (2.0, 2));
        assert_eq!(m.mean_aoi, 2.0 + 35.0);
        assert_eq!((m.jain_bin, m.jain_dev), (1.0, 1.0));
        assert_eq!(m.distance_profile.iter().flatten().count(), 3);
    }
}
