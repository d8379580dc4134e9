//! Two-user sharing with successive interference cancellation.
//!
//! Two devices transmit on the same RUs. The receiver decodes whichever
//! signal it can while treating the other as interference, cancels it and
//! retries the remaining one cleanly. For a device with threshold `theta_i`
//! sharing with `theta_j`, the per-RU success probability has a closed form
//! ([`pair_success_prob`]); the pair's RU demand is then found by the
//! iterative search in [`shared_demand`].

use serde::Serialize;

use crate::alloc::demand::DemandTable;
use crate::error::PairError;
use crate::link::{mean_snr, snr_threshold};
use crate::matching::{max_cardinality_matching, GeneralGraph};
use crate::params::SystemParams;
use crate::scenario::{Device, Scenario};

/// Success probability of the "own" user when both users share an RU.
///
/// `rate_own` and `rate_other` are the inverse mean SNRs
/// (`Lambda d^alpha / Gamma_T`) so that `SNR ~ Exp(rate)`.
pub fn pair_success_rates(theta_own: f64, theta_other: f64, rate_own: f64, rate_other: f64) -> f64 {
    let (ti, tj, l, m) = (theta_own, theta_other, rate_own, rate_other);
    debug_assert!(ti >= 0.0 && tj >= 0.0 && l > 0.0 && m > 0.0);
    // Other user decoded first, own user then decoded without interference.
    let other_first = l / (l + m * tj) * (-l * ti - m * tj * (1.0 + ti)).exp();
    let own_direct = m / (l * ti + m);
    let p = if ti * tj < 1.0 {
        let gap = 1.0 - ti * tj;
        let s = tj * (1.0 + ti) / gap;
        // Exponents are combined before exponentiation.
        let direct = own_direct * ((-l * ti).exp() - (-l * ti - (l * ti + m) * s).exp());
        let tail = m * tj / (m * tj + l) * (l - (m * tj + l) * (1.0 + ti) / gap).exp();
        other_first + direct + tail
    } else {
        other_first + own_direct * (-l * ti).exp()
    };
    p.clamp(0.0, 1.0)
}

/// [`pair_success_rates`] in terms of distances and the channel factor.
pub fn pair_success_prob(
    theta_own: f64,
    theta_other: f64,
    distance_own: f64,
    distance_other: f64,
    interf: f64,
    params: &SystemParams,
) -> f64 {
    pair_success_rates(
        theta_own,
        theta_other,
        1.0 / mean_snr(distance_own, interf, params),
        1.0 / mean_snr(distance_other, interf, params),
    )
}

/// RUs a pair needs on one channel: `shared` carry both users, `exclusive`
/// carry only the farther one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PairResource {
    pub channel: usize,
    pub shared: u32,
    pub exclusive: u32,
}

impl PairResource {
    pub fn total(&self) -> u32 {
        self.shared + self.exclusive
    }
}

/// Orders two devices as `(nearer, farther)`; equal distances put the lower
/// id first.
pub fn order_pair<'a>(a: &'a Device, b: &'a Device) -> (&'a Device, &'a Device) {
    match a.distance.total_cmp(&b.distance).then(a.id.cmp(&b.id)) {
        std::cmp::Ordering::Greater => (b, a),
        _ => (a, b),
    }
}

/// Everything pair evaluation needs about a deployment.
#[derive(Debug, Clone, Copy)]
pub struct PairingContext<'a> {
    pub scenario: &'a Scenario,
    pub demands: &'a DemandTable,
}

impl<'a> PairingContext<'a> {
    pub fn new(scenario: &'a Scenario, demands: &'a DemandTable) -> Self {
        Self { scenario, demands }
    }

    fn params(&self) -> &SystemParams {
        &self.scenario.params
    }
}

/// Iterative search for `(N_c, K_c)`.
///
/// Starts from the solo demands, grows the shared part until the nearer user
/// is reliable, then grows the exclusive part until the farther one is.
pub fn shared_demand(ctx: &PairingContext<'_>, channel: usize, i: usize, j: usize) -> Result<PairResource, PairError> {
    if i == j {
        return Err(PairError::SameDevice);
    }
    let s = ctx.scenario;
    let p = ctx.params();
    let (near, far) = order_pair(&s.devices[i], &s.devices[j]);
    let interf = s.channels[channel].interf;
    let limit = p.delay_slots;
    let rho = p.reliability;
    let bits = p.packet_bits;
    let too_long = Err(PairError::ExceedsDelay { channel, delay: limit });

    let mut rx = ctx.demands.get(near.id, channel);
    let mut r = ctx.demands.get(far.id, channel).max(rx);
    if r > limit {
        return too_long;
    }
    let thresholds = |rx: u32, r: u32| (snr_threshold(bits / rx as f64, p), snr_threshold(bits / r as f64, p));
    let psi_near = |rx: u32, r: u32| {
        let (ti, tj) = thresholds(rx, r);
        pair_success_prob(ti, tj, near.distance, far.distance, interf, p)
    };
    let psi_far = |rx: u32, r: u32| {
        let (ti, tj) = thresholds(rx, r);
        pair_success_prob(tj, ti, far.distance, near.distance, interf, p)
    };

    while psi_near(rx, r) < rho {
        if r == rx {
            r += 1;
        }
        rx += 1;
        if r > limit {
            return too_long;
        }
    }
    while psi_far(rx, r) < rho {
        r += 1;
        if r > limit {
            return too_long;
        }
    }
    Ok(PairResource { channel, shared: rx, exclusive: r - rx })
}

/// RUs saved on `channel` by sharing instead of serving both users alone.
pub fn sharing_gain(ctx: &PairingContext<'_>, channel: usize, i: usize, j: usize) -> Result<i64, PairError> {
    let res = shared_demand(ctx, channel, i, j)?;
    let solo = ctx.demands.get(i, channel) as i64 + ctx.demands.get(j, channel) as i64;
    Ok(solo - res.total() as i64)
}

/// Cyclic distance between two issue times.
pub fn issue_distance(t_i: u32, t_j: u32, cycle: u32) -> u32 {
    let direct = t_i.abs_diff(t_j);
    direct.min(cycle - direct)
}

/// Per-channel resources if `i` and `j` may share on every channel, `None`
/// otherwise.
pub fn pair_resources(ctx: &PairingContext<'_>, i: usize, j: usize) -> Option<Vec<PairResource>> {
    if i == j {
        return None;
    }
    let s = ctx.scenario;
    let p = ctx.params();
    let dist = issue_distance(s.devices[i].issue_time, s.devices[j].issue_time, p.cycle_slots);
    // Channel independent necessary condition.
    if dist > p.pairing_limit {
        return None;
    }
    let mut out = Vec::with_capacity(s.channels.len());
    for c in 0..s.channels.len() {
        let res = shared_demand(ctx, c, i, j).ok()?;
        let solo = ctx.demands.get(i, c) as i64 + ctx.demands.get(j, c) as i64;
        if solo - (res.total() as i64) < 0 {
            return None;
        }
        let budget = (p.delay_slots as i64 - res.shared as i64).min(p.pairing_limit as i64);
        if (dist as i64) > budget {
            return None;
        }
        out.push(res);
    }
    Some(out)
}

/// Edge test of the shareability graph.
pub fn shareable(ctx: &PairingContext<'_>, i: usize, j: usize) -> bool {
    pair_resources(ctx, i, j).is_some()
}

/// One channel of an equivalent device: transmissions may start from `issue`
/// and must end before `issue + delay`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ChannelWindow {
    /// Issue slot in `1..=T`.
    pub issue: u32,
    pub delay: u32,
    /// RUs carrying both users (or the whole packet for a single device).
    pub shared: u32,
    /// RUs carrying only the farther user.
    pub exclusive: u32,
    /// Issue time of the nearer user on the same time axis as `issue`.
    pub near_issue: i64,
}

impl ChannelWindow {
    pub fn demand(&self) -> u32 {
        self.shared.saturating_add(self.exclusive)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Members {
    Single(usize),
    Pair { near: usize, far: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquivalentDevice {
    pub members: Members,
    pub windows: Vec<ChannelWindow>,
}

/// Earliest and latest joint start `(t_min, t_max)` for a pair whose nearer
/// user issues at `t_near` and farther user at `t_far`, on a common
/// (unwrapped) time axis.
pub fn pair_start_range(t_near: i64, t_far: i64, res: &PairResource, delay: u32) -> (i64, i64) {
    let (n, k, d) = (res.shared as i64, res.exclusive as i64, delay as i64);
    if t_near <= t_far {
        (t_far, (t_near + d - n).min(t_far + d - n - k))
    } else {
        ((t_far).max(t_near - k), t_far + d - (n + k))
    }
}

fn wrap_slot(t: i64, cycle: u32) -> u32 {
    ((t - 1).rem_euclid(cycle as i64) + 1) as u32
}

/// Equivalent device of a shareable pair.
pub fn equivalent_device(scenario: &Scenario, i: usize, j: usize, resources: &[PairResource]) -> EquivalentDevice {
    let p = &scenario.params;
    let cycle = p.cycle_slots;
    let (near, far) = order_pair(&scenario.devices[i], &scenario.devices[j]);
    // Put both issue times on one axis; across the cycle boundary the earlier
    // device is moved one cycle later.
    let (mut tn, mut tf) = (near.issue_time as i64, far.issue_time as i64);
    let direct = (tn - tf).unsigned_abs() as u32;
    if cycle - direct < direct {
        if tn < tf {
            tn += cycle as i64;
        } else {
            tf += cycle as i64;
        }
    }
    let windows = resources
        .iter()
        .map(|res| {
            let (t_min, t_max) = pair_start_range(tn, tf, res, p.delay_slots);
            assert!(t_max >= t_min, "pair window is empty on channel {}", res.channel);
            let issue = wrap_slot(t_min, cycle);
            let shift = issue as i64 - t_min;
            ChannelWindow {
                issue,
                delay: (t_max - t_min) as u32 + res.total(),
                shared: res.shared,
                exclusive: res.exclusive,
                near_issue: tn + shift,
            }
        })
        .collect();
    EquivalentDevice { members: Members::Pair { near: near.id, far: far.id }, windows }
}

/// Equivalent device of an unpaired user.
pub fn single_device(scenario: &Scenario, demands: &DemandTable, i: usize) -> EquivalentDevice {
    let d = &scenario.devices[i];
    let windows = (0..scenario.channels.len())
        .map(|c| ChannelWindow {
            issue: d.issue_time,
            delay: d.delay_bound,
            shared: demands.get(i, c),
            exclusive: 0,
            near_issue: d.issue_time as i64,
        })
        .collect();
    EquivalentDevice { members: Members::Single(i), windows }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairingPlan {
    /// Shareability graph edges `(i, j)` with `i < j`.
    pub edges: Vec<(usize, usize)>,
    /// Matched pairs as `(i, j)` with `i < j`.
    pub pairs: Vec<(usize, usize)>,
    /// Pairs first (in `pairs` order), then singles by id.
    pub devices: Vec<EquivalentDevice>,
}

/// Builds the shareability graph, matches it and emits equivalent devices.
pub fn build_pairing(ctx: &PairingContext<'_>) -> PairingPlan {
    let s = ctx.scenario;
    let n = s.devices.len();
    let mut graph = GeneralGraph::new(n);
    let mut resources = std::collections::HashMap::new();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if let Some(res) = pair_resources(ctx, i, j) {
                graph.add_edge(i, j);
                edges.push((i, j));
                resources.insert((i, j), res);
            }
        }
    }
    let pairs = max_cardinality_matching(&graph);
    let mut paired = vec![false; n];
    let mut devices = Vec::with_capacity(n - pairs.len());
    for &(i, j) in &pairs {
        paired[i] = true;
        paired[j] = true;
        devices.push(equivalent_device(s, i, j, &resources[&(i, j)]));
    }
    devices.extend((0..n).filter(|&i| !paired[i]).map(|i| single_device(s, ctx.demands, i)));
    PairingPlan { edges, pairs, devices }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::Channel;

    fn scenario(devs: &[(f64, u32)], params: SystemParams) -> Scenario {
        let devices = devs
            .iter()
            .enumerate()
            .map(|(id, &(distance, issue_time))| Device { id, distance, issue_time, delay_bound: params.delay_slots })
            .collect();
        Scenario::new(params, devices, vec![Channel { id: 0, interf: 1.0 }]).unwrap()
    }

    #[test]
    fn zero_own_threshold_always_decodes() {
        for &(tj, l, m) in &[(0.5, 1.0, 2.0), (3.0, 0.1, 0.01), (1e3, 2.0, 5.0)] {
            assert!((pair_success_rates(0.0, tj, l, m) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn branches_meet_at_product_one() {
        let (l, m) = (0.3, 0.7);
        let below = pair_success_rates(2.0, 0.5 - 1e-9, l, m);
        let above = pair_success_rates(2.0, 0.5 + 1e-9, l, m);
        assert!((below - above).abs() < 1e-6, "{below} {above}");
    }

    #[test]
    fn start_range_examples() {
        let fig = PairResource { channel: 0, shared: 3, exclusive: 1 };
        assert_eq!(pair_start_range(2, 4, &fig, 6), (4, 5));
        let res = PairResource { channel: 0, shared: 4, exclusive: 2 };
        assert_eq!(pair_start_range(5, 2, &res, 10), (3, 6));
        let res = PairResource { channel: 0, shared: 3, exclusive: 0 };
        assert_eq!(pair_start_range(7, 7, &res, 10), (7, 7 + 10 - 3));
    }

    #[test]
    fn issue_distance_wraps() {
        assert_eq!(issue_distance(2, 4, 10), 2);
        assert_eq!(issue_distance(10, 3, 10), 3);
        assert_eq!(issue_distance(5, 5, 10), 0);
    }

    #[test]
    fn equivalent_device_across_cycle_boundary() {
        let p = SystemParams { cycle_slots: 10, delay_slots: 5, pairing_limit: 5, ..Default::default() };
        // Farther device issues at 10, nearer at 3: on a common axis 10 -> 0.
        let s = scenario(&[(5.0, 3), (40.0, 10)], p);
        let res = [PairResource { channel: 0, shared: 2, exclusive: 0 }];
        let eq = equivalent_device(&s, 0, 1, &res);
        let w = eq.windows[0];
        // t_near=13, t_far=10 on the unwrapped axis: t_min = 13, t_max = 10+5-2 = 13.
        assert_eq!(w.issue, 3);
        assert_eq!(w.delay, 2);
        assert_eq!(w.near_issue, 3);
    }

    #[test]
    fn shared_demand_is_at_least_solo() {
        let p = SystemParams::default();
        let s = scenario(&[(10.0, 5), (45.0, 8)], p);
        let demands = DemandTable::build(&s, crate::alloc::demand::DemandModel::Threshold).unwrap();
        let ctx = PairingContext::new(&s, &demands);
        let res = shared_demand(&ctx, 0, 0, 1).unwrap();
        assert!(res.total() >= demands.get(0, 0).max(demands.get(1, 0)));
        assert!(res.shared >= demands.get(0, 0));
        assert_eq!(shared_demand(&ctx, 0, 1, 1), Err(PairError::SameDevice));
        // Swapped roles give the same answer.
        assert_eq!(shared_demand(&ctx, 0, 1, 0).unwrap(), res);
    }

    #[test]
    fn infeasible_when_demand_exceeds_delay() {
        let p = SystemParams { delay_slots: 4, pairing_limit: 4, ..Default::default() };
        let s = scenario(&[(49.0, 1), (50.0, 2)], p);
        let demands = DemandTable::build(&s, crate::alloc::demand::DemandModel::Threshold).unwrap();
        let ctx = PairingContext::new(&s, &demands);
        assert!(shared_demand(&ctx, 0, 0, 1).is_err());
        assert!(sharing_gain(&ctx, 0, 0, 1).is_err());
        assert!(!shareable(&ctx, 0, 1));
    }

    #[test]
    fn empty_graph_gives_singletons() {
        let p = SystemParams::default();
        // Issue times far apart: pruned by the pairing limit.
        let s = scenario(&[(10.0, 1), (45.0, 30), (20.0, 60)], p);
        let demands = DemandTable::build(&s, crate::alloc::demand::DemandModel::Threshold).unwrap();
        let plan = build_pairing(&PairingContext::new(&s, &demands));
        assert!(plan.edges.is_empty() && plan.pairs.is_empty());
        assert_eq!(plan.devices.len(), 3);
        assert!(plan.devices.iter().all(|d| matches!(d.members, Members::Single(_))));
    }
}
