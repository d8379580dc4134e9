//! Independent oracles shared by the integration tests and the acceptance
//! suite. Nothing here calls the solver under test.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use statrs::function::erf::erfc;

use urllc_core::alloc::split::{independent_packet_prob, ChannelGroup};
use urllc_core::matching::{GeneralGraph, WeightedBipartiteGraph};
use urllc_core::SystemParams;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Maximum matching weight by enumerating every injection of the left side.
pub fn brute_bipartite_weight(g: &WeightedBipartiteGraph) -> i64 {
    let mut w = vec![vec![None; g.n_right]; g.n_left];
    for e in &g.edges {
        let cur: &mut Option<i64> = &mut w[e.left][e.right];
        *cur = Some(cur.map_or(e.weight, |x: i64| x.max(e.weight)));
    }
    fn go(row: usize, used: &mut Vec<bool>, w: &[Vec<Option<i64>>]) -> i64 {
        if row == w.len() {
            return 0;
        }
        let mut best = go(row + 1, used, w);
        for c in 0..used.len() {
            if let (false, Some(x)) = (used[c], w[row][c]) {
                used[c] = true;
                best = best.max(x + go(row + 1, used, w));
                used[c] = false;
            }
        }
        best
    }
    go(0, &mut vec![false; g.n_right], &w)
}

/// Maximum matching size by branching on the lowest unmatched vertex.
pub fn brute_cardinality(g: &GeneralGraph) -> usize {
    fn go(v: usize, taken: &mut Vec<bool>, g: &GeneralGraph) -> usize {
        let n = g.vertex_count();
        let mut v = v;
        while v < n && taken[v] {
            v += 1;
        }
        if v >= n {
            return 0;
        }
        taken[v] = true;
        let mut best = go(v + 1, taken, g);
        for &u in g.neighbors(v) {
            if !taken[u] {
                taken[u] = true;
                best = best.max(1 + go(v + 1, taken, g));
                taken[u] = false;
            }
        }
        taken[v] = false;
        best
    }
    go(0, &mut vec![false; g.vertex_count()], g)
}

pub fn random_bipartite(rng: &mut ChaCha8Rng, max_left: usize, max_right: usize) -> WeightedBipartiteGraph {
    let n_left = rng.random_range(1..=max_left);
    let n_right = rng.random_range(1..=max_right);
    let density: f64 = rng.random_range(0.2..1.0);
    let mut g = WeightedBipartiteGraph::new(n_left, n_right);
    for l in 0..n_left {
        for r in 0..n_right {
            if rng.random::<f64>() < density {
                g.add_edge(l, r, rng.random_range(0..=40));
            }
        }
    }
    g
}

pub fn random_general(rng: &mut ChaCha8Rng, max_vertices: usize) -> GeneralGraph {
    let n = rng.random_range(1..=max_vertices);
    let density: f64 = rng.random_range(0.1..0.7);
    let mut g = GeneralGraph::new(n);
    for a in 0..n {
        for b in (a + 1)..n {
            if rng.random::<f64>() < density {
                g.add_edge(a, b);
            }
        }
    }
    g
}

/// Best packet success over every integer split of `bits` among the groups.
pub fn grid_best_split(groups: &[ChannelGroup], bits: u32, distance: f64, p: &SystemParams) -> f64 {
    fn go(c: usize, left: u32, ks: &mut Vec<f64>, g: &[ChannelGroup], d: f64, p: &SystemParams) -> f64 {
        if c + 1 == g.len() {
            ks.push(left as f64);
            let v = independent_packet_prob(g, ks, d, p);
            ks.pop();
            return v;
        }
        let mut best = 0.0f64;
        for k in 0..=left {
            ks.push(k as f64);
            best = best.max(go(c + 1, left - k, ks, g, d, p));
            ks.pop();
        }
        best
    }
    go(0, bits, &mut Vec::new(), groups, distance, p)
}

/// Least RU count whose per-RU decoding probability reaches the target,
/// computed straight from the exponential fading tail.
pub fn min_rus_brute(distance: f64, interf: f64, p: &SystemParams) -> u32 {
    let q = p.bandwidth * p.slot_duration;
    let mean = p.transmit_snr * distance.powf(-p.pathloss_exp) / interf;
    (1..=100_000u32)
        .find(|&r| {
            let theta = 2f64.powf(p.packet_bits / (r as f64 * q)) - 1.0;
            (-theta / mean).exp() >= p.reliability
        })
        .expect("no RU count reaches the target")
}

/// Per-RU decoding probability margin at `r` RUs, for boundary diagnostics.
pub fn decode_margin(distance: f64, interf: f64, r: u32, p: &SystemParams) -> f64 {
    let q = p.bandwidth * p.slot_duration;
    let mean = p.transmit_snr * distance.powf(-p.pathloss_exp) / interf;
    let theta = 2f64.powf(p.packet_bits / (r as f64 * q)) - 1.0;
    (-theta / mean).exp() - p.reliability
}

/// Two-user successive decoding on one RU: own SNR `a`, other SNR `b`.
pub fn sic_event(a: f64, b: f64, theta_own: f64, theta_other: f64) -> bool {
    let own_first = a / (1.0 + b) >= theta_own;
    let other_then_own = b / (1.0 + a) >= theta_other && a >= theta_own;
    own_first || other_then_own
}

/// Monte Carlo estimate of the own user's success with SNRs `Exp(rate)`.
pub fn mc_pair_success(theta_own: f64, theta_other: f64, rate_own: f64, rate_other: f64, draws: u64, seed: u64) -> f64 {
    let mut rng = rng(seed);
    let mut wins = 0u64;
    for _ in 0..draws {
        let x: f64 = rng.sample(Exp1);
        let y: f64 = rng.sample(Exp1);
        wins += sic_event(x / rate_own, y / rate_other, theta_own, theta_other) as u64;
    }
    wins as f64 / draws as f64
}

/// Finite blocklength error at instantaneous SINR `s`, written out
/// independently of the library.
pub fn fbl_error(bits: f64, s: f64, p: &SystemParams) -> f64 {
    let q = p.bandwidth * p.slot_duration;
    let v = 1.0 - 1.0 / ((1.0 + s) * (1.0 + s));
    let z = (q * (1.0 + s).log2() - bits) / (q * v).sqrt() * std::f64::consts::LN_2;
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

/// Monte Carlo average of [`fbl_error`] over exponential fading, with its
/// standard error. Fading is drawn from `Exp` with mean `scale <= 1` and
/// reweighted, which puts the samples where the error mass is.
pub fn mc_fading_error(bits: f64, mean_snr: f64, scale: f64, p: &SystemParams, draws: u64, seed: u64) -> (f64, f64) {
    assert!(scale > 0.0 && scale <= 1.0);
    let mut rng = rng(seed);
    let (mut s1, mut s2) = (0.0, 0.0);
    for _ in 0..draws {
        let x = scale * rng.sample::<f64, _>(Exp1);
        let w = scale * (x / scale - x).exp();
        let e = w * fbl_error(bits, mean_snr * x, p);
        s1 += e;
        s2 += e * e;
    }
    let n = draws as f64;
    let mean = s1 / n;
    (mean, ((s2 / n - mean * mean).max(0.0) / n).sqrt())
}

/// Cyclic membership of `slot` in the window of `len` slots starting at `start`.
pub fn in_window(slot: i64, start: i64, len: u32, cycle: u32) -> bool {
    (slot - start).rem_euclid(cycle as i64) < len as i64
}
