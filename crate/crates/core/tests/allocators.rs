//! Allocator invariants on random deployments.

mod common;

use std::cell::Cell;

use proptest::prelude::*;
use urllc_core::alloc::demand::{DemandModel, DemandTable};
use urllc_core::alloc::gba::{device_tasks, run_gba_with};
use urllc_core::alloc::gba_sic::gba_sic_trace;
use urllc_core::alloc::{gba, gba_sic};
use urllc_core::experiment::{check_algorithm, evaluate, Algorithm, Evaluator};
use urllc_core::matching::max_weight_bipartite_matching;
use urllc_core::schedule::Outcome;
use urllc_core::{generate_scenario, Channel, Device, Scenario, SystemParams};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn every_schedule_is_valid(seed in any::<u64>(), n in 1usize..80, c in 1usize..8, delta in 5u32..=70) {
        let mut p = SystemParams::default();
        p.delay_slots = delta;
        p.pairing_limit = p.pairing_limit.min(delta);
        let s = generate_scenario(seed, n, c, &p);
        let mut ev = Evaluator::new(&s);
        for alg in Algorithm::ALL {
            let sched = ev.allocate(alg).unwrap();
            prop_assert!(sched.outcomes().iter().all(|o| *o != Outcome::Pending), "{alg} left a device pending");
            if let Err(v) = check_algorithm(alg, &s, &sched) {
                prop_assert!(false, "{alg} seed {seed} n {n} c {c} delta {delta}: {v}");
            }
        }
    }
}

#[test]
fn phase_matchings_are_optimal() {
    let phases = Cell::new(0usize);
    for seed in 0..15 {
        let s = generate_scenario(seed, 30, 3, &SystemParams::default());
        let table = DemandTable::build(&s, DemandModel::Threshold).unwrap();
        let tasks = device_tasks(&s, &table);
        let checked = |g: &urllc_core::matching::WeightedBipartiteGraph| {
            let m = max_weight_bipartite_matching(g);
            let w: i64 = m.iter().map(|e| e.weight).sum();
            assert_eq!(w, common::brute_bipartite_weight(g), "seed {seed}");
            phases.set(phases.get() + 1);
            m
        };
        let run = run_gba_with(&tasks, 3, s.params.cycle_slots, checked);
        // A phase only runs when some edge exists, so it matches something.
        assert!(run.phases.iter().all(|ph| !ph.is_empty()));
    }
    assert!(phases.get() > 15);
}

#[test]
fn sharing_never_serves_fewer_devices() {
    for seed in 0..20 {
        let s = generate_scenario(seed, 40, 5, &SystemParams::default());
        let table = DemandTable::build(&s, DemandModel::Threshold).unwrap();
        let plain = gba(&s, &table).served_count();
        let shared = gba_sic(&s, &table).served_count();
        assert!(shared >= plain, "seed {seed}: {shared} < {plain}");
    }
}

#[test]
fn without_pairs_sharing_reduces_to_plain_graph_allocation() {
    let p = SystemParams { pairing_limit: 0, ..Default::default() };
    let mut rng = common::rng(5);
    use rand::seq::SliceRandom;
    let mut times: Vec<u32> = (1..=p.cycle_slots).collect();
    times.shuffle(&mut rng);
    let devices: Vec<Device> = (0..50)
        .map(|id| {
            use rand::Rng;
            Device { id, distance: 1.0 + 49.0 * rng.random::<f64>(), issue_time: times[id], delay_bound: 35 }
        })
        .collect();
    let channels = (0..4).map(|id| Channel { id, interf: 1.0 + id as f64 }).collect();
    let s = Scenario::new(p, devices, channels).unwrap();
    let table = DemandTable::build(&s, DemandModel::Threshold).unwrap();
    let (with_sic, trace) = gba_sic_trace(&s, &table);
    assert!(trace.plan.pairs.is_empty());
    assert_eq!(with_sic, gba(&s, &table));
}

#[test]
fn spreading_over_channels_costs_more_resources() {
    let (mut fsa_rus, mut gba_rus) = (0.0, 0.0);
    for seed in 0..10 {
        let s = generate_scenario(seed, 60, 7, &SystemParams::default());
        let per_served = |alg| {
            let e = evaluate(alg, &s).unwrap();
            e.schedule.used_rus() as f64 / e.schedule.served_count().max(1) as f64
        };
        fsa_rus += per_served(Algorithm::Fsa);
        gba_rus += per_served(Algorithm::Gba);
    }
    assert!(fsa_rus > gba_rus, "fsa {fsa_rus} gba {gba_rus}");
}

#[test]
fn common_fading_helps_the_spreading_allocator() {
    let (mut ind, mut cor) = (0.0, 0.0);
    for seed in 0..10 {
        let s = generate_scenario(seed, 160, 7, &SystemParams::default());
        ind += evaluate(Algorithm::Fsa, &s).unwrap().metrics.fraction_served;
        cor += evaluate(Algorithm::FsaCorrelated, &s).unwrap().metrics.fraction_served;
    }
    assert!(cor > ind, "correlated {cor} independent {ind}");
}
