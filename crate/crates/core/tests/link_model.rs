//! Link model, bit splits and the correlated solver against independent oracles.

mod common;

use proptest::prelude::*;
use urllc_core::alloc::split::{independent_packet_prob, optimal_bit_split, optimal_split_real, ChannelGroup};
use urllc_core::correlated::correlated_optimal_split;
use urllc_core::link::{exact_error_prob, mean_snr, min_rus};
use urllc_core::SystemParams;

#[test]
fn min_rus_matches_least_count_on_grid() {
    let p = SystemParams::default();
    let mut checked = 0;
    for a in 0..40 {
        let d = 1.0 + 49.0 * a as f64 / 39.0;
        for b in 0..25 {
            let interf = 1.0 + 4.0 * b as f64 / 24.0;
            let closed = min_rus(d, interf, &p);
            let brute = common::min_rus_brute(d, interf, &p);
            if closed != brute {
                // Only acceptable when the target sits on the rounding edge.
                let r = closed.min(brute);
                assert!(
                    common::decode_margin(d, interf, r, &p).abs() < 1e-12,
                    "d={d} interf={interf}: closed {closed} brute {brute}"
                );
            }
            checked += 1;
        }
    }
    assert_eq!(checked, 1000);
}

fn groups_strategy() -> impl Strategy<Value = Vec<ChannelGroup>> {
    prop::collection::vec((1u32..=6, 1.0f64..5.0).prop_map(|(rus, interf)| ChannelGroup { rus, interf }), 1..=3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn lemma_split_never_beats_grid_search(g in groups_strategy(), d in 1.0f64..50.0) {
        let p = SystemParams::default();
        let split = optimal_bit_split(&g, p.packet_bits, p.symbols_per_ru());
        prop_assert_eq!(split.iter().sum::<f64>(), p.packet_bits);
        prop_assert!(split.iter().all(|&k| k >= 0.0 && k.fract() == 0.0));
        let lemma = independent_packet_prob(&g, &split, d, &p);
        let grid = common::grid_best_split(&g, p.packet_bits as u32, d, &p);
        prop_assert!(lemma <= grid * (1.0 + 1e-12), "lemma {lemma} above grid optimum {grid}");
        // Equal up to integer rounding: tiny gap in log success.
        prop_assert!((grid.ln() - lemma.ln()) <= 1e-4 * -grid.ln() + 1e-15, "lemma {lemma} grid {grid}");
        // The real-valued split bounds every integer split.
        let real = optimal_split_real(&g, p.packet_bits, p.symbols_per_ru());
        prop_assert!(independent_packet_prob(&g, &real, d, &p) >= grid * (1.0 - 1e-12));
    }

    #[test]
    fn correlated_split_equalizes_exponents(g in groups_strategy()) {
        let q = SystemParams::default().symbols_per_ru();
        let s = correlated_optimal_split(&g, 100.0, q);
        prop_assert!((s.bits.iter().sum::<f64>() - 100.0).abs() < 1e-9);
        for (grp, &k) in g.iter().zip(&s.bits) {
            let e = grp.interf * (2f64.powf(k / (grp.rus as f64 * q)) - 1.0);
            prop_assert!((e - s.exponent).abs() <= 1e-9 * s.exponent, "exponent {e} vs {}", s.exponent);
        }
    }
}

#[test]
fn fading_average_matches_monte_carlo() {
    let p = SystemParams::default();
    let cases = [(100.0, 10.0, 1.0), (50.0, 20.0, 3.0), (20.0, 45.0, 5.0), (10.0, 30.0, 2.0), (33.3, 50.0, 1.5)];
    for (k, &(bits, d, interf)) in cases.iter().enumerate() {
        let analytic = exact_error_prob(bits, d, interf, &p).unwrap();
        let snr = mean_snr(d, interf, &p);
        let knee = (2f64.powf(bits / p.symbols_per_ru()) - 1.0) / snr;
        let (mc, se) = common::mc_fading_error(bits, snr, (4.0 * knee).min(1.0), &p, 400_000, 100 + k as u64);
        assert!((analytic - mc).abs() <= 4.0 * se + 1e-12, "bits {bits} d {d}: {analytic} vs {mc} +- {se}");
    }
}
