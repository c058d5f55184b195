//! Submodularity of the rate function, supermodularity of the fronthaul
//! function, and the greedy extreme points of their polyhedra.

use cran_core::submodular::{self, SetFunction, Side};
use cran_core::subset;
use cran_core::{random_instance, QuantizerB};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn rate_and_fronthaul_functions(seed in any::<u64>(), k in 1usize..=4, l in 1usize..=4, m in 1usize..=2, n in 1usize..=2,
                                    snr in prop::sample::select(vec![0.0, 10.0, 20.0]), frac in 0.0f64..1.5) {
        let inst = random_instance(seed, k, l, m, n, snr);
        let b = QuantizerB::random(&inst, seed.rotate_left(7), 0.02, 0.98).unwrap();
        let pen: f64 = (0..l).map(|i| cran_core::gaussinfo::i_y_yhat_given_x(&inst, &b, i).unwrap()).sum();
        let full = cran_core::gaussinfo::i_x_yhat_cond(&inst, &b, subset::full(k), subset::full(l)).unwrap();
        let f = submodular::f_jd_sumfronthaul(&inst, &b, pen + frac * full).unwrap();
        prop_assert!(submodular::is_submodular(&f).unwrap().holds);
        let rate = frac * full;
        let (g, g_plus) = submodular::g_fronthaul(&inst, &b, rate).unwrap();
        prop_assert!(submodular::is_supermodular(&g).unwrap().holds);
        prop_assert!(submodular::is_supermodular(&g_plus).unwrap().holds);
    }
}

#[test]
fn greedy_points_are_extreme() {
    let functions: Vec<(usize, Box<dyn Fn(u32) -> f64>)> = vec![
        (3, Box::new(|s: u32| (s.count_ones() as f64).sqrt())),
        (4, Box::new(|s: u32| (1.0 + s.count_ones() as f64).ln() + 0.1 * (s & 0b101).count_ones() as f64)),
        (4, Box::new(|s: u32| (2.0f64).min(s.count_ones() as f64))),
    ];
    for (n, raw) in functions {
        let f = SetFunction::new(n, |s| raw(s));
        assert!(submodular::is_submodular(&f).unwrap().holds);
        for ordering in subset::permutations(n) {
            let x = submodular::greedy_extreme_point(&f, &ordering).unwrap();
            let check = submodular::polyhedron_check(&f, &x, Side::AtMost);
            assert!(check.min_slack >= -1e-9);
            assert_eq!(submodular::tight_chain_count(&f, &x, &ordering), n);
        }
    }
}

#[test]
fn greedy_on_channel_functions() {
    for seed in 0..10u64 {
        let inst = random_instance(seed, 3, 2, 1, 2, 10.0);
        let b = QuantizerB::half_inverse_noise(&inst).unwrap();
        let f = submodular::f_jd_sumfronthaul(&inst, &b, 7.0).unwrap();
        let (_, g_plus) = submodular::g_fronthaul(&inst, &b, 1.0).unwrap();
        for ordering in subset::permutations(3) {
            let x = submodular::greedy_extreme_point(&f, &ordering).unwrap();
            assert!(submodular::polyhedron_check(&f, &x, Side::AtMost).min_slack >= -1e-9);
            assert_eq!(submodular::tight_chain_count(&f, &x, &ordering), 3);
        }
        for ordering in subset::permutations(2) {
            let c = submodular::supermodular_extreme_point(&g_plus, &ordering).unwrap();
            assert!(submodular::polyhedron_check(&g_plus, &c, Side::AtLeast).min_slack >= -1e-9);
        }
    }
}
