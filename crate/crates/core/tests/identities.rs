//! Closed-form information expressions against the joint-covariance path.

use cran_core::gaussinfo::{self, Var};
use cran_core::subset;
use cran_core::{random_instance, NetworkInstance, QuantizerB};
use proptest::prelude::*;

const TOL: f64 = 1e-8;

fn instance_strategy() -> impl Strategy<Value = (NetworkInstance, QuantizerB)> {
    (any::<u64>(), 1usize..=3, 1usize..=3, 1usize..=2, 1usize..=2, prop::sample::select(vec![0.0, 10.0, 20.0]), any::<bool>()).prop_map(
        |(seed, k, l, m, n, snr, half)| {
            let inst = random_instance(seed, k, l, m, n, snr);
            let b = if half { QuantizerB::half_inverse_noise(&inst).unwrap() } else { QuantizerB::random(&inst, seed ^ 1, 0.02, 0.98).unwrap() };
            (inst, b)
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn chain_identity((inst, b) in instance_strategy()) {
        let jc = gaussinfo::extended_covariance(&inst, &b).unwrap();
        let (all_users, all_bss) = (subset::full(inst.users()), subset::full(inst.bss()));
        let total = gaussinfo::i_x_yhat_cond(&inst, &b, all_users, all_bss).unwrap();
        for s in 1..=all_bss {
            let sc = subset::complement(s, inst.bss());
            let closed = gaussinfo::sd_fronthaul_usage(&inst, &b, s).unwrap();
            let decomposed = total - gaussinfo::i_x_yhat_cond(&inst, &b, all_users, sc).unwrap()
                + subset::members(s).map(|l| gaussinfo::i_y_yhat_given_x(&inst, &b, l).unwrap()).sum::<f64>();
            let direct = gaussinfo::cond_mutual_info(&jc, &gaussinfo::received_vars(s), &gaussinfo::quantized_vars(s), &gaussinfo::quantized_vars(sc)).unwrap();
            prop_assert!((closed - decomposed).abs() <= TOL, "closed {closed} decomposed {decomposed}");
            prop_assert!((closed - direct).abs() <= TOL, "closed {closed} direct {direct}");
        }
    }

    #[test]
    fn forwarding_identity((inst, b) in instance_strategy()) {
        let all_bss = subset::full(inst.bss());
        let pen: f64 = (0..inst.bss()).map(|l| gaussinfo::i_y_yhat_given_x(&inst, &b, l).unwrap()).sum();
        let info = gaussinfo::i_x_yhat_cond(&inst, &b, subset::full(inst.users()), all_bss).unwrap();
        let joint = cran_core::equivalence::joint_forwarding_information(&inst, &b).unwrap();
        prop_assert!((pen + info - joint).abs() <= TOL);
    }

    #[test]
    fn closed_form_matches_schur((inst, b) in instance_strategy()) {
        let jc = gaussinfo::joint_covariance(&inst, &b).unwrap();
        let ext = gaussinfo::extended_covariance(&inst, &b).unwrap();
        let all_users = subset::full(inst.users());
        for t in 1..=all_users {
            for sc in 0..=subset::full(inst.bss()) {
                let closed = gaussinfo::i_x_yhat_cond(&inst, &b, t, sc).unwrap();
                let given = gaussinfo::users_vars(subset::complement(t, inst.users()));
                let schur = gaussinfo::cond_mutual_info(&jc, &gaussinfo::users_vars(t), &gaussinfo::quantized_vars(sc), &given).unwrap();
                prop_assert!(closed >= -1e-9);
                prop_assert!((closed - schur).abs() <= TOL, "T={t} Sc={sc}: {closed} vs {schur}");
            }
        }
        for l in 0..inst.bss() {
            let closed = gaussinfo::i_y_yhat_given_x(&inst, &b, l).unwrap();
            let schur = gaussinfo::cond_mutual_info(&ext, &[Var::Received(l)], &[Var::Quantized(l)], &gaussinfo::users_vars(all_users)).unwrap();
            prop_assert!((closed - schur).abs() <= TOL);
        }
    }

    #[test]
    fn loewner_monotone((inst, b) in instance_strategy(), shrink in 0.05f64..0.95) {
        let smaller = QuantizerB::from_whitened(&inst, b.whitened_matrices().iter().map(|w| w.scale(shrink)).collect()).unwrap();
        for t in 1..=subset::full(inst.users()) {
            for sc in 0..=subset::full(inst.bss()) {
                let lo = gaussinfo::i_x_yhat_cond(&inst, &smaller, t, sc).unwrap();
                let hi = gaussinfo::i_x_yhat_cond(&inst, &b, t, sc).unwrap();
                prop_assert!(lo <= hi + 1e-9);
            }
        }
    }
}

#[test]
fn observation_sets_are_submodular() {
    for seed in 0..20 {
        let inst = random_instance(seed, 2, 4, 1, 1 + (seed as usize % 2), 10.0);
        let b = QuantizerB::random(&inst, seed, 0.05, 0.95).unwrap();
        let all = subset::full(inst.users());
        let f = cran_core::submodular::SetFunction::new(4, |s| gaussinfo::i_x_yhat_cond(&inst, &b, all, s).unwrap());
        assert!(cran_core::submodular::is_submodular(&f).unwrap().holds);
    }
}

#[test]
fn unquantized_endpoint_reproduces_cutset_term() {
    let inst = random_instance(3, 2, 2, 2, 2, 10.0);
    let top = QuantizerB::scaled_inverse_noise(&inst, 1.0).unwrap();
    let cut = cran_core::regions::cutset_constraints(&inst.with_fronthaul(vec![0.0, 0.0])).unwrap();
    for c in cut.iter().filter(|c| c.bss == 0) {
        let v = gaussinfo::i_x_yhat_cond(&inst, &top, c.users, 0b11).unwrap();
        assert!((v - c.rhs).abs() < 1e-10);
    }
    assert_eq!(gaussinfo::i_y_yhat_given_x(&inst, &top, 0).unwrap(), f64::INFINITY);
}
