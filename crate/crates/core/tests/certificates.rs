//! Domination certificates on random instances, and the two index/weight
//! conventions that must be rejected.

use cran_core::campaign::CampaignDims;
use cran_core::equivalence::{self, CaseTag, DOMINATION_TOL};
use cran_core::regions::RateFronthaulTuple;
use cran_core::subset;
use cran_core::{gaussinfo, random_instance, QuantizerB};

#[test]
fn sum_fronthaul_certificates_dominate() {
    let dims = CampaignDims::default();
    let mut summary = equivalence::CampaignSummary::default();
    for spec in dims.specs(11, 24) {
        let inst = spec.instance();
        for b in spec.quantizers(&inst).unwrap() {
            let grid = equivalence::sum_capacity_grid(&inst, &b).unwrap();
            for cert in equivalence::theorem1_sweep(&inst, &b, &grid).unwrap() {
                assert!(cert.dominates, "{spec:?}: {cert:?}");
                if cert.case == CaseTag::GsdTwoOrders {
                    let theta = cert.mixing.unwrap();
                    assert!((-1e-9..=1.0 + 1e-9).contains(&theta));
                }
                summary.record(&cert);
            }
        }
    }
    assert_eq!(summary.violations, 0);
    for case in ["gsd-single-order", "gsd-two-orders", "gsd-boundary"] {
        assert!(summary.cases.get(case).copied().unwrap_or(0) > 0, "{case} never exercised");
    }
}

#[test]
fn successive_certificates_dominate() {
    let dims = CampaignDims::default();
    let mut two_scheme = 0;
    for spec in dims.specs(5, 24) {
        let inst = spec.instance();
        for b in spec.quantizers(&inst).unwrap() {
            for cert in equivalence::theorem2_sweep(&inst, &b).unwrap() {
                assert!(cert.dominates, "{spec:?}: {cert:?}");
                two_scheme += (cert.case == CaseTag::SdTwoSchemes) as usize;
            }
        }
    }
    assert!(two_scheme > 0);
}

/// Rebuilds the mixing weight with the pivot shifted one position later, i.e.
/// `α' = C̃_{i_j} / I(Y_{i_{j+1}}; Ŷ_{i_{j+1}} | Ŷ_{i_{j+2}..i_L})`, and checks
/// whether that mixture still meets the target.
fn shifted_pivot_dominates(inst: &cran_core::NetworkInstance, b: &QuantizerB, ordering: &[usize]) -> Option<bool> {
    let cert = equivalence::theorem2_certificate(inst, b, ordering).unwrap();
    let j = cert.split?;
    if j >= ordering.len() || cert.case != CaseTag::SdTwoSchemes {
        return None;
    }
    let l = inst.bss();
    let next = ordering[j];
    let after_next = subset::complement(subset::chain(ordering)[j + 1], l);
    let denominator = gaussinfo::i_y_yhat_given_x(inst, b, next).unwrap()
        + gaussinfo::i_x_yhat_cond(inst, b, subset::full(inst.users()), after_next | subset::singleton(next)).unwrap()
        - gaussinfo::i_x_yhat_cond(inst, b, subset::full(inst.users()), after_next).unwrap();
    let pivot = ordering[j - 1];
    let alpha = cert.target.fronthaul[pivot] / denominator;
    if !(0.0..=1.0).contains(&alpha) {
        return Some(false);
    }
    let (s1, s2) = (&cert.combination[0].achieved, &cert.combination[1].achieved);
    let mixed = RateFronthaulTuple::mix(&[(1.0 - alpha, s1), (alpha, s2)]);
    let rate_ok = mixed.rates[0] >= cert.target.rates[0] - DOMINATION_TOL;
    let fh_ok = mixed.fronthaul.iter().zip(&cert.target.fronthaul).all(|(a, t)| *a <= t + DOMINATION_TOL);
    Some(rate_ok && fh_ok)
}

#[test]
fn shifted_pivot_index_breaks_domination() {
    let mut tried = 0;
    let mut held = 0;
    for seed in 0..30 {
        let inst = random_instance(seed, 2, 3, 1, 1, 10.0);
        let b = QuantizerB::random(&inst, seed + 100, 0.1, 0.9).unwrap();
        for ordering in subset::permutations(3) {
            if let Some(ok) = shifted_pivot_dominates(&inst, &b, &ordering) {
                tried += 1;
                held += ok as usize;
            }
        }
    }
    assert!(tried > 10, "too few certificates with a later base station: {tried}");
    assert!(held < tried, "shifted index held on all {tried} cases");
}

#[test]
fn theta_belongs_to_the_first_order() {
    let mut swapped_failures = 0;
    let mut checked = 0;
    for seed in 0..10 {
        let inst = random_instance(seed, 2, 2, 1, 1, 10.0);
        let b = QuantizerB::half_inverse_noise(&inst).unwrap();
        let grid = equivalence::sum_capacity_grid(&inst, &b).unwrap();
        for &csum in &grid[..3] {
            let cert = equivalence::theorem1_certificate(&inst, &b, csum, &[0, 1]).unwrap();
            let Some(theta) = cert.mixing else { continue };
            if !(0.05..0.95).contains(&theta) || (theta - 0.5).abs() < 0.05 {
                continue;
            }
            checked += 1;
            let (o1, o2) = (&cert.combination[0].achieved, &cert.combination[1].achieved);
            let swapped = RateFronthaulTuple::mix(&[(1.0 - theta, o1), (theta, o2)]);
            let fh: f64 = swapped.fronthaul.iter().sum();
            let rates_ok = swapped.rates.iter().zip(&cert.target.rates).all(|(a, t)| *a >= t - DOMINATION_TOL);
            if !(rates_ok && fh <= csum + DOMINATION_TOL) {
                swapped_failures += 1;
            }
        }
    }
    assert!(checked > 0);
    assert_eq!(swapped_failures, checked);
}

#[test]
fn infeasible_budget_is_tagged() {
    let inst = random_instance(1, 2, 2, 1, 1, 10.0);
    let b = QuantizerB::half_inverse_noise(&inst).unwrap();
    let cert = equivalence::theorem1_certificate(&inst, &b, 0.5, &[1, 0]).unwrap();
    assert_eq!(cert.case, CaseTag::GsdInfeasible);
    assert!(cert.target.rates.iter().all(|&r| r == 0.0));
}
