use cran_core::campaign::CampaignDims;
use cran_core::gap;
use cran_core::{gaussinfo, random_instance, QuantizerB};

#[test]
fn per_cut_bounds_hold_including_high_snr() {
    let dims = CampaignDims { snr_db: vec![0.0, 20.0, 40.0], ..CampaignDims::default() };
    for spec in dims.specs(3, 40) {
        let inst = spec.instance();
        let jd = gap::jd_gap_certificate(&inst).unwrap();
        assert!(jd.pass, "{spec:?}: {jd:?}");
        assert!(jd.worst <= jd.eta + 1e-9);
        let sd = gap::sd_sum_gap_certificate(&inst).unwrap();
        assert!(sd.pass, "{spec:?}: {sd:?}");
        let csum: f64 = inst.fronthauls().iter().sum();
        let gsd = gap::gsd_sumfronthaul_gap_certificate(&inst, csum).unwrap();
        assert!(gsd.pass, "{spec:?}: {gsd:?}");
    }
}

#[test]
fn gaps_ignore_common_channel_scaling() {
    let inst = random_instance(8, 2, 2, 2, 2, 10.0);
    let scaled = inst.with_channel_scale(3.7);
    let a = gap::jd_gap_certificate(&inst).unwrap();
    let b = gap::jd_gap_certificate(&scaled).unwrap();
    let half = QuantizerB::half_inverse_noise(&inst).unwrap();
    let half_scaled = QuantizerB::half_inverse_noise(&scaled).unwrap();
    for l in 0..2 {
        // Q = Σ costs exactly N bits per BS, whatever the channel.
        assert!((gaussinfo::i_y_yhat_given_x(&inst, &half, l).unwrap() - 2.0).abs() < 1e-12);
        assert!((gaussinfo::i_y_yhat_given_x(&scaled, &half_scaled, l).unwrap() - 2.0).abs() < 1e-12);
    }
    assert_eq!(a.cuts.len(), b.cuts.len());
    for (x, y) in a.cuts.iter().zip(&b.cuts) {
        assert!(x.gap <= x.bound + 1e-9 && y.gap <= y.bound + 1e-9);
    }
}

#[test]
fn two_by_two_campaign_within_eta() {
    for seed in 0..20 {
        let inst = random_instance(seed, 2, 2, 2, 2, 20.0);
        let cert = gap::jd_gap_certificate(&inst).unwrap();
        assert_eq!(cert.eta, 6.0);
        assert!(cert.pass);
        let sd = gap::sd_sum_gap_certificate(&random_instance(seed, 2, 2, 1, 1, 20.0)).unwrap();
        assert!(sd.worst <= 4.0);
    }
}
