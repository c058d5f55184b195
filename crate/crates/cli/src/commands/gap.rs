use cran_core::campaign::CampaignDims;
use cran_core::gap::{self, GapCertificate};
use cran_core::NetworkInstance;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::output::{ensure_dir, fmt, num, write_csv, write_json};
use crate::{check_caps, load_instance, parse_list, Failure, GapArgs, EXIT_OK, EXIT_VIOLATIONS};

struct Checked {
    label: Value,
    certs: [GapCertificate; 3],
}

fn check(inst: &NetworkInstance, csum: Option<f64>) -> Result<[GapCertificate; 3], Failure> {
    let csum = csum.unwrap_or_else(|| inst.fronthauls().iter().sum());
    Ok([gap::jd_gap_certificate(inst)?, gap::sd_sum_gap_certificate(inst)?, gap::gsd_sumfronthaul_gap_certificate(inst, csum)?])
}

fn cert_json(c: &GapCertificate) -> Value {
    json!({ "worst_gap_bits": num(c.worst), "eta_bits": num(c.eta), "membership_slack_bits": num(c.membership_slack), "pass": c.pass })
}

pub fn gap_check(a: &GapArgs) -> Result<i32, Failure> {
    if let Some(c) = a.sum_fronthaul {
        if !(c.is_finite() && c >= 0.0) {
            return Err(Failure::input("--sum-fronthaul must be finite and nonnegative"));
        }
    }
    let checked: Vec<Checked> = match load_instance(a.instance.as_deref(), a.random.as_deref())? {
        Some(inst) => {
            check_caps(&inst, a.max_users, a.max_bss)?;
            vec![Checked { label: json!("single"), certs: check(&inst, a.sum_fronthaul)? }]
        }
        None => {
            let dims = CampaignDims { snr_db: parse_list("snr", &a.snr)?, ..CampaignDims::default() };
            if dims.snr_db.iter().any(|s| !s.is_finite()) {
                return Err(Failure::input("--snr: values must be finite"));
            }
            let specs = dims.specs(a.seed, a.count);
            specs
                .par_iter()
                .map(|s| {
                    let label = json!({ "index": s.index, "seed": s.seed, "K": s.users, "L": s.bss, "M": s.tx, "N": s.rx, "snr_db": num(s.snr_db) });
                    Ok(Checked { label, certs: check(&s.instance(), a.sum_fronthaul)? })
                })
                .collect::<Result<Vec<_>, Failure>>()?
        }
    };
    ensure_dir(&a.out)?;
    let mut rows = Vec::new();
    let mut entries = Vec::new();
    let mut worst = [0.0f64; 3];
    let mut failures = 0;
    for (i, c) in checked.iter().enumerate() {
        for (j, cert) in c.certs.iter().enumerate() {
            worst[j] = worst[j].max(cert.worst);
            failures += usize::from(!cert.pass);
            for cut in &cert.cuts {
                rows.push(vec![
                    i.to_string(),
                    cert.kind.label().into(),
                    cut.users.to_string(),
                    cut.bss.to_string(),
                    fmt(cut.outer),
                    fmt(cut.inner),
                    fmt(cut.gap),
                    fmt(cut.bound),
                ]);
            }
        }
        entries.push(json!({
            "instance": c.label,
            "jd": cert_json(&c.certs[0]),
            "sd_sum": cert_json(&c.certs[1]),
            "gsd_sum_fronthaul": cert_json(&c.certs[2]),
        }));
    }
    write_csv(
        &a.out.join("gaps.csv"),
        &["instance", "kind", "T-bitmask", "S-bitmask", "outer-bits", "inner-bits", "gap-bits", "bound-bits"],
        &rows,
    )?;
    let report = json!({
        "units": "bits per complex dimension",
        "quantizer": "appendixD",
        "instances": entries.len(),
        "worst_gap_bits": { "jd": num(worst[0]), "sd_sum": num(worst[1]), "gsd_sum_fronthaul": num(worst[2]) },
        "failures": failures,
        "pass": failures == 0,
        "certificates": entries,
    });
    write_json(&a.out.join("gap.json"), &report)?;
    if failures == 0 {
        Ok(EXIT_OK)
    } else {
        eprintln!("cran: {failures} gap certificate(s) failed");
        Ok(EXIT_VIOLATIONS)
    }
}
