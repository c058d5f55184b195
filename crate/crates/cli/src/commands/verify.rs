//! Verification campaigns. Instances are derived from `(seed, index)` alone and
//! fanned out with rayon; results are reassembled in index order, so the report
//! does not depend on the thread count.

use std::time::{Instant, SystemTime, UNIX_EPOCH};

use cran_core::campaign::{CampaignDims, InstanceSpec};
use cran_core::equivalence::{self, CampaignSummary, DominationCertificate, Scheme, DOMINATION_TOL};
use cran_core::regions::RateFronthaulTuple;
use cran_core::submodular::{self, SetFunction, Side, SET_TOL};
use cran_core::{gaussinfo, subset, NetworkInstance, QuantizerB};
use rayon::prelude::*;
use serde_json::{json, Value};

use super::order_label;
use crate::output::{ensure_dir, members, num, nums, write_compact_json, write_json};
use crate::{parse_list, Failure, Fault, VerifyArgs, EXIT_CAP, EXIT_OK, EXIT_VIOLATIONS};

/// Violation messages kept verbatim in the report; the count is always exact.
const LISTED_VIOLATIONS: usize = 50;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Selection {
    pub thm1: bool,
    pub thm2: bool,
    pub lemmas: bool,
    pub greedy: bool,
}

impl Selection {
    fn parse(text: &str) -> Result<Self, Failure> {
        let mut s = Selection::default();
        for name in text.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            match name {
                "thm1" => s.thm1 = true,
                "thm2" => s.thm2 = true,
                "lemmas" => s.lemmas = true,
                "greedy" => s.greedy = true,
                other => return Err(Failure::input(format!("--theorems: unknown entry {other:?} (expected thm1, thm2, lemmas, greedy)"))),
            }
        }
        Ok(s)
    }

    fn names(&self) -> Vec<&'static str> {
        [("thm1", self.thm1), ("thm2", self.thm2), ("lemmas", self.lemmas), ("greedy", self.greedy)].into_iter().filter(|x| x.1).map(|x| x.0).collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
struct ModularityStats {
    runs: usize,
    violations: usize,
    worst_f: Option<f64>,
    worst_g: Option<f64>,
    worst_g_plus: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
struct GreedyStats {
    runs: usize,
    violations: usize,
    worst_slack: Option<f64>,
    tight_count_mismatches: usize,
}

fn lower(slot: &mut Option<f64>, v: f64) {
    if v.is_finite() {
        *slot = Some(slot.map_or(v, |w| w.min(v)));
    }
}

fn merge_min(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, y) => x.or(y),
    }
}

#[derive(Debug, Default)]
struct InstanceOutcome {
    thm1: CampaignSummary,
    thm2: CampaignSummary,
    thm1_violations: usize,
    thm2_violations: usize,
    lemmas: ModularityStats,
    greedy: GreedyStats,
    violations: Vec<String>,
    certificates: Vec<Value>,
}

/// A certificate fails when its slack is below `-tol`, a numerical check
/// failed, or its combination weights are not a probability vector.
fn violated(cert: &DominationCertificate, tol: f64) -> bool {
    let checks_ok = cert.checks.iter().all(|c| c.passed);
    let weights_bad = !cert.dominates && checks_ok && cert.min_slack >= -DOMINATION_TOL;
    !checks_ok || weights_bad || cert.min_slack < -tol
}

fn tuple_json(t: &RateFronthaulTuple) -> Value {
    json!({ "rates_bits": nums(&t.rates), "fronthaul_bits": nums(&t.fronthaul) })
}

pub fn certificate_json(cert: &DominationCertificate) -> Value {
    let combination: Vec<Value> = cert
        .combination
        .iter()
        .map(|c| {
            let scheme = match &c.scheme {
                Scheme::Gsd(order) => json!({ "gsd": order_label(order) }),
                Scheme::Sd { active, order } => json!({ "sd": { "active": members(*active), "order": order_label(order) } }),
            };
            json!({ "weight": num(c.weight), "scheme": scheme, "achieved": tuple_json(&c.achieved) })
        })
        .collect();
    let checks: Vec<Value> = cert.checks.iter().map(|c| json!({ "name": c.name, "value": num(c.value), "passed": c.passed })).collect();
    json!({
        "case": cert.case.label(),
        "ordering": cert.ordering,
        "mixing": cert.mixing.map(num),
        "split": cert.split,
        "target": tuple_json(&cert.target),
        "achieved": tuple_json(&cert.achieved),
        "combination": combination,
        "rate_slack_bits": nums(&cert.rate_slack),
        "fronthaul_slack_bits": nums(&cert.fronthaul_slack),
        "min_slack_bits": num(cert.min_slack),
        "checks": checks,
        "dominates": cert.dominates,
    })
}

fn modularity(
    out: &mut InstanceOutcome,
    spec: &InstanceSpec,
    inst: &NetworkInstance,
    b: &QuantizerB,
    label: &str,
    csums: &[f64],
    sel: Selection,
    fault: Option<Fault>,
) -> Result<(), Failure> {
    let (k, l) = (inst.users(), inst.bss());
    let full_info = gaussinfo::i_x_yhat_cond(inst, b, subset::full(k), subset::full(l)).map_err(cran_core::regions::RegionError::from)?;
    let set_err = |e: submodular::SetFunctionError| Failure::cap(e.to_string());
    for &csum in csums {
        let base = submodular::f_jd_sumfronthaul(inst, b, csum).map_err(cran_core::regions::RegionError::from)?;
        let f = SetFunction::new(k, |t| {
            let extra = match fault {
                Some(Fault::Submodular) => (subset::size(t) * subset::size(t)) as f64,
                None => 0.0,
            };
            base.value(t) + extra
        });
        if sel.lemmas {
            let c = submodular::is_submodular(&f).map_err(set_err)?;
            out.lemmas.runs += 1;
            lower(&mut out.lemmas.worst_f, c.worst_margin);
            if !c.holds {
                out.lemmas.violations += 1;
                let (s, t, by) = c.witness.unwrap_or((0, 0, f64::NAN));
                out.violations.push(format!("instance {} ({label}, Csum {csum}): f not submodular at S={s}, T={t} by {by:e}", spec.index));
            }
        }
        if sel.greedy {
            for ordering in subset::permutations(k) {
                let x = submodular::greedy_extreme_point(&f, &ordering).map_err(set_err)?;
                let slack = submodular::polyhedron_check(&f, &x, Side::AtMost).min_slack;
                let tight = submodular::tight_chain_count(&f, &x, &ordering);
                out.greedy.runs += 1;
                lower(&mut out.greedy.worst_slack, slack);
                if tight != k {
                    out.greedy.tight_count_mismatches += 1;
                }
                if slack < -SET_TOL || tight != k {
                    out.greedy.violations += 1;
                    out.violations.push(format!("instance {} ({label}, Csum {csum}): greedy point along {ordering:?} has slack {slack:e}, {tight}/{k} tight", spec.index));
                }
            }
        }
    }
    for frac in [0.25, 0.75] {
        let rate = frac * full_info;
        let (g, g_plus) = submodular::g_fronthaul(inst, b, rate).map_err(cran_core::regions::RegionError::from)?;
        if sel.lemmas {
            for (name, func) in [("g", &g), ("g+", &g_plus)] {
                let c = submodular::is_supermodular(func).map_err(set_err)?;
                out.lemmas.runs += 1;
                lower(if name == "g" { &mut out.lemmas.worst_g } else { &mut out.lemmas.worst_g_plus }, c.worst_margin);
                if !c.holds {
                    out.lemmas.violations += 1;
                    out.violations.push(format!("instance {} ({label}, R {rate}): {name} not supermodular", spec.index));
                }
            }
        }
        if sel.greedy {
            for ordering in subset::permutations(l) {
                let c = submodular::supermodular_extreme_point(&g_plus, &ordering).map_err(set_err)?;
                let slack = submodular::polyhedron_check(&g_plus, &c, Side::AtLeast).min_slack;
                let tight = submodular::tight_chain_count(&g_plus, &c, &ordering);
                out.greedy.runs += 1;
                lower(&mut out.greedy.worst_slack, slack);
                if tight != l {
                    out.greedy.tight_count_mismatches += 1;
                }
                if slack < -SET_TOL || tight != l {
                    out.greedy.violations += 1;
                    out.violations.push(format!("instance {} ({label}, R {rate}): g+ greedy point along {ordering:?} has slack {slack:e}, {tight}/{l} tight", spec.index));
                }
            }
        }
    }
    Ok(())
}

fn run_instance(spec: &InstanceSpec, sel: Selection, tol: f64, fault: Option<Fault>) -> Result<InstanceOutcome, Failure> {
    let inst = spec.instance();
    let mut out = InstanceOutcome::default();
    for (label, b) in ["appendixD", "random"].into_iter().zip(spec.quantizers(&inst)?) {
        let csums = equivalence::sum_capacity_grid(&inst, &b)?;
        let mut thm1 = Vec::new();
        let mut thm2 = Vec::new();
        if sel.thm1 {
            for cert in equivalence::theorem1_sweep(&inst, &b, &csums)? {
                out.thm1.record(&cert);
                if violated(&cert, tol) {
                    out.thm1_violations += 1;
                    out.violations.push(format!("instance {} ({label}): theorem 1 certificate along {:?} has slack {:e}", spec.index, cert.ordering, cert.min_slack));
                }
                thm1.push(certificate_json(&cert));
            }
        }
        if sel.thm2 {
            for cert in equivalence::theorem2_sweep(&inst, &b)? {
                out.thm2.record(&cert);
                if violated(&cert, tol) {
                    out.thm2_violations += 1;
                    out.violations.push(format!("instance {} ({label}): theorem 2 certificate along {:?} has slack {:e}", spec.index, cert.ordering, cert.min_slack));
                }
                thm2.push(certificate_json(&cert));
            }
        }
        if sel.lemmas || sel.greedy {
            modularity(&mut out, spec, &inst, &b, label, &csums, sel, fault)?;
        }
        out.certificates.push(json!({ "quantizer": label, "sum_capacities_bits": nums(&csums), "theorem1": thm1, "theorem2": thm2 }));
    }
    Ok(out)
}

fn summary_json(s: &CampaignSummary, violations: usize, histogram: &str) -> Value {
    let mut v = json!({
        "runs": s.runs,
        "violations": violations,
        "worst_slack_bits": s.worst_slack.map(num),
        "cases": s.cases,
        "failed_checks": s.failed_checks,
    });
    v[histogram] = json!(s.mixing_histogram());
    v
}

fn spec_json(s: &InstanceSpec) -> Value {
    json!({ "index": s.index, "seed": s.seed, "K": s.users, "L": s.bss, "M": s.tx, "N": s.rx, "snr_db": num(s.snr_db) })
}

pub fn verify(a: &VerifyArgs) -> Result<i32, Failure> {
    let started = SystemTime::now();
    let clock = Instant::now();
    let sel = Selection::parse(&a.theorems)?;
    if !(a.tol > 0.0 && a.tol.is_finite()) {
        return Err(Failure::input("--tol must be positive"));
    }
    let dims = CampaignDims {
        users: parse_list("users", &a.users)?,
        bss: parse_list("bss", &a.bss)?,
        tx: parse_list("tx", &a.tx)?,
        rx: parse_list("rx", &a.rx)?,
        snr_db: parse_list("snr", &a.snr)?,
    };
    for (flag, list) in [("users", &dims.users), ("bss", &dims.bss), ("tx", &dims.tx), ("rx", &dims.rx)] {
        if list.iter().any(|&d| d == 0) {
            return Err(Failure::input(format!("--{flag}: dimensions must be at least 1")));
        }
    }
    if dims.snr_db.iter().any(|s| !s.is_finite()) {
        return Err(Failure::input("--snr: values must be finite"));
    }
    let (max_k, max_l) = (a.max_users.min(6), a.max_bss.min(6));
    if let Some(&k) = dims.users.iter().find(|&&k| k > max_k) {
        return Err(Failure { code: EXIT_CAP, message: format!("K = {k} exceeds the enumeration cap {max_k}") });
    }
    if let Some(&l) = dims.bss.iter().find(|&&l| l > max_l) {
        return Err(Failure { code: EXIT_CAP, message: format!("L = {l} exceeds the enumeration cap {max_l}") });
    }

    let specs = dims.specs(a.seed, a.count);
    let outcomes: Vec<Result<InstanceOutcome, Failure>> = specs.par_iter().map(|s| run_instance(s, sel, a.tol, a.inject_fault)).collect();

    let mut thm1 = CampaignSummary::default();
    let mut thm2 = CampaignSummary::default();
    let (mut v1, mut v2) = (0, 0);
    let mut lemmas = ModularityStats::default();
    let mut greedy = GreedyStats::default();
    let mut violations: Vec<String> = Vec::new();
    let mut errors = 0;
    ensure_dir(&a.out)?;
    let cert_dir = a.out.join("certificates");
    if !specs.is_empty() {
        ensure_dir(&cert_dir)?;
    }
    for (spec, outcome) in specs.iter().zip(outcomes) {
        let o = match outcome {
            Ok(o) => o,
            Err(f) if f.code == EXIT_CAP || f.code == crate::EXIT_INPUT => return Err(f),
            Err(f) => {
                errors += 1;
                violations.push(format!("instance {}: {}", spec.index, f.message));
                continue;
            }
        };
        thm1.merge(&o.thm1);
        thm2.merge(&o.thm2);
        v1 += o.thm1_violations;
        v2 += o.thm2_violations;
        lemmas.runs += o.lemmas.runs;
        lemmas.violations += o.lemmas.violations;
        lemmas.worst_f = merge_min(lemmas.worst_f, o.lemmas.worst_f);
        lemmas.worst_g = merge_min(lemmas.worst_g, o.lemmas.worst_g);
        lemmas.worst_g_plus = merge_min(lemmas.worst_g_plus, o.lemmas.worst_g_plus);
        greedy.runs += o.greedy.runs;
        greedy.violations += o.greedy.violations;
        greedy.worst_slack = merge_min(greedy.worst_slack, o.greedy.worst_slack);
        greedy.tight_count_mismatches += o.greedy.tight_count_mismatches;
        violations.extend(o.violations);
        let file = cert_dir.join(format!("instance-{:05}.json", spec.index));
        write_compact_json(&file, &json!({ "instance": spec_json(spec), "quantizers": o.certificates }))?;
    }

    let total = v1 + v2 + lemmas.violations + greedy.violations + errors;
    let report = json!({
        "config": {
            "seed": a.seed,
            "count": a.count,
            "theorems": sel.names(),
            "tol": num(a.tol),
            "dims": { "K": dims.users, "L": dims.bss, "M": dims.tx, "N": dims.rx, "snr_db": nums(&dims.snr_db) },
            "quantizers": ["appendixD", "random"],
        },
        "units": "bits per complex dimension",
        "instances": specs.len(),
        "theorem1": sel.thm1.then(|| summary_json(&thm1, v1, "theta_histogram")),
        "theorem2": sel.thm2.then(|| summary_json(&thm2, v2, "alpha_histogram")),
        "lemmas": sel.lemmas.then(|| json!({
            "runs": lemmas.runs,
            "violations": lemmas.violations,
            "worst_margin_f": lemmas.worst_f.map(num),
            "worst_margin_g": lemmas.worst_g.map(num),
            "worst_margin_g_plus": lemmas.worst_g_plus.map(num),
        })),
        "greedy": sel.greedy.then(|| json!({
            "runs": greedy.runs,
            "violations": greedy.violations,
            "worst_slack_bits": greedy.worst_slack.map(num),
            "tight_count_mismatches": greedy.tight_count_mismatches,
        })),
        "errors": errors,
        "violation_count": total,
        "violations": violations.iter().take(LISTED_VIOLATIONS).collect::<Vec<_>>(),
        "pass": total == 0,
    });
    write_json(&a.out.join("report.json"), &report)?;
    let started_s = started.duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0);
    let metadata = json!({
        "started_unix_s": num(started_s),
        "elapsed_s": num(clock.elapsed().as_secs_f64()),
        "threads": rayon::current_num_threads(),
        "version": env!("CARGO_PKG_VERSION"),
    });
    write_json(&a.out.join("metadata.json"), &metadata)?;
    if total == 0 {
        Ok(EXIT_OK)
    } else {
        eprintln!("cran: {total} violation(s); see {}", a.out.join("report.json").display());
        Ok(EXIT_VIOLATIONS)
    }
}
