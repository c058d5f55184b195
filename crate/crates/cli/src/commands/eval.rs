use cran_core::regions::{self, DecodingOrder, RegionError, SubsetConstraint};
use cran_core::submodular;
use cran_core::subset;
use serde_json::{json, Value};

use super::order_label;
use crate::output::{ensure_dir, fmt, num, nums, write_csv, write_json};
use crate::{EvalArgs, Failure, EXIT_OK};

const CONSTRAINT_HEADER: [&str; 4] = ["kind", "T-bitmask", "S-bitmask", "rhs-bits"];

fn constraint_row(c: &SubsetConstraint) -> Vec<String> {
    vec![c.kind.label().into(), c.users.to_string(), c.bss.to_string(), fmt(c.rhs)]
}

pub fn eval_region(a: &EvalArgs) -> Result<i32, Failure> {
    let inst = a.source.instance()?;
    let b = a.source.quantizer(&inst)?;
    ensure_dir(&a.out)?;
    let (k, l) = (inst.users(), inst.bss());

    let jd = regions::jd_constraints(&inst, &b)?;
    let sd = regions::sd_constraints(&inst, &b)?;
    let cut = regions::cutset_constraints(&inst)?;
    let mut rows: Vec<Vec<String>> = jd.iter().chain(&sd.rates).map(constraint_row).collect();
    // SD fronthaul rows read `Σ_{ℓ∈S} C_ℓ ≥ rhs`.
    rows.extend(sd.fronthaul.iter().map(|f| vec!["sd-fronthaul".into(), "0".into(), f.bss.to_string(), fmt(f.usage)]));
    rows.extend(cut.iter().map(constraint_row));
    write_csv(&a.out.join("constraints.csv"), &CONSTRAINT_HEADER, &rows)?;
    let mut files = vec!["constraints.csv"];

    let ones = vec![1.0; k];
    let jd_sum = regions::max_weighted_rate(k, &jd, &ones)?.value;
    let cut_sum = regions::max_weighted_rate(k, &cut, &ones)?.value;
    let sd_sum = sd.rates.last().filter(|_| sd.feasible).map(|c| c.rhs);

    let gsd = match regions::gsd_max_sum_rate(&inst, &b) {
        Ok(best) => {
            let header: Vec<String> = ["order".to_string()]
                .into_iter()
                .chain((0..k).map(|i| format!("R{i}-bits")))
                .chain((0..l).map(|i| format!("C{i}-bits")))
                .chain(["fits".to_string()])
                .collect();
            let mut gsd_rows = Vec::new();
            for order in DecodingOrder::all(k, l) {
                let t = regions::gsd_rates(&inst, &b, &order)?;
                let fits = t.fronthaul.iter().zip(inst.fronthauls()).all(|(u, c)| *u <= c + regions::MEMBERSHIP_TOL);
                let mut row = vec![order_label(&order)];
                row.extend(t.rates.iter().chain(&t.fronthaul).map(|&x| fmt(x)));
                row.push(fits.to_string());
                gsd_rows.push(row);
            }
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            write_csv(&a.out.join("gsd_orders.csv"), &header, &gsd_rows)?;
            files.push("gsd_orders.csv");
            json!({ "bits": best.as_ref().map(|b| num(b.0)), "order": best.as_ref().map(|b| order_label(&b.1)) })
        }
        Err(RegionError::CapExceeded { what, value, cap }) => json!({ "skipped": format!("{what} = {value} exceeds {cap}") }),
        Err(e) => return Err(e.into()),
    };

    if k == 2 {
        let mut brows = Vec::new();
        for (name, cons) in [("jd", &jd), ("cutset", &cut)] {
            for p in regions::boundary_2d(cons, a.directions)? {
                brows.push(vec![name.to_string(), fmt(p[0]), fmt(p[1])]);
            }
        }
        if sd.feasible {
            for p in regions::boundary_2d(&sd.rates, a.directions)? {
                brows.push(vec!["sd".to_string(), fmt(p[0]), fmt(p[1])]);
            }
        }
        write_csv(&a.out.join("boundary.csv"), &["region", "R1-bits", "R2-bits"], &brows)?;
        files.push("boundary.csv");
    }

    let mut sum_fronthaul = Value::Null;
    if let Some(csum) = a.sum_fronthaul {
        if !(csum.is_finite() && csum >= 0.0) {
            return Err(Failure::input("--sum-fronthaul must be finite and nonnegative"));
        }
        let f = submodular::f_jd_sumfronthaul(&inst, &b, csum).map_err(RegionError::from)?;
        let check = submodular::is_submodular(&f).map_err(|e| Failure::cap(e.to_string()))?;
        let header: Vec<String> = ["ordering".to_string()].into_iter().chain((0..k).map(|i| format!("R{i}-bits"))).collect();
        let mut prow = Vec::new();
        for ordering in subset::permutations(k) {
            let x = submodular::greedy_extreme_point(&f, &ordering).map_err(|e| Failure::internal(e.to_string()))?;
            let mut row = vec![ordering.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ")];
            row.extend(x.iter().map(|&v| fmt(v)));
            prow.push(row);
        }
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        write_csv(&a.out.join("sumfronthaul_points.csv"), &header, &prow)?;
        files.push("sumfronthaul_points.csv");
        sum_fronthaul = json!({ "budget_bits": num(csum), "f_submodular": check.holds, "sum_rate_bits": num(f.value(subset::full(k))) });
    }

    let summary = json!({
        "units": "bits per complex dimension",
        "K": k, "L": l, "M": inst.tx_antennas(), "N": inst.rx_antennas(),
        "quantizer": a.source.quantizer,
        "fronthaul_bits": nums(inst.fronthauls()),
        "penalty_bits": nums(&regions::penalties(&b)),
        "sd_fronthaul_feasible": sd.feasible,
        "sum_rate_bits": {
            "jd": num(jd_sum),
            "sd": sd_sum.map(num),
            "gsd": gsd,
            "cutset": num(cut_sum),
        },
        "sum_fronthaul": sum_fronthaul,
        "files": files,
    });
    write_json(&a.out.join("summary.json"), &summary)?;
    Ok(EXIT_OK)
}
