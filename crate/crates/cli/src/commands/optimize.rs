use cran_core::optimize::{self, Method, Objective, SolverOptions};
use serde_json::json;

use crate::instance_file::from_matrix;
use crate::output::{ensure_dir, fmt, members, num, nums, write_csv, write_json};
use crate::{parse_list, Failure, MethodArg, ObjectiveArg, OptimizeArgs, EXIT_BUDGET, EXIT_OK};

fn per_entry(flag: &str, text: Option<&str>, n: usize) -> Result<Vec<f64>, Failure> {
    match text {
        None => Ok(vec![1.0; n]),
        Some(t) => {
            let v: Vec<f64> = parse_list(flag, t)?;
            if v.len() != n {
                return Err(Failure::input(format!("--{flag}: expected {n} values, got {}", v.len())));
            }
            Ok(v)
        }
    }
}

pub fn optimize(a: &OptimizeArgs) -> Result<i32, Failure> {
    let inst = a.source.instance()?;
    if !(a.tol > 0.0 && a.tol.is_finite()) {
        return Err(Failure::input("--tol must be positive"));
    }
    if a.max_iters == 0 {
        return Err(Failure::input("--max-iters must be at least 1"));
    }
    let csum = || a.sum_fronthaul.ok_or_else(|| Failure::input("--sum-fronthaul is required for this objective"));
    let objective = match a.objective {
        ObjectiveArg::JdWeighted => Objective::JdWeighted { weights: per_entry("weights", a.weights.as_deref(), inst.users())? },
        ObjectiveArg::SdSum => Objective::SdSum,
        ObjectiveArg::SdSumSumfronthaul => Objective::SdSumFronthaul { csum: csum()? },
        ObjectiveArg::RateFronthaulTradeoff => Objective::Tradeoff {
            weights: per_entry("weights", a.weights.as_deref(), inst.users())?,
            prices: per_entry("prices", a.prices.as_deref(), inst.bss())?,
            gamma: a.gamma,
            csum: csum()?,
        },
    };
    let opts = SolverOptions {
        method: match a.method {
            MethodArg::Barrier => Method::Barrier,
            MethodArg::Supergradient => Method::Supergradient,
        },
        max_iters: a.max_iters,
        tolerance: a.tol,
        trace: a.trace,
        polyak_target: None,
    };
    let r = optimize::solve(&inst, &objective, &opts)?;
    ensure_dir(&a.out)?;

    let slacks: Vec<_> = r.slacks.iter().map(|s| json!({ "T": members(s.users), "S": members(s.bss), "slack_bits": num(s.value) })).collect();
    let report = json!({
        "units": "bits per complex dimension",
        "objective": objective.label(),
        "method": match r.method { Method::Barrier => "barrier", Method::Supergradient => "supergradient" },
        "value_bits": num(r.value),
        "solver_value_bits": num(r.solver_value),
        "rates_bits": nums(&r.rates),
        "fronthaul_bits": r.fronthaul.as_deref().map(nums),
        "gap_estimate_bits": r.gap_estimate.map(num),
        "iterations": r.iterations,
        "converged": r.converged,
        "B": r.b_star.matrices().iter().map(from_matrix).collect::<Vec<_>>(),
        "whitened_eigenvalues": r.b_star.whitened_matrices().iter().map(|w| nums(&cran_core::linalg::eigenvalues(w))).collect::<Vec<_>>(),
        "slacks": slacks,
    });
    write_json(&a.out.join("solve.json"), &report)?;
    if a.trace {
        let rows: Vec<Vec<String>> = r.trace.iter().map(|t| vec![t.iteration.to_string(), fmt(t.value), fmt(t.step), fmt(t.min_slack)]).collect();
        write_csv(&a.out.join("trace.csv"), &["iteration", "value-bits", "step", "min-slack-bits"], &rows)?;
    }
    if r.converged {
        Ok(EXIT_OK)
    } else {
        eprintln!("cran: iteration budget of {} exhausted; best iterate written", a.max_iters);
        Ok(EXIT_BUDGET)
    }
}
