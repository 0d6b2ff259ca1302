use serde_json::{json, Value};

use crate::args::{Param, SweepArgs};
use crate::drivers;
use crate::output::{finite, CliError, Outcome};

pub const TABLE_HEADER: &str = "param,value,seeds,mean_iterations,mean_objective,metric,mean,variance,converged_fraction";

fn mean_var(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    // unbiased; a single seed has no spread
    let var = if v.len() > 1 { v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    (mean, var)
}

/// Runs every (value, seed) pair before anything is written; the per-run
/// outputs land under `runs/NNN/`.
pub fn run(args: &SweepArgs) -> Result<Outcome, CliError> {
    if args.values.is_empty() {
        return Err(CliError::Usage("--values needs at least one entry".into()));
    }
    if args.seeds == 0 {
        return Err(CliError::Usage("--seeds must be at least 1".into()));
    }
    if args.param == Param::Seed && args.seeds > 1 {
        return Err(CliError::Usage("--seeds > 1 cannot be combined with --param seed".into()));
    }
    if args.common.trace_out.is_some() {
        return Err(CliError::Usage("--trace-out is not used by sweep".into()));
    }
    if args.common.given().contains(&args.param.name()) {
        return Err(CliError::Usage(format!("--{} is swept and cannot also be fixed", args.param.name())));
    }
    let base_seed = args.common.seed.unwrap_or(0);
    let mut table = format!("{TABLE_HEADER}\n");
    let mut out = Outcome::new("sweep");
    let mut rows = Vec::new();
    let mut all = true;
    let mut total = 0;
    let mut index = 0;
    for &value in &args.values {
        let (mut iters, mut objs, mut metrics, mut conv) = (Vec::new(), Vec::new(), Vec::new(), 0usize);
        let mut metric_name = "final_objective";
        for s in 0..args.seeds {
            let mut c = args.common.clone();
            c.set(args.param, value).map_err(CliError::Usage)?;
            if args.seeds > 1 {
                c.seed = Some(base_seed + s);
            }
            let r = drivers::run(args.driver, &c)?;
            iters.push(r.iterations as f64);
            objs.push(r.objective);
            match r.metric {
                Some((name, v)) => {
                    metric_name = name;
                    metrics.push(v);
                }
                None => metrics.push(r.objective),
            }
            conv += usize::from(r.converged);
            total += r.iterations;
            all &= r.converged;
            let dir = format!("runs/{index:03}");
            if let Some(t) = &r.trace {
                out.files.push((format!("{dir}/trace.csv"), t.clone().into_bytes()));
            }
            out.files.push((format!("{dir}/summary.json"), r.summary_json().into_bytes()));
            index += 1;
        }
        let (mi, _) = mean_var(&iters);
        let (mo, _) = mean_var(&objs);
        let (mm, vm) = mean_var(&metrics);
        let frac = conv as f64 / args.seeds as f64;
        table.push_str(&format!(
            "{},{value:?},{},{mi:?},{mo:?},{metric_name},{mm:?},{vm:?},{frac:?}\n",
            args.param.name(),
            args.seeds
        ));
        rows.push(json!({ "value": value, "mean_iterations": mi, "mean_objective": finite(mo), "metric": metric_name,
            "mean": finite(mm), "variance": finite(vm), "converged_fraction": frac }));
    }
    out.summary.insert("swept_driver".into(), Value::String(format!("{:?}", args.driver).to_lowercase()));
    out.summary.insert("param".into(), json!(args.param.name()));
    out.summary.insert("seeds".into(), json!(args.seeds));
    out.summary.insert("rows".into(), Value::Array(rows));
    out.summary.insert("converged".into(), json!(all));
    out.converged = all;
    out.iterations = total;
    out.files.push(("table.csv".into(), table.into_bytes()));
    Ok(out)
}
