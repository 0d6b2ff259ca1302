use std::path::Path;
use std::sync::Arc;

use rsplit::io::{self, InstanceHeader, PgmEncoding};
use rsplit::solvers::{admm, continuation, rs_pgd, AdmmOptions, ContinuationResult, ContinuationSchedule};
use rsplit::{LinearOperator, Matrix, QuadraticRegularizer, SeparableNonsmooth, SolveOptions, Vector};
use rsplit_apps::{clustering, lad, phase, rpca, sslr, ssp, store};
use serde_json::{json, Value};

use crate::args::{Common, Driver, Start};
use crate::output::{finite, plot_csv, CliError, Outcome};

type Result<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn failed(e: impl std::fmt::Display) -> CliError {
    CliError::Failed(e.to_string())
}

/// Rejects flags the driver does not read.
fn only(c: &Common, driver: &str, allowed: &[&str]) -> Result<()> {
    match c.given().into_iter().find(|f| !allowed.contains(f)) {
        Some(f) => Err(usage(format!("--{f} is not used by {driver}"))),
        None => Ok(()),
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(usage(format!("--{name} must be positive, got {v}")))
    }
}

fn nonnegative(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(usage(format!("--{name} must be nonnegative, got {v}")))
    }
}

fn fraction(name: &str, v: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(usage(format!("--{name} must lie in [0, 1], got {v}")))
    }
}

fn at_least(name: &str, v: usize, lo: usize) -> Result<usize> {
    if v >= lo {
        Ok(v)
    } else {
        Err(usage(format!("--{name} must be at least {lo}, got {v}")))
    }
}

fn solve_opts(c: &Common, max_iter: usize, tol: f64) -> Result<SolveOptions> {
    let mut o = SolveOptions::default().with_max_iter(at_least("max-iter", c.max_iter.unwrap_or(max_iter), 1)?);
    o = o.with_tol(nonnegative("tol", c.tol.unwrap_or(tol))?);
    o.record_timing = c.timing;
    Ok(o)
}

fn schedule(c: &Common, default: &str) -> Result<io::Schedule> {
    io::parse_schedule(c.schedule.as_deref().unwrap_or(default)).map_err(|e| usage(format!("--schedule: {e}")))
}

fn column(v: &Vector) -> Matrix {
    Matrix::from_column_slice(v.len(), 1, v.as_slice())
}

fn mtx(m: &Matrix) -> Vec<u8> {
    io::write_matrix_market_array(m).into_bytes()
}

fn stage_files(out: &mut Outcome, c: &ContinuationResult) {
    let mut rows = Vec::new();
    for (i, s) in c.stages.iter().enumerate() {
        out.files.push((format!("stage_{i:02}.csv"), s.trace.to_csv().into_bytes()));
        rows.push(json!({ "nu": s.nu, "iterations": s.summary.iterations, "final_objective": finite(s.summary.final_objective),
            "final_gap": finite(s.summary.final_gap), "converged": s.summary.converged }));
    }
    out.summary.insert("stages".into(), Value::Array(rows));
    if let Some(last) = c.stages.last() {
        out.trace = Some(last.trace.to_csv());
        out.files.push(("plot.csv".into(), plot_csv(&last.trace)));
    }
}

fn header(kind: &str) -> InstanceHeader {
    let mut h = InstanceHeader::new();
    h.set("kind", kind);
    h
}

fn instance_files(out: &mut Outcome, h: &InstanceHeader, mats: &[(&str, &Matrix)]) {
    out.files.push(("instance/instance.txt".into(), io::write_instance_header(h).into_bytes()));
    for (name, m) in mats {
        out.files.push((format!("instance/{name}.mtx"), mtx(m)));
    }
}

fn check_kind(dir: &Path, kind: &str) -> Result<InstanceHeader> {
    let h = store::load_header(dir).map_err(failed)?;
    match h.get("kind") {
        Some(k) if k == kind => Ok(h),
        other => Err(failed(format!("{}: instance kind {:?}, expected {kind}", dir.display(), other))),
    }
}

fn load_vector(path: &Path) -> Result<Vector> {
    let m = store::load_matrix(path).map_err(failed)?;
    if m.ncols() != 1 {
        return Err(failed(format!("{}: expected a column vector, found {}x{}", path.display(), m.nrows(), m.ncols())));
    }
    Ok(m.column(0).into_owned())
}

pub fn run(driver: Driver, c: &Common) -> Result<Outcome> {
    match driver {
        Driver::Lad => run_lad(c),
        Driver::Phase => run_phase(c),
        Driver::PhaseTrimmed => run_phase_trimmed(c),
        Driver::Sslr => run_sslr(c),
        Driver::Ssp => run_ssp(c),
        Driver::Cluster => run_cluster(c),
        Driver::Rpca => run_rpca(c),
        Driver::Continuation => run_continuation(c),
    }
}

struct LadData {
    a: Matrix,
    b: Vector,
    x_true: Option<Vector>,
    generated: bool,
}

fn lad_data(c: &Common, default_n: usize) -> Result<LadData> {
    if let Some(dir) = &c.data {
        if c.m.is_some() || c.n.is_some() || c.seed.is_some() || c.corrupt.is_some() {
            return Err(usage("--m, --n, --seed and --corrupt conflict with --data"));
        }
        check_kind(dir, "lad")?;
        let a = store::load_matrix(&dir.join("A.mtx")).map_err(failed)?;
        let b = load_vector(&dir.join("b.mtx"))?;
        let x_path = dir.join("x_true.mtx");
        let x_true = if x_path.exists() { Some(load_vector(&x_path)?) } else { None };
        if a.nrows() != b.len() || a.nrows() <= a.ncols() {
            return Err(failed(format!("A is {}x{} and b has {} entries; need m = len(b) > n", a.nrows(), a.ncols(), b.len())));
        }
        return Ok(LadData { a, b, x_true, generated: false });
    }
    let m = c.m.unwrap_or(200);
    let n = at_least("n", c.n.unwrap_or(default_n), 1)?;
    if m <= n {
        return Err(usage(format!("need --m > --n, got {m} and {n}")));
    }
    let frac = fraction("corrupt", c.corrupt.unwrap_or(0.1))?;
    let inst = lad::generate_lad(m, n, frac, c.seed.unwrap_or(0)).map_err(failed)?;
    Ok(LadData { a: inst.a, b: inst.b, x_true: Some(inst.x_true), generated: true })
}

fn lad_report(out: &mut Outcome, d: &LadData, x: &Vector) -> Result<()> {
    out.summary.insert("l1_objective".into(), json!(lad::l1_objective(&d.a, &d.b, x)));
    if let Some(xt) = &d.x_true {
        let e = lad::relative_error(x, xt);
        let ls = lad::least_squares(&d.a, &d.b).map_err(failed)?;
        out.summary.insert("rel_error".into(), json!(e));
        out.summary.insert("ls_rel_error".into(), json!(lad::relative_error(&ls, xt)));
        out.metric = Some(("rel_error", e));
    }
    if d.generated {
        let mut h = header("lad");
        h.set("m", d.a.nrows()).set("n", d.a.ncols());
        let xt = column(d.x_true.as_ref().expect("generated instances carry x_true"));
        instance_files(out, &h, &[("A", &d.a), ("b", &column(&d.b)), ("x_true", &xt)]);
    }
    out.files.push(("x.mtx".into(), mtx(&column(x))));
    Ok(())
}

fn run_lad(c: &Common) -> Result<Outcome> {
    only(c, "lad", &["nu", "m", "n", "seed", "max-iter", "tol", "data", "corrupt"])?;
    let nu = positive("nu", c.nu.unwrap_or(1.0))?;
    let opts = solve_opts(c, 5000, 1e-12)?;
    let d = lad_data(c, 20)?;
    let p = lad::lad_setup(&d.a, &d.b, nu).map_err(failed)?;
    let r = rs_pgd(&p, &Vector::zeros(d.a.nrows()), &opts).map_err(failed)?;
    let mut out = Outcome::new("lad");
    out.summary.insert("nu".into(), json!(nu));
    out.record(&r.summary, &r.trace);
    lad_report(&mut out, &d, &r.x)?;
    Ok(out)
}

fn run_continuation(c: &Common) -> Result<Outcome> {
    only(c, "continuation", &["m", "n", "seed", "max-iter", "tol", "data", "corrupt", "schedule"])?;
    let s = schedule(c, "1:0.5:0.01")?;
    let opts = solve_opts(c, 20_000, 1e-20)?;
    let sched = ContinuationSchedule::new(s.nu0, s.factor, s.nu_min, opts).map_err(|e| usage(format!("--schedule: {e}")))?;
    let d = lad_data(c, 20)?;
    let p = lad::lad_setup(&d.a, &d.b, s.nu0).map_err(failed)?;
    let res = continuation(&p, &sched, &Vector::zeros(d.a.nrows())).map_err(failed)?;
    let mut out = Outcome::new("continuation");
    let gap = (&d.a * &res.x - &res.w).norm();
    let bound = (d.a.nrows() as f64).sqrt() * res.final_nu();
    out.summary.insert("schedule".into(), json!(s.to_string()));
    out.summary.insert("final_nu".into(), json!(res.final_nu()));
    out.summary.insert("coupling_gap".into(), json!(gap));
    out.summary.insert("gap_bound".into(), json!(bound));
    out.summary.insert("iterations".into(), json!(res.total_iterations()));
    out.summary.insert("converged".into(), json!(res.converged()));
    stage_files(&mut out, &res);
    out.converged = res.converged();
    out.iterations = res.total_iterations();
    out.objective = lad::l1_objective(&d.a, &d.b, &res.x);
    lad_report(&mut out, &d, &res.x)?;
    Ok(out)
}

struct PhaseData {
    inst: phase::PhaseRetrievalInstance,
    generated: bool,
}

fn phase_data(c: &Common, default_k: usize) -> Result<PhaseData> {
    if let Some(dir) = &c.data {
        if c.n.is_some() || c.k.is_some() {
            return Err(usage("--n and --k conflict with --data"));
        }
        check_kind(dir, "phase")?;
        let path = dir.join("signs.txt");
        let text = String::from_utf8(io::read_file(&path).map_err(failed)?).map_err(|_| failed(format!("{}: not UTF-8", path.display())))?;
        let (n, signs) = io::read_hadamard_stack(&text).map_err(|e| failed(format!("{}: {e}", path.display())))?;
        let b = load_vector(&dir.join("b.mtx"))?;
        if b.len() != n * signs.len() || b.iter().any(|&v| !(v >= 0.0)) {
            return Err(failed(format!("b must hold {} nonnegative measurements", n * signs.len())));
        }
        let x_path = dir.join("x_true.mtx");
        let x_true = if x_path.exists() { Some(load_vector(&x_path)?) } else { None };
        let k = signs.len();
        return Ok(PhaseData { inst: phase::PhaseRetrievalInstance { n, k, signs, x_true, b }, generated: false });
    }
    let n = c.n.unwrap_or(64);
    if n == 0 || !n.is_power_of_two() {
        return Err(usage(format!("--n must be a power of two, got {n}")));
    }
    let k = at_least("k", c.k.unwrap_or(default_k), 1)?;
    let seed = c.seed.unwrap_or(0);
    let x = phase::gaussian_signal(n, 1000 + seed);
    Ok(PhaseData { inst: phase::phase_instance(&x, k, seed).map_err(failed)?, generated: true })
}

fn phase_report(out: &mut Outcome, d: &PhaseData, x: &Vector) -> Result<()> {
    if let Some(xt) = &d.inst.x_true {
        let e = phase::phase_error(x, xt).map_err(failed)?;
        out.summary.insert("phase_error".into(), json!(e));
        out.metric = Some(("phase_error", e));
    }
    if d.generated {
        let mut h = header("phase");
        h.set("n", d.inst.n).set("k", d.inst.k);
        out.files.push(("instance/instance.txt".into(), io::write_instance_header(&h).into_bytes()));
        out.files.push(("instance/signs.txt".into(), io::write_hadamard_stack(d.inst.n, &d.inst.signs).into_bytes()));
        out.files.push(("instance/b.mtx".into(), mtx(&column(&d.inst.b))));
        if let Some(xt) = &d.inst.x_true {
            out.files.push(("instance/x_true.mtx".into(), mtx(&column(xt))));
        }
    }
    out.files.push(("x.mtx".into(), mtx(&column(x))));
    Ok(())
}

fn run_phase(c: &Common) -> Result<Outcome> {
    only(c, "phase", &["nu", "n", "k", "seed", "max-iter", "tol", "data", "init-iters"])?;
    let nu = positive("nu", c.nu.unwrap_or(0.3))?;
    let iters = at_least("init-iters", c.init_iters.unwrap_or(10), 1)?;
    let opts = solve_opts(c, 50, 1e-12)?;
    let d = phase_data(c, 4)?;
    let p = phase::phase_problem(&d.inst, nu).map_err(failed)?;
    let x0 = phase::spectral_init(&d.inst, iters, c.seed.unwrap_or(0) + 7).map_err(failed)?;
    let r = phase::phase_solve(&p, &x0, &opts).map_err(failed)?;
    let mut out = Outcome::new("phase");
    out.summary.insert("nu".into(), json!(nu));
    out.summary.insert("transforms".into(), json!(p.op().transform_count()));
    out.record(&r.summary, &r.trace);
    phase_report(&mut out, &d, &r.x)?;
    Ok(out)
}

fn run_phase_trimmed(c: &Common) -> Result<Outcome> {
    only(c, "phase-trimmed", &["nu", "n", "k", "seed", "max-iter", "tol", "data", "init-iters", "tau", "gamma", "corrupt"])?;
    let nu = positive("nu", c.nu.unwrap_or(1.0))?;
    let gamma = positive("gamma", c.gamma.unwrap_or(1.0))?;
    let tau_frac = fraction("tau", c.tau.unwrap_or(0.7))?;
    let iters = at_least("init-iters", c.init_iters.unwrap_or(10), 1)?;
    let opts = solve_opts(c, 1000, 1e-14)?;
    let mut d = phase_data(c, 8)?;
    let seed = c.seed.unwrap_or(0);
    let mut corrupted = Vec::new();
    if c.data.is_none() {
        let frac = fraction("corrupt", c.corrupt.unwrap_or(0.3))?;
        let (inst, idx) = phase::corrupt_measurements(&d.inst, frac, 1000.0, seed + 99).map_err(failed)?;
        d.inst = inst;
        corrupted = idx;
    } else if c.corrupt.is_some() {
        return Err(usage("--corrupt conflicts with --data"));
    }
    let tau = tau_frac * d.inst.m() as f64;
    if tau < 1.0 {
        return Err(usage(format!("--tau {tau_frac} keeps fewer than one measurement")));
    }
    let x0 = phase::truncated_spectral_init(&d.inst, tau.floor() as usize, iters, seed + 7).map_err(failed)?;
    let t = phase::trimmed_phase(&d.inst, nu, tau, gamma, &x0, &opts).map_err(failed)?;
    let mut out = Outcome::new("phase-trimmed");
    out.summary.insert("nu".into(), json!(nu));
    out.summary.insert("tau".into(), json!(tau));
    out.summary.insert("gamma".into(), json!(gamma));
    if !corrupted.is_empty() {
        let w = corrupted.iter().map(|&i| t.v[i]).sum::<f64>() / corrupted.len() as f64;
        out.summary.insert("corrupted_mean_weight".into(), json!(w));
    }
    out.record(&t.summary, &t.trace);
    out.files.push(("weights.mtx".into(), mtx(&column(&t.v))));
    phase_report(&mut out, &d, &t.x)?;
    Ok(out)
}

fn run_sslr(c: &Common) -> Result<Outcome> {
    only(c, "sslr", &["nu", "m", "n", "seed", "max-iter", "tol", "lambda", "gamma", "labeled", "separation"])?;
    let nu = positive("nu", c.nu.unwrap_or(1.0))?;
    let lambda = nonnegative("lambda", c.lambda.unwrap_or(0.1))?;
    let gamma = nonnegative("gamma", c.gamma.unwrap_or(0.1))?;
    let labeled = fraction("labeled", c.labeled.unwrap_or(0.02))?;
    let sep = nonnegative("separation", c.separation.unwrap_or(4.0))?;
    let m = at_least("m", c.m.unwrap_or(500), 1)?;
    let d = at_least("n", c.n.unwrap_or(10), 1)?;
    let opts = solve_opts(c, 50_000, 1e-8)?;
    let data = sslr::two_gaussians(m, 1000, d, sep, labeled, c.seed.unwrap_or(0)).map_err(failed)?;
    let r = sslr::fit_sslr(&data, lambda, gamma, nu, &opts).map_err(failed)?;
    let acc = sslr::sslr_accuracy(&r.x, &data.test, &data.test_labels);
    let mut out = Outcome::new("sslr");
    out.summary.insert("nu".into(), json!(nu));
    out.summary.insert("lambda".into(), json!(lambda));
    out.summary.insert("gamma".into(), json!(gamma));
    out.summary.insert("labeled".into(), json!(data.labeled));
    out.summary.insert("test_accuracy".into(), json!(acc));
    out.record(&r.summary, &r.trace);
    out.metric = Some(("test_accuracy", acc));
    out.files.push(("x.mtx".into(), mtx(&column(&r.x))));
    Ok(out)
}

fn run_ssp(c: &Common) -> Result<Outcome> {
    only(c, "ssp", &["n", "k", "seed", "max-iter", "tol", "schedule"])?;
    let n = at_least("n", c.n.unwrap_or(25), 2)?;
    let extra = c.k.unwrap_or(2);
    let s = schedule(c, "1:0.1:0.0001")?;
    let opts = solve_opts(c, 2000, 1e-20)?;
    let sched = ContinuationSchedule::new(s.nu0, s.factor, s.nu_min, opts).map_err(|e| usage(format!("--schedule: {e}")))?;
    let inst = ssp::generate_ssp(n, extra, c.seed.unwrap_or(0)).map_err(failed)?;
    let p = ssp::ssp_setup(&inst, s.nu0).map_err(failed)?;
    let res = continuation(&p, &sched, &Vector::zeros(p.rows())).map_err(failed)?;
    let x = ssp::normalize_at_target(&res.x, &inst);
    let vi = ssp::value_iteration(&inst, 1e-14).map_err(failed)?;
    let err = (&x - &vi).amax();
    let policy = ssp::extract_policy(&x, &inst);
    let mut out = Outcome::new("ssp");
    out.summary.insert("schedule".into(), json!(s.to_string()));
    out.summary.insert("value_error".into(), json!(err));
    out.summary.insert("bellman_residual".into(), json!(inst.bellman_residual(&x)));
    out.summary.insert("iterations".into(), json!(res.total_iterations()));
    let final_obj = res.stages.last().map_or(f64::NAN, |s| s.summary.final_objective);
    out.summary.insert("final_objective".into(), finite(final_obj));
    let converged = res.converged();
    out.summary.insert("converged".into(), json!(converged));
    stage_files(&mut out, &res);
    out.converged = converged;
    out.iterations = res.total_iterations();
    out.objective = final_obj;
    out.metric = Some(("value_error", err));
    out.files.push(("x.mtx".into(), mtx(&column(&x))));
    let actions: Vec<usize> = policy.iter().map(|&a| a as usize).collect();
    out.files.push(("policy.txt".into(), io::write_partition(&actions).into_bytes()));
    Ok(out)
}

fn run_cluster(c: &Common) -> Result<Outcome> {
    only(c, "cluster", &["nu", "m", "n", "k", "seed", "max-iter", "tol", "lambda", "kappa", "separation", "data"])?;
    let nu = positive("nu", c.nu.unwrap_or(1.0))?;
    let lambda = nonnegative("lambda", c.lambda.unwrap_or(0.5))?;
    let fusion = match c.kappa {
        Some(k) => clustering::Fusion::Scad { kappa: positive("kappa", k)? },
        None => clustering::Fusion::Convex,
    };
    let opts = solve_opts(c, 5000, 1e-16)?;
    let (points, planted) = match &c.data {
        Some(dir) => {
            if c.m.is_some() || c.n.is_some() || c.k.is_some() || c.seed.is_some() || c.separation.is_some() {
                return Err(usage("--m, --n, --k, --seed and --separation conflict with --data"));
            }
            check_kind(dir, "cluster")?;
            (store::load_matrix(&dir.join("points.mtx")).map_err(failed)?, None)
        }
        None => {
            let k = at_least("k", c.k.unwrap_or(3), 1)?;
            let per = at_least("m", c.m.unwrap_or(10), 1)?;
            let dim = at_least("n", c.n.unwrap_or(2), 2)?;
            let sep = positive("separation", c.separation.unwrap_or(30.0))?;
            let pc = clustering::planted_clusters(k, per, dim, sep, 1.0, c.seed.unwrap_or(0)).map_err(failed)?;
            (pc.points.clone(), Some(pc))
        }
    };
    let (np, dim) = points.shape();
    let p = clustering::clustering_setup(&points, lambda, nu, fusion).map_err(failed)?;
    let w0 = clustering::initial_w(&p).map_err(failed)?;
    let r = rs_pgd(&p, &w0, &opts).map_err(failed)?;
    let labels = clustering::clusters_from_w(&r.w, np, dim, 1e-3).map_err(failed)?;
    let mut out = Outcome::new("cluster");
    out.summary.insert("nu".into(), json!(nu));
    out.summary.insert("lambda".into(), json!(lambda));
    out.summary.insert("penalty".into(), json!(match fusion { clustering::Fusion::Convex => "convex", _ => "scad" }));
    out.summary.insert("clusters".into(), json!(labels.iter().max().map_or(0, |m| m + 1)));
    out.record(&r.summary, &r.trace);
    if let Some(pc) = &planted {
        let hit = clustering::canonical_labels(&labels) == clustering::canonical_labels(&pc.labels);
        out.summary.insert("matches_planted".into(), json!(hit));
        out.metric = Some(("matches_planted", f64::from(u8::from(hit))));
        let mut h = header("cluster");
        h.set("points", np).set("dim", dim);
        instance_files(&mut out, &h, &[("points", &points)]);
    }
    out.files.push(("partition.txt".into(), io::write_partition(&labels).into_bytes()));
    out.files.push(("x.mtx".into(), mtx(&clustering::unflatten_points(&r.x, dim))));
    Ok(out)
}

fn run_rpca(c: &Common) -> Result<Outcome> {
    only(c, "rpca", &["nu", "m", "n", "rank", "seed", "max-iter", "tol", "data", "corrupt", "schedule", "start"])?;
    let rank = at_least("rank", c.rank.unwrap_or(2), 1)?;
    let max_sweeps = at_least("max-iter", c.max_iter.unwrap_or(25), 1)?;
    let tol = nonnegative("tol", c.tol.unwrap_or(1e-10))?;
    if c.nu.is_some() && c.schedule.is_some() {
        return Err(usage("--nu and --schedule both set the starting nu"));
    }
    let sched = match &c.schedule {
        Some(_) => Some(schedule(c, "")?),
        None => None,
    };
    let (d, planted, image) = match &c.data {
        Some(path) => {
            if c.m.is_some() || c.n.is_some() || c.seed.is_some() || c.corrupt.is_some() {
                return Err(usage("--m, --n, --seed and --corrupt conflict with --data"));
            }
            if path.extension().is_some_and(|e| e == "pgm") {
                let bytes = io::read_file(path).map_err(failed)?;
                let (img, _) = io::read_pgm(&bytes).map_err(|e| failed(format!("{}: {e}", path.display())))?;
                (img.to_matrix(), None, Some(img.maxval))
            } else {
                check_kind(path, "rpca")?;
                (store::load_matrix(&path.join("D.mtx")).map_err(failed)?, None, None)
            }
        }
        None => {
            let m = at_least("m", c.m.unwrap_or(20), 1)?;
            let n = at_least("n", c.n.unwrap_or(30), 1)?;
            let frac = fraction("corrupt", c.corrupt.unwrap_or(0.05))?;
            let pl = rpca::planted_rpca(m, n, rank.min(m).min(n), frac, 10.0, c.seed.unwrap_or(0)).map_err(failed)?;
            (pl.d.clone(), Some(pl), None)
        }
    };
    if rank > d.nrows().min(d.ncols()) {
        return Err(usage(format!("--rank {rank} exceeds min(m, n) = {}", d.nrows().min(d.ncols()))));
    }
    let scale = rpca::robust_scale(&d);
    let (nu, nu_factor, nu_min) = match sched {
        Some(s) => (s.nu0, s.factor, s.nu_min),
        None => (positive("nu", c.nu.unwrap_or(if scale > 0.0 { 2.0 * scale } else { 1.0 }))?, 0.7, 0.0),
    };
    let nu_factor = if c.nu.is_some() { 1.0 } else { nu_factor };
    let start = match c.start.unwrap_or(Start::Zero) {
        Start::Svd => rpca::RpcaStart::Svd,
        Start::Zero => rpca::RpcaStart::Zero,
    };
    let inst = rpca::RpcaInstance::new(d.clone(), rank, nu).map_err(failed)?;
    let opts = rpca::RpcaOptions { start, max_sweeps, tol, nu_factor, nu_min, ..rpca::RpcaOptions::default() };
    let r = rpca::rpca_solve(&inst, &opts).map_err(failed)?;
    let bg = r.background();
    // W - LR is clipped at the final nu, which continuation drives toward
    // zero; the residual against the data is the usable sparse part
    let fg = &d - &bg;
    let mut out = Outcome::new("rpca");
    out.summary.insert("rank".into(), json!(rank));
    out.summary.insert("nu0".into(), json!(nu));
    out.summary.insert("nu_factor".into(), json!(nu_factor));
    out.summary.insert("sweeps".into(), json!(r.sweeps.len() - 1));
    out.summary.insert("converged".into(), json!(r.converged));
    let last = r.sweeps.last().expect("row 0 is always present");
    out.summary.insert("final_objective".into(), json!(last.objective));
    out.summary.insert("l1_fit".into(), json!(last.l1_fit));
    out.converged = r.converged;
    out.iterations = r.sweeps.len() - 1;
    out.objective = last.objective;
    if let Some(pl) = &planted {
        let e = (&bg - &pl.low_rank).norm() / pl.low_rank.norm();
        out.summary.insert("rel_error".into(), json!(e));
        out.metric = Some(("rel_error", e));
        let mut h = header("rpca");
        h.set("m", d.nrows()).set("n", d.ncols()).set("rank", rank);
        instance_files(&mut out, &h, &[("D", &d)]);
    }
    out.trace = Some(r.sweeps_csv());
    out.files.push(("background.mtx".into(), mtx(&bg)));
    out.files.push(("foreground.mtx".into(), mtx(&fg)));
    if let Some(maxval) = image {
        let mask = rpca::foreground_mask(&fg, None) * f64::from(maxval);
        out.files.push(("background.pgm".into(), io::write_pgm(&io::GrayImage::from_matrix(&bg, maxval), PgmEncoding::Binary)));
        out.files.push(("foreground.pgm".into(), io::write_pgm(&io::GrayImage::from_matrix(&mask, maxval), PgmEncoding::Binary)));
    }
    Ok(out)
}

pub fn run_admm_compare(c: &Common) -> Result<Outcome> {
    only(c, "admm-compare", &["m", "n", "seed", "max-iter", "tol", "data", "corrupt", "points"])?;
    let tol = positive("tol", c.tol.unwrap_or(1e-6))?;
    let cap = at_least("max-iter", c.max_iter.unwrap_or(20_000), 1)?;
    let points = at_least("points", c.points.unwrap_or(11), 1)?;
    let d = lad_data(c, 50)?;
    let (m, n) = d.a.shape();
    let h = SeparableNonsmooth::l1_deviation(d.b.as_slice()).map_err(failed)?;
    let op = Arc::new(LinearOperator::dense(d.a.clone()));
    let mut table = String::from("rho,rs_iterations,admm_iterations,rs_converged,admm_converged,rs_objective,admm_objective\n");
    let mut all_rs = true;
    let mut below = true;
    let mut rs_total = 0;
    for i in 0..points {
        let rho = if points == 1 { 1.0 } else { 100f64.powf(i as f64 / (points - 1) as f64) };
        let p = lad::lad_setup(&d.a, &d.b, 1.0 / rho).map_err(failed)?;
        // the witness is a squared residual
        let mut o = SolveOptions::default().with_max_iter(cap).with_tol(tol * tol);
        o.record_timing = c.timing;
        let rs = rs_pgd(&p, &Vector::zeros(m), &o).map_err(failed)?;
        let ad = admm(&h, op.clone(), &QuadraticRegularizer::Zero, &Vector::zeros(n), &AdmmOptions::new(rho), &o.with_tol(tol))
            .map_err(failed)?;
        all_rs &= rs.summary.converged;
        below &= rs.summary.converged && (!ad.summary.converged || rs.summary.iterations <= ad.summary.iterations);
        rs_total += rs.summary.iterations;
        table.push_str(&format!(
            "{rho:?},{},{},{},{},{:?},{:?}\n",
            rs.summary.iterations,
            ad.summary.iterations,
            rs.summary.converged,
            ad.summary.converged,
            lad::l1_objective(&d.a, &d.b, &rs.x),
            lad::l1_objective(&d.a, &d.b, &ad.x)
        ));
    }
    let mut out = Outcome::new("admm-compare");
    out.summary.insert("points".into(), json!(points));
    out.summary.insert("tol".into(), json!(tol));
    out.summary.insert("rs_below_admm".into(), json!(below));
    out.summary.insert("converged".into(), json!(all_rs));
    out.converged = all_rs;
    out.iterations = rs_total;
    out.files.push(("table.csv".into(), table.into_bytes()));
    Ok(out)
}
