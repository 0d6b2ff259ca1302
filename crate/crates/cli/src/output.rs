use std::path::{Path, PathBuf};

use rsplit::io;
use rsplit::{RunSummary, SolverTrace};
use serde_json::{json, Map, Value};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
}

/// Everything a driver produces, held in memory until the run is complete.
#[derive(Debug)]
pub struct Outcome {
    pub driver: &'static str,
    pub summary: Map<String, Value>,
    /// Written to `--trace-out` or `<out>/trace.csv`.
    pub trace: Option<String>,
    /// Paths relative to the output directory.
    pub files: Vec<(String, Vec<u8>)>,
    pub converged: bool,
    pub iterations: usize,
    pub objective: f64,
    /// Headline quality number for sweep tables.
    pub metric: Option<(&'static str, f64)>,
}

pub fn finite(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

/// Plot-ready columns: iteration against log10 objective and optimality.
pub fn plot_csv(trace: &SolverTrace) -> Vec<u8> {
    let lg = |v: f64| if v > 0.0 { format!("{:?}", v.log10()) } else { String::new() };
    let mut s = String::from("iter,objective,log10_objective,optimality,log10_optimality\n");
    for r in &trace.rows {
        s.push_str(&format!("{},{:?},{},{:?},{}\n", r.iter, r.objective, lg(r.objective), r.optimality, lg(r.optimality)));
    }
    s.into_bytes()
}

impl Outcome {
    pub fn new(driver: &'static str) -> Self {
        Outcome {
            driver,
            summary: Map::new(),
            trace: None,
            files: Vec::new(),
            converged: false,
            iterations: 0,
            objective: f64::NAN,
            metric: None,
        }
    }

    /// Takes the summary fields, trace and plot columns of a single solve.
    pub fn record(&mut self, s: &RunSummary, trace: &SolverTrace) {
        self.summary.insert("iterations".into(), json!(s.iterations));
        self.summary.insert("final_objective".into(), finite(s.final_objective));
        self.summary.insert("final_gap".into(), finite(s.final_gap));
        self.summary.insert("converged".into(), json!(s.converged));
        self.summary.insert("wall_ms".into(), finite(s.wall_ms));
        self.converged = s.converged;
        self.iterations = s.iterations;
        self.objective = s.final_objective;
        self.trace = Some(trace.to_csv());
        self.files.push(("plot.csv".into(), plot_csv(trace)));
    }

    pub fn summary_json(&self) -> String {
        let mut m = self.summary.clone();
        m.insert("driver".into(), json!(self.driver));
        let mut s = serde_json::to_string_pretty(&Value::Object(m)).expect("summary serializes");
        s.push('\n');
        s
    }

    pub fn write(&self, out: &Path, trace_out: Option<&Path>) -> Result<(), CliError> {
        let fail = |e: io::IoError| CliError::Failed(e.to_string());
        make_dir(out)?;
        for (name, bytes) in &self.files {
            let path = out.join(name);
            if let Some(parent) = path.parent() {
                make_dir(parent)?;
            }
            io::write_file(&path, bytes).map_err(fail)?;
        }
        if let Some(t) = &self.trace {
            let path = trace_out.map_or_else(|| out.join("trace.csv"), PathBuf::from);
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                make_dir(parent)?;
            }
            io::write_file(&path, t.as_bytes()).map_err(fail)?;
        }
        io::write_file(&out.join("summary.json"), self.summary_json().as_bytes()).map_err(fail)
    }
}

fn make_dir(p: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(p).map_err(|e| CliError::Failed(format!("{}: {e}", p.display())))
}
