use std::fmt;
use std::fmt::Write as _;

use super::{parse_err, IoError, MAX_ELEMENTS};
use crate::relax::{SolverTrace, TraceRow, TRACE_HEADER};

/// Parses a trace written by [`SolverTrace::to_csv`]. The stage `nu` is not
/// stored in the file and comes back as NaN.
pub fn parse_trace_csv(text: &str) -> Result<SolverTrace, IoError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, h)) if h.trim() == TRACE_HEADER => {}
        _ => return Err(parse_err(1, format!("expected header '{TRACE_HEADER}'"))),
    }
    let mut trace = SolverTrace::new(f64::NAN);
    for (ln, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        if trace.rows.len() >= MAX_ELEMENTS {
            return Err(parse_err(ln, "too many rows"));
        }
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if f.len() != 6 {
            return Err(parse_err(ln, format!("expected 6 fields, found {}", f.len())));
        }
        let int = |s: &str| s.parse::<usize>().map_err(|_| parse_err(ln, format!("bad integer '{s}'")));
        let real = |s: &str| s.parse::<f64>().map_err(|_| parse_err(ln, format!("bad number '{s}'")));
        let row = TraceRow {
            iter: int(f[0])?,
            objective: real(f[1])?,
            optimality: real(f[2])?,
            gap: real(f[3])?,
            inner_iters: int(f[4])?,
            ms: real(f[5])?,
        };
        if trace.rows.last().is_some_and(|r| r.iter >= row.iter) {
            return Err(parse_err(ln, "iteration index not increasing"));
        }
        trace.rows.push(row);
    }
    Ok(trace)
}

/// Ordered `key=value` pairs describing a serialized instance.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InstanceHeader {
    pub entries: Vec<(String, String)>,
}

impl InstanceHeader {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets `key`, replacing an existing value.
    pub fn set(&mut self, key: &str, value: impl fmt::Display) -> &mut Self {
        let v = value.to_string();
        match self.entries.iter_mut().find(|(k, _)| k == key) {
            Some(e) => e.1 = v,
            None => self.entries.push((key.to_string(), v)),
        }
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn require(&self, key: &str) -> Result<&str, IoError> {
        self.get(key).ok_or_else(|| IoError::Format(format!("header is missing '{key}'")))
    }

    pub fn get_f64(&self, key: &str) -> Result<f64, IoError> {
        let v = self.require(key)?;
        v.parse().map_err(|_| IoError::Format(format!("header '{key}': bad number '{v}'")))
    }

    pub fn get_usize(&self, key: &str) -> Result<usize, IoError> {
        let v = self.require(key)?;
        v.parse().map_err(|_| IoError::Format(format!("header '{key}': bad count '{v}'")))
    }
}

fn valid_key(k: &str) -> bool {
    !k.is_empty() && k.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_' || b == b'-' || b == b'.')
}

/// `key=value` per line; `#` starts a comment line; duplicate keys are rejected.
pub fn parse_instance_header(text: &str) -> Result<InstanceHeader, IoError> {
    let mut h = InstanceHeader::new();
    for (i, line) in text.lines().enumerate() {
        let ln = i + 1;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let (k, v) = t.split_once('=').ok_or_else(|| parse_err(ln, "expected key=value"))?;
        let (k, v) = (k.trim(), v.trim());
        if !valid_key(k) {
            return Err(parse_err(ln, format!("invalid key '{k}'")));
        }
        if h.get(k).is_some() {
            return Err(parse_err(ln, format!("duplicate key '{k}'")));
        }
        if h.entries.len() >= 4096 {
            return Err(parse_err(ln, "too many keys"));
        }
        h.entries.push((k.to_string(), v.to_string()));
    }
    Ok(h)
}

pub fn write_instance_header(h: &InstanceHeader) -> String {
    let mut s = String::new();
    for (k, v) in &h.entries {
        let _ = writeln!(s, "{k}={v}");
    }
    s
}

/// One line of whitespace-separated component labels.
pub fn parse_partition(text: &str) -> Result<Vec<usize>, IoError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let Some((i, line)) = lines.next() else { return Ok(Vec::new()) };
    if let Some((j, _)) = lines.next() {
        return Err(parse_err(j + 1, "partition must be a single line"));
    }
    line.split_whitespace()
        .take(MAX_ELEMENTS + 1)
        .enumerate()
        .map(|(n, t)| {
            if n == MAX_ELEMENTS {
                return Err(parse_err(i + 1, "too many labels"));
            }
            t.parse::<usize>().map_err(|_| parse_err(i + 1, format!("bad label '{t}'")))
        })
        .collect()
}

pub fn write_partition(labels: &[usize]) -> String {
    let parts: Vec<String> = labels.iter().map(usize::to_string).collect();
    format!("{}\n", parts.join(" "))
}

/// `nu0:factor:nu_min`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    pub nu0: f64,
    pub factor: f64,
    pub nu_min: f64,
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}:{:?}:{:?}", self.nu0, self.factor, self.nu_min)
    }
}

pub fn parse_schedule(text: &str) -> Result<Schedule, IoError> {
    let parts: Vec<&str> = text.trim().split(':').collect();
    let bad = |msg: String| IoError::Format(format!("schedule '{text}': {msg}"));
    if parts.len() != 3 {
        return Err(bad("expected nu0:factor:numin".into()));
    }
    let mut vals = [0.0_f64; 3];
    for (v, p) in vals.iter_mut().zip(&parts) {
        *v = p.trim().parse().map_err(|_| bad(format!("bad number '{p}'")))?;
    }
    let [nu0, factor, nu_min] = vals;
    if !(nu_min > 0.0 && nu0.is_finite() && nu0 >= nu_min) {
        return Err(bad("need nu0 >= numin > 0".into()));
    }
    if !(factor > 0.0 && factor < 1.0) {
        return Err(bad("factor must lie in (0, 1)".into()));
    }
    Ok(Schedule { nu0, factor, nu_min })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trace_roundtrip() {
        let mut t = SolverTrace::new(1.0);
        t.push(TraceRow { iter: 0, objective: 3.0, optimality: f64::NAN, gap: 0.1, inner_iters: 0, ms: 0.0 });
        t.push(TraceRow { iter: 1, objective: 2.0, optimality: 1e-3, gap: 0.05, inner_iters: 4, ms: 1.5 });
        let csv = t.to_csv();
        assert_eq!(parse_trace_csv(&csv).unwrap().to_csv(), csv);
        assert!(parse_trace_csv("iter,objective\n").is_err());
        assert!(parse_trace_csv(&format!("{TRACE_HEADER}\n1,1,1,1,1,1\n1,1,1,1,1,1\n")).is_err());
    }

    #[test]
    fn header_roundtrip() {
        let mut h = InstanceHeader::new();
        h.set("kind", "lad").set("m", 50).set("nu", 0.5);
        let text = write_instance_header(&h);
        let back = parse_instance_header(&format!("# c\n{text}")).unwrap();
        assert_eq!(back, h);
        assert_eq!(back.get_usize("m").unwrap(), 50);
        assert!(back.get_f64("missing").is_err());
        assert!(parse_instance_header("a=1\na=2\n").is_err());
        assert!(parse_instance_header("no equals\n").is_err());
    }

    #[test]
    fn partition_roundtrip() {
        let p = vec![0, 0, 1, 2, 1];
        assert_eq!(parse_partition(&write_partition(&p)).unwrap(), p);
        assert!(parse_partition("0 1\n2\n").is_err());
        assert!(parse_partition("0 x\n").is_err());
    }

    #[test]
    fn schedule_parse() {
        let s = parse_schedule("1:0.5:0.01").unwrap();
        assert_eq!(s, Schedule { nu0: 1.0, factor: 0.5, nu_min: 0.01 });
        assert_eq!(parse_schedule(&s.to_string()).unwrap(), s);
        for bad in ["1:0.5", "1:1:0.1", "0.01:0.5:1", "a:b:c", "1:0.5:0"] {
            assert!(parse_schedule(bad).is_err(), "{bad}");
        }
    }
}
