use std::fmt::Write as _;

use super::{checked_size, parse_err, IoError};

/// Parses `n`, `k`, then `k` lines of `n` entries in `{-1, +1}`.
pub fn read_hadamard_stack(text: &str) -> Result<(usize, Vec<Vec<f64>>), IoError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
    let mut header = |what: &str| -> Result<usize, IoError> {
        let (ln, l) = lines.next().ok_or_else(|| parse_err(0, format!("missing {what}")))?;
        l.parse().map_err(|_| parse_err(ln, format!("bad {what} '{l}'")))
    };
    let n = header("n")?;
    let k = header("k")?;
    if n == 0 || !n.is_power_of_two() {
        return Err(parse_err(1, format!("n = {n} is not a power of two")));
    }
    if k == 0 {
        return Err(parse_err(2, "k must be positive"));
    }
    checked_size(n, k, 2)?;
    let mut signs = Vec::with_capacity(k);
    for j in 0..k {
        let (ln, l) = lines.next().ok_or_else(|| parse_err(0, format!("missing sign line {}", j + 1)))?;
        let row: Vec<f64> = l
            .split_whitespace()
            .map(|t| match t {
                "1" | "+1" => Ok(1.0),
                "-1" => Ok(-1.0),
                _ => Err(parse_err(ln, format!("sign must be +1 or -1, got '{t}'"))),
            })
            .collect::<Result<_, _>>()?;
        if row.len() != n {
            return Err(parse_err(ln, format!("expected {n} signs, found {}", row.len())));
        }
        signs.push(row);
    }
    if let Some((ln, _)) = lines.next() {
        return Err(parse_err(ln, "trailing content"));
    }
    Ok((n, signs))
}

pub fn write_hadamard_stack(n: usize, signs: &[Vec<f64>]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{n}\n{}", signs.len());
    for row in signs {
        let line: Vec<&str> = row.iter().map(|&v| if v < 0.0 { "-1" } else { "1" }).collect();
        let _ = writeln!(s, "{}", line.join(" "));
    }
    s
}
