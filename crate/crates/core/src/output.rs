//! CSV text helpers: `%g`-style numbers, `#` header blocks, and reading
//! path traces back in.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::lasso_sim::{PathRecord, PathTrace, RNG_NAME};

/// Significant digits written for every float.
pub const SIG_DIGITS: usize = 12;

pub const TRACE_COLUMNS: &str = "rep,lambda,support_size,V,T,tpp,fdp";
pub const EVENTS_COLUMNS: &str = "rep,tpp_at_first_false,fdp_at_full_power,rank_first_false,perfect_recovery";

/// Formats `x` like C's `%.12g`: fixed notation for moderate exponents,
/// scientific otherwise, trailing zeros dropped.
pub fn fmt_g(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= SIG_DIGITS as i32 {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (SIG_DIGITS as i32 - 1 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `fmt_g` for optional values; `None` becomes an empty field.
pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_g).unwrap_or_default()
}

/// Leading `#` comment block shared by every output file.
#[derive(Debug, Clone, PartialEq)]
pub struct Header {
    lines: Vec<String>,
}

impl Header {
    pub fn new(tool: &str, version: &str, command: &str) -> Self {
        Self {
            lines: vec![format!("{tool} {version}"), format!("command: {command}")],
        }
    }

    pub fn param(mut self, key: &str, value: impl std::fmt::Display) -> Self {
        self.lines.push(format!("{key} = {value}"));
        self
    }

    /// Base seed and generator identity; `None` for deterministic commands.
    pub fn seed(mut self, seed: Option<u64>) -> Self {
        match seed {
            Some(s) => self.lines.push(format!("base_seed = {s}")),
            None => self.lines.push("base_seed = none".into()),
        }
        self.lines.push(format!("rng = {RNG_NAME}"));
        self
    }

    pub fn note(mut self, line: impl Into<String>) -> Self {
        self.lines.push(line.into());
        self
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for l in &self.lines {
            let _ = writeln!(out, "# {l}");
        }
        out
    }
}

/// Trace rows for one replicate, without trailing header.
pub fn trace_rows(rep: usize, trace: &PathTrace) -> String {
    let mut out = String::new();
    for r in &trace.records {
        let _ = writeln!(
            out,
            "{rep},{},{},{},{},{},{}",
            fmt_g(r.lambda),
            r.support_size,
            r.v,
            r.t,
            fmt_g(r.tpp),
            fmt_g(r.fdp)
        );
    }
    out
}

/// Comment line that lets [`parse_trace_csv`] recover `k` for a replicate.
pub fn replicate_note(rep: usize, seed: u64, k: usize) -> String {
    format!("replicate {rep}: seed = {seed}, k = {k}")
}

fn parse_replicate_note(line: &str) -> Option<(usize, usize)> {
    let rest = line.strip_prefix("replicate ")?;
    let (rep, rest) = rest.split_once(':')?;
    let k = rest.split(',').find_map(|kv| kv.trim().strip_prefix("k = "))?;
    Some((rep.trim().parse().ok()?, k.trim().parse().ok()?))
}

fn parse_err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("line {line}: {msg}"))
}

/// Reads a trace file written by the simulator. Each replicate needs its
/// `replicate R: ..., k = K` comment line. Entry orders are not stored, so
/// the returned traces carry counts only.
pub fn parse_trace_csv(text: &str) -> Result<Vec<(usize, PathTrace)>> {
    let mut ks: Vec<(usize, usize)> = Vec::new();
    let mut traces: Vec<(usize, PathTrace)> = Vec::new();
    let mut saw_columns = false;
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        if let Some(c) = line.strip_prefix('#') {
            if let Some(rk) = parse_replicate_note(c.trim()) {
                ks.push(rk);
            }
            continue;
        }
        if !saw_columns {
            if line.trim() != TRACE_COLUMNS {
                return Err(parse_err(lineno, format!("expected columns `{TRACE_COLUMNS}`")));
            }
            saw_columns = true;
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 7 {
            return Err(parse_err(lineno, format!("expected 7 fields, got {}", f.len())));
        }
        let int = |s: &str| s.trim().parse::<usize>().map_err(|e| parse_err(lineno, e));
        let rep = int(f[0])?;
        let lambda: f64 = f[1].trim().parse().map_err(|e| parse_err(lineno, e))?;
        let (v, t) = (int(f[3])?, int(f[4])?);
        if int(f[2])? != v + t {
            return Err(parse_err(lineno, "support_size is not V + T"));
        }
        let k = ks
            .iter()
            .find(|(r, _)| *r == rep)
            .map(|&(_, k)| k)
            .ok_or_else(|| parse_err(lineno, format!("no `replicate {rep}` header line")))?;
        if !matches!(traces.last(), Some((r, _)) if *r == rep) {
            if traces.iter().any(|(r, _)| *r == rep) {
                return Err(parse_err(lineno, format!("replicate {rep} rows are not contiguous")));
            }
            traces.push((
                rep,
                PathTrace {
                    records: Vec::new(),
                    entries: None,
                    k,
                    max_kkt_violation: f64::NAN,
                },
            ));
        }
        let trace = &mut traces.last_mut().expect("just pushed").1;
        if trace.records.last().is_some_and(|r| !(lambda < r.lambda)) {
            return Err(parse_err(lineno, "lambda must decrease within a replicate"));
        }
        trace.records.push(PathRecord::new(lambda, v, t, k));
    }
    if !saw_columns {
        return Err(Error::Parse("no column header found".into()));
    }
    Ok(traces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn matches_printf_g() {
        // Reference strings from C printf("%.12g").
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (-2.5, "-2.5"),
            (0.1, "0.1"),
            (1.0 / 3.0, "0.333333333333"),
            (0.679_104_715_798_517, "0.679104715799"),
            (123456789012.0, "123456789012"),
            (1234567890123.0, "1.23456789012e+12"),
            (1e-4, "0.0001"),
            (1.5e-5, "1.5e-05"),
            (-3.0e-10, "-3e-10"),
            (1e100, "1e+100"),
            (99999999999.99999, "100000000000"),
        ];
        for (x, want) in cases {
            assert_eq!(fmt_g(x), want, "{x}");
        }
        assert_eq!(fmt_g(f64::NAN), "nan");
        assert_eq!(fmt_opt(None), "");
    }

    proptest! {
        #[test]
        fn round_trips_to_twelve_digits(x in -1e6_f64..1e6, e in -30i32..30) {
            let v = x * 10f64.powi(e);
            let back: f64 = fmt_g(v).parse().unwrap();
            prop_assert!((back - v).abs() <= 1e-11 * v.abs());
        }
    }

    #[test]
    fn trace_round_trip() {
        let trace = PathTrace {
            records: vec![PathRecord::new(3.0, 0, 1, 4), PathRecord::new(2.0, 1, 3, 4)],
            entries: None,
            k: 4,
            max_kkt_violation: 0.0,
        };
        let text = format!(
            "{}{}\n{}{}",
            Header::new("t", "0", "simulate")
                .note(replicate_note(0, 7, 4))
                .note(replicate_note(1, 8, 4))
                .render(),
            TRACE_COLUMNS,
            trace_rows(0, &trace),
            trace_rows(1, &trace)
        );
        let parsed = parse_trace_csv(&text).unwrap();
        assert_eq!(parsed.len(), 2);
        assert_eq!(parsed[1].0, 1);
        assert_eq!(parsed[0].1.records, trace.records);
    }

    #[test]
    fn rejects_malformed_traces() {
        let head = "# replicate 0: seed = 1, k = 2\n";
        let bad = [
            String::new(),
            format!("{head}a,b\n"),
            format!("{head}{TRACE_COLUMNS}\n0,1,1,0\n"),
            format!("{head}{TRACE_COLUMNS}\n0,1,2,0,1,0.5,0\n"),
            format!("{head}{TRACE_COLUMNS}\n1,1,1,0,1,0.5,0\n"),
            format!("{head}{TRACE_COLUMNS}\n0,1,1,0,1,0.5,0\n0,2,1,0,1,0.5,0\n"),
        ];
        for text in bad {
            assert!(matches!(parse_trace_csv(&text), Err(Error::Parse(_))), "{text:?}");
        }
    }
}
