//! λ grid specifications: `log:hi:lo:count` or an explicit comma list.

use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};

/// An end of a log grid: a number, or `auto` (= λ_max) divided by a factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridBound {
    Value(f64),
    Auto { divisor: f64 },
}

impl GridBound {
    fn resolve(self, lambda_max: f64) -> f64 {
        match self {
            GridBound::Value(v) => v,
            GridBound::Auto { divisor } => lambda_max / divisor,
        }
    }
}

impl FromStr for GridBound {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("auto") {
            let divisor = match rest.strip_prefix('/') {
                None if rest.is_empty() => 1.0,
                Some(d) => d
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad divisor in `{s}`")))?,
                None => return Err(Error::Parse(format!("bad grid bound `{s}`"))),
            };
            if !(divisor > 0.0) || !divisor.is_finite() {
                return Err(Error::Parse(format!("divisor must be positive in `{s}`")));
            }
            return Ok(GridBound::Auto { divisor });
        }
        s.parse::<f64>()
            .map(GridBound::Value)
            .map_err(|_| Error::Parse(format!("bad grid bound `{s}`")))
    }
}

impl fmt::Display for GridBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridBound::Value(v) => write!(f, "{v}"),
            GridBound::Auto { divisor } if *divisor == 1.0 => f.write_str("auto"),
            GridBound::Auto { divisor } => write!(f, "auto/{divisor}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LambdaGrid {
    Log { hi: GridBound, lo: GridBound, count: usize },
    Explicit(Vec<f64>),
}

impl Default for LambdaGrid {
    /// 100 log-spaced points from λ_max down to λ_max/100.
    fn default() -> Self {
        LambdaGrid::Log {
            hi: GridBound::Auto { divisor: 1.0 },
            lo: GridBound::Auto { divisor: 100.0 },
            count: 100,
        }
    }
}

impl LambdaGrid {
    /// Concrete, strictly decreasing λ values for an instance with the given λ_max.
    pub fn resolve(&self, lambda_max: f64) -> Result<Vec<f64>> {
        let pts = match self {
            LambdaGrid::Explicit(v) => {
                let mut v = v.clone();
                v.sort_by(|a, b| b.total_cmp(a));
                v
            }
            LambdaGrid::Log { hi, lo, count } => {
                let (hi, lo) = (hi.resolve(lambda_max), lo.resolve(lambda_max));
                if !(hi > 0.0 && lo > 0.0) {
                    return domain(format!("log grid ends must be positive, got {hi} and {lo}"));
                }
                if *count == 1 {
                    vec![hi]
                } else {
                    let (lh, ll) = (hi.ln(), lo.ln());
                    (0..*count)
                        .map(|i| (lh + (ll - lh) * i as f64 / (*count - 1) as f64).exp())
                        .collect()
                }
            }
        };
        if pts.is_empty() {
            return domain("lambda grid is empty");
        }
        if pts.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return domain("lambda grid values must be positive and finite");
        }
        if pts.windows(2).any(|w| w[1] >= w[0]) {
            return domain("lambda grid must be strictly decreasing (duplicates or reversed log ends)");
        }
        Ok(pts)
    }
}

impl FromStr for LambdaGrid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("log:") {
            let parts: Vec<&str> = rest.split(':').collect();
            let [hi, lo, count] = parts.as_slice() else {
                return Err(Error::Parse(format!("expected log:hi:lo:count, got `{s}`")));
            };
            let count: usize = count
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad grid count `{count}`")))?;
            if count == 0 {
                return Err(Error::Parse("grid count must be at least 1".into()));
            }
            return Ok(LambdaGrid::Log {
                hi: hi.parse()?,
                lo: lo.parse()?,
                count,
            });
        }
        let vals = s
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad lambda value `{v}`")))
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(LambdaGrid::Explicit(vals))
    }
}

impl fmt::Display for LambdaGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambdaGrid::Log { hi, lo, count } => write!(f, "log:{hi}:{lo}:{count}"),
            LambdaGrid::Explicit(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                f.write_str(&parts.join(","))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid() {
        let g: LambdaGrid = "log:auto:auto/100:100".parse().unwrap();
        assert_eq!(g, LambdaGrid::default());
        let pts = g.resolve(5.0).unwrap();
        assert_eq!(pts.len(), 100);
        assert!((pts[0] - 5.0).abs() < 1e-12);
        assert!((pts[99] - 0.05).abs() < 1e-12);
        assert_eq!(g.to_string(), "log:auto:auto/100:100");
    }

    #[test]
    fn explicit_and_numeric() {
        let g: LambdaGrid = "2, 8,4".parse().unwrap();
        assert_eq!(g.resolve(1.0).unwrap(), vec![8.0, 4.0, 2.0]);
        let g: LambdaGrid = "log:10:1:3".parse().unwrap();
        let pts = g.resolve(123.0).unwrap();
        assert!((pts[1] - 10f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_specs() {
        for bad in ["log:1:2", "log:auto:auto/0:10", "log:a:1:3", "log:1:0.1:0", "1,x", ""] {
            assert!(bad.parse::<LambdaGrid>().is_err(), "{bad}");
        }
        let dup: LambdaGrid = "1,1".parse().unwrap();
        assert!(dup.resolve(1.0).is_err());
        let reversed: LambdaGrid = "log:1:10:5".parse().unwrap();
        assert!(reversed.resolve(1.0).is_err());
        let neg: LambdaGrid = "-1,2".parse().unwrap();
        assert!(neg.resolve(1.0).is_err());
    }
}
