//! Finite discrete priors on the regression coefficients.

use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};

const MASS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub value: f64,
    pub mass: f64,
}

/// Distribution of a coefficient: finitely many atoms whose masses sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct Prior {
    atoms: Vec<Atom>,
}

impl Prior {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return domain("prior needs at least one atom");
        }
        for a in &atoms {
            if !a.value.is_finite() {
                return domain(format!("atom value {} is not finite", a.value));
            }
            if !(a.mass > 0.0) || !a.mass.is_finite() {
                return domain(format!("atom mass {} must be positive", a.mass));
            }
        }
        if atoms.iter().filter(|a| a.value == 0.0).count() > 1 {
            return domain("prior has more than one atom at zero");
        }
        let total: f64 = atoms.iter().map(|a| a.mass).sum();
        if (total - 1.0).abs() > MASS_TOL {
            return domain(format!("atom masses sum to {total}, not 1"));
        }
        Ok(Self { atoms })
    }

    /// `Π = value` with probability `epsilon`, zero otherwise.
    pub fn two_point(epsilon: f64, value: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return domain(format!("epsilon must lie in (0, 1], got {epsilon}"));
        }
        if value == 0.0 {
            return domain("signal value must be nonzero");
        }
        let mut atoms = vec![Atom { value, mass: epsilon }];
        if epsilon < 1.0 {
            atoms.push(Atom {
                value: 0.0,
                mass: 1.0 - epsilon,
            });
        }
        Self::new(atoms)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn nonzero(&self) -> impl Iterator<Item = &Atom> + '_ {
        self.atoms.iter().filter(|a| a.value != 0.0)
    }

    /// `P(Π ≠ 0)`.
    pub fn epsilon(&self) -> f64 {
        self.nonzero().map(|a| a.mass).sum()
    }

    pub fn second_moment(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass * a.value * a.value).sum()
    }
}

/// Grammar: comma-separated `value:mass` pairs; any mass left over goes to
/// an implicit atom at zero. E.g. `50:0.1,0.1:0.1` is 50 w.p. 0.1, 0.1 w.p.
/// 0.1 and 0 w.p. 0.8.
impl FromStr for Prior {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut atoms: Vec<Atom> = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (v, m) = part
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("expected value:mass, got `{part}`")))?;
            let value: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad atom value `{v}`")))?;
            let mass: f64 = m
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad atom mass `{m}`")))?;
            atoms.push(Atom { value, mass });
        }
        if atoms.is_empty() {
            return Err(Error::Parse("empty prior specification".into()));
        }
        let total: f64 = atoms.iter().map(|a| a.mass).sum();
        let rest = 1.0 - total;
        if rest < -MASS_TOL {
            return Err(Error::Parse(format!("atom masses sum to {total} > 1")));
        }
        if rest > MASS_TOL {
            match atoms.iter_mut().find(|a| a.value == 0.0) {
                Some(zero) => zero.mass += rest,
                None => atoms.push(Atom { value: 0.0, mass: rest }),
            }
        }
        Prior::new(atoms)
    }
}

impl fmt::Display for Prior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}:{}", a.value, a.mass)?;
        }
        Ok(())
    }
}

/// Strong/weak mixture `M` w.p. `εε′`, `1/M` w.p. `ε(1−ε′)`, 0 w.p. `1−ε`.
pub fn sharpness_prior(epsilon: f64, epsilon_prime: f64, strong: f64) -> Result<Prior> {
    if !(strong > 1.0) || !strong.is_finite() {
        return domain(format!("strong magnitude must exceed 1, got {strong}"));
    }
    sharpness_prior_with_weak(epsilon, epsilon_prime, strong, 1.0 / strong)
}

/// Same mixture with an explicit weak magnitude (e.g. 50 and 0.1).
pub fn sharpness_prior_with_weak(epsilon: f64, epsilon_prime: f64, strong: f64, weak: f64) -> Result<Prior> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return domain(format!("epsilon must lie in (0, 1), got {epsilon}"));
    }
    if !(epsilon_prime > 0.0 && epsilon_prime <= 1.0) {
        return domain(format!("epsilon' must lie in (0, 1], got {epsilon_prime}"));
    }
    if !(weak > 0.0 && weak < strong) || !strong.is_finite() {
        return domain(format!("need 0 < weak < strong, got weak {weak}, strong {strong}"));
    }
    let mut atoms = vec![Atom {
        value: strong,
        mass: epsilon * epsilon_prime,
    }];
    if epsilon_prime < 1.0 {
        atoms.push(Atom {
            value: weak,
            mass: epsilon * (1.0 - epsilon_prime),
        });
    }
    atoms.push(Atom {
        value: 0.0,
        mass: 1.0 - epsilon,
    });
    Prior::new(atoms)
}
