//! Global quantum number `Q(N)` and its radial/angular split.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A nonnegative multiple of 1/2, stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Half(u64);

impl Half {
    pub const ZERO: Half = Half(0);

    pub fn from_twice(twice: u64) -> Self {
        Half(twice)
    }

    pub fn twice(self) -> u64 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 * 0.5
    }
}

impl std::ops::Add for Half {
    type Output = Half;
    fn add(self, rhs: Half) -> Half {
        Half(self.0 + rhs.0)
    }
}

impl fmt::Display for Half {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_multiple_of(2) {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}.5", self.0 / 2)
        }
    }
}

/// Per-pair quantum numbers `(n_i, l_i)` for `N - 1` internal excitations.
///
/// No symmetry filtering is done: fermionic occupancy rules are the caller's
/// responsibility.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateSpec {
    pairs: Vec<(u32, u32)>,
    dim: u32,
}

/// `Q = phi nu + lambda` with `phi = 2` giving back `Q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QSplit {
    pub q: Half,
    pub nu: Half,
    pub lambda: Half,
}

impl QSplit {
    pub fn q_phi(&self, phi: f64) -> f64 {
        phi * self.nu.value() + self.lambda.value()
    }
}

impl StateSpec {
    pub fn new(pairs: Vec<(u32, u32)>, dim: u32) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        if dim == 1 && pairs.iter().any(|&(_, l)| l != 0) {
            return Err(Error::InvalidParameter(
                "angular quantum numbers must vanish in one dimension".into(),
            ));
        }
        Ok(StateSpec { pairs, dim })
    }

    /// All `(n_i, l_i) = (0, 0)`: the smallest `Q` for given `N` and `D`.
    pub fn bosonic_ground(particles: usize, dim: u32) -> Result<Self> {
        if particles < 2 {
            return Err(Error::InvalidParameter(format!(
                "need at least 2 particles, got {particles}"
            )));
        }
        StateSpec::new(vec![(0, 0); particles - 1], dim)
    }

    /// Parses `"ground"` or `"(n,l);(n,l);..."`.
    pub fn parse(text: &str, particles: usize, dim: u32) -> Result<Self> {
        let t = text.trim();
        if t.eq_ignore_ascii_case("ground") {
            return StateSpec::bosonic_ground(particles, dim);
        }
        let mut pairs = Vec::new();
        for item in t.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            let inner = item
                .strip_prefix('(')
                .and_then(|s| s.strip_suffix(')'))
                .ok_or_else(|| {
                    Error::InvalidParameter(format!("state item '{item}' is not '(n,l)'"))
                })?;
            let mut it = inner.split(',').map(str::trim);
            let (n, l) = match (it.next(), it.next(), it.next()) {
                (Some(n), Some(l), None) => (n, l),
                _ => {
                    return Err(Error::InvalidParameter(format!(
                        "state item '{item}' is not '(n,l)'"
                    )))
                }
            };
            let parse = |s: &str| {
                s.parse::<u32>()
                    .map_err(|_| Error::InvalidParameter(format!("bad quantum number '{s}'")))
            };
            pairs.push((parse(n)?, parse(l)?));
        }
        if pairs.len() + 1 != particles {
            return Err(Error::InvalidParameter(format!(
                "{} particles need {} (n,l) pairs, got {}",
                particles,
                particles.saturating_sub(1),
                pairs.len()
            )));
        }
        StateSpec::new(pairs, dim)
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn particles(&self) -> usize {
        self.pairs.len() + 1
    }

    pub fn q_half(&self) -> Half {
        let d = self.dim as u64;
        let twice = if self.dim == 1 {
            self.pairs.iter().map(|&(n, _)| 2 * n as u64 + 1).sum()
        } else {
            self.pairs
                .iter()
                .map(|&(n, l)| 4 * n as u64 + 2 * l as u64 + d)
                .sum()
        };
        Half(twice)
    }

    pub fn q_global(&self) -> f64 {
        self.q_half().value()
    }

    pub fn nu_lambda(&self) -> Result<QSplit> {
        if self.dim < 2 {
            return Err(Error::InvalidParameter(
                "the radial/angular split needs D >= 2".into(),
            ));
        }
        let d = self.dim as u64;
        let nu = self.pairs.iter().map(|&(n, _)| 2 * n as u64 + 1).sum();
        let lambda = self.pairs.iter().map(|&(_, l)| 2 * l as u64 + d - 2).sum();
        Ok(QSplit {
            q: self.q_half(),
            nu: Half(nu),
            lambda: Half(lambda),
        })
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self
            .pairs
            .iter()
            .map(|(n, l)| format!("({n},{l})"))
            .collect();
        write!(f, "{}", items.join(";"))
    }
}
