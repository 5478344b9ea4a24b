//! Dimensionless potential wells `v(r)` and their radial derivatives.
//!
//! A well enters the Hamiltonian as `V(r) = -g v(r)`. Power-law pseudo-wells
//! `v(r) = (mu r)^p` are the exception: their potential is
//! `V(r) = sgn(p) g (mu r)^p`, which [`PotentialWell::potential`] accounts for.

pub mod expr;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use expr::Expr;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WellKind {
    Yukawa,
    Exponential,
    Gaussian,
    PowerLaw(f64),
}

impl fmt::Display for WellKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WellKind::Yukawa => write!(f, "yukawa"),
            WellKind::Exponential => write!(f, "exponential"),
            WellKind::Gaussian => write!(f, "gaussian"),
            WellKind::PowerLaw(p) => write!(f, "power({p})"),
        }
    }
}

#[derive(Debug, Clone)]
enum Shape {
    Builtin(WellKind),
    Custom(Arc<Expr>),
}

/// An immutable well with inverse range `mu`.
#[derive(Debug, Clone)]
pub struct PotentialWell {
    name: String,
    mu: f64,
    shape: Shape,
}

/// Non-fatal findings about a parsed well.
#[derive(Debug, Clone, PartialEq)]
pub enum WellWarning {
    /// `v(r) <= 0` at the listed sample points; the well is partly repulsive.
    NonPositive(Vec<f64>),
}

fn check_mu(mu: f64) -> Result<()> {
    if mu > 0.0 && mu.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "mu must be positive and finite, got {mu}"
        )))
    }
}

pub fn make_builtin(kind: WellKind, mu: f64) -> Result<PotentialWell> {
    check_mu(mu)?;
    if let WellKind::PowerLaw(p) = kind {
        if !(p > -2.0) || p == 0.0 || !p.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "power-law exponent must satisfy p > -2 and p != 0, got {p}"
            )));
        }
    }
    Ok(PotentialWell {
        name: kind.to_string(),
        mu,
        shape: Shape::Builtin(kind),
    })
}

/// Sample points (in units of `1/mu`) where parsed wells are checked.
const CHECK_POINTS: [f64; 7] = [0.1, 0.3, 0.5, 1.0, 2.0, 5.0, 10.0];

/// Parse a custom well. The expression is written in the dimensionless
/// variable `r`; the resulting well evaluates it at `mu * r`.
pub fn parse_custom(source: &str, mu: f64) -> Result<(PotentialWell, Vec<WellWarning>)> {
    check_mu(mu)?;
    let expr = expr::parse(source)?;
    let mut bad = Vec::new();
    for &x in &CHECK_POINTS {
        let v = expr.eval(x);
        if !v.is_finite() {
            return Err(Error::Domain(format!(
                "'{source}' is not finite at r = {x}"
            )));
        }
        if v <= 0.0 {
            bad.push(x);
        }
    }
    let warnings = if bad.is_empty() {
        vec![]
    } else {
        vec![WellWarning::NonPositive(bad)]
    };
    let well = PotentialWell {
        name: source.trim().to_string(),
        mu,
        shape: Shape::Custom(Arc::new(expr)),
    };
    Ok((well, warnings))
}

fn richardson_d1(f: impl Fn(f64) -> f64, x: f64) -> f64 {
    let h = f64::EPSILON.cbrt() * x.abs().max(1.0);
    let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    (4.0 * d(0.5 * h) - d(h)) / 3.0
}

fn richardson_d2(f: impl Fn(f64) -> f64, x: f64) -> f64 {
    // second differences lose eps/h^2, so they need a coarser step than d1
    let h = f64::EPSILON.powf(0.25) * x.abs().max(1.0);
    let fx = f(x);
    let s = |h: f64| (f(x + h) - 2.0 * fx + f(x - h)) / (h * h);
    (4.0 * s(0.5 * h) - s(h)) / 3.0
}

impl PotentialWell {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn kind(&self) -> Option<WellKind> {
        match self.shape {
            Shape::Builtin(k) => Some(k),
            Shape::Custom(_) => None,
        }
    }

    pub fn power_exponent(&self) -> Option<f64> {
        match self.shape {
            Shape::Builtin(WellKind::PowerLaw(p)) => Some(p),
            _ => None,
        }
    }

    pub fn is_exponential(&self) -> bool {
        matches!(self.shape, Shape::Builtin(WellKind::Exponential))
    }

    /// Same shape with a different `mu`.
    pub fn with_mu(&self, mu: f64) -> Result<PotentialWell> {
        check_mu(mu)?;
        Ok(PotentialWell { mu, ..self.clone() })
    }

    /// `+1` for repulsive power laws, `-1` otherwise.
    pub fn sign(&self) -> f64 {
        match self.shape {
            Shape::Builtin(WellKind::PowerLaw(p)) if p > 0.0 => 1.0,
            _ => -1.0,
        }
    }

    /// The attractive profile `w(r)` with `V(r) = -g w(r)`; equals `v` except
    /// for repulsive power laws.
    pub fn attractive_profile(&self, r: f64) -> f64 {
        -self.sign() * self.v(r)
    }

    pub fn attractive_profile_d1(&self, r: f64) -> f64 {
        -self.sign() * self.v1(r)
    }

    pub fn potential(&self, g: f64, r: f64) -> f64 {
        self.sign() * g * self.v(r)
    }

    pub fn potential_d1(&self, g: f64, r: f64) -> f64 {
        self.sign() * g * self.v1(r)
    }

    pub fn potential_d2(&self, g: f64, r: f64) -> f64 {
        self.sign() * g * self.v2(r)
    }

    pub fn v(&self, r: f64) -> f64 {
        let x = self.mu * r;
        match &self.shape {
            Shape::Builtin(WellKind::Yukawa) => (-x).exp() / x,
            Shape::Builtin(WellKind::Exponential) => (-x).exp(),
            Shape::Builtin(WellKind::Gaussian) => (-x * x).exp(),
            Shape::Builtin(WellKind::PowerLaw(p)) => x.powf(*p),
            Shape::Custom(e) => e.eval(x),
        }
    }

    pub fn v1(&self, r: f64) -> f64 {
        let mu = self.mu;
        let x = mu * r;
        match &self.shape {
            Shape::Builtin(WellKind::Yukawa) => -mu * (-x).exp() * (1.0 / x + 1.0 / (x * x)),
            Shape::Builtin(WellKind::Exponential) => -mu * (-x).exp(),
            Shape::Builtin(WellKind::Gaussian) => -2.0 * mu * x * (-x * x).exp(),
            Shape::Builtin(WellKind::PowerLaw(p)) => mu * p * x.powf(p - 1.0),
            Shape::Custom(e) => mu * richardson_d1(|t| e.eval(t), x),
        }
    }

    pub fn v2(&self, r: f64) -> f64 {
        let mu = self.mu;
        let x = mu * r;
        let mu2 = mu * mu;
        match &self.shape {
            Shape::Builtin(WellKind::Yukawa) => {
                mu2 * (-x).exp() * (1.0 / x + 2.0 / (x * x) + 2.0 / (x * x * x))
            }
            Shape::Builtin(WellKind::Exponential) => mu2 * (-x).exp(),
            Shape::Builtin(WellKind::Gaussian) => mu2 * (4.0 * x * x - 2.0) * (-x * x).exp(),
            Shape::Builtin(WellKind::PowerLaw(p)) => mu2 * p * (p - 1.0) * x.powf(p - 2.0),
            Shape::Custom(e) => mu2 * richardson_d2(|t| e.eval(t), x),
        }
    }
}

impl fmt::Display for PotentialWell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mu = {})", self.name, self.mu)
    }
}
