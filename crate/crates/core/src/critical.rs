//! Critical coupling constants for `N` identical particles.
//!
//! Setting `E = 0` in the ET system gives
//!
//! ```text
//! g_N = 1 / (rho0^2 v(rho0)) * 2 / (N (N-1)^2) * Q^2 / m,    2 v(rho0) + rho0 v'(rho0) = 0.
//! ```
//!
//! The improved variant replaces `Q` by `phi(g) nu + lambda`, where `phi`
//! itself depends on `g`, and solves the resulting fixed-point equation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::identical::{self, IdenticalSystem};
use crate::numerics::{self, Bracket, RootConfig};
use crate::potentials::PotentialWell;
use crate::quantum::{QSplit, StateSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum Coupling {
    Finite(f64),
    /// Limit value of repulsive power laws.
    Infinite,
}

impl Coupling {
    pub fn value(self) -> f64 {
        match self {
            Coupling::Finite(g) => g,
            Coupling::Infinite => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Plain,
    Improved,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundCharacter {
    UpperBound,
    NoGuarantee,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalResult {
    pub coupling: Coupling,
    /// Root of `2 v + rho v' = 0`; absent for power laws.
    pub rho0: Option<f64>,
    /// `1 / (rho0^2 v(rho0))`.
    pub factor: Option<f64>,
    pub method: Method,
    pub bound_character: BoundCharacter,
    /// Successive iterates of the improved fixed-point solve.
    pub trace: Vec<f64>,
}

impl CriticalResult {
    pub fn g(&self) -> f64 {
        self.coupling.value()
    }
}

/// Smallest positive root of `2 v(rho) + rho v'(rho) = 0`.
pub fn rho0_critical(well: &PotentialWell) -> Result<f64> {
    let f = |rho: f64| 2.0 * well.v(rho) + rho * well.v1(rho);
    let grid = identical::scan_grid(well.mu());
    let first = numerics::sign_change_brackets(f, &grid)
        .into_iter()
        .next()
        .ok_or_else(|| {
            Error::NotAdmissible(format!("2v + rho v' has no positive root for {well}"))
        })?;
    numerics::find_root(f, first, &RootConfig::default())
}

pub fn well_factor(well: &PotentialWell) -> Result<f64> {
    let rho0 = rho0_critical(well)?;
    Ok(1.0 / (rho0 * rho0 * well.v(rho0)))
}

fn validate(well: &PotentialWell, n: usize, mass: f64, state: &StateSpec) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need N >= 2, got {n}")));
    }
    if !(mass > 0.0) || !mass.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "mass must be positive, got {mass}"
        )));
    }
    if state.particles() != n {
        return Err(Error::InvalidParameter(format!(
            "state describes {} particles, N = {n}",
            state.particles()
        )));
    }
    let _ = well;
    Ok(())
}

fn power_law_limit(well: &PotentialWell, method: Method) -> Option<CriticalResult> {
    let p = well.power_exponent()?;
    Some(CriticalResult {
        coupling: if p < 0.0 {
            Coupling::Finite(0.0)
        } else {
            Coupling::Infinite
        },
        rho0: None,
        factor: None,
        method,
        bound_character: match method {
            Method::Plain => BoundCharacter::UpperBound,
            Method::Improved => BoundCharacter::NoGuarantee,
        },
        trace: vec![],
    })
}

fn formula(factor: f64, n: usize, mass: f64, q: f64) -> f64 {
    let n = n as f64;
    factor * 2.0 / (n * (n - 1.0).powi(2)) * q * q / mass
}

pub fn critical_g(
    well: &PotentialWell,
    n: usize,
    mass: f64,
    state: &StateSpec,
) -> Result<CriticalResult> {
    validate(well, n, mass, state)?;
    if let Some(r) = power_law_limit(well, Method::Plain) {
        return Ok(r);
    }
    let rho0 = rho0_critical(well)?;
    let factor = 1.0 / (rho0 * rho0 * well.v(rho0));
    Ok(CriticalResult {
        coupling: Coupling::Finite(formula(factor, n, mass, state.q_global())),
        rho0: Some(rho0),
        factor: Some(factor),
        method: Method::Plain,
        bound_character: BoundCharacter::UpperBound,
        trace: vec![],
    })
}

const FIXED_POINT_TOL: f64 = 1e-10;
const FIXED_POINT_MAX_ITER: usize = 200;

/// Right-hand side of the improved critical equation at coupling `g`.
fn improved_map(
    well: &PotentialWell,
    n: usize,
    mass: f64,
    state: &StateSpec,
    split: &QSplit,
    factor: f64,
    g: f64,
) -> Result<f64> {
    let sys = IdenticalSystem::new(n, mass, g, well.clone())?;
    let phi = identical::phi_nr(&sys, state)?;
    Ok(formula(factor, n, mass, split.q_phi(phi)))
}

pub fn critical_g_improved(
    well: &PotentialWell,
    n: usize,
    mass: f64,
    state: &StateSpec,
) -> Result<CriticalResult> {
    validate(well, n, mass, state)?;
    let split = state.nu_lambda()?;
    if let Some(r) = power_law_limit(well, Method::Improved) {
        return Ok(r);
    }
    let plain = critical_g(well, n, mass, state)?;
    let factor = plain.factor.expect("finite well has a factor");
    let seed = plain.g();
    let map = |g: f64| improved_map(well, n, mass, state, &split, factor, g);

    let mut trace = vec![seed];
    let mut g = seed;
    let mut last_step = 0.0f64;
    let mut damping = 1.0;
    let mut converged = None;
    for _ in 0..FIXED_POINT_MAX_ITER {
        let Ok(next) = map(g) else { break };
        let step = next - g;
        if step * last_step < 0.0 {
            damping = 0.5;
        }
        let new_g = g + damping * step;
        trace.push(new_g);
        if (new_g - g).abs() <= FIXED_POINT_TOL * new_g.abs() {
            converged = Some(new_g);
            break;
        }
        last_step = step;
        g = new_g;
    }

    let g_crit = match converged {
        Some(g) => g,
        None => {
            // the lambda subproblem only has a stationary point above its own critical coupling
            let lambda_floor = formula(factor, n, mass, split.lambda.value()) * (1.0 + 1e-9);
            let lo = (1e-3 * seed).max(lambda_floor);
            let hi = 1e3 * seed;
            let h = |g: f64| map(g).map(|f| g - f).unwrap_or(f64::NAN);
            let grid = numerics::log_grid(lo, hi, 400);
            let bracket: Bracket = numerics::sign_change_brackets(h, &grid)
                .into_iter()
                .next()
                .ok_or(Error::NoConvergence {
                    iterations: FIXED_POINT_MAX_ITER,
                    residual: f64::NAN,
                })?;
            let g = numerics::find_root(h, bracket, &RootConfig::default())?;
            trace.push(g);
            g
        }
    };

    Ok(CriticalResult {
        coupling: Coupling::Finite(g_crit),
        rho0: plain.rho0,
        factor: Some(factor),
        method: Method::Improved,
        bound_character: BoundCharacter::NoGuarantee,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{make_builtin, WellKind};
    use std::f64::consts::E;

    fn exp1() -> PotentialWell {
        make_builtin(WellKind::Exponential, 1.0).unwrap()
    }

    fn st(n: u32, l: u32) -> StateSpec {
        StateSpec::new(vec![(n, l)], 3).unwrap()
    }

    #[test]
    fn rho0_roots() {
        assert!((rho0_critical(&exp1()).unwrap() - 2.0).abs() < 1e-12);
        let y = make_builtin(WellKind::Yukawa, 1.0).unwrap();
        assert!((rho0_critical(&y).unwrap() - 1.0).abs() < 1e-12);
        let g = make_builtin(WellKind::Gaussian, 1.0).unwrap();
        assert!((rho0_critical(&g).unwrap() - 1.0).abs() < 1e-12);
        let c = make_builtin(WellKind::PowerLaw(-1.0), 1.0).unwrap();
        assert!(matches!(rho0_critical(&c), Err(Error::NotAdmissible(_))));
    }

    #[test]
    fn factor_forms_agree() {
        for kind in [WellKind::Yukawa, WellKind::Exponential, WellKind::Gaussian] {
            let w = make_builtin(kind, 1.7).unwrap();
            let r = rho0_critical(&w).unwrap();
            let a = 1.0 / (r * r * w.v(r));
            let b = -2.0 / (r.powi(3) * w.v1(r));
            assert!((a - b).abs() < 1e-10 * a);
        }
        assert!((well_factor(&exp1()).unwrap() - E * E / 4.0).abs() < 1e-12);
    }

    #[test]
    fn plain_examples() {
        let g = critical_g(&exp1(), 2, 1.0, &st(0, 0)).unwrap();
        assert!((g.g() - 4.16).abs() < 0.005);
        assert_eq!(g.bound_character, BoundCharacter::UpperBound);
        let g = critical_g(&exp1(), 11, 1.0, &StateSpec::bosonic_ground(11, 3).unwrap()).unwrap();
        assert!((g.g() - 0.756).abs() < 0.001);
        let g = critical_g(&exp1(), 2, 1.0, &st(1, 1)).unwrap();
        assert!((g.g() - 37.4).abs() < 0.05);
    }

    #[test]
    fn improved_examples() {
        for ((n, l), want) in [((0, 0), 2.92), ((0, 1), 8.71), ((1, 0), 16.0)] {
            let g = critical_g_improved(&exp1(), 2, 1.0, &st(n, l)).unwrap();
            assert!(
                (g.g() - want).abs() <= 0.005 * want,
                "({n},{l}) -> {}",
                g.g()
            );
            assert_eq!(g.bound_character, BoundCharacter::NoGuarantee);
            assert!(g.trace.len() >= 2);
        }
    }

    #[test]
    fn yukawa_equals_gaussian() {
        let s = StateSpec::bosonic_ground(5, 3).unwrap();
        let y = critical_g(&make_builtin(WellKind::Yukawa, 2.0).unwrap(), 5, 1.0, &s).unwrap();
        let g = critical_g(&make_builtin(WellKind::Gaussian, 2.0).unwrap(), 5, 1.0, &s).unwrap();
        assert!((y.g() - g.g()).abs() < 1e-12 * y.g());
    }

    #[test]
    fn power_law_limits() {
        let s = st(0, 0);
        let a = critical_g(
            &make_builtin(WellKind::PowerLaw(-1.0), 1.0).unwrap(),
            2,
            1.0,
            &s,
        )
        .unwrap();
        assert_eq!(a.coupling, Coupling::Finite(0.0));
        let b = critical_g(
            &make_builtin(WellKind::PowerLaw(2.0), 1.0).unwrap(),
            2,
            1.0,
            &s,
        )
        .unwrap();
        assert_eq!(b.coupling, Coupling::Infinite);
        assert_eq!(b.g(), f64::INFINITY);
    }

    #[test]
    fn energy_vanishes_at_critical_coupling() {
        for s in [st(0, 0), st(1, 2), StateSpec::bosonic_ground(6, 3).unwrap()] {
            let n = s.particles();
            let g = critical_g(&exp1(), n, 1.0, &s).unwrap().g();
            let sys = IdenticalSystem::new(n, 1.0, g, exp1()).unwrap();
            let e = identical::solve_energy(&sys, &s).unwrap();
            assert!(e.energy.abs() <= 1e-8 * g, "{s}: {}", e.energy);
        }
    }

    #[test]
    fn invalid_inputs() {
        assert!(critical_g(&exp1(), 3, 1.0, &st(0, 0)).is_err());
        assert!(critical_g(&exp1(), 2, -1.0, &st(0, 0)).is_err());
        let one_d = StateSpec::new(vec![(0, 0)], 1).unwrap();
        assert!(critical_g(&exp1(), 2, 1.0, &one_d).is_ok());
        assert!(critical_g_improved(&exp1(), 2, 1.0, &one_d).is_err());
    }
}
