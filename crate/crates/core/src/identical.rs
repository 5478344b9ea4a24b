//! Envelope-theory energies for `N` identical particles with a pairwise
//! central potential, in units with `hbar = 1`.
//!
//! The eigenvalue system is
//!
//! ```text
//! E = N T(p0) + C V(rho0)
//! N p0 T'(p0) = C rho0 V'(rho0)
//! Q = sqrt(C) rho0 p0                  with C = N (N - 1) / 2
//! ```
//!
//! Eliminating `p0` leaves a single equation in `rho0`, which is the
//! stationarity condition of `E(rho) = N T(Q / (sqrt(C) rho)) + C V(rho)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{self, Bracket, RootConfig};
use crate::potentials::PotentialWell;
use crate::quantum::StateSpec;

/// Kinetic energy `T(p)` of one particle.
pub trait KineticEnergy {
    fn t(&self, p: f64) -> f64;
    fn t1(&self, p: f64) -> f64;
    fn t2(&self, p: f64) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nonrelativistic {
    pub mass: f64,
}

impl KineticEnergy for Nonrelativistic {
    fn t(&self, p: f64) -> f64 {
        p * p / (2.0 * self.mass)
    }
    fn t1(&self, p: f64) -> f64 {
        p / self.mass
    }
    fn t2(&self, _p: f64) -> f64 {
        1.0 / self.mass
    }
}

/// Number of pairs among `n` particles.
pub fn pair_count(n: usize) -> f64 {
    (n * (n.saturating_sub(1))) as f64 / 2.0
}

#[derive(Debug, Clone)]
pub struct IdenticalSystem {
    n: usize,
    mass: f64,
    coupling: f64,
    well: PotentialWell,
}

impl IdenticalSystem {
    pub fn new(n: usize, mass: f64, coupling: f64, well: PotentialWell) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("need N >= 2, got {n}")));
        }
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "mass must be positive, got {mass}"
            )));
        }
        if !coupling.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "coupling must be finite, got {coupling}"
            )));
        }
        Ok(IdenticalSystem {
            n,
            mass,
            coupling,
            well,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn well(&self) -> &PotentialWell {
        &self.well
    }

    pub fn with_coupling(&self, coupling: f64) -> Self {
        IdenticalSystem {
            coupling,
            ..self.clone()
        }
    }

    pub fn pairs(&self) -> f64 {
        pair_count(self.n)
    }

    pub fn kinetic(&self) -> Nonrelativistic {
        Nonrelativistic { mass: self.mass }
    }

    fn v(&self, r: f64) -> f64 {
        self.well.potential(self.coupling, r)
    }

    fn v1(&self, r: f64) -> f64 {
        self.well.potential_d1(self.coupling, r)
    }

    fn v2(&self, r: f64) -> f64 {
        self.well.potential_d2(self.coupling, r)
    }

    fn check_state(&self, state: &StateSpec) -> Result<()> {
        if state.particles() != self.n {
            return Err(Error::InvalidParameter(format!(
                "state describes {} particles, system has {}",
                state.particles(),
                self.n
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Binding {
    /// Stationary point with negative energy.
    Bound,
    /// Stationary point exists but its energy is not negative.
    PositiveEnergy,
    /// No stationary point: the attraction is too weak.
    NoStationaryPoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtSolution {
    pub energy: f64,
    pub rho0: f64,
    pub p0: f64,
    pub q_eff: f64,
    /// Relative residuals of the energy, stationarity and quantisation equations.
    pub residuals: [f64; 3],
    pub binding: Binding,
    /// More than one local minimum of `E(rho)` was found.
    pub multiple_minima: bool,
}

impl EtSolution {
    pub fn is_bound(&self) -> bool {
        self.binding == Binding::Bound
    }

    fn unbound(q_eff: f64) -> Self {
        EtSolution {
            energy: f64::NAN,
            rho0: f64::NAN,
            p0: f64::NAN,
            q_eff,
            residuals: [f64::NAN; 3],
            binding: Binding::NoStationaryPoint,
            multiple_minima: false,
        }
    }
}

/// Probe count and range (in units of `1/mu`) of the stationary-point scan.
pub const SCAN_PROBES: usize = 240;
pub const SCAN_RANGE: (f64, f64) = (1e-6, 1e6);

pub(crate) fn scan_grid(mu: f64) -> Vec<f64> {
    numerics::log_grid(SCAN_RANGE.0 / mu, SCAN_RANGE.1 / mu, SCAN_PROBES)
}

fn complete(sys: &IdenticalSystem, q: f64, rho0: f64) -> EtSolution {
    let c = sys.pairs();
    let n = sys.n as f64;
    let kin = sys.kinetic();
    let p0 = q / (c.sqrt() * rho0);
    let energy = n * kin.t(p0) + c * sys.v(rho0);
    let lhs3 = n * p0 * kin.t1(p0);
    let rhs3 = c * rho0 * sys.v1(rho0);
    let scale2 = (n * kin.t(p0)).abs() + (c * sys.v(rho0)).abs();
    let residuals = [
        (energy - (n * kin.t(p0) + c * sys.v(rho0))).abs() / scale2,
        (lhs3 - rhs3).abs() / lhs3.abs(),
        (q - c.sqrt() * rho0 * p0).abs() / q,
    ];
    EtSolution {
        energy,
        rho0,
        p0,
        q_eff: q,
        residuals,
        binding: if energy < 0.0 {
            Binding::Bound
        } else {
            Binding::PositiveEnergy
        },
        multiple_minima: false,
    }
}

/// Solve the ET system for an arbitrary effective quantum number `q > 0`.
pub fn solve_energy_q(sys: &IdenticalSystem, q: f64) -> Result<EtSolution> {
    if !(q > 0.0) {
        return Ok(EtSolution::unbound(q));
    }
    let c = sys.pairs();
    let n = sys.n as f64;
    let kin = sys.kinetic();
    // rho dE/drho: negative then positive across a minimum
    let slope = |rho: f64| {
        let p = q / (c.sqrt() * rho);
        c * rho * sys.v1(rho) - n * p * kin.t1(p)
    };
    let grid = scan_grid(sys.well.mu());
    let minima: Vec<Bracket> = numerics::sign_change_brackets(slope, &grid)
        .into_iter()
        .filter(|b| slope(b.lo) < 0.0)
        .collect();
    if minima.is_empty() {
        return Ok(EtSolution::unbound(q));
    }
    let cfg = RootConfig::default();
    let mut best: Option<EtSolution> = None;
    for b in &minima {
        let rho = numerics::find_root(slope, *b, &cfg)?;
        let sol = complete(sys, q, rho);
        if best.as_ref().is_none_or(|s| sol.energy < s.energy) {
            best = Some(sol);
        }
    }
    let mut sol = best.expect("at least one minimum");
    sol.multiple_minima = minima.len() > 1;
    Ok(sol)
}

pub fn solve_energy(sys: &IdenticalSystem, state: &StateSpec) -> Result<EtSolution> {
    sys.check_state(state)?;
    solve_energy_q(sys, state.q_global())
}

/// Lambert-W closed form, valid for the exponential well only.
pub fn energy_exponential_closed(sys: &IdenticalSystem, q: f64) -> Result<EtSolution> {
    if !sys.well.is_exponential() {
        return Err(Error::InvalidParameter(format!(
            "closed form needs an exponential well, got {}",
            sys.well.name()
        )));
    }
    if !(sys.coupling > 0.0) || !(q > 0.0) {
        return Ok(EtSolution::unbound(q));
    }
    let n = sys.n as f64;
    let mu = sys.well.mu();
    let z =
        (4.0 * mu * mu * q * q / (n * (n - 1.0).powi(2) * sys.coupling * sys.mass)).cbrt() / 3.0;
    if z > (-1.0f64).exp() {
        return Ok(EtSolution::unbound(q));
    }
    let w = numerics::lambert_w0(-z)?;
    let energy = -0.5 * n * (n - 1.0) * sys.coupling * (1.0 + 1.5 * w) * (3.0 * w).exp();
    let rho0 = -3.0 * w / mu;
    let mut sol = complete(sys, q, rho0);
    sol.energy = energy;
    sol.binding = if energy < 0.0 {
        Binding::Bound
    } else {
        Binding::PositiveEnergy
    };
    Ok(sol)
}

/// General `phi` from the kinetic and potential curvature ratios.
pub fn phi_general(p_t2_over_t1: f64, rho_v2_over_v1: f64) -> Result<f64> {
    let radicand = 2.0 + p_t2_over_t1 + rho_v2_over_v1;
    if !(radicand >= 0.0) {
        return Err(Error::NegativeRadicand(radicand));
    }
    Ok(radicand.sqrt())
}

/// Where `lambda = 0` the reduced problem has no finite stationary point; its
/// `rho -> 0` limit is probed at this distance (units of `1/mu`).
const SMALL_RHO: f64 = 1e-8;

/// `phi` of the nonrelativistic model from the `Q -> lambda` subproblem.
pub fn phi_nr(sys: &IdenticalSystem, state: &StateSpec) -> Result<f64> {
    sys.check_state(state)?;
    let split = state.nu_lambda()?;
    let lambda = split.lambda.value();
    let (rho, p) = if split.lambda.twice() == 0 {
        (SMALL_RHO / sys.well.mu(), f64::INFINITY)
    } else {
        let sub = solve_energy_q(sys, lambda)?;
        if sub.binding == Binding::NoStationaryPoint {
            return Err(Error::NoStationaryPoint(format!(
                "no stationary point with Q replaced by lambda = {lambda}"
            )));
        }
        (sub.rho0, sub.p0)
    };
    let v1 = sys.v1(rho);
    if v1 == 0.0 || !v1.is_finite() {
        return Err(Error::Domain(format!("V'({rho}) = {v1}; phi is undefined")));
    }
    let kin = sys.kinetic();
    let kin_ratio = if p.is_finite() {
        p * kin.t2(p) / kin.t1(p)
    } else {
        1.0
    };
    phi_general(kin_ratio, rho * sys.v2(rho) / v1)
}

/// Solve with `Q` replaced by `phi nu + lambda` for a caller-supplied `phi`.
pub fn solve_energy_with_phi(
    sys: &IdenticalSystem,
    state: &StateSpec,
    phi: f64,
) -> Result<EtSolution> {
    sys.check_state(state)?;
    let q = state.nu_lambda()?.q_phi(phi);
    solve_energy_q(sys, q)
}

pub fn solve_energy_improved(sys: &IdenticalSystem, state: &StateSpec) -> Result<EtSolution> {
    let phi = phi_nr(sys, state)?;
    solve_energy_with_phi(sys, state, phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{make_builtin, WellKind};
    use proptest::prelude::*;

    fn exp_sys(n: usize, m: f64, g: f64) -> IdenticalSystem {
        IdenticalSystem::new(n, m, g, make_builtin(WellKind::Exponential, 1.0).unwrap()).unwrap()
    }

    fn state(n: u32, l: u32) -> StateSpec {
        StateSpec::new(vec![(n, l)], 3).unwrap()
    }

    fn round3(x: f64) -> f64 {
        let mag = 10f64.powi(x.abs().log10().floor() as i32 - 2);
        (x / mag).round() * mag
    }

    #[test]
    fn exponential_two_body_energies() {
        let sys = exp_sys(2, 1.0, 40.0);
        let e = solve_energy(&sys, &state(0, 0)).unwrap();
        assert!(e.is_bound());
        assert!((round3(e.energy) - (-15.7)).abs() < 1e-9);
        assert!(e.residuals.iter().all(|r| *r <= 1e-9));
        let e = solve_energy(&sys, &state(0, 1)).unwrap();
        assert!((round3(e.energy) - (-8.56)).abs() < 1e-9);
        let e = solve_energy(&sys, &state(2, 0)).unwrap();
        assert!(!e.is_bound());
    }

    #[test]
    fn closed_form_agrees() {
        let sys = exp_sys(2, 1.0, 40.0);
        let a = energy_exponential_closed(&sys, 1.5).unwrap();
        let b = solve_energy_q(&sys, 1.5).unwrap();
        assert!((round3(a.energy) - (-15.7)).abs() < 1e-9);
        assert!((a.energy - b.energy).abs() <= 1e-9 * b.energy.abs());
        assert!((a.rho0 - b.rho0).abs() <= 1e-9 * b.rho0);
        let weak = energy_exponential_closed(&exp_sys(2, 1.0, 1.0), 1.5).unwrap();
        assert_eq!(weak.binding, Binding::NoStationaryPoint);
        let yuk = IdenticalSystem::new(2, 1.0, 1.0, make_builtin(WellKind::Yukawa, 1.0).unwrap())
            .unwrap();
        assert!(energy_exponential_closed(&yuk, 1.5).is_err());
    }

    #[test]
    fn harmonic_is_exact() {
        let k = 0.7;
        let m = 1.3;
        let well = make_builtin(WellKind::PowerLaw(2.0), 1.0).unwrap();
        for n in 2..=10 {
            let sys = IdenticalSystem::new(n, m, k, well.clone()).unwrap();
            let s = StateSpec::new((0..n as u32 - 1).map(|i| (i % 2, i % 3)).collect(), 3).unwrap();
            let q = s.q_global();
            let e = solve_energy(&sys, &s).unwrap();
            let exact = q * (2.0 * k * n as f64 / m).sqrt();
            assert!((e.energy - exact).abs() <= 1e-10 * exact, "N={n}");
            assert_eq!(e.binding, Binding::PositiveEnergy);
        }
    }

    #[test]
    fn phi_for_power_laws() {
        let harm = IdenticalSystem::new(
            3,
            1.0,
            2.0,
            make_builtin(WellKind::PowerLaw(2.0), 1.0).unwrap(),
        )
        .unwrap();
        let s = StateSpec::new(vec![(1, 1), (0, 2)], 3).unwrap();
        assert!((phi_nr(&harm, &s).unwrap() - 2.0).abs() < 1e-12);
        let coul = IdenticalSystem::new(
            2,
            1.0,
            1.0,
            make_builtin(WellKind::PowerLaw(-1.0), 1.0).unwrap(),
        )
        .unwrap();
        assert!((phi_nr(&coul, &state(0, 1)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn phi_for_exponential_matches_lambert_oracle() {
        let sys = exp_sys(2, 1.0, 2.92);
        let phi = phi_nr(&sys, &state(0, 0)).unwrap();
        let z = (0.5f64 / 2.92).cbrt() / 3.0;
        let w = numerics::lambert_w0(-z).unwrap();
        assert!((phi - (3.0 * (1.0 + w)).sqrt()).abs() < 1e-10);
        assert!((phi - 1.516).abs() < 5e-4);
    }

    #[test]
    fn improved_energies() {
        let sys = exp_sys(2, 1.0, 40.0);
        let e = solve_energy_improved(&sys, &state(0, 0)).unwrap();
        assert!((round3(e.energy) - (-17.3)).abs() < 1e-9);
        let e = solve_energy_improved(&sys, &state(0, 1)).unwrap();
        assert!((round3(e.energy) - (-9.92)).abs() < 1e-9);
        let e = solve_energy_improved(&sys, &state(2, 1)).unwrap();
        assert!(!e.is_bound());
    }

    #[test]
    fn phi_two_reproduces_plain() {
        let sys = exp_sys(4, 1.7, 12.0);
        let s = StateSpec::new(vec![(0, 1), (1, 0), (0, 0)], 3).unwrap();
        let a = solve_energy(&sys, &s).unwrap();
        let b = solve_energy_with_phi(&sys, &s, 2.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn lambda_zero_uses_small_rho_limit() {
        // D = 2 ground state: lambda = 0, exponential curvature ratio -> 0
        let sys = exp_sys(2, 1.0, 10.0);
        let s = StateSpec::new(vec![(0, 0)], 2).unwrap();
        let phi = phi_nr(&sys, &s).unwrap();
        assert!((phi - 3f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn state_size_mismatch() {
        let sys = exp_sys(3, 1.0, 10.0);
        assert!(solve_energy(&sys, &state(0, 0)).is_err());
        assert!(IdenticalSystem::new(
            1,
            1.0,
            1.0,
            make_builtin(WellKind::Exponential, 1.0).unwrap()
        )
        .is_err());
        assert!(IdenticalSystem::new(
            2,
            0.0,
            1.0,
            make_builtin(WellKind::Exponential, 1.0).unwrap()
        )
        .is_err());
    }

    #[test]
    fn multiple_minima_are_flagged() {
        // two exponential dips at different ranges give two local minima
        let (well, _) = crate::potentials::parse_custom("exp(-r) + 0.002*exp(-r/60)", 1.0).unwrap();
        let sys = IdenticalSystem::new(2, 1.0, 40.0, well).unwrap();
        let e = solve_energy_q(&sys, 1.5).unwrap();
        assert!(e.is_bound());
        assert!(e.multiple_minima);
        let plain = solve_energy_q(&exp_sys(2, 1.0, 40.0), 1.5).unwrap();
        assert!(e.energy < plain.energy);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]
        #[test]
        fn closed_form_equals_generic(n in 2usize..20, m in 0.2f64..5.0, g in 0.5f64..200.0, q2 in 1u32..30) {
            let q = q2 as f64 * 0.5;
            let sys = exp_sys(n, m, g);
            let closed = energy_exponential_closed(&sys, q).unwrap();
            prop_assume!(closed.binding != Binding::NoStationaryPoint);
            let generic = solve_energy_q(&sys, q).unwrap();
            prop_assert!((closed.energy - generic.energy).abs() <= 1e-9 * closed.energy.abs().max(1e-12 * g));
        }
    }
}
