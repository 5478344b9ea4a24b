//! Envelope theory for `Na` identical particles `a` plus one distinct particle `b`.
//!
//! With `T_a(p) = p^2 / (2 m_a)`, `T_b(p) = p^2 / (2 m_b)` the unknowns are
//! `p_a, r_aa, P0, R0`; the quantisation conditions `Q(Na) = sqrt(C) p_a r_aa`
//! and `Q(2) = P0 R0` eliminate the momenta, leaving two equations in
//! `(r_aa, R0)`:
//!
//! ```text
//! Na p_a^2 / m_a       = C r_aa V_aa'(r_aa) + (Na - 1)/2 V_ab'(r0') r_aa^2 / r0'
//! P0^2 / mu_ab         = Na V_ab'(r0') R0^2 / r0'
//! r0'^2 = (Na - 1) / (2 Na) r_aa^2 + R0^2,  mu_ab = Na m_a m_b / (Na m_a + m_b)
//! ```
//!
//! Critical couplings add `E = 0` and free one coupling. Every system is
//! reduced to a one-parameter family that satisfies all but one equation in
//! closed form, scanned on a log grid to enumerate positive-geometry roots,
//! and each root is then polished by Newton iteration in `(ln r_aa, ln R0)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::identical::pair_count;
use crate::numerics::{self, RootConfig};
use crate::potentials::PotentialWell;
use crate::quantum::StateSpec;

/// Mass of the distinct particle; `Infinite` is a static source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum MassB {
    Finite(f64),
    Infinite,
}

impl MassB {
    pub fn value(self) -> f64 {
        match self {
            MassB::Finite(m) => m,
            MassB::Infinite => f64::INFINITY,
        }
    }
}

impl std::fmt::Display for MassB {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MassB::Finite(m) => write!(f, "{m}"),
            MassB::Infinite => write!(f, "inf"),
        }
    }
}

pub fn reduced_mass(na: usize, ma: f64, mb: MassB) -> f64 {
    let total_a = na as f64 * ma;
    match mb {
        MassB::Finite(mb) => total_a * mb / (total_a + mb),
        MassB::Infinite => total_a,
    }
}

#[derive(Debug, Clone)]
pub struct MixedSystem {
    pub na: usize,
    pub ma: f64,
    pub mb: MassB,
    pub g_aa: f64,
    pub g_ab: f64,
    pub well_aa: PotentialWell,
    pub well_ab: PotentialWell,
}

impl MixedSystem {
    pub fn new(
        na: usize,
        ma: f64,
        mb: MassB,
        g_aa: f64,
        g_ab: f64,
        well_aa: PotentialWell,
        well_ab: PotentialWell,
    ) -> Result<Self> {
        if na < 1 {
            return Err(Error::InvalidParameter("need Na >= 1".into()));
        }
        if !(ma > 0.0) || !ma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "m_a must be positive, got {ma}"
            )));
        }
        if let MassB::Finite(mb) = mb {
            if !(mb > 0.0) || !mb.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "m_b must be positive, got {mb}"
                )));
            }
        }
        if !g_aa.is_finite() || !g_ab.is_finite() {
            return Err(Error::InvalidParameter("couplings must be finite".into()));
        }
        Ok(MixedSystem {
            na,
            ma,
            mb,
            g_aa,
            g_ab,
            well_aa,
            well_ab,
        })
    }

    pub fn mu_ab(&self) -> f64 {
        reduced_mass(self.na, self.ma, self.mb)
    }

    pub fn with_couplings(&self, g_aa: f64, g_ab: f64) -> Self {
        MixedSystem {
            g_aa,
            g_ab,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedGeometry {
    pub p_a: f64,
    pub r_aa: f64,
    pub p0: f64,
    pub r0: f64,
    pub p_a_prime: f64,
    pub r0_prime: f64,
    /// Relative residuals of the three governing equations: the energy
    /// equation and both stationarity conditions on the energy path; the two
    /// coupling relations and `E = 0` on the critical path.
    pub residuals: [f64; 3],
    /// Largest relative violation of the definitions of `p_a'` and `r0'`.
    pub identity_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedEnergy {
    pub energy: f64,
    pub geometry: MixedGeometry,
    pub bound: bool,
    /// Energies of every stationary point found, ascending.
    pub stationary_energies: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Held {
    Gaa,
    Gab,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedCritical {
    pub fixed: Held,
    pub fixed_value: f64,
    pub critical_value: f64,
    pub geometry: MixedGeometry,
    pub mu_ab: f64,
    /// Every critical value found, ascending. The smallest is reported:
    /// binding sets in once the free coupling exceeds it.
    pub roots: Vec<f64>,
}

const SCAN_POINTS: usize = 3000;
const SCAN_RANGE: (f64, f64) = (1e-4, 1e4);

fn polish_cfg() -> RootConfig {
    RootConfig {
        rel_tol: 1e-12,
        abs_tol: 1e-13,
        max_iter: 100,
    }
}

/// Quantities shared by all equations of one system and state.
struct Ctx<'a> {
    na: f64,
    ca: f64,
    qa: f64,
    q2: f64,
    ma: f64,
    mb: MassB,
    mu: f64,
    c: f64,
    aa: &'a PotentialWell,
    ab: &'a PotentialWell,
}

impl<'a> Ctx<'a> {
    fn new(sys: &'a MixedSystem, state_a: &StateSpec, state_b: &StateSpec) -> Result<Self> {
        if state_a.particles() != sys.na {
            return Err(Error::InvalidParameter(format!(
                "state_a describes {} particles, Na = {}",
                state_a.particles(),
                sys.na
            )));
        }
        if state_b.particles() != 2 {
            return Err(Error::InvalidParameter(
                "state_b must hold exactly one (n,l) pair".into(),
            ));
        }
        if sys.na >= 2 && state_a.dim() != state_b.dim() {
            return Err(Error::InvalidParameter(
                "state_a and state_b must share D".into(),
            ));
        }
        let na = sys.na as f64;
        Ok(Ctx {
            na,
            ca: pair_count(sys.na),
            qa: state_a.q_global(),
            q2: state_b.q_global(),
            ma: sys.ma,
            mb: sys.mb,
            mu: sys.mu_ab(),
            c: (na - 1.0) / (2.0 * na),
            aa: &sys.well_aa,
            ab: &sys.well_ab,
        })
    }

    fn single(&self) -> bool {
        self.na < 1.5
    }

    fn r0_prime(&self, r: f64, big_r: f64) -> f64 {
        (self.c * r * r + big_r * big_r).sqrt()
    }

    fn p_a(&self, r: f64) -> f64 {
        if self.single() {
            0.0
        } else {
            self.qa / (self.ca.sqrt() * r)
        }
    }

    fn p0(&self, big_r: f64) -> f64 {
        self.q2 / big_r
    }

    fn kinetic(&self, r: f64, big_r: f64) -> f64 {
        let pa = self.p_a(r);
        let p0 = self.p0(big_r);
        self.na * pa * pa / (2.0 * self.ma) + p0 * p0 / (2.0 * self.mu)
    }

    /// `4 Q(Na)^2 / (Na (Na - 1)^2 m_a r^3)`.
    fn a_term(&self, r: f64) -> f64 {
        if self.single() {
            0.0
        } else {
            4.0 * self.qa * self.qa / (self.na * (self.na - 1.0).powi(2) * self.ma * r.powi(3))
        }
    }

    /// `Q(2)^2 / (mu R0^4)`.
    fn b_term(&self, big_r: f64) -> f64 {
        self.q2 * self.q2 / (self.mu * big_r.powi(4))
    }

    fn energy(&self, r: f64, big_r: f64, g_aa: f64, g_ab: f64) -> f64 {
        let s = self.r0_prime(r, big_r);
        let vaa = if self.single() {
            0.0
        } else {
            self.ca * self.aa.potential(g_aa, r)
        };
        self.kinetic(r, big_r) + vaa + self.na * self.ab.potential(g_ab, s)
    }

    /// Coupling `g_ab` fixed by the `b` stationarity condition at `E`-path geometry.
    fn g_ab_from(&self, r: f64, big_r: f64) -> f64 {
        let s = self.r0_prime(r, big_r);
        -s * self.b_term(big_r) / (self.na * self.ab.attractive_profile_d1(s))
    }

    /// Coupling `g_aa` fixed by the `a` stationarity condition.
    fn g_aa_from(&self, r: f64, big_r: f64) -> f64 {
        (r * self.b_term(big_r) / (self.na * self.na) - self.a_term(r))
            / self.aa.attractive_profile_d1(r)
    }

    /// Stationarity residuals, each divided by its kinetic side.
    fn stationarity(&self, r: f64, big_r: f64, g_aa: f64, g_ab: f64) -> (f64, f64) {
        let s = self.r0_prime(r, big_r);
        let vab1 = self.ab.potential_d1(g_ab, s);
        let f1 = if self.single() {
            0.0
        } else {
            let pa = self.p_a(r);
            let lhs = self.na * pa * pa / self.ma;
            let rhs = self.ca * r * self.aa.potential_d1(g_aa, r)
                + 0.5 * (self.na - 1.0) * vab1 * r * r / s;
            (lhs - rhs) / lhs
        };
        let p0 = self.p0(big_r);
        let lhs = p0 * p0 / self.mu;
        let f2 = (lhs - self.na * vab1 * big_r * big_r / s) / lhs;
        (f1, f2)
    }

    fn geometry(&self, r: f64, big_r: f64, residuals: [f64; 3]) -> MixedGeometry {
        let p_a = self.p_a(r);
        let p0 = self.p0(big_r);
        let p_a_prime = (p_a * p_a + p0 * p0 / (self.na * self.na)).sqrt();
        let r0_prime = self.r0_prime(r, big_r);
        let r_aa = if self.single() { 0.0 } else { r };
        let id1 = (p_a_prime * p_a_prime - p_a * p_a - p0 * p0 / (self.na * self.na)).abs()
            / (p_a_prime * p_a_prime);
        let id2 = (r0_prime * r0_prime - self.c * r_aa * r_aa - big_r * big_r).abs()
            / (r0_prime * r0_prime);
        MixedGeometry {
            p_a,
            r_aa,
            p0,
            r0: big_r,
            p_a_prime,
            r0_prime,
            residuals,
            identity_residual: id1.max(id2),
        }
    }

    /// Residuals of the original energy-path equations, written with `p_a'`.
    fn energy_residuals(&self, r: f64, big_r: f64, g_aa: f64, g_ab: f64, energy: f64) -> [f64; 3] {
        let g = self.geometry(r, big_r, [0.0; 3]);
        let ta = |p: f64| p * p / (2.0 * self.ma);
        let ta1 = |p: f64| p / self.ma;
        let (tb, tb1) = match self.mb {
            MassB::Finite(mb) => (g.p0 * g.p0 / (2.0 * mb), g.p0 / mb),
            MassB::Infinite => (0.0, 0.0),
        };
        let vaa = if self.single() {
            0.0
        } else {
            self.aa.potential(g_aa, r)
        };
        let vaa1 = if self.single() {
            0.0
        } else {
            self.aa.potential_d1(g_aa, r)
        };
        let vab = self.ab.potential(g_ab, g.r0_prime);
        let vab1 = self.ab.potential_d1(g_ab, g.r0_prime);
        let e20 = self.na * ta(g.p_a_prime) + tb + self.ca * vaa + self.na * vab;
        let scale = self.kinetic(r, big_r);
        let r20 = (energy - e20).abs() / scale;
        let r21 = if self.single() {
            0.0
        } else {
            let lhs = self.na * ta1(g.p_a_prime) * g.p_a * g.p_a / g.p_a_prime;
            let rhs = self.ca * vaa1 * r + 0.5 * (self.na - 1.0) * vab1 * r * r / g.r0_prime;
            (lhs - rhs).abs() / lhs.abs()
        };
        let lhs = ta1(g.p_a_prime) * g.p0 * g.p0 / (self.na * g.p_a_prime) + tb1 * g.p0;
        let rhs = self.na * vab1 * big_r * big_r / g.r0_prime;
        [r20, r21, (lhs - rhs).abs() / lhs.abs()]
    }

    /// Residuals of the two coupling relations and of `E = 0`.
    fn critical_residuals(&self, r: f64, big_r: f64, g_aa: f64, g_ab: f64) -> [f64; 3] {
        let s = self.r0_prime(r, big_r);
        let b = self.b_term(big_r);
        let rel25 = {
            let rhs = s * b / self.na;
            (g_ab * self.ab.attractive_profile_d1(s) + rhs).abs() / rhs
        };
        let rel26 = if self.single() {
            0.0
        } else {
            let lhs = g_aa * self.aa.attractive_profile_d1(r);
            let rhs = r * b / (self.na * self.na) - self.a_term(r);
            (lhs - rhs).abs() / (r * b / (self.na * self.na) + self.a_term(r))
        };
        let e = self.energy(r, big_r, g_aa, g_ab).abs() / self.kinetic(r, big_r);
        [rel25, rel26, e]
    }
}

fn scan_roots(f: impl Fn(f64) -> f64, scale: f64) -> Result<Vec<f64>> {
    let grid = numerics::log_grid(SCAN_RANGE.0 * scale, SCAN_RANGE.1 * scale, SCAN_POINTS);
    let cfg = RootConfig::default();
    numerics::sign_change_brackets(&f, &grid)
        .into_iter()
        .filter_map(|b| match numerics::find_root(&f, b, &cfg) {
            // a pole (sign flip through a divergence) is not a root
            Ok(x) if f(x).abs() < 1e-6 => Some(Ok(x)),
            Ok(_) => None,
            Err(e) => Some(Err(e)),
        })
        .collect()
}

/// Newton polish in log variables; returns the seed if Newton cannot improve it.
fn polish(func: impl Fn(f64, f64) -> (f64, f64), r: f64, big_r: f64) -> (f64, f64) {
    let f = |x: f64, y: f64| func(x.exp(), y.exp());
    match numerics::solve_2d(f, (r.ln(), big_r.ln()), &polish_cfg()) {
        Ok(s) => (s.x.exp(), s.y.exp()),
        Err(_) => (r, big_r),
    }
}

/// ET energy and geometry for fixed couplings.
pub fn solve_energy_mixed(
    sys: &MixedSystem,
    state_a: &StateSpec,
    state_b: &StateSpec,
) -> Result<MixedEnergy> {
    let ctx = Ctx::new(sys, state_a, state_b)?;
    let (g_aa, g_ab) = (sys.g_aa, sys.g_ab);
    let scale = 1.0 / sys.well_ab.mu();

    let mut points: Vec<(f64, f64)> = Vec::new();
    if ctx.single() {
        // R dE/dR, negative then positive across a minimum
        let slope = |big_r: f64| {
            let p0 = ctx.p0(big_r);
            big_r * sys.well_ab.potential_d1(g_ab, big_r) - p0 * p0 / ctx.mu
        };
        let grid = numerics::log_grid(SCAN_RANGE.0 * scale, SCAN_RANGE.1 * scale, SCAN_POINTS);
        for b in numerics::sign_change_brackets(slope, &grid) {
            if slope(b.lo) < 0.0 {
                let big_r = numerics::find_root(slope, b, &RootConfig::default())?;
                points.push((0.0, big_r));
            }
        }
    } else {
        // parametrise by r0': the b equation gives R0, the definition of r0' gives r_aa
        let from_s = |s: f64| -> Option<(f64, f64)> {
            let vab1 = sys.well_ab.potential_d1(g_ab, s);
            if !(vab1 > 0.0) {
                return None;
            }
            let big_r = (ctx.q2 * ctx.q2 * s / (ctx.mu * ctx.na * vab1)).powf(0.25);
            let r2 = (s * s - big_r * big_r) / ctx.c;
            (r2 > 0.0).then(|| (r2.sqrt(), big_r))
        };
        let f = |s: f64| match from_s(s) {
            Some((r, big_r)) => ctx.stationarity(r, big_r, g_aa, g_ab).0,
            None => f64::NAN,
        };
        for s in scan_roots(f, scale)? {
            let (r, big_r) = from_s(s).expect("root lies in the valid domain");
            points.push(polish(
                |r, big_r| ctx.stationarity(r, big_r, g_aa, g_ab),
                r,
                big_r,
            ));
        }
    }
    if points.is_empty() {
        return Err(Error::Unbound(
            "no stationary point with positive geometry".into(),
        ));
    }
    let mut scored: Vec<(f64, (f64, f64))> = points
        .into_iter()
        .map(|(r, big_r)| (ctx.energy(r, big_r, g_aa, g_ab), (r, big_r)))
        .collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (energy, (r, big_r)) = scored[0];
    let residuals = ctx.energy_residuals(r, big_r, g_aa, g_ab, energy);
    Ok(MixedEnergy {
        energy,
        geometry: ctx.geometry(r, big_r, residuals),
        bound: energy < 0.0,
        stationary_energies: scored.iter().map(|s| s.0).collect(),
    })
}

fn pick(
    ctx: &Ctx<'_>,
    fixed: Held,
    fixed_value: f64,
    candidates: Vec<(f64, f64, f64)>,
    couplings: impl Fn(f64, f64, f64) -> (f64, f64),
) -> Result<MixedCritical> {
    let mut c = candidates;
    if c.is_empty() {
        return Err(Error::Unbound(
            "only solutions with non-positive r_aa or R0 exist".into(),
        ));
    }
    c.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (critical_value, r, big_r) = c[0];
    let (g_aa, g_ab) = couplings(critical_value, r, big_r);
    let residuals = ctx.critical_residuals(r, big_r, g_aa, g_ab);
    Ok(MixedCritical {
        fixed,
        fixed_value,
        critical_value,
        geometry: ctx.geometry(r, big_r, residuals),
        mu_ab: ctx.mu,
        roots: c.iter().map(|x| x.0).collect(),
    })
}

/// Critical `g_ab` with `sys.g_aa` held (`sys.g_ab` is ignored).
pub fn critical_gab(
    sys: &MixedSystem,
    state_a: &StateSpec,
    state_b: &StateSpec,
) -> Result<MixedCritical> {
    let ctx = Ctx::new(sys, state_a, state_b)?;
    let g_aa = sys.g_aa;
    let mut found = Vec::new();
    if ctx.single() {
        // E / T = 1 + 2 w / (R w') once g_ab is eliminated
        let f = |big_r: f64| {
            let w = sys.well_ab.attractive_profile(big_r);
            let w1 = sys.well_ab.attractive_profile_d1(big_r);
            if w1 < 0.0 {
                1.0 + 2.0 * w / (big_r * w1)
            } else {
                f64::NAN
            }
        };
        for big_r in scan_roots(f, 1.0 / sys.well_ab.mu())? {
            found.push((ctx.g_ab_from(0.0, big_r), 0.0, big_r));
        }
    } else {
        let from_r = |r: f64| -> Option<f64> {
            let d = g_aa * sys.well_aa.attractive_profile_d1(r) + ctx.a_term(r);
            (d > 0.0).then(|| (ctx.q2 * ctx.q2 * r / (ctx.na * ctx.na * ctx.mu * d)).powf(0.25))
        };
        let e_over_t = |r: f64, big_r: f64| {
            let g_ab = ctx.g_ab_from(r, big_r);
            if !(g_ab > 0.0) || !g_ab.is_finite() {
                return f64::NAN;
            }
            ctx.energy(r, big_r, g_aa, g_ab) / ctx.kinetic(r, big_r)
        };
        let f = |r: f64| from_r(r).map_or(f64::NAN, |big_r| e_over_t(r, big_r));
        let system = |r: f64, big_r: f64| {
            let b = r * ctx.b_term(big_r) / (ctx.na * ctx.na);
            let a = ctx.a_term(r);
            let g1 = (b - g_aa * sys.well_aa.attractive_profile_d1(r) - a) / (b + a);
            (g1, e_over_t(r, big_r))
        };
        for r in scan_roots(f, 1.0 / sys.well_aa.mu())? {
            let big_r = from_r(r).expect("root lies in the valid domain");
            let (r, big_r) = polish(system, r, big_r);
            let g_ab = ctx.g_ab_from(r, big_r);
            if g_ab > 0.0 {
                found.push((g_ab, r, big_r));
            }
        }
    }
    pick(&ctx, Held::Gaa, g_aa, found, |g_ab, _, _| (g_aa, g_ab))
}

/// Critical `g_aa` with `sys.g_ab` held (`sys.g_aa` is ignored). Needs `Na >= 2`.
pub fn critical_gaa(
    sys: &MixedSystem,
    state_a: &StateSpec,
    state_b: &StateSpec,
) -> Result<MixedCritical> {
    let ctx = Ctx::new(sys, state_a, state_b)?;
    if ctx.single() {
        return Err(Error::InvalidParameter(
            "critical g_aa needs Na >= 2".into(),
        ));
    }
    let h = sys.g_ab;
    if !(h > 0.0) {
        return Err(Error::Unbound(format!(
            "no binding without attraction to b (g_ab = {h})"
        )));
    }
    let from_s = |s: f64| -> Option<(f64, f64)> {
        let w1 = sys.well_ab.attractive_profile_d1(s);
        if !(w1 < 0.0) {
            return None;
        }
        let big_r = (-s * ctx.q2 * ctx.q2 / (ctx.na * ctx.mu * h * w1)).powf(0.25);
        let r2 = (s * s - big_r * big_r) / ctx.c;
        (r2 > 0.0).then(|| (r2.sqrt(), big_r))
    };
    let e_over_t = |r: f64, big_r: f64| {
        let g_aa = ctx.g_aa_from(r, big_r);
        if !g_aa.is_finite() {
            return f64::NAN;
        }
        ctx.energy(r, big_r, g_aa, h) / ctx.kinetic(r, big_r)
    };
    let f = |s: f64| from_s(s).map_or(f64::NAN, |(r, big_r)| e_over_t(r, big_r));
    let system = |r: f64, big_r: f64| {
        let s = ctx.r0_prime(r, big_r);
        let rhs = s * ctx.b_term(big_r) / ctx.na;
        let g1 = (-h * sys.well_ab.attractive_profile_d1(s) - rhs) / rhs;
        (g1, e_over_t(r, big_r))
    };
    let mut found = Vec::new();
    for s in scan_roots(f, 1.0 / sys.well_ab.mu())? {
        let (r, big_r) = from_s(s).expect("root lies in the valid domain");
        let (r, big_r) = polish(system, r, big_r);
        found.push((ctx.g_aa_from(r, big_r), r, big_r));
    }
    pick(&ctx, Held::Gab, h, found, |g_aa, _, _| (g_aa, h))
}

/// Outcome of [`exponential_specialization_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecializationCheck {
    pub generic: MixedCritical,
    pub explicit_value: f64,
    pub explicit_r_aa: f64,
    pub explicit_r0: f64,
    pub relative_difference: f64,
}

pub const SPECIALIZATION_TOLERANCE: f64 = 1e-8;

/// Explicit bosonic-ground-state relations for unit exponential wells,
/// `m_a = mu = 1`, `D = 3`; `m` is the mass of `b`.
struct ExplicitExponential {
    na: f64,
    /// `(Na + m) / m`.
    k: f64,
}

impl ExplicitExponential {
    fn r0_prime(&self, r: f64, big_r: f64) -> f64 {
        ((self.na - 1.0) / (2.0 * self.na) * r * r + big_r * big_r).sqrt()
    }

    /// `g` such that `g e^{-r} = 9/(Na r^3) - 9/4 k/Na^3 r/R^4`.
    fn g(&self, r: f64, big_r: f64) -> f64 {
        let n = self.na;
        (9.0 / (n * r.powi(3)) - 2.25 * self.k / n.powi(3) * r / big_r.powi(4)) * r.exp()
    }

    /// `h` such that `h e^{-r0'} = 9/4 k/Na^2 r0'/R^4`.
    fn h(&self, r: f64, big_r: f64) -> f64 {
        let s = self.r0_prime(r, big_r);
        2.25 * self.k / (self.na * self.na) * s / big_r.powi(4) * s.exp()
    }

    /// Zero-energy relation, divided by the sum of magnitudes of its terms.
    fn zero_energy(&self, r: f64, big_r: f64) -> f64 {
        let n = self.na;
        let k = self.k;
        let s = self.r0_prime(r, big_r);
        let terms = [
            -(n - 1.0) * k / (n * n) * r / big_r.powi(4),
            4.0 * (n - 1.0) / r.powi(3),
            2.0 * k / n * s / big_r.powi(4),
            -2.0 * (n - 1.0) / (r * r),
            -k / n / (big_r * big_r),
        ];
        terms.iter().sum::<f64>() / terms.iter().map(|t| t.abs()).sum::<f64>()
    }
}

/// Cross-checks the generic critical solve against the explicit exponential
/// relations. `held` names the coupling held at `value`.
pub fn exponential_specialization_check(
    na: usize,
    mb: MassB,
    held: Held,
    value: f64,
) -> Result<SpecializationCheck> {
    let well = crate::potentials::make_builtin(crate::potentials::WellKind::Exponential, 1.0)?;
    let (g_aa, g_ab) = match held {
        Held::Gaa => (value, 0.0),
        Held::Gab => (0.0, value),
    };
    let sys = MixedSystem::new(na, 1.0, mb, g_aa, g_ab, well.clone(), well)?;
    let state_a = if na >= 2 {
        StateSpec::bosonic_ground(na, 3)?
    } else {
        StateSpec::new(vec![], 3)?
    };
    let state_b = StateSpec::bosonic_ground(2, 3)?;
    let generic = match held {
        Held::Gaa => critical_gab(&sys, &state_a, &state_b)?,
        Held::Gab => critical_gaa(&sys, &state_a, &state_b)?,
    };
    let k = match mb {
        MassB::Finite(m) => (na as f64 + m) / m,
        MassB::Infinite => 1.0,
    };
    let ex = ExplicitExponential { na: na as f64, k };

    let (explicit_value, r, big_r) = if na == 1 {
        if held == Held::Gab {
            return Err(Error::InvalidParameter(
                "Na = 1 has no g_aa to solve for".into(),
            ));
        }
        // the zero-energy relation collapses to 2k R / R^4 = k / R^2
        (ex.h(0.0, 2.0), 0.0, 2.0)
    } else {
        let seed = (generic.geometry.r_aa * 1.01, generic.geometry.r0 * 0.99);
        let func = |x: f64, y: f64| {
            let (r, big_r) = (x.exp(), y.exp());
            let first = match held {
                Held::Gaa => {
                    let n = ex.na;
                    let a = 9.0 / (n * r.powi(3));
                    let b = 2.25 * ex.k / n.powi(3) * r / big_r.powi(4);
                    (value * (-r).exp() - (a - b)) / (a + b)
                }
                Held::Gab => {
                    let s = ex.r0_prime(r, big_r);
                    let rhs = 2.25 * ex.k / (ex.na * ex.na) * s / big_r.powi(4);
                    (value * (-s).exp() - rhs) / rhs
                }
            };
            (first, ex.zero_energy(r, big_r))
        };
        let sol = numerics::solve_2d(func, (seed.0.ln(), seed.1.ln()), &polish_cfg())?;
        let (r, big_r) = (sol.x.exp(), sol.y.exp());
        let v = match held {
            Held::Gaa => ex.h(r, big_r),
            Held::Gab => ex.g(r, big_r),
        };
        (v, r, big_r)
    };
    let scale = generic.critical_value.abs().max(value.abs()).max(1e-300);
    let relative_difference = (explicit_value - generic.critical_value).abs() / scale;
    if relative_difference > SPECIALIZATION_TOLERANCE {
        return Err(Error::Inconsistent(format!(
            "explicit exponential relations give {explicit_value}, generic solve gives {}",
            generic.critical_value
        )));
    }
    Ok(SpecializationCheck {
        generic,
        explicit_value,
        explicit_r_aa: r,
        explicit_r0: big_r,
        relative_difference,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{make_builtin, WellKind};

    fn exp1() -> PotentialWell {
        make_builtin(WellKind::Exponential, 1.0).unwrap()
    }

    fn sys(na: usize, mb: MassB, g_aa: f64, g_ab: f64) -> MixedSystem {
        MixedSystem::new(na, 1.0, mb, g_aa, g_ab, exp1(), exp1()).unwrap()
    }

    fn ground(na: usize) -> StateSpec {
        if na == 1 {
            StateSpec::new(vec![], 3).unwrap()
        } else {
            StateSpec::bosonic_ground(na, 3).unwrap()
        }
    }

    fn q2() -> StateSpec {
        StateSpec::bosonic_ground(2, 3).unwrap()
    }

    #[test]
    fn reduced_masses() {
        assert_eq!(reduced_mass(1, 1.0, MassB::Finite(1.0)), 0.5);
        assert!((reduced_mass(10, 1.0, MassB::Finite(2.0)) - 5.0 / 3.0).abs() < 1e-15);
        assert_eq!(reduced_mass(2, 1.0, MassB::Infinite), 2.0);
    }

    #[test]
    fn single_a_matches_two_body_energy() {
        let e =
            solve_energy_mixed(&sys(1, MassB::Finite(1.0), 0.0, 40.0), &ground(1), &q2()).unwrap();
        assert!((e.energy - (-15.7)).abs() < 0.05);
        assert!(e.geometry.residuals.iter().all(|r| *r < 1e-9));
    }

    #[test]
    fn static_source_pair_binds_above_threshold() {
        let e = solve_energy_mixed(&sys(2, MassB::Infinite, 0.0, 3.0), &ground(2), &q2()).unwrap();
        assert!(e.bound && e.energy < 0.0);
        assert!(
            e.geometry.residuals.iter().all(|r| *r < 1e-9),
            "{:?}",
            e.geometry.residuals
        );
        assert!(e.geometry.identity_residual < 1e-12);
    }

    #[test]
    fn harmonic_three_body_is_exact() {
        // a-a spring k_aa, a-b spring k_ab; Jacobi coordinates decouple
        let harm = make_builtin(WellKind::PowerLaw(2.0), 1.0).unwrap();
        let (ma, mb, kaa, kab) = (1.0, 2.5, 0.3, 0.8);
        let s = MixedSystem::new(2, ma, MassB::Finite(mb), kaa, kab, harm.clone(), harm).unwrap();
        let sa = StateSpec::new(vec![(1, 0)], 3).unwrap();
        let sb = StateSpec::new(vec![(0, 1)], 3).unwrap();
        let e = solve_energy_mixed(&s, &sa, &sb).unwrap();
        let mu = 2.0 * ma * mb / (2.0 * ma + mb);
        let omega_x = ((4.0 * kaa + 2.0 * kab) / ma).sqrt();
        let omega_y = (4.0 * kab / mu).sqrt();
        let exact = omega_x * sa.q_global() + omega_y * sb.q_global();
        assert!(
            (e.energy - exact).abs() < 1e-9 * exact,
            "{} vs {exact}",
            e.energy
        );
    }

    #[test]
    fn single_a_critical_closed_form() {
        let c = critical_gab(&sys(1, MassB::Finite(2.0), 0.0, 0.0), &ground(1), &q2()).unwrap();
        let closed = 27.0 * std::f64::consts::E.powi(2) / 64.0;
        assert!((c.critical_value - closed).abs() < 1e-10 * closed);
        let c = critical_gab(&sys(1, MassB::Infinite, 0.0, 0.0), &ground(1), &q2()).unwrap();
        assert!((c.critical_value - 2.078).abs() < 0.001);
    }

    #[test]
    fn equal_masses_and_couplings_reproduce_identical_threshold() {
        let g11 = crate::critical::critical_g(&exp1(), 11, 1.0, &ground(11))
            .unwrap()
            .g();
        let c = critical_gab(&sys(10, MassB::Finite(1.0), g11, 0.0), &ground(10), &q2()).unwrap();
        assert!(
            (c.critical_value - g11).abs() < 1e-10,
            "{} vs {g11}",
            c.critical_value
        );
        assert!((c.critical_value - 0.756).abs() < 0.001);
        assert!(
            c.geometry.residuals.iter().all(|r| *r < 1e-9),
            "{:?}",
            c.geometry.residuals
        );
    }

    #[test]
    fn self_bound_cluster_has_no_positive_geometry() {
        // g = 1 exceeds the 9-body identical threshold
        let e = critical_gab(&sys(9, MassB::Finite(2.0), 1.0, 0.0), &ground(9), &q2()).unwrap_err();
        assert!(matches!(e, Error::Unbound(_)));
    }

    #[test]
    fn strong_source_tolerates_repulsion() {
        let c = critical_gaa(&sys(2, MassB::Infinite, 0.0, 3.0), &ground(2), &q2()).unwrap();
        assert!(c.critical_value < 0.0, "{}", c.critical_value);
        assert!(c.roots.len() == 2 && c.roots[1] > 0.0);
    }

    #[test]
    fn static_source_anchors() {
        let c = critical_gaa(&sys(2, MassB::Infinite, 0.0, 2.078), &ground(2), &q2()).unwrap();
        assert!(c.critical_value.abs() < 0.005, "{}", c.critical_value);
        let e = critical_gaa(&sys(2, MassB::Infinite, 0.0, 0.2), &ground(2), &q2()).unwrap_err();
        assert!(matches!(e, Error::Unbound(_)));
    }

    #[test]
    fn critical_gaa_needs_two_a_particles() {
        assert!(critical_gaa(&sys(1, MassB::Infinite, 0.0, 2.0), &ground(1), &q2()).is_err());
    }

    #[test]
    fn round_trip_between_holds() {
        let s = sys(3, MassB::Finite(1.5), 0.8, 0.0);
        let gab = critical_gab(&s, &ground(3), &q2()).unwrap().critical_value;
        let back = critical_gaa(&s.with_couplings(0.0, gab), &ground(3), &q2())
            .unwrap()
            .critical_value;
        assert!((back - 0.8).abs() < 1e-6 * 0.8, "{back}");
    }

    #[test]
    fn explicit_relations_agree() {
        let c = exponential_specialization_check(5, MassB::Finite(2.0), Held::Gaa, 1.0).unwrap();
        assert!(c.relative_difference <= 1e-8);
        let c = exponential_specialization_check(2, MassB::Infinite, Held::Gab, 2.078).unwrap();
        assert!(c.explicit_value.abs() < 0.005);
        let c = exponential_specialization_check(1, MassB::Finite(2.0), Held::Gaa, 0.0).unwrap();
        assert!((c.explicit_value - 27.0 * std::f64::consts::E.powi(2) / 64.0).abs() < 1e-12);
    }
}
