//! Acceptance criteria, runnable from tests and from the command line.
//!
//! Each criterion compares computed values against reference constants. A
//! [`Perturbation`] scales the reference constants of one criterion so that
//! a harness can check that the criterion notices.

use std::f64::consts::E;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::critical::{critical_g, critical_g_improved, well_factor};
use crate::error::{Error, Result};
use crate::identical::{self, IdenticalSystem};
use crate::mixed::{self, Held, MassB, MixedSystem};
use crate::numerics::{self, LAMBERT_BRANCH_POINT};
use crate::oracle::{self, GridSpec, RadialProblem};
use crate::potentials::{make_builtin, PotentialWell, WellKind};
use crate::quantum::StateSpec;

pub const CRITERIA: [(u8, &str); 10] = [
    (1, "well factors"),
    (2, "two-body critical couplings, ET"),
    (3, "two-body critical couplings, oracle"),
    (4, "two-body energies at g = 40"),
    (5, "upper bounds"),
    (6, "ratio and scaling laws"),
    (7, "eleven-boson anchor"),
    (8, "static-source anchors"),
    (9, "h_N decreasing with Na"),
    (10, "internal consistency"),
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Perturbation {
    pub criterion: u8,
    /// Reference constants are multiplied by `1 + relative`.
    pub relative: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidateOptions {
    pub perturbation: Option<Perturbation>,
    pub seed: u64,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions {
            perturbation: None,
            seed: 0x5eed_e7c0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {:>2} {}: {}", self.id, self.name, self.detail)
    }
}

/// Reference scaling for one criterion.
#[derive(Clone, Copy)]
struct Ref(f64);

impl Ref {
    fn v(self, x: f64) -> f64 {
        x * self.0
    }
}

/// Runs every criterion; the report is in criterion order.
pub fn validate(opts: &ValidateOptions) -> Vec<CriterionReport> {
    CRITERIA
        .par_iter()
        .map(|&(id, _)| run_criterion(id, opts))
        .collect()
}

pub fn run_criterion(id: u8, opts: &ValidateOptions) -> CriterionReport {
    let name = CRITERIA
        .iter()
        .find(|c| c.0 == id)
        .map_or("unknown criterion", |c| c.1);
    let scale = match opts.perturbation {
        Some(p) if p.criterion == id => 1.0 + p.relative,
        _ => 1.0,
    };
    let r = Ref(scale);
    let outcome = match id {
        1 => well_factors(r),
        2 => table3_et(r),
        3 => table3_oracle(r),
        4 => table2(r),
        5 => upper_bounds(r),
        6 => ratio_and_scaling(r),
        7 => eleven_bosons(r),
        8 => static_source(r),
        9 => decreasing_with_na(r),
        10 => consistency(r, opts.seed),
        _ => Err(Error::InvalidParameter(format!("no criterion {id}"))),
    };
    let (pass, detail) = match outcome {
        Ok(x) => x,
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionReport {
        id,
        name,
        pass,
        detail,
    }
}

type Outcome = Result<(bool, String)>;

fn exp_well() -> PotentialWell {
    make_builtin(WellKind::Exponential, 1.0).expect("valid well")
}

fn pair_state(n: u32, l: u32) -> StateSpec {
    StateSpec::new(vec![(n, l)], 3).expect("valid state")
}

fn ground(particles: usize) -> StateSpec {
    if particles == 1 {
        StateSpec::new(vec![], 3).expect("valid state")
    } else {
        StateSpec::bosonic_ground(particles, 3).expect("valid state")
    }
}

/// True when `value` rounds to `reference`, which is printed with `decimals` decimals.
fn printed_match(value: f64, reference: f64, decimals: i32) -> bool {
    (value - reference).abs() <= 0.5 * 10f64.powi(-decimals) * (1.0 + 1e-9)
}

/// Parses a table entry into its value and number of printed decimals.
fn printed(s: &str) -> (f64, i32) {
    let decimals = s.split('.').nth(1).map_or(0, |d| d.len() as i32);
    (s.parse().expect("table literal"), decimals)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn well_factors(r: Ref) -> Outcome {
    let mut worst = 0.0f64;
    for mu in [0.5, 1.0, 3.0] {
        for (kind, expected) in [
            (WellKind::Yukawa, E * mu * mu),
            (WellKind::Exponential, E * E * mu * mu / 4.0),
            (WellKind::Gaussian, E * mu * mu),
        ] {
            let f = well_factor(&make_builtin(kind, mu)?)?;
            worst = worst.max(rel(f, r.v(expected)));
        }
    }
    Ok((
        worst <= 1e-10,
        format!("max relative deviation {worst:.2e}"),
    ))
}

const TABLE3_PLAIN: [[&str; 3]; 3] = [
    ["4.16", "11.5", "22.6"],
    ["22.6", "37.4", "55.9"],
    ["55.9", "78.0", "104"],
];
const TABLE3_IMPROVED: [[&str; 3]; 3] = [
    ["2.92", "8.71", "18.1"],
    ["16.0", "26.3", "40.2"],
    ["39.8", "54.7", "73.1"],
];
const TABLE3_EXACT: [[&str; 3]; 3] = [
    ["1.45", "7.05", "16.3"],
    ["7.62", "16.9", "29.9"],
    ["18.7", "31.5", "48.1"],
];

fn table3_et(r: Ref) -> Outcome {
    let well = exp_well();
    let mut misses = Vec::new();
    for n in 0..3u32 {
        for l in 0..3u32 {
            let state = pair_state(n, l);
            let plain = critical_g(&well, 2, 1.0, &state)?.g();
            let improved = critical_g_improved(&well, 2, 1.0, &state)?.g();
            for (label, value, table) in [
                ("plain", plain, &TABLE3_PLAIN),
                ("improved", improved, &TABLE3_IMPROVED),
            ] {
                let (reference, decimals) = printed(table[n as usize][l as usize]);
                if !printed_match(value, r.v(reference), decimals) {
                    misses.push(format!("{label} (n,l)=({n},{l}) gives {value:.4}"));
                }
            }
        }
    }
    Ok(summary(misses, "18 cells match to printed precision"))
}

fn summary(misses: Vec<String>, ok: &str) -> (bool, String) {
    if misses.is_empty() {
        (true, ok.to_string())
    } else {
        (false, misses.join("; "))
    }
}

fn oracle_critical(well: &PotentialWell, n: u32, l: u32) -> Result<f64> {
    oracle::numeric_critical_g2(l, n, well, 1.0, GridSpec::for_well(well))
}

fn table3_oracle(r: Ref) -> Outcome {
    let well = exp_well();
    let mut misses = Vec::new();
    let mut worst = 0.0f64;
    let mut worst_bessel = 0.0f64;
    for n in 0..3u32 {
        for l in 0..3u32 {
            let g = oracle_critical(&well, n, l)?;
            let (reference, _) = printed(TABLE3_EXACT[n as usize][l as usize]);
            let d = rel(g, r.v(reference));
            worst = worst.max(d);
            if d > 0.01 {
                misses.push(format!("(n,l)=({n},{l}) gives {g:.4}"));
            }
            if l == 0 {
                let exact = oracle::exact_critical_g2_swave(n)?;
                let d = rel(g, exact);
                worst_bessel = worst_bessel.max(d);
                if d > 1e-3 {
                    misses.push(format!("s-wave n={n}: {g:.6} vs Bessel {exact:.6}"));
                }
            }
        }
    }
    let ok = format!(
        "9 cells within 1 % (worst {worst:.2e}), s-wave vs Bessel zeros worst {worst_bessel:.2e}"
    );
    Ok(summary(misses, &ok))
}

/// Reference g = 40 energies as (l, n, exact, plain, improved); `None` marks no ET bound state.
type Table2Row = (
    u32,
    u32,
    &'static str,
    Option<&'static str>,
    Option<&'static str>,
);

const TABLE2: [Table2Row; 10] = [
    (0, 0, "-17.5", Some("-15.7"), Some("-17.3")),
    (0, 1, "-6.88", Some("-3.65"), Some("-5.94")),
    (0, 2, "-1.87", None, Some("-0.02")),
    (0, 3, "-0.08", None, None),
    (1, 0, "-10.14", Some("-8.56"), Some("-9.92")),
    (1, 1, "-3.35", Some("-0.37"), Some("-2.41")),
    (1, 2, "-0.42", None, None),
    (2, 0, "-5.03", Some("-3.65"), Some("-4.84")),
    (2, 1, "-0.93", None, None),
    (3, 0, "-1.55", Some("-0.37"), Some("-1.36")),
];

const TABLE2_G: f64 = 40.0;

struct Table2Values {
    plain: Option<f64>,
    improved: Option<f64>,
    exact: f64,
}

fn table2_values(l: u32, n: u32) -> Result<Table2Values> {
    let well = exp_well();
    let sys = IdenticalSystem::new(2, 1.0, TABLE2_G, well.clone())?;
    let state = pair_state(n, l);
    let bound = |s: identical::EtSolution| s.is_bound().then_some(s.energy);
    let plain = bound(identical::solve_energy(&sys, &state)?);
    let improved = bound(identical::solve_energy_improved(&sys, &state)?);
    let prob = RadialProblem {
        kinetic_coefficient: 1.0,
        l,
        well: well.clone(),
        g: TABLE2_G,
    };
    let exact = oracle::radial_eigenvalue(&prob, n, GridSpec::for_well(&well))?.energy;
    Ok(Table2Values {
        plain,
        improved,
        exact,
    })
}

fn table2(r: Ref) -> Outcome {
    let mut misses = Vec::new();
    for &(l, n, exact_s, plain_s, improved_s) in &TABLE2 {
        let v = table2_values(l, n)?;
        for (label, got, want) in [
            ("plain", v.plain, plain_s),
            ("improved", v.improved, improved_s),
        ] {
            match (got, want) {
                (Some(e), Some(w)) => {
                    let (reference, decimals) = printed(w);
                    if !printed_match(e, r.v(reference), decimals) {
                        misses.push(format!("{label} (l,n)=({l},{n}) gives {e:.4}"));
                    }
                }
                (None, None) => {}
                (Some(e), None) => misses.push(format!(
                    "{label} (l,n)=({l},{n}) bound at {e:.4}, expected unbound"
                )),
                (None, Some(_)) => misses.push(format!("{label} (l,n)=({l},{n}) unbound")),
            }
        }
        // one significant figure cannot carry a 1 % tolerance: the rounding half-unit bounds it
        let (reference, decimals) = printed(exact_s);
        if rel(v.exact, r.v(reference)) > 0.01 && !printed_match(v.exact, r.v(reference), decimals)
        {
            misses.push(format!("oracle (l,n)=({l},{n}) gives {:.4}", v.exact));
        }
    }
    Ok(summary(
        misses,
        "ET, improved ET and oracle match all 10 cells",
    ))
}

fn upper_bounds(r: Ref) -> Outcome {
    let mut misses = Vec::new();
    let mut checked = 0;
    for &(l, n, ..) in &TABLE2 {
        let v = table2_values(l, n)?;
        if let Some(e) = v.plain {
            checked += 1;
            if e < r.v(v.exact) {
                misses.push(format!(
                    "E(l={l},n={n}) = {e:.4} below oracle {:.4}",
                    v.exact
                ));
            }
        }
    }
    let well = exp_well();
    for n in 0..3u32 {
        for l in 0..3u32 {
            let et = critical_g(&well, 2, 1.0, &pair_state(n, l))?.g();
            let exact = oracle_critical(&well, n, l)?;
            checked += 1;
            if et < r.v(exact) {
                misses.push(format!("g(n={n},l={l}) = {et:.4} below oracle {exact:.4}"));
            }
        }
    }
    Ok(summary(
        misses,
        &format!("{checked} ET values lie above the oracle"),
    ))
}

fn ratio_and_scaling(r: Ref) -> Outcome {
    let well = exp_well();
    let g_at = |w: &PotentialWell, n: usize, m: f64| critical_g(w, n, m, &ground(n)).map(|c| c.g());
    let mut worst_ratio = 0.0f64;
    for n in 3..=12usize {
        let ratio = g_at(&well, n, 1.0)? / g_at(&well, n - 1, 1.0)?;
        worst_ratio = worst_ratio.max(rel(ratio, r.v((n as f64 - 1.0) / n as f64)));
    }
    let base = g_at(&well, 3, 1.0)?;
    let mut worst_scale = 0.0f64;
    for mu in [0.5, 1.0, 3.0] {
        for m in [0.5, 1.0, 2.0] {
            let g = g_at(&make_builtin(WellKind::Exponential, mu)?, 3, m)?;
            worst_scale = worst_scale.max(rel(g, r.v(mu * mu / m * base)));
        }
    }
    Ok((
        worst_ratio <= 1e-12 && worst_scale <= 1e-12,
        format!("ratio deviation {worst_ratio:.2e}, scaling deviation {worst_scale:.2e}"),
    ))
}

fn mixed_exp(na: usize, mb: MassB, g_aa: f64, g_ab: f64) -> Result<MixedSystem> {
    MixedSystem::new(na, 1.0, mb, g_aa, g_ab, exp_well(), exp_well())
}

fn eleven_bosons(r: Ref) -> Outcome {
    let g11 = critical_g(&exp_well(), 11, 1.0, &ground(11))?.g();
    // the held coupling is the computed threshold, of which 0.756 is the rounding
    let h = mixed::critical_gab(
        &mixed_exp(10, MassB::Finite(1.0), g11, 0.0)?,
        &ground(10),
        &ground(2),
    )?
    .critical_value;
    let literal = mixed::critical_gab(
        &mixed_exp(10, MassB::Finite(1.0), 0.756, 0.0)?,
        &ground(10),
        &ground(2),
    )?
    .critical_value;
    let target = r.v(0.756);
    let pass = (g11 - target).abs() <= 0.001 && (h - target).abs() <= 0.001;
    Ok((
        pass,
        format!(
            "g_11 = {g11:.6}; h_11(g = g_11) = {h:.6}; h_11(g = 0.756 literally) = {literal:.6}"
        ),
    ))
}

fn gaa_static(h: f64) -> Result<mixed::MixedCritical> {
    mixed::critical_gaa(
        &mixed_exp(2, MassB::Infinite, 0.0, h)?,
        &ground(2),
        &ground(2),
    )
}

/// Smallest `h` at which a positive-geometry solution exists, to `tol`.
pub fn static_source_unbinding_threshold(tol: f64) -> Result<f64> {
    let binds = |h: f64| match gaa_static(h) {
        Ok(_) => Ok(true),
        Err(Error::Unbound(_)) => Ok(false),
        Err(e) => Err(e),
    };
    let (mut lo, mut hi) = (0.05, 2.078);
    if binds(lo)? || !binds(hi)? {
        return Err(Error::Inconsistent(
            "unbinding threshold is not bracketed by [0.05, 2.078]".into(),
        ));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if binds(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn static_source(r: Ref) -> Outcome {
    let one = mixed::critical_gab(
        &mixed_exp(1, MassB::Infinite, 0.0, 0.0)?,
        &ground(1),
        &ground(2),
    )?
    .critical_value;
    let g3 = gaa_static(2.078)?.critical_value;
    let weak = matches!(gaa_static(0.2), Err(Error::Unbound(_)));
    let threshold = static_source_unbinding_threshold(1e-4)?;
    let checks = [
        (one - r.v(2.078)).abs() <= 0.001,
        (g3 - r.v(0.0)).abs() <= 0.005,
        weak,
        (r.v(0.2)..=r.v(0.3)).contains(&threshold),
    ];
    Ok((
        checks.iter().all(|c| *c),
        format!(
            "h_2 = {one:.6}; g_3(2.078) = {g3:.6}; unbound at h = 0.2: {weak}; threshold h = {threshold:.4} (expected in [0.2, 0.3])"
        ),
    ))
}

fn decreasing_with_na(r: Ref) -> Outcome {
    let values: Vec<(usize, Result<f64>)> = (1..=20usize)
        .map(|na| {
            let v = mixed_exp(na, MassB::Finite(2.0), 1.0, 0.0)
                .and_then(|s| mixed::critical_gab(&s, &ground(na), &ground(2)))
                .map(|c| c.critical_value);
            (na, v)
        })
        .collect();
    let mut misses = Vec::new();
    let closed = 27.0 * E * E / 64.0;
    match &values[0].1 {
        Ok(v) if rel(*v, r.v(closed)) <= 1e-6 => {}
        Ok(v) => misses.push(format!("Na = 1 gives {v}, closed form {closed}")),
        Err(e) => misses.push(format!("Na = 1: {e}")),
    }
    let mut last = f64::INFINITY;
    let mut listing = Vec::new();
    for (na, v) in &values {
        match v {
            Ok(h) => {
                listing.push(format!("{na}:{h:.4}"));
                if *h >= last {
                    misses.push(format!("not decreasing at Na = {na}"));
                }
                last = *h;
            }
            Err(Error::Unbound(_)) => {
                listing.push(format!("{na}:unbound"));
                misses.push(format!("no solution at Na = {na}"));
            }
            Err(e) => return Err(e.clone()),
        }
    }
    let pass = misses.is_empty();
    let mut detail = format!("h_N = [{}]", listing.join(", "));
    if !pass {
        // the first missing Na is enough to explain the rest
        detail.push_str(&format!("; {}", misses[0]));
    }
    Ok((pass, detail))
}

fn consistency(r: Ref, seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut parts = Vec::new();
    let mut pass = true;
    let mut record = |name: &str, worst: f64, tol: f64| {
        pass &= worst <= tol;
        parts.push(format!("{name} {worst:.1e} (tol {tol:.0e})"));
    };

    // Lambert W0: w e^w = x
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let t = i as f64 / 999.0;
        let x = if i < 500 {
            LAMBERT_BRANCH_POINT * (1.0 - 2.0 * t)
        } else {
            10f64.powf(-3.0 + 9.0 * (t - 0.5) / 0.5)
        };
        let w = numerics::lambert_w0(x)?;
        worst = worst.max((w * w.exp() - r.v(x)).abs() / x.abs().max(1.0));
    }
    record("Lambert identity", worst, 1e-12);

    // closed-form exponential energies against the generic solver
    let mut worst = 0.0f64;
    let mut cases = 0;
    while cases < 50 {
        let n = rng.random_range(2..=12usize);
        let mass = rng.random_range(0.5..3.0);
        let mu = rng.random_range(0.3..3.0);
        let q = 0.5 * rng.random_range(1..=40u32) as f64;
        let well = make_builtin(WellKind::Exponential, mu)?;
        let gc = E * E * mu * mu / 4.0 * 2.0 / (n as f64 * (n as f64 - 1.0).powi(2)) * q * q / mass;
        let sys = IdenticalSystem::new(n, mass, gc * rng.random_range(1.5..30.0), well)?;
        let closed = identical::energy_exponential_closed(&sys, q)?;
        let generic = identical::solve_energy_q(&sys, q)?;
        if closed.is_bound() && generic.is_bound() {
            worst = worst.max(rel(generic.energy, r.v(closed.energy)));
            cases += 1;
        } else if closed.is_bound() != generic.is_bound() {
            worst = f64::INFINITY;
            cases += 1;
        }
    }
    record("exponential closed form", worst, 1e-9);

    // harmonic wells are exact: E = Q sqrt(2 N k / m)
    let mut worst = 0.0f64;
    for n in 2..=10usize {
        let (g, mu, mass) = (1.3, 1.1, 0.7);
        let sys = IdenticalSystem::new(n, mass, g, make_builtin(WellKind::PowerLaw(2.0), mu)?)?;
        let state = ground(n);
        let e = identical::solve_energy(&sys, &state)?.energy;
        let exact = state.q_global() * (2.0 * n as f64 * g * mu * mu / mass).sqrt();
        worst = worst.max(rel(e, r.v(exact)));
    }
    record("harmonic exactness", worst, 1e-10);

    // one particle a: generic mixed path against the two-body closed form
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let ma = rng.random_range(0.3..5.0);
        let mb = rng.random_range(0.3..5.0);
        let mu = rng.random_range(0.3..3.0);
        let state_b = pair_state(rng.random_range(0..3), rng.random_range(0..3));
        let well = make_builtin(WellKind::Exponential, mu)?;
        let sys = MixedSystem::new(1, ma, MassB::Finite(mb), 0.0, 0.0, well.clone(), well)?;
        let h = mixed::critical_gab(&sys, &ground(1), &state_b)?.critical_value;
        let mu_ab = ma * mb / (ma + mb);
        let closed = E * E * mu * mu / 4.0 * state_b.q_global().powi(2) / (2.0 * mu_ab);
        worst = worst.max(rel(h, r.v(closed)));
    }
    record("Na = 1 reduction", worst, 1e-9);

    // explicit exponential relations against the generic mixed path
    let g11 = critical_g(&exp_well(), 11, 1.0, &ground(11))?.g();
    let mut worst = 0.0f64;
    for (na, mb, held, value) in [
        (1, MassB::Finite(2.0), Held::Gaa, 0.0),
        (3, MassB::Finite(2.0), Held::Gaa, 1.0),
        (5, MassB::Finite(2.0), Held::Gaa, 1.0),
        (8, MassB::Finite(2.0), Held::Gaa, 1.0),
        (10, MassB::Finite(1.0), Held::Gaa, g11),
        (10, MassB::Finite(5.0), Held::Gaa, g11),
        (2, MassB::Infinite, Held::Gab, 1.0),
        (2, MassB::Infinite, Held::Gab, 3.0),
        (4, MassB::Finite(1.5), Held::Gab, 2.0),
    ] {
        let c = mixed::exponential_specialization_check(na, mb, held, value)?;
        let scale = c.generic.critical_value.abs().max(value.abs());
        worst = worst.max((r.v(c.explicit_value) - c.generic.critical_value).abs() / scale);
    }
    record("explicit exponential relations", worst, 1e-8);

    // static source as the heavy limit
    let mut worst = 0.0f64;
    for (na, g_aa) in [(1usize, 0.0), (2, 0.5), (4, 1.0)] {
        let heavy = mixed::critical_gab(
            &mixed_exp(na, MassB::Finite(1e6), g_aa, 0.0)?,
            &ground(na),
            &ground(2),
        )?;
        let fixed = mixed::critical_gab(
            &mixed_exp(na, MassB::Infinite, g_aa, 0.0)?,
            &ground(na),
            &ground(2),
        )?;
        worst = worst.max(rel(heavy.critical_value, r.v(fixed.critical_value)));
    }
    record("static-source limit", worst, 1e-4);

    Ok((pass, parts.join("; ")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printed_precision() {
        assert!(printed_match(-15.74, -15.7, 1));
        assert!(!printed_match(-15.76, -15.7, 1));
        assert!(printed_match(104.4, 104.0, 0));
        assert_eq!(printed("-0.02"), (-0.02, 2));
        assert_eq!(printed("104"), (104.0, 0));
    }

    #[test]
    fn perturbing_a_reference_fails_its_criterion() {
        let opts = ValidateOptions {
            perturbation: Some(Perturbation {
                criterion: 1,
                relative: 1e-6,
            }),
            ..Default::default()
        };
        assert!(!run_criterion(1, &opts).pass);
        assert!(run_criterion(1, &ValidateOptions::default()).pass);
    }
}
