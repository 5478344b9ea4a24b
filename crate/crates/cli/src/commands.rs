//! One computation per command, returned as a row with a fixed set of columns.

use etcrit_core::critical::{self, BoundCharacter, Coupling as CoreCoupling};
use etcrit_core::identical::{self, IdenticalSystem};
use etcrit_core::mixed::{self, MassB, MixedSystem};
use etcrit_core::oracle::{self, GridSpec, RadialProblem};
use etcrit_core::potentials::{self, PotentialWell, WellKind, WellWarning};
use etcrit_core::quantum::StateSpec;
use etcrit_core::Error;

use crate::args::*;
use crate::output::{Cell, Row};

#[derive(Debug)]
pub enum Status {
    Ok,
    Unbound(String),
    Usage(String),
    Failed(Error),
}

impl Status {
    pub fn label(&self) -> String {
        match self {
            Status::Ok => "ok".into(),
            Status::Unbound(_) => "unbound".into(),
            Status::Usage(m) => format!("error: {m}"),
            Status::Failed(e) => format!("error: {e}"),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Unbound(_) => 2,
            Status::Usage(_) | Status::Failed(_) => 1,
        }
    }
}

impl From<Error> for Status {
    fn from(e: Error) -> Self {
        match e {
            Error::Unbound(m) => Status::Unbound(m),
            Error::NoBoundState(m) => Status::Unbound(m),
            Error::NoStationaryPoint(m) => Status::Unbound(m),
            e => Status::Failed(e),
        }
    }
}

pub struct Outcome {
    pub row: Row,
    pub status: Status,
    pub warnings: Vec<String>,
}

fn finish(mut row: Row, status: Status, warnings: Vec<String>) -> Outcome {
    row.push("status", status.label());
    Outcome {
        row,
        status,
        warnings,
    }
}

pub fn parse_well(spec: &str, mu: f64, warnings: &mut Vec<String>) -> Result<PotentialWell, Error> {
    let s = spec.trim().to_ascii_lowercase();
    let kind = match s.as_str() {
        "yukawa" => Some(WellKind::Yukawa),
        "exponential" | "exp" => Some(WellKind::Exponential),
        "gaussian" => Some(WellKind::Gaussian),
        _ => None,
    };
    if let Some(kind) = kind {
        return potentials::make_builtin(kind, mu);
    }
    if let Some(p) = s.strip_prefix("power:") {
        let p: f64 = p
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad power-law exponent in '{spec}'")))?;
        return potentials::make_builtin(WellKind::PowerLaw(p), mu);
    }
    let (well, found) = potentials::parse_custom(spec, mu)?;
    for w in found {
        let WellWarning::NonPositive(points) = w;
        warnings.push(format!(
            "well '{spec}' is not positive at r = {points:?} (units of 1/mu)"
        ));
    }
    Ok(well)
}

pub fn parse_mass_b(s: &str) -> Result<MassB, Error> {
    let t = s.trim();
    if ["inf", "infinity", "infinite"]
        .iter()
        .any(|w| t.eq_ignore_ascii_case(w))
    {
        return Ok(MassB::Infinite);
    }
    match t.parse::<f64>() {
        Ok(m) if m > 0.0 && m.is_finite() => Ok(MassB::Finite(m)),
        _ => Err(Error::InvalidParameter(format!(
            "m_b must be a positive number or 'inf', got '{s}'"
        ))),
    }
}

fn mass_cell(m: MassB) -> Cell {
    match m {
        MassB::Finite(x) => Cell::Num(x),
        MassB::Infinite => Cell::Text("inf".into()),
    }
}

fn id_state(a: &IdStateArgs) -> Result<StateSpec, Error> {
    if a.n_radial.is_some() || a.l.is_some() {
        if a.n_particles != 2 {
            return Err(Error::InvalidParameter(
                "--n and --l describe two-body states only".into(),
            ));
        }
        return StateSpec::new(vec![(a.n_radial.unwrap_or(0), a.l.unwrap_or(0))], a.dim);
    }
    StateSpec::parse(&a.state, a.n_particles, a.dim)
}

fn id_inputs(
    row: &mut Row,
    well: &WellArgs,
    mass: f64,
    st: &IdStateArgs,
    state: Option<&StateSpec>,
) {
    row.push("well", well.well.as_str());
    row.push("mu", well.mu);
    row.push("mass", mass);
    row.push("N", st.n_particles);
    row.push("D", st.dim);
    row.push("state", state.map_or(st.state.clone(), |s| s.to_string()));
}

fn two_body_pair(state: &StateSpec) -> Result<(u32, u32), Error> {
    match state.pairs() {
        [(n, l)] => Ok((*n, *l)),
        _ => Err(Error::InvalidParameter(
            "the oracle method needs N = 2".into(),
        )),
    }
}

fn method_name(m: IdMethod) -> &'static str {
    match m {
        IdMethod::Plain => "plain",
        IdMethod::Improved => "improved",
        IdMethod::Oracle => "oracle",
    }
}

pub fn crit_id(a: &CritIdArgs) -> Outcome {
    let mut warnings = Vec::new();
    let state = id_state(&a.state);
    let mut row = Row::default();
    id_inputs(&mut row, &a.well, a.mass, &a.state, state.as_ref().ok());
    row.push("method", method_name(a.method));
    let result = (|| {
        let state = state?;
        let well = parse_well(&a.well.well, a.well.mu, &mut warnings)?;
        match a.method {
            IdMethod::Plain => critical::critical_g(&well, a.state.n_particles, a.mass, &state),
            IdMethod::Improved => {
                critical::critical_g_improved(&well, a.state.n_particles, a.mass, &state)
            }
            IdMethod::Oracle => {
                let (n, l) = two_body_pair(&state)?;
                if !(a.mass > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "mass must be positive, got {}",
                        a.mass
                    )));
                }
                let g = oracle::numeric_critical_g2(
                    l,
                    n,
                    &well,
                    1.0 / a.mass,
                    GridSpec::for_well(&well),
                )?;
                Ok(critical::CriticalResult {
                    coupling: CoreCoupling::Finite(g),
                    rho0: None,
                    factor: None,
                    method: critical::Method::Plain,
                    bound_character: BoundCharacter::NoGuarantee,
                    trace: vec![],
                })
            }
        }
    })();
    match result {
        Ok(c) => {
            row.push(
                "g_crit",
                match c.coupling {
                    CoreCoupling::Finite(g) => Cell::Num(g),
                    CoreCoupling::Infinite => Cell::Text("inf".into()),
                },
            );
            row.push("rho0", Cell::opt(c.rho0));
            row.push("factor", Cell::opt(c.factor));
            let character = match (a.method, c.bound_character) {
                (IdMethod::Oracle, _) => "numerical",
                (_, BoundCharacter::UpperBound) => "upper bound",
                (_, BoundCharacter::NoGuarantee) => "no guarantee",
            };
            row.push("bound_character", character);
            finish(row, Status::Ok, warnings)
        }
        Err(e) => {
            for k in ["g_crit", "rho0", "factor", "bound_character"] {
                row.push(k, Cell::Empty);
            }
            finish(row, e.into(), warnings)
        }
    }
}

fn finite(x: f64) -> Cell {
    if x.is_finite() {
        Cell::Num(x)
    } else {
        Cell::Empty
    }
}

pub fn energy_id(a: &EnergyIdArgs) -> Outcome {
    let mut warnings = Vec::new();
    let state = id_state(&a.state);
    let mut row = Row::default();
    id_inputs(&mut row, &a.well, a.mass, &a.state, state.as_ref().ok());
    row.push("g", a.g);
    row.push("method", method_name(a.method));
    let result = (|| -> Result<(f64, f64, f64, f64), Error> {
        let state = state?;
        let well = parse_well(&a.well.well, a.well.mu, &mut warnings)?;
        let sys = IdenticalSystem::new(a.state.n_particles, a.mass, a.g, well.clone())?;
        let sol = match a.method {
            IdMethod::Plain => identical::solve_energy(&sys, &state)?,
            IdMethod::Improved => identical::solve_energy_improved(&sys, &state)?,
            IdMethod::Oracle => {
                let (n, l) = two_body_pair(&state)?;
                let prob = RadialProblem {
                    kinetic_coefficient: 1.0 / a.mass,
                    l,
                    well: well.clone(),
                    g: a.g,
                };
                let e = oracle::radial_eigenvalue(&prob, n, GridSpec::for_well(&well))?;
                return Ok((e.energy, f64::NAN, f64::NAN, f64::NAN));
            }
        };
        if !sol.is_bound() {
            return Err(Error::Unbound(format!(
                "no negative-energy stationary point ({:?})",
                sol.binding
            )));
        }
        Ok((sol.energy, sol.rho0, sol.p0, sol.q_eff))
    })();
    let (values, status) = match result {
        Ok(v) => (v, Status::Ok),
        Err(e) => ((f64::NAN, f64::NAN, f64::NAN, f64::NAN), e.into()),
    };
    row.push("energy", finite(values.0));
    row.push("rho0", finite(values.1));
    row.push("p0", finite(values.2));
    row.push("q_eff", finite(values.3));
    finish(row, status, warnings)
}

fn mixed_state(spec: &str, particles: usize, dim: u32) -> Result<StateSpec, Error> {
    if particles == 1 && (spec.trim().is_empty() || spec.trim().eq_ignore_ascii_case("ground")) {
        return StateSpec::new(vec![], dim);
    }
    StateSpec::parse(spec, particles, dim)
}

struct MixedSetup {
    sys_parts: (usize, f64, MassB, PotentialWell, PotentialWell),
    state_a: StateSpec,
    state_b: StateSpec,
}

fn mixed_setup(m: &MixedArgs, warnings: &mut Vec<String>) -> Result<MixedSetup, Error> {
    let mb = parse_mass_b(&m.mb)?;
    let well_aa = parse_well(&m.well_aa, m.mu_aa.unwrap_or(m.mu), warnings)?;
    let well_ab = parse_well(&m.well_ab, m.mu_ab.unwrap_or(m.mu), warnings)?;
    Ok(MixedSetup {
        sys_parts: (m.na, m.ma, mb, well_aa, well_ab),
        state_a: mixed_state(&m.state_a, m.na, m.dim)?,
        state_b: mixed_state(&m.state_b, 2, m.dim)?,
    })
}

impl MixedSetup {
    fn system(&self, g_aa: f64, g_ab: f64) -> Result<MixedSystem, Error> {
        let (na, ma, mb, aa, ab) = &self.sys_parts;
        MixedSystem::new(*na, *ma, *mb, g_aa, g_ab, aa.clone(), ab.clone())
    }
}

fn mixed_inputs(row: &mut Row, m: &MixedArgs) {
    row.push("Na", m.na);
    row.push("ma", m.ma);
    row.push(
        "mb",
        parse_mass_b(&m.mb).map_or(Cell::Text(m.mb.clone()), mass_cell),
    );
    row.push("well_aa", m.well_aa.as_str());
    row.push("well_ab", m.well_ab.as_str());
    row.push("mu_aa", m.mu_aa.unwrap_or(m.mu));
    row.push("mu_ab", m.mu_ab.unwrap_or(m.mu));
}

fn geometry_cells(row: &mut Row, g: Option<&mixed::MixedGeometry>) {
    row.push("r_aa", Cell::opt(g.map(|g| g.r_aa)));
    row.push("r0", Cell::opt(g.map(|g| g.r0)));
    row.push("p_a", Cell::opt(g.map(|g| g.p_a)));
    row.push("p0", Cell::opt(g.map(|g| g.p0)));
    row.push(
        "max_residual",
        Cell::opt(g.map(|g| {
            g.residuals
                .iter()
                .fold(g.identity_residual, |a, b| a.max(*b))
        })),
    );
}

/// Held coupling and the coupling to solve for.
fn resolve_hold(a: &CritMixedArgs) -> Result<(Coupling, f64), String> {
    let (mut gaa, mut gab) = (a.gaa, a.gab);
    if let Some(h) = &a.hold {
        let (k, v) = h
            .split_once('=')
            .ok_or_else(|| format!("--hold expects gaa=VALUE or gab=VALUE, got '{h}'"))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| format!("bad value in --hold '{h}'"))?;
        let slot = match k.trim() {
            "gaa" | "g" => &mut gaa,
            "gab" | "h" => &mut gab,
            other => return Err(format!("--hold names unknown coupling '{other}'")),
        };
        if slot.is_some() {
            return Err(format!("coupling '{}' given twice", k.trim()));
        }
        *slot = Some(v);
    }
    let solve = match (a.solve, gaa, gab) {
        (Some(s), _, _) => s,
        (None, Some(_), None) => Coupling::Gab,
        (None, None, Some(_)) => Coupling::Gaa,
        (None, None, None) => {
            return Err("give the held coupling with --gaa, --gab or --hold".into())
        }
        (None, Some(_), Some(_)) => {
            return Err("both couplings given; choose one with --solve".into())
        }
    };
    let (held, solved) = match solve {
        Coupling::Gab => (gaa, gab),
        Coupling::Gaa => (gab, gaa),
    };
    if solved.is_some() {
        return Err("the solved coupling must not also be given".into());
    }
    let held = held.ok_or_else(|| "the held coupling is missing".to_string())?;
    Ok((solve, held))
}

pub fn crit_mixed(a: &CritMixedArgs) -> Outcome {
    let mut warnings = Vec::new();
    let mut row = Row::default();
    mixed_inputs(&mut row, &a.mixed);
    let hold = resolve_hold(a);
    let (solve_name, held) = match &hold {
        Ok((Coupling::Gab, v)) => ("gab", Some(*v)),
        Ok((Coupling::Gaa, v)) => ("gaa", Some(*v)),
        Err(_) => ("", None),
    };
    row.push("solve", solve_name);
    let result = match hold {
        Err(m) => Err(Status::Usage(m)),
        Ok((solve, value)) => (|| -> Result<mixed::MixedCritical, Error> {
            let setup = mixed_setup(&a.mixed, &mut warnings)?;
            match solve {
                Coupling::Gab => {
                    mixed::critical_gab(&setup.system(value, 0.0)?, &setup.state_a, &setup.state_b)
                }
                Coupling::Gaa => {
                    mixed::critical_gaa(&setup.system(0.0, value)?, &setup.state_a, &setup.state_b)
                }
            }
        })()
        .map_err(Status::from),
    };
    let crit = result.as_ref().ok();
    let value = crit.map(|c| c.critical_value);
    let (gaa, gab) = if solve_name == "gab" {
        (held, value)
    } else {
        (value, held)
    };
    row.push("gaa", Cell::opt(gaa));
    row.push("gab", Cell::opt(gab));
    geometry_cells(&mut row, crit.map(|c| &c.geometry));
    row.push(
        "roots",
        crit.map_or(Cell::Empty, |c| {
            Cell::Text(
                c.roots
                    .iter()
                    .map(|r| format!("{r}"))
                    .collect::<Vec<_>>()
                    .join(";"),
            )
        }),
    );
    let status = match result {
        Ok(_) => Status::Ok,
        Err(s) => s,
    };
    finish(row, status, warnings)
}

pub fn energy_mixed(a: &EnergyMixedArgs) -> Outcome {
    let mut warnings = Vec::new();
    let mut row = Row::default();
    mixed_inputs(&mut row, &a.mixed);
    row.push("gaa", a.gaa);
    row.push("gab", a.gab);
    let result = (|| {
        let setup = mixed_setup(&a.mixed, &mut warnings)?;
        let e = mixed::solve_energy_mixed(
            &setup.system(a.gaa, a.gab)?,
            &setup.state_a,
            &setup.state_b,
        )?;
        if !e.bound {
            return Err(Error::Unbound(format!(
                "lowest stationary energy {} is not negative",
                e.energy
            )));
        }
        Ok(e)
    })();
    let e = result.as_ref().ok();
    row.push("energy", Cell::opt(e.map(|e| e.energy)));
    geometry_cells(&mut row, e.map(|e| &e.geometry));
    let status = match result {
        Ok(_) => Status::Ok,
        Err(err) => err.into(),
    };
    finish(row, status, warnings)
}

pub fn oracle(a: &OracleArgs) -> Outcome {
    let mut warnings = Vec::new();
    let mut row = Row::default();
    row.push("well", a.well.well.as_str());
    row.push("mu", a.well.mu);
    row.push("kinetic", a.kinetic);
    row.push("l", a.l);
    row.push("n", a.n);
    row.push(
        "mode",
        match a.mode {
            OracleMode::Energy => "energy",
            OracleMode::Critical => "critical",
        },
    );
    row.push("g", Cell::opt(a.g));
    let mut cells = [f64::NAN; 5];
    let result = (|| -> Result<(), Error> {
        let well = parse_well(&a.well.well, a.well.mu, &mut warnings)?;
        let mut grid = GridSpec::for_well(&well);
        if let Some(p) = a.points {
            grid.points = p;
        }
        if let Some(r) = a.r_max {
            grid.r_max = r;
        }
        match a.mode {
            OracleMode::Energy => {
                let g =
                    a.g.ok_or_else(|| Error::InvalidParameter("energy mode needs --g".into()))?;
                let prob = RadialProblem {
                    kinetic_coefficient: a.kinetic,
                    l: a.l,
                    well: well.clone(),
                    g,
                };
                let e = oracle::radial_eigenvalue(&prob, a.n, grid)?;
                cells[0] = e.energy;
                cells[1] = e.coarse_energy;
                cells[2] = e.r_max;
            }
            OracleMode::Critical => {
                cells[3] = oracle::numeric_critical_g2(a.l, a.n, &well, a.kinetic, grid)?;
                if a.l == 0 && well.is_exponential() {
                    cells[4] =
                        oracle::exact_critical_g2_swave(a.n)? * a.well.mu.powi(2) * a.kinetic;
                }
            }
        }
        Ok(())
    })();
    for (k, v) in [
        "energy",
        "coarse_energy",
        "r_max",
        "critical_g",
        "exact_swave",
    ]
    .iter()
    .zip(cells)
    {
        row.push(k, finite(v));
    }
    let status = match result {
        Ok(()) => Status::Ok,
        Err(e) => e.into(),
    };
    finish(row, status, warnings)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn masses_and_wells() {
        assert_eq!(parse_mass_b("inf").unwrap(), MassB::Infinite);
        assert_eq!(parse_mass_b("2").unwrap(), MassB::Finite(2.0));
        assert!(parse_mass_b("0").is_err());
        let mut w = Vec::new();
        assert!(parse_well("power:2", 1.0, &mut w).unwrap().power_exponent() == Some(2.0));
        assert!(parse_well("exp(-r", 1.0, &mut w).is_err());
        parse_well("1 - r", 1.0, &mut w).unwrap();
        assert_eq!(w.len(), 1);
    }
}
