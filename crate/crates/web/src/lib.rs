//! wasm-bindgen entry points for the static page in `www/`.
//!
//! Every function returns a flat `Float64Array`; entries that are unbound or
//! failed come back as NaN so the page can leave gaps in its curves.

use etcrit_core::critical;
use etcrit_core::identical::{self, IdenticalSystem};
use etcrit_core::mixed::{self, MassB, MixedSystem};
use etcrit_core::oracle::{self, GridSpec, RadialProblem};
use etcrit_core::potentials::{self, PotentialWell, WellKind};
use etcrit_core::quantum::StateSpec;
use wasm_bindgen::prelude::*;

fn well(name: &str) -> Result<PotentialWell, JsError> {
    let kind = match name {
        "yukawa" => WellKind::Yukawa,
        "gaussian" => WellKind::Gaussian,
        "exponential" => WellKind::Exponential,
        other => return Err(JsError::new(&format!("unknown well {other}"))),
    };
    potentials::make_builtin(kind, 1.0).map_err(|e| JsError::new(&e.to_string()))
}

fn js(e: etcrit_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn bound_energy(sol: etcrit_core::Result<identical::EtSolution>) -> f64 {
    match sol {
        Ok(s) if s.is_bound() => s.energy,
        _ => f64::NAN,
    }
}

/// Two-body energies of the (n, l) state on a grid of `points` couplings
/// from `g_min` to `g_max`, unit mass, mu = 1.
///
/// Layout: `[g, plain, improved, numerical]` repeated per grid point.
#[wasm_bindgen]
pub fn energy_curve(
    well_name: &str,
    n: u32,
    l: u32,
    g_min: f64,
    g_max: f64,
    points: usize,
) -> Result<Vec<f64>, JsError> {
    let w = well(well_name)?;
    let state = StateSpec::new(vec![(n, l)], 3).map_err(js)?;
    let points = points.clamp(2, 400);
    let mut out = Vec::with_capacity(4 * points);
    for i in 0..points {
        let g = g_min + (g_max - g_min) * i as f64 / (points - 1) as f64;
        let sys = IdenticalSystem::new(2, 1.0, g, w.clone()).map_err(js)?;
        let plain = bound_energy(identical::solve_energy(&sys, &state));
        let improved = bound_energy(identical::solve_energy_improved(&sys, &state));
        let prob = RadialProblem {
            kinetic_coefficient: 1.0,
            l,
            well: w.clone(),
            g,
        };
        let exact = match oracle::radial_eigenvalue(&prob, n, GridSpec::for_well(&w)) {
            Ok(e) if e.energy < 0.0 => e.energy,
            _ => f64::NAN,
        };
        out.extend([g, plain, improved, exact]);
    }
    Ok(out)
}

/// Critical couplings of N bosons in their ground state for N = 2..=n_max:
/// `[N, plain, improved]` per N.
#[wasm_bindgen]
pub fn critical_identical(well_name: &str, n_max: usize) -> Result<Vec<f64>, JsError> {
    let w = well(well_name)?;
    let mut out = Vec::new();
    for n in 2..=n_max.clamp(2, 40) {
        let state = StateSpec::bosonic_ground(n, 3).map_err(js)?;
        let plain = critical::critical_g(&w, n, 1.0, &state).map_or(f64::NAN, |r| r.g());
        let improved =
            critical::critical_g_improved(&w, n, 1.0, &state).map_or(f64::NAN, |r| r.g());
        out.extend([n as f64, plain, improved]);
    }
    Ok(out)
}

/// Critical g_ab for Na exponentially bound a particles of unit mass plus
/// one b of mass `mb` (`mb <= 0` means a static source), holding g_aa:
/// `[Na, g_ab]` for Na = 1..=na_max.
#[wasm_bindgen]
pub fn critical_gab_vs_na(mb: f64, g_aa: f64, na_max: usize) -> Result<Vec<f64>, JsError> {
    let exp = well("exponential")?;
    let mb = if mb > 0.0 {
        MassB::Finite(mb)
    } else {
        MassB::Infinite
    };
    let mut out = Vec::new();
    for na in 1..=na_max.clamp(1, 30) {
        let sys = MixedSystem::new(na, 1.0, mb, g_aa, 0.0, exp.clone(), exp.clone()).map_err(js)?;
        let a = mixed_ground(na)?;
        let b = StateSpec::new(vec![(0, 0)], 3).map_err(js)?;
        let h = mixed::critical_gab(&sys, &a, &b).map_or(f64::NAN, |c| c.critical_value);
        out.extend([na as f64, h]);
    }
    Ok(out)
}

/// Critical g_aa for `na` a particles around a static source of strength h,
/// on a grid of `points` values of h: `[h, g_aa]` per point.
#[wasm_bindgen]
pub fn static_source_curve(
    na: usize,
    h_min: f64,
    h_max: f64,
    points: usize,
) -> Result<Vec<f64>, JsError> {
    if na < 2 {
        return Err(JsError::new("need at least two a particles"));
    }
    let exp = well("exponential")?;
    let a = mixed_ground(na)?;
    let b = StateSpec::new(vec![(0, 0)], 3).map_err(js)?;
    let points = points.clamp(2, 400);
    let mut out = Vec::with_capacity(2 * points);
    for i in 0..points {
        let h = h_min + (h_max - h_min) * i as f64 / (points - 1) as f64;
        let g = MixedSystem::new(na, 1.0, MassB::Infinite, 0.0, h, exp.clone(), exp.clone())
            .and_then(|sys| mixed::critical_gaa(&sys, &a, &b))
            .map_or(f64::NAN, |c| c.critical_value);
        out.extend([h, g]);
    }
    Ok(out)
}

fn mixed_ground(na: usize) -> Result<StateSpec, JsError> {
    if na == 1 {
        StateSpec::new(vec![], 3).map_err(js)
    } else {
        StateSpec::bosonic_ground(na, 3).map_err(js)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curves_have_expected_shape() {
        let e = energy_curve("exponential", 0, 0, 10.0, 40.0, 4).unwrap();
        assert_eq!(e.len(), 16);
        assert!((e[15] + 17.533).abs() < 0.01, "{}", e[15]);
        assert!(e[13] < 0.0 && e[14] < 0.0);

        let c = critical_identical("exponential", 4).unwrap();
        assert!((c[1] - 4.15634).abs() < 1e-4);

        let s = static_source_curve(2, 0.2, 3.0, 3).unwrap();
        assert!(s[1].is_nan());
        assert!(s[5] < 0.0);

        let h = critical_gab_vs_na(2.0, 1.0, 3).unwrap();
        assert!((h[1] - 3.1173).abs() < 1e-3, "{}", h[1]);
        assert!(h[5] < h[3]);
    }
}
