use etcrit_core::mixed::{
    critical_gaa, critical_gab, reduced_mass, solve_energy_mixed, MassB, MixedSystem,
};
use etcrit_core::potentials::{make_builtin, WellKind};
use etcrit_core::quantum::StateSpec;
use proptest::prelude::*;

fn exp_sys(na: usize, mb: MassB, g_aa: f64, g_ab: f64) -> MixedSystem {
    let w = make_builtin(WellKind::Exponential, 1.0).unwrap();
    MixedSystem::new(na, 1.0, mb, g_aa, g_ab, w.clone(), w).unwrap()
}

fn ground(n: usize) -> StateSpec {
    if n == 1 {
        StateSpec::new(vec![], 3).unwrap()
    } else {
        StateSpec::bosonic_ground(n, 3).unwrap()
    }
}

#[test]
fn h_decreases_while_the_cluster_is_unbound() {
    let mut last = f64::INFINITY;
    for na in 1..=8 {
        let h = critical_gab(
            &exp_sys(na, MassB::Finite(2.0), 1.0, 0.0),
            &ground(na),
            &ground(2),
        )
        .unwrap()
        .critical_value;
        assert!(h < last, "Na = {na}: {h} >= {last}");
        last = h;
    }
}

#[test]
fn heavy_b_approaches_static_source() {
    for (na, g) in [(1, 0.0), (3, 0.7)] {
        let heavy = critical_gab(
            &exp_sys(na, MassB::Finite(1e6), g, 0.0),
            &ground(na),
            &ground(2),
        )
        .unwrap();
        let fixed = critical_gab(
            &exp_sys(na, MassB::Infinite, g, 0.0),
            &ground(na),
            &ground(2),
        )
        .unwrap();
        let d = (heavy.critical_value - fixed.critical_value).abs() / fixed.critical_value;
        assert!(d < 1e-4, "Na = {na}: {d}");
    }
}

#[test]
fn energy_decreases_with_more_a_particles_bound_to_b() {
    // more pairs at fixed couplings only add attraction
    let e2 = solve_energy_mixed(
        &exp_sys(2, MassB::Finite(2.0), 1.0, 5.0),
        &ground(2),
        &ground(2),
    )
    .unwrap();
    let e3 = solve_energy_mixed(
        &exp_sys(3, MassB::Finite(2.0), 1.0, 5.0),
        &ground(3),
        &ground(2),
    )
    .unwrap();
    assert!(e3.energy < e2.energy);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn single_a_matches_closed_form(ma in 0.2f64..5.0, mb in 0.2f64..5.0, mu in 0.2f64..4.0, n in 0u32..3, l in 0u32..3) {
        let w = make_builtin(WellKind::Exponential, mu).unwrap();
        let sys = MixedSystem::new(1, ma, MassB::Finite(mb), 0.0, 0.0, w.clone(), w).unwrap();
        let sb = StateSpec::new(vec![(n, l)], 3).unwrap();
        let h = critical_gab(&sys, &ground(1), &sb).unwrap().critical_value;
        let e = std::f64::consts::E;
        let closed = e * e * mu * mu / 4.0 * sb.q_global().powi(2) / (2.0 * reduced_mass(1, ma, MassB::Finite(mb)));
        prop_assert!((h - closed).abs() <= 1e-9 * closed);
    }

    #[test]
    fn round_trip(na in 2usize..7, m in 0.5f64..4.0, g in 0.0f64..0.8) {
        let s = exp_sys(na, MassB::Finite(m), g, 0.0);
        let h = critical_gab(&s, &ground(na), &ground(2));
        prop_assume!(h.is_ok());
        let h = h.unwrap().critical_value;
        let back = critical_gaa(&s.with_couplings(0.0, h), &ground(na), &ground(2)).unwrap();
        prop_assert!(back.roots.iter().any(|x| (x - g).abs() <= 1e-6 * g.max(1e-3)), "{:?} vs {g}", back.roots);
    }

    #[test]
    fn returned_geometry_satisfies_equations(na in 1usize..8, m in 0.5f64..4.0, g in 0.0f64..0.8, extra in 0.1f64..5.0) {
        let s = exp_sys(na, MassB::Finite(m), g, 0.0);
        if let Ok(c) = critical_gab(&s, &ground(na), &ground(2)) {
            prop_assert!(c.geometry.residuals.iter().all(|r| *r <= 1e-9), "{:?}", c.geometry.residuals);
            prop_assert!(c.geometry.identity_residual <= 1e-9);
            let bound = s.with_couplings(g, c.critical_value + extra);
            let e = solve_energy_mixed(&bound, &ground(na), &ground(2)).unwrap();
            prop_assert!(e.geometry.residuals.iter().all(|r| *r <= 1e-9), "{:?}", e.geometry.residuals);
            prop_assert!(e.energy < 0.0);
        }
    }
}
