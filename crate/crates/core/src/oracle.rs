//! Two-body reference values independent of the envelope theory.
//!
//! The reduced radial equation is
//! `-kc u'' + [kc l(l+1)/r^2 + V(r)] u = E u`, `u(0) = 0`, with
//! `kc = hbar^2 / (2 mu_red)`; `kc = 1` for `H = p^2 - g e^{-r}`.
//!
//! Eigenvalues come from Numerov integration and node counting. Critical
//! couplings come from the zero-energy solution: beyond the well it behaves
//! as `A r^{l+1} + B r^{-l}` and a new state appears whenever `A` crosses zero.

use crate::error::{Error, Result};
use crate::numerics;
use crate::potentials::PotentialWell;

#[derive(Debug, Clone)]
pub struct RadialProblem {
    pub kinetic_coefficient: f64,
    pub l: u32,
    pub well: PotentialWell,
    pub g: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub r_max: f64,
    pub points: usize,
}

impl GridSpec {
    pub const DEFAULT_RANGE: f64 = 40.0;
    pub const DEFAULT_POINTS: usize = 8000;

    pub fn for_well(well: &PotentialWell) -> Self {
        GridSpec {
            r_max: Self::DEFAULT_RANGE / well.mu(),
            points: Self::DEFAULT_POINTS,
        }
    }

    fn check(&self) -> Result<()> {
        if !(self.r_max > 0.0) || self.points < 1000 {
            return Err(Error::InvalidParameter(format!(
                "grid needs r_max > 0 and >= 1000 points, got {} and {}",
                self.r_max, self.points
            )));
        }
        Ok(())
    }

    fn step(&self) -> f64 {
        self.r_max / self.points as f64
    }
}

/// Exact s-wave critical couplings of `p^2 - g e^{-r}`.
///
/// The zero-energy solution of `u'' + g e^{-r} u = 0` is `J0(2 sqrt(g) e^{-r/2})`,
/// so `u(0) = 0` requires `2 sqrt(g)` to be a zero of J0.
pub fn exact_critical_g2_swave(n: u32) -> Result<f64> {
    let j = numerics::bessel_j0_zero(n as usize + 1)?;
    Ok(0.25 * j * j)
}

/// Outward Numerov solution on `r_i = i h`, `i = 0..=points`, of `u'' = k(r) u`
/// with `u(0) = 0` and `u(h) = h^{l+1}`.
///
/// `ku0` is the limit of `k(r) r^{l+1}` at the origin, which the first step
/// needs when `k` is singular there. The solution is rescaled whenever it
/// grows large; node counts and sign information are unaffected.
struct Shot {
    nodes: usize,
    last: f64,
    /// Value at the reference point used for asymptotic matching.
    reference: f64,
}

fn shoot(
    k: impl Fn(usize) -> f64,
    ku0: f64,
    h: f64,
    points: usize,
    l: u32,
    reference_index: usize,
) -> Shot {
    let h2 = h * h / 12.0;
    let mut u = h.powi(l as i32 + 1);
    // (1 - h2 k_0) u_0 with u_0 = 0 but k_0 u_0 possibly finite
    let mut carry = -h2 * ku0;
    let mut k_cur = k(1);
    let mut nodes = 0;
    let mut reference = if reference_index == 1 { u } else { f64::NAN };
    for i in 1..points {
        let k_next = k(i + 1);
        let u_next = (2.0 * (1.0 + 5.0 * h2 * k_cur) * u - carry) / (1.0 - h2 * k_next);
        if u_next != 0.0 && u_next.signum() != u.signum() {
            nodes += 1;
        }
        carry = (1.0 - h2 * k_cur) * u;
        u = u_next;
        k_cur = k_next;
        if i + 1 == reference_index {
            reference = u;
        }
        if u.abs() > 1e200 {
            u *= 1e-200;
            carry *= 1e-200;
            reference *= 1e-200;
        }
    }
    Shot {
        nodes,
        last: u,
        reference,
    }
}

/// `lim k(r) r^{l+1}` as `r -> 0`, probed at a tiny radius.
fn origin_limit(k: impl Fn(f64) -> f64, l: u32, h: f64) -> f64 {
    let r = 1e-6 * h;
    let v = k(r) * r.powi(l as i32 + 1);
    if v.is_finite() {
        v
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialEigenvalue {
    pub energy: f64,
    /// Same eigenvalue on a grid with half as many points.
    pub coarse_energy: f64,
    /// Box radius actually used.
    pub r_max: f64,
}

/// Decay exponent needed between the outer turning point and the box wall.
const DECAY_EXPONENT: f64 = 23.0; // ~ ln(1e10)
const MAX_EXTENSIONS: usize = 10;

fn effective_potential(prob: &RadialProblem, r: f64) -> f64 {
    let l = prob.l as f64;
    l * (l + 1.0) / (r * r) + prob.well.potential(prob.g, r) / prob.kinetic_coefficient
}

fn eigen_on_grid(prob: &RadialProblem, n: u32, grid: GridSpec) -> Result<f64> {
    let h = grid.step();
    let veff: Vec<f64> = (0..=grid.points)
        .map(|i| {
            if i == 0 {
                f64::NAN
            } else {
                effective_potential(prob, i as f64 * h)
            }
        })
        .collect();
    let ku0 = origin_limit(|r| effective_potential(prob, r), prob.l, h);
    let count = |eps: f64| shoot(|i| veff[i] - eps, ku0, h, grid.points, prob.l, 0).nodes;

    let vmin = veff[1..].iter().copied().fold(f64::INFINITY, f64::min);
    let confining = prob.well.sign() > 0.0;
    let mut lo = vmin;
    let hi_limit = if confining {
        veff[1..].iter().copied().fold(f64::NEG_INFINITY, f64::max)
    } else {
        0.0
    };
    if count(hi_limit) <= n as usize {
        return Err(if confining {
            Error::GridTooSmall(format!("state n = {n} does not fit below the box top"))
        } else {
            Error::NoBoundState(format!("no bound state with n = {n}, l = {}", prob.l))
        });
    }
    let mut hi = hi_limit;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count(mid) > n as usize {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-14 * hi.abs().max(lo.abs()).max(1e-300) {
            break;
        }
    }
    Ok(0.5 * (lo + hi) * prob.kinetic_coefficient)
}

/// WKB decay exponent from the outer turning point to `r_max`.
fn decay_to_wall(prob: &RadialProblem, energy: f64, r_max: f64) -> f64 {
    let eps = energy / prob.kinetic_coefficient;
    let samples = 4000;
    let dr = r_max / samples as f64;
    let mut integral = 0.0;
    for i in (1..=samples).rev() {
        let r = (i as f64 - 0.5) * dr;
        let gap = effective_potential(prob, r) - eps;
        if gap <= 0.0 {
            break;
        }
        integral += gap.sqrt() * dr;
    }
    integral
}

/// The `n`-th (from 0) eigenvalue of the radial problem.
pub fn radial_eigenvalue(prob: &RadialProblem, n: u32, grid: GridSpec) -> Result<RadialEigenvalue> {
    grid.check()?;
    if !(prob.kinetic_coefficient > 0.0) {
        return Err(Error::InvalidParameter(
            "kinetic coefficient must be positive".into(),
        ));
    }
    let mut grid = grid;
    for _ in 0..=MAX_EXTENSIONS {
        let fine = eigen_on_grid(prob, n, grid)?;
        if decay_to_wall(prob, fine, grid.r_max) >= DECAY_EXPONENT {
            let coarse = eigen_on_grid(
                prob,
                n,
                GridSpec {
                    r_max: grid.r_max,
                    points: grid.points / 2,
                },
            )?;
            return Ok(RadialEigenvalue {
                energy: fine,
                coarse_energy: coarse,
                r_max: grid.r_max,
            });
        }
        grid = GridSpec {
            r_max: grid.r_max * 1.5,
            points: (grid.points as f64 * 1.5).ceil() as usize,
        };
    }
    Err(Error::GridTooSmall(format!(
        "wavefunction not decayed at r_max = {}",
        grid.r_max
    )))
}

/// Number of zero-energy bound states supported at coupling `g`:
/// nodes inside the box plus one if the asymptotic form has another node outside.
fn zero_energy_count(well: &PotentialWell, kc: f64, l: u32, g: f64, grid: GridSpec) -> usize {
    let h = grid.step();
    let lf = l as f64;
    let reference_index = grid.points - grid.points / 10;
    let k = |r: f64| lf * (lf + 1.0) / (r * r) + well.potential(g, r) / kc;
    let ku0 = origin_limit(k, l, h);
    let shot = shoot(|i| k(i as f64 * h), ku0, h, grid.points, l, reference_index);
    let ra = reference_index as f64 * h;
    let rb = grid.r_max;
    let (ua, ub) = (shot.reference, shot.last);
    // u = A r^{l+1} + B r^{-l}
    let a = (ub * ra.powf(-lf) - ua * rb.powf(-lf))
        / (rb.powf(lf + 1.0) * ra.powf(-lf) - ra.powf(lf + 1.0) * rb.powf(-lf));
    let extra = usize::from(a != 0.0 && ub != 0.0 && a.signum() != ub.signum());
    shot.nodes + extra
}

/// Smallest coupling at which the `(n, l)` state reaches zero energy.
pub fn numeric_critical_g2(
    l: u32,
    n: u32,
    well: &PotentialWell,
    kinetic_coefficient: f64,
    grid: GridSpec,
) -> Result<f64> {
    grid.check()?;
    if well.sign() > 0.0 {
        return Err(Error::NotAdmissible(format!("{well} is not a well")));
    }
    let target = n as usize + 1;
    let count = |g: f64| zero_energy_count(well, kinetic_coefficient, l, g, grid);
    let mut lo = 0.0;
    let mut hi = kinetic_coefficient * well.mu() * well.mu();
    let mut doublings = 0;
    while count(hi) < target {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 60 {
            return Err(Error::NoConvergence {
                iterations: doublings,
                residual: f64::NAN,
            });
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if count(mid) >= target {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{make_builtin, WellKind};

    fn exp1() -> PotentialWell {
        make_builtin(WellKind::Exponential, 1.0).unwrap()
    }

    #[test]
    fn bessel_criticals() {
        assert!((exact_critical_g2_swave(0).unwrap() - 1.4458).abs() < 1e-4);
        assert!((exact_critical_g2_swave(1).unwrap() - 7.618).abs() < 1e-3);
        assert!((exact_critical_g2_swave(2).unwrap() - 18.72).abs() < 1e-2);
        assert!(exact_critical_g2_swave(25).is_err());
    }

    #[test]
    fn harmonic_oscillator_levels() {
        let well = make_builtin(WellKind::PowerLaw(2.0), 1.0).unwrap();
        let grid = GridSpec {
            r_max: 10.0,
            points: 8000,
        };
        for (n, l) in [(0, 0), (1, 0), (0, 2)] {
            let prob = RadialProblem {
                kinetic_coefficient: 1.0,
                l,
                well: well.clone(),
                g: 1.0,
            };
            let e = radial_eigenvalue(&prob, n, grid).unwrap();
            let exact = 2.0 * (2.0 * n as f64 + l as f64 + 1.5);
            assert!((e.energy - exact).abs() < 1e-6, "({n},{l}) {}", e.energy);
        }
    }

    #[test]
    fn exponential_eigenvalues() {
        let grid = GridSpec::for_well(&exp1());
        let prob = |l| RadialProblem {
            kinetic_coefficient: 1.0,
            l,
            well: exp1(),
            g: 40.0,
        };
        let e = radial_eigenvalue(&prob(0), 0, grid).unwrap();
        assert!((e.energy + 17.5).abs() < 0.05);
        assert!((e.energy - e.coarse_energy).abs() < 1e-6 * e.energy.abs());
        let e = radial_eigenvalue(&prob(3), 0, grid).unwrap();
        assert!((e.energy + 1.55).abs() < 0.005);
        assert!(matches!(
            radial_eigenvalue(&prob(3), 1, grid),
            Err(Error::NoBoundState(_))
        ));
    }

    #[test]
    fn critical_matches_bessel() {
        let grid = GridSpec::for_well(&exp1());
        for n in 0..3 {
            let num = numeric_critical_g2(0, n, &exp1(), 1.0, grid).unwrap();
            let exact = exact_critical_g2_swave(n).unwrap();
            assert!(
                (num - exact).abs() <= 1e-3 * exact,
                "n={n}: {num} vs {exact}"
            );
        }
        let g = numeric_critical_g2(1, 0, &exp1(), 1.0, grid).unwrap();
        assert!((g - 7.05).abs() < 0.01 * 7.05);
    }

    #[test]
    fn bad_grid() {
        let g = GridSpec {
            r_max: 10.0,
            points: 10,
        };
        assert!(numeric_critical_g2(0, 0, &exp1(), 1.0, g).is_err());
    }
}
