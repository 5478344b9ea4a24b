//! Scalar kernels shared by the solvers: bracketed root finding, a damped
//! two-dimensional Newton iteration, the principal Lambert W branch and the
//! zeros of the Bessel function J0.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Tolerances for the iterative kernels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_iter: usize,
}

impl Default for RootConfig {
    fn default() -> Self {
        RootConfig {
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            max_iter: 200,
        }
    }
}

impl RootConfig {
    pub fn new(rel_tol: f64, abs_tol: f64, max_iter: usize) -> Result<Self> {
        if !(rel_tol > 0.0) || !(abs_tol > 0.0) || max_iter == 0 {
            return Err(Error::InvalidParameter(format!(
                "root config needs positive tolerances and max_iter >= 1 (got {rel_tol}, {abs_tol}, {max_iter})"
            )));
        }
        Ok(RootConfig {
            rel_tol,
            abs_tol,
            max_iter,
        })
    }
}

/// Closed interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

impl Bracket {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "bracket needs finite lo < hi (got [{lo}, {hi}])"
            )));
        }
        Ok(Bracket { lo, hi })
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// `n` logarithmically spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Consecutive grid intervals across which `f` changes sign, in grid order.
///
/// Exact zeros at a probe are skipped and the comparison continues with the
/// next nonzero value, so a root sitting on a probe is still bracketed.
/// Non-finite values break the chain.
pub fn sign_change_brackets<F: FnMut(f64) -> f64>(mut f: F, grid: &[f64]) -> Vec<Bracket> {
    let mut out = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for &x in grid {
        let fx = f(x);
        if !fx.is_finite() {
            prev = None;
            continue;
        }
        if fx == 0.0 {
            continue;
        }
        if let Some((px, pf)) = prev {
            if pf.signum() != fx.signum() {
                out.push(Bracket { lo: px, hi: x });
            }
        }
        prev = Some((x, fx));
    }
    out
}

/// Brent's method on a sign-changing bracket.
pub fn find_root<F: FnMut(f64) -> f64>(
    mut f: F,
    bracket: Bracket,
    cfg: &RootConfig,
) -> Result<f64> {
    let (mut a, mut b) = (bracket.lo, bracket.hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !fa.is_finite() || !fb.is_finite() || fa.signum() == fb.signum() {
        return Err(Error::NoSignChange {
            lo: bracket.lo,
            hi: bracket.hi,
        });
    }
    let (mut c, mut fc) = (b, fb);
    let (mut d, mut e) = (b - a, b - a);
    for _ in 0..cfg.max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * (cfg.abs_tol + cfg.rel_tol * b.abs());
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b.clamp(bracket.lo, bracket.hi));
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
        if !fb.is_finite() {
            return Err(Error::NoConvergence {
                iterations: cfg.max_iter,
                residual: fb,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: cfg.max_iter,
        residual: fb.abs(),
    })
}

/// Result of [`solve_2d`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Solve2d {
    pub x: f64,
    pub y: f64,
    /// Max-norm of the residual at `(x, y)`.
    pub residual: f64,
    pub iterations: usize,
}

fn max_norm((a, b): (f64, f64)) -> f64 {
    if a.is_finite() && b.is_finite() {
        a.abs().max(b.abs())
    } else {
        f64::INFINITY
    }
}

/// Damped Newton iteration for `F(x, y) = 0` with a central-difference Jacobian.
///
/// Converges when the max-norm residual drops below `abs_tol`, or when the
/// accepted step falls under `rel_tol` with a residual no larger than
/// `rel_tol` (the floating-point floor of a badly scaled system).
pub fn solve_2d<F>(mut func: F, guess: (f64, f64), cfg: &RootConfig) -> Result<Solve2d>
where
    F: FnMut(f64, f64) -> (f64, f64),
{
    let (mut x, mut y) = guess;
    if !x.is_finite() || !y.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "non-finite guess ({x}, {y})"
        )));
    }
    let mut fxy = func(x, y);
    let mut res = max_norm(fxy);
    if !res.is_finite() {
        return Err(Error::NoConvergence {
            iterations: 0,
            residual: res,
        });
    }
    let cbrt_eps = f64::EPSILON.cbrt();
    for it in 0..cfg.max_iter {
        if res <= cfg.abs_tol {
            return Ok(Solve2d {
                x,
                y,
                residual: res,
                iterations: it,
            });
        }
        let hx = cbrt_eps * x.abs().max(1.0);
        let hy = cbrt_eps * y.abs().max(1.0);
        let (fxp, fxm) = (func(x + hx, y), func(x - hx, y));
        let (fyp, fym) = (func(x, y + hy), func(x, y - hy));
        let j11 = (fxp.0 - fxm.0) / (2.0 * hx);
        let j21 = (fxp.1 - fxm.1) / (2.0 * hx);
        let j12 = (fyp.0 - fym.0) / (2.0 * hy);
        let j22 = (fyp.1 - fym.1) / (2.0 * hy);
        let det = j11 * j22 - j12 * j21;
        let scale = (j11 * j22).abs() + (j12 * j21).abs();
        if !det.is_finite() || det == 0.0 || det.abs() <= 1e-14 * scale {
            return Err(Error::SingularJacobian { x, y });
        }
        let dx = -(j22 * fxy.0 - j12 * fxy.1) / det;
        let dy = -(-j21 * fxy.0 + j11 * fxy.1) / det;

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=30 {
            let (nx, ny) = (x + t * dx, y + t * dy);
            let nf = func(nx, ny);
            let nr = max_norm(nf);
            if nr < res {
                accepted = Some((nx, ny, nf, nr));
                break;
            }
            t *= 0.5;
        }
        let small_step = |sx: f64, sy: f64, x: f64, y: f64| {
            sx.abs() <= cfg.rel_tol * x.abs().max(1.0) && sy.abs() <= cfg.rel_tol * y.abs().max(1.0)
        };
        match accepted {
            Some((nx, ny, nf, nr)) => {
                let stalled = small_step(t * dx, t * dy, nx, ny);
                x = nx;
                y = ny;
                fxy = nf;
                res = nr;
                if stalled && res <= cfg.rel_tol {
                    return Ok(Solve2d {
                        x,
                        y,
                        residual: res,
                        iterations: it + 1,
                    });
                }
            }
            None => {
                if res <= cfg.rel_tol {
                    return Ok(Solve2d {
                        x,
                        y,
                        residual: res,
                        iterations: it,
                    });
                }
                return Err(Error::NoConvergence {
                    iterations: it,
                    residual: res,
                });
            }
        }
    }
    if res <= cfg.abs_tol {
        return Ok(Solve2d {
            x,
            y,
            residual: res,
            iterations: cfg.max_iter,
        });
    }
    Err(Error::NoConvergence {
        iterations: cfg.max_iter,
        residual: res,
    })
}

/// `-1/e`, the branch point of the Lambert W function.
pub const LAMBERT_BRANCH_POINT: f64 = -0.36787944117144233;

/// Principal branch `W0` of the Lambert function, `w e^w = x`, `w >= -1`.
pub fn lambert_w0(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::Domain("lambert_w0 of NaN".into()));
    }
    if x <= LAMBERT_BRANCH_POINT {
        if LAMBERT_BRANCH_POINT - x <= 4.0 * f64::EPSILON * LAMBERT_BRANCH_POINT.abs() {
            return Ok(-1.0);
        }
        return Err(Error::Domain(format!(
            "lambert_w0 undefined for x = {x} < -1/e"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == f64::INFINITY {
        return Ok(f64::INFINITY);
    }

    let mut w = if x < -0.32 {
        // series in p = sqrt(2(ex + 1)) about the branch point
        let p = (2.0 * (std::f64::consts::E * x + 1.0)).max(0.0).sqrt();
        -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 + p * (-43.0 / 540.0))))
    } else if x.abs() < 0.5 {
        x / (1.0 + x)
    } else if x < 3.0 {
        let l = x.ln_1p();
        l * (1.0 - (1.0 + l).ln() / (2.0 + l))
    } else {
        let l = x.ln();
        l - l.ln()
    };

    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - x;
        if f == 0.0 {
            break;
        }
        let wp1 = w + 1.0;
        if wp1.abs() < 1e-300 {
            break;
        }
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let dw = f / denom;
        w -= dw;
        if dw.abs() <= 4.0 * f64::EPSILON * (1.0 + w.abs()) {
            break;
        }
    }
    Ok(w.max(-1.0))
}

/// J0 and J1 by Miller's backward recurrence normalised with
/// `J0 + 2 (J2 + J4 + ...) = 1`.
pub fn bessel_j0_j1(x: f64) -> (f64, f64) {
    let ax = x.abs();
    if ax == 0.0 {
        return (1.0, 0.0);
    }
    let start = ax + 50.0 + 5.0 * ax.sqrt();
    let m = 2 * ((start / 2.0).ceil() as usize);
    let mut next = 0.0; // J_{k+1}
    let mut cur = 1e-30; // J_k
    let mut sum = 0.0;
    let (mut j0, mut j1) = (0.0, 0.0);
    for k in (1..=m).rev() {
        // J_{k-1} = (2k/x) J_k - J_{k+1}
        let prev = 2.0 * k as f64 / ax * cur - next;
        next = cur;
        cur = prev;
        let km1 = k - 1;
        if km1 == 1 {
            j1 = cur;
        }
        if km1 == 0 {
            j0 = cur;
        } else if km1 % 2 == 0 {
            sum += 2.0 * cur;
        }
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            sum *= 1e-250;
            j1 *= 1e-250;
        }
    }
    sum += j0;
    let j1 = j1 / sum;
    (j0 / sum, if x < 0.0 { -j1 } else { j1 })
}

pub fn bessel_j0(x: f64) -> f64 {
    bessel_j0_j1(x).0
}

pub const MAX_J0_ZERO_INDEX: usize = 20;

/// The `k`-th positive zero of J0 (`k` from 1), Newton-refined from McMahon's expansion.
pub fn bessel_j0_zero(k: usize) -> Result<f64> {
    if k == 0 || k > MAX_J0_ZERO_INDEX {
        return Err(Error::InvalidParameter(format!(
            "J0 zero index must be in 1..={MAX_J0_ZERO_INDEX}, got {k}"
        )));
    }
    let beta = (k as f64 - 0.25) * std::f64::consts::PI;
    let b8 = 8.0 * beta;
    let mut x = beta + 1.0 / b8 - 124.0 / (3.0 * b8.powi(3)) + 120928.0 / (15.0 * b8.powi(5));
    for _ in 0..50 {
        let (j0, j1) = bessel_j0_j1(x);
        // d/dx J0 = -J1
        let dx = j0 / j1;
        x += dx;
        if dx.abs() <= 1e-15 * x {
            break;
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn bisect(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
        let mut fa = f(a);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            let fm = f(m);
            if fm.signum() == fa.signum() {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn lambert_examples() {
        assert_eq!(lambert_w0(0.0).unwrap(), 0.0);
        assert_eq!(lambert_w0(-1.0 / E).unwrap(), -1.0);
        let oracle = bisect(|w| w * w.exp() + 0.1, -1.0, 0.0);
        let w = lambert_w0(-0.1).unwrap();
        assert!((w - oracle).abs() < 1e-14);
        assert!((w - (-0.111833)).abs() < 5e-7);
        assert!(lambert_w0(-0.37).is_err());
        assert!((lambert_w0(E).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lambert_near_branch_point() {
        for d in [1e-15, 1e-12, 1e-9, 1e-6, 1e-3] {
            let x = -1.0 / E + d;
            let w = lambert_w0(x).unwrap();
            assert!(w >= -1.0);
            assert!((w * w.exp() - x).abs() <= 1e-13 * x.abs(), "d={d}");
        }
    }

    #[test]
    fn brent_examples() {
        let cfg = RootConfig::default();
        let r = find_root(|x| x * x - 2.0, Bracket::new(1.0, 2.0).unwrap(), &cfg).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-12);
        let r = find_root(
            |x| (2.0 - x) * (-x).exp(),
            Bracket::new(1.0, 3.0).unwrap(),
            &cfg,
        )
        .unwrap();
        assert!((r - 2.0).abs() < 1e-12);
        let e = find_root(|x| x + 1.0, Bracket::new(1.0, 2.0).unwrap(), &cfg).unwrap_err();
        assert!(matches!(e, Error::NoSignChange { .. }));
    }

    #[test]
    fn brent_reports_non_convergence() {
        let cfg = RootConfig::new(1e-300, 1e-300, 3).unwrap();
        let e = find_root(|x| x.powi(3) - 0.3, Bracket::new(0.0, 1.0).unwrap(), &cfg).unwrap_err();
        assert!(matches!(e, Error::NoConvergence { .. }));
    }

    #[test]
    fn bad_config_and_bracket() {
        assert!(RootConfig::new(0.0, 1e-14, 10).is_err());
        assert!(RootConfig::new(1e-12, 1e-14, 0).is_err());
        assert!(Bracket::new(2.0, 1.0).is_err());
    }

    #[test]
    fn newton_2d_examples() {
        let cfg = RootConfig::default();
        let s = solve_2d(|x, y| (x + y - 3.0, x - y - 1.0), (1.0, 1.0), &cfg).unwrap();
        assert!((s.x - 2.0).abs() < 1e-12 && (s.y - 1.0).abs() < 1e-12);
        let s = solve_2d(|x, y| (x * x + y * y - 25.0, x - y - 1.0), (3.0, 2.0), &cfg).unwrap();
        assert!((s.x - 4.0).abs() < 1e-12 && (s.y - 3.0).abs() < 1e-12);

        let oracle = bisect(|x| x.exp() + x - 1.0 - 0.0, -1.0, 0.9);
        let s = solve_2d(|x, y| (x.exp() - y, x + y - 1.0), (0.0, 1.0), &cfg).unwrap();
        // the only real root of e^x = 1 - x is x = 0
        assert!((s.x - oracle).abs() < 1e-10);
        assert!((s.y - (1.0 - s.x)).abs() < 1e-12);
    }

    #[test]
    fn newton_2d_singular() {
        let cfg = RootConfig::default();
        let e = solve_2d(
            |x, y| (x + y - 1.0, 2.0 * x + 2.0 * y - 3.0),
            (0.0, 0.0),
            &cfg,
        )
        .unwrap_err();
        assert!(matches!(e, Error::SingularJacobian { .. }));
    }

    /// Power series, accurate for small arguments only.
    fn j0_series(x: f64) -> f64 {
        let q = -0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..80 {
            term *= q / (k * k) as f64;
            sum += term;
        }
        sum
    }

    #[test]
    fn j0_zeros() {
        let expected = [2.404825558, 5.520078110, 8.653727913];
        for (k, want) in expected.iter().enumerate() {
            let z = bessel_j0_zero(k + 1).unwrap();
            assert!((z - want).abs() < 5e-10, "k={} z={z}", k + 1);
            assert!(j0_series(z).abs() < 1e-10);
        }
        assert!(bessel_j0_zero(0).is_err());
        assert!(bessel_j0_zero(21).is_err());
    }

    #[test]
    fn miller_matches_series() {
        for i in 1..100 {
            let x = i as f64 * 0.1;
            assert!((bessel_j0(x) - j0_series(x)).abs() < 1e-13, "x={x}");
        }
    }
}
