//! Small numerical kernels: bracketing root solves, golden-section search,
//! log-spaced grids, and scale-aware residuals.
//!
//! Everything here is deterministic and allocation-light; the heavy lifting in
//! this crate is bookkeeping, not numerics, so plain bisection with a
//! derivative-free polish is both simpler and more robust than anything
//! adaptive.

use crate::tol;

/// Relative gap `|a - b| / max(1, |a|, |b|)`.
///
/// The `1` in the denominator makes the gap absolute near zero and relative
/// for large magnitudes, so residuals stay meaningful on paths that grow
/// geometrically.
#[inline]
pub fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / 1.0_f64.max(a.abs()).max(b.abs())
}

/// Outcome of a bracketing root solve.
#[derive(Debug, Clone, Copy)]
pub struct RootResult {
    pub root: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
}

/// Bisection on `[lo, hi]` for a function with `f(lo)` and `f(hi)` of opposite
/// sign, refined to relative width `rel_tol`, then polished with a few secant
/// steps clamped to the final bracket.
///
/// The secant polish costs two or three extra evaluations and moves the
/// iterate from the bisection tolerance to the float-limited root, which the
/// complementary-slackness checks downstream rely on.  Panics in debug builds
/// if the bracket does not straddle a sign change.
pub fn bisect_polished<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, rel_tol: f64) -> RootResult {
    let (mut lo, mut hi) = (lo, hi);
    let mut flo = f(lo);
    // An endpoint that is already an exact zero *is* the root; letting it
    // into the loop would break the sign test (0 * fmid is never negative)
    // and send the bracket to the wrong end.
    if flo == 0.0 {
        return RootResult { root: lo, bracket: (lo, lo), iterations: 1 };
    }
    let fhi = f(hi);
    if fhi == 0.0 {
        return RootResult { root: hi, bracket: (hi, hi), iterations: 2 };
    }
    let mut iterations = 2usize; // f(lo), f(hi)
    debug_assert!(flo * fhi < 0.0, "bisect_polished called without a sign change");

    while hi - lo > rel_tol * lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // interval exhausted at float resolution
        }
        let fmid = f(mid);
        iterations += 1;
        if fmid == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if flo * fmid < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fmid;
        }
        if iterations > 220 {
            break;
        }
    }

    let bracket = (lo, hi);
    let mut x0 = lo;
    let mut x1 = hi;
    let mut f0 = flo;
    let mut f1 = if hi == lo { flo } else { f(hi) };
    if hi != lo {
        iterations += 1;
        for _ in 0..3 {
            let denom = f1 - f0;
            if denom == 0.0 {
                break;
            }
            let mut x2 = x1 - f1 * (x1 - x0) / denom;
            if !x2.is_finite() || x2 < bracket.0 || x2 > bracket.1 {
                x2 = 0.5 * (bracket.0 + bracket.1);
            }
            if x2 == x1 || x2 == x0 {
                break;
            }
            let f2 = f(x2);
            iterations += 1;
            x0 = x1;
            f0 = f1;
            x1 = x2;
            f1 = f2;
            if f2 == 0.0 {
                break;
            }
        }
    }

    let root = if f1.abs() <= f0.abs() { x1 } else { x0 };
    RootResult { root, bracket, iterations }
}

/// Maximise a unimodal (concave) function on `[lo, hi]` by golden-section
/// search, refined to absolute width `x_tol`.  Returns (argmax, max).
pub fn golden_max<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, x_tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut guard = 0usize;
    while (b - a).abs() > x_tol && guard < 300 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        guard += 1;
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    if fx >= fc && fx >= fd {
        (x, fx)
    } else if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// `n` logarithmically spaced points on `[lo, hi]`, endpoints included.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let (llo, lhi) = (lo.ln(), hi.ln());
    let step = (lhi - llo) / (n - 1) as f64;
    (0..n)
        .map(|i| {
            // Pin both endpoints exactly; exp(ln x) round-trips with error.
            if i == 0 {
                lo
            } else if i == n - 1 {
                hi
            } else {
                (llo + step * i as f64).exp()
            }
        })
        .collect()
}

/// Least-squares slope of `ys` against `xs` (simple linear regression).
/// Returns 0.0 when fewer than two points or when `xs` has no variance.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return 0.0;
    }
    let nf = n as f64;
    let mx = xs[..n].iter().sum::<f64>() / nf;
    let my = ys[..n].iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for i in 0..n {
        let dx = xs[i] - mx;
        sxx += dx * dx;
        sxy += dx * (ys[i] - my);
    }
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Expand a trial bracket `[lo, hi]` downward in `lo` by repeated scaling
/// until `f` changes sign or `max_steps` is exhausted.  Returns the bracket
/// `(lo, f(lo))` of the first sign change, if any.
pub fn expand_down<F: FnMut(f64) -> f64>(
    mut f: F,
    mut lo: f64,
    want_negative: bool,
    factor: f64,
    max_steps: usize,
) -> Option<(f64, f64)> {
    debug_assert!(factor > 0.0 && factor < 1.0);
    for _ in 0..max_steps {
        let flo = f(lo);
        if flo.is_finite() && ((want_negative && flo < 0.0) || (!want_negative && flo > 0.0)) {
            return Some((lo, flo));
        }
        lo *= factor;
    }
    None
}

/// Default relative bisection tolerance, re-exported for callers that report it.
pub const DEFAULT_REL_TOL: f64 = tol::BISECT_REL;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_square_root() {
        let r = bisect_polished(|x| x * x - 2.0, 0.0, 2.0, 1e-12);
        assert!((r.root - std::f64::consts::SQRT_2).abs() < 1e-14);
        assert!(r.iterations < 80);
    }

    #[test]
    fn bisect_polish_reaches_float_limit() {
        // Root of a well-conditioned cubic; polish should do better than the
        // raw 1e-12 relative bracket.
        let r = bisect_polished(|x| x * x * x - 8.0, 1.0, 3.0, 1e-12);
        assert!((r.root - 2.0).abs() < 1e-15);
    }

    #[test]
    fn golden_max_quadratic() {
        let (x, fx) = golden_max(|x| -(x - 0.3) * (x - 0.3) + 1.0, -1.0, 2.0, 1e-12);
        // A quadratic is flat to machine precision within ~sqrt(eps) of its
        // peak, so the argmax is only locatable to that width.
        assert!((x - 0.3).abs() < 1e-7);
        assert!((fx - 1.0).abs() < 1e-15);
    }

    #[test]
    fn log_grid_endpoints_and_monotone() {
        let g = log_spaced(1e-6, 1e6, 512);
        assert_eq!(g.len(), 512);
        assert_eq!(g[0], 1e-6);
        assert_eq!(g[511], 1e6);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn slope_of_exact_line() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 0.25 * x).collect();
        assert!((ls_slope(&xs, &ys) + 0.25).abs() < 1e-14);
    }

    #[test]
    fn rel_gap_absolute_near_zero_relative_when_large() {
        assert_eq!(rel_gap(0.0, 1e-14), 1e-14);
        // Denominator is the larger operand, not a round power of ten.
        assert!((rel_gap(1e8, 1e8 + 1.0) - 1.0 / (1e8 + 1.0)).abs() < 1e-22);
    }
}
