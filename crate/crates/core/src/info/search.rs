//! One-dimensional searches used by the rate computations.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section minimization of a unimodal `f` on `[a, b]`, stopping once
/// the bracket is narrower than `rel_tol * max(1, |a| + |b|)`.
///
/// Returns the best point seen together with its value; the endpoints are
/// not evaluated.
pub(crate) fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, rel_tol: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..400 {
        if (b - a) <= rel_tol * (a.abs() + b.abs()).max(1.0) {
            break;
        }
        if fc <= fd {
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
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Golden-section maximization; see [`golden_min`].
pub(crate) fn golden_max(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> (f64, f64) {
    let (x, v) = golden_min(|x| -f(x), a, b, rel_tol);
    (x, -v)
}

/// Convex minimization over the closed interval `[lo, hi]`: an interior
/// search on `[lo + δ, hi − δ]`, `δ = 1e-12 (hi − lo)`, followed by an explicit
/// comparison against both endpoints.
pub(crate) fn convex_min_closed(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    let mut best = (lo, f(lo));
    if hi > lo {
        let delta = 1e-12 * (hi - lo);
        let inner = golden_min(&f, lo + delta, hi - delta, 1e-13);
        let end = (hi, f(hi));
        for cand in [inner, end] {
            if cand.1 < best.1 {
                best = cand;
            }
        }
    }
    best
}

/// Bisection on a non-decreasing `h` over `[lo, hi]`: shrinks the bracket
/// around the sign change and returns it.
pub(crate) fn bisect_increasing(h: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}
