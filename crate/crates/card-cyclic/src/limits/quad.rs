//! Bracketed bisection and adaptive Simpson quadrature.
//!
//! The limit laws are piecewise smooth with one kink or jump at a known
//! location, and every map that needs inverting is strictly monotone, so
//! bisection plus forced subdivision at the known breakpoints is all the
//! numerics this crate requires.

/// Root of a continuous function with a sign change on `[lo, hi]`, bisected
/// until the bracket is below `tol`.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let flo = f(lo);
    if flo == 0.0 {
        return lo;
    }
    let fhi = f(hi);
    if fhi == 0.0 {
        return hi;
    }
    debug_assert!(
        flo.signum() != fhi.signum(),
        "no sign change on [{lo}, {hi}]: f(lo)={flo}, f(hi)={fhi}"
    );
    let falling = flo > 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo < tol || mid == lo || mid == hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == falling {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson integral of `f` over `[a, b]` to absolute tolerance
/// `tol`. A fixed 16-piece initial partition guards against false early
/// convergence on integrands with narrow sharp features.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    const PIECES: usize = 16;
    let h = (b - a) / PIECES as f64;
    let mut total = 0.0;
    for i in 0..PIECES {
        let lo = a + i as f64 * h;
        let hi = if i == PIECES - 1 { b } else { lo + h };
        let m = 0.5 * (lo + hi);
        let fa = f(lo);
        let fm = f(m);
        let fb = f(hi);
        let whole = simpson(fa, fm, fb, hi - lo);
        total += adaptive(&f, lo, hi, fa, fm, fb, whole, tol / PIECES as f64, 40);
    }
    total
}

/// Integrate with forced subdivision at the interior breakpoints in `cuts`
/// (values outside `(a, b)` are ignored).
pub fn integrate_with_cuts(f: impl Fn(f64) -> f64, a: f64, b: f64, cuts: &[f64], tol: f64) -> f64 {
    let mut points = vec![a];
    let mut interior: Vec<f64> = cuts.iter().copied().filter(|&c| c > a && c < b).collect();
    interior.sort_by(f64::total_cmp);
    interior.dedup();
    points.extend(interior);
    points.push(b);
    let pieces = points.len() - 1;
    points
        .windows(2)
        .map(|w| integrate(&f, w[0], w[1], tol / pieces as f64))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_square_roots() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14);
        assert!((r - 2.0f64.sqrt()).abs() < 1e-12);
        let r = bisect(|x| 2.0 - x * x, 0.0, 2.0, 1e-14);
        assert!((r - 2.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn integrate_polynomials_and_exponentials() {
        let v = integrate(|x| x * x, 0.0, 1.0, 1e-12);
        assert!((v - 1.0 / 3.0).abs() < 1e-11);
        let v = integrate(f64::exp, 0.0, 1.0, 1e-12);
        assert!((v - (std::f64::consts::E - 1.0)).abs() < 1e-11);
    }

    #[test]
    fn cuts_handle_jumps() {
        // step function with a jump at 1/3
        let f = |x: f64| if x < 1.0 / 3.0 { 1.0 } else { 2.0 };
        let v = integrate_with_cuts(f, 0.0, 1.0, &[1.0 / 3.0], 1e-10);
        assert!((v - 5.0 / 3.0).abs() < 1e-8);
    }
}
