//! Bracketed root finding for increasing concave scalar functions.
//!
//! For such a function the Newton step taken from the left end of a bracket
//! never overshoots the root, and the secant through both ends never
//! undershoots it, so every iterate tightens one side of the bracket. The
//! computed sign of each trial value decides which side moves, which keeps
//! the bracket honest under roundoff; bisection takes over whenever the
//! interval fails to halve.

/// Closed interval `[lo, hi]` known to contain the root.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// `eval` returns `(f(p), f'(p))`; `f_lo < 0 < f_hi` is expected on entry.
#[cfg(test)]
pub(crate) fn concave_increasing_root(
    eval: impl Fn(f64) -> (f64, f64),
    lo: f64,
    hi: f64,
    rel_tol: f64,
    max_iter: usize,
) -> Bracket {
    let at_lo = eval(lo);
    let at_hi = eval(hi);
    concave_increasing_root_from(eval, (lo, at_lo), (hi, at_hi), rel_tol, max_iter)
}

/// [`concave_increasing_root`] with the endpoint values `(x, (f, f'))`
/// already known.
pub(crate) fn concave_increasing_root_from(
    eval: impl Fn(f64) -> (f64, f64),
    (mut lo, (mut f_lo, mut d_lo)): (f64, (f64, f64)),
    (mut hi, (mut f_hi, _)): (f64, (f64, f64)),
    rel_tol: f64,
    max_iter: usize,
) -> Bracket {
    if f_lo >= 0.0 {
        return Bracket {
            lo,
            hi: lo,
            iterations: 0,
            converged: true,
        };
    }
    if f_hi <= 0.0 {
        return Bracket {
            lo: hi,
            hi,
            iterations: 0,
            converged: f_hi == 0.0,
        };
    }
    for iteration in 1..=max_iter {
        let width = hi - lo;
        if width <= rel_tol * hi.abs() {
            return Bracket {
                lo,
                hi,
                iterations: iteration - 1,
                converged: true,
            };
        }
        let newton = if d_lo.is_finite() && d_lo > 0.0 {
            lo - f_lo / d_lo
        } else {
            f64::NAN
        };
        let lo_before = lo;
        for probe in 0..2 {
            let x = if probe == 0 {
                newton
            } else if lo > lo_before && lo - lo_before <= rel_tol * hi.abs() {
                // Newton has stalled just below the root: a nudge by half
                // the tolerance should land above it and close the bracket.
                lo + 0.5 * rel_tol * hi.abs()
            } else {
                lo - f_lo * (hi - lo) / (f_hi - f_lo)
            };
            if !(x > lo && x < hi) {
                continue;
            }
            let (fx, dx) = eval(x);
            if fx == 0.0 {
                return Bracket {
                    lo: x,
                    hi: x,
                    iterations: iteration,
                    converged: true,
                };
            }
            if fx < 0.0 {
                lo = x;
                f_lo = fx;
                d_lo = dx;
            } else {
                hi = x;
                f_hi = fx;
            }
        }
        if hi - lo > 0.5 * width {
            let mid = 0.5 * (lo + hi);
            if !(mid > lo && mid < hi) {
                // Adjacent floating-point numbers: nothing left to refine.
                return Bracket {
                    lo,
                    hi,
                    iterations: iteration,
                    converged: true,
                };
            }
            let (fm, dm) = eval(mid);
            if fm == 0.0 {
                return Bracket {
                    lo: mid,
                    hi: mid,
                    iterations: iteration,
                    converged: true,
                };
            }
            if fm < 0.0 {
                lo = mid;
                f_lo = fm;
                d_lo = dm;
            } else {
                hi = mid;
                f_hi = fm;
            }
        }
    }
    Bracket {
        lo,
        hi,
        iterations: max_iter,
        converged: hi - lo <= rel_tol * hi.abs(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_root_of_two() {
        let b = concave_increasing_root(|x| (2.0_f64.sqrt() * x.sqrt() - 2.0, 1.0 / (2.0 * x).sqrt()), 0.0, 10.0, 1e-15, 200);
        assert!(b.converged);
        assert!(b.lo <= 2.0 && b.hi >= 2.0 - 1e-15);
        assert!((b.hi - 2.0).abs() < 1e-14);
    }

    #[test]
    fn brackets_always_contain_root() {
        // Concave increasing cubic-root shaped function with root at 3.
        let f = |x: f64| (x.cbrt() - 3.0_f64.cbrt(), 1.0 / (3.0 * x.cbrt() * x.cbrt()));
        let b = concave_increasing_root(f, 1e-3, 1e6, 1e-14, 200);
        assert!(b.converged);
        assert!(b.lo <= 3.0 + 1e-13 && b.hi >= 3.0 - 1e-13);
    }

    #[test]
    fn endpoint_roots() {
        let b = concave_increasing_root(|x| (x - 1.0, 1.0), 1.0, 2.0, 1e-14, 10);
        assert_eq!((b.lo, b.hi), (1.0, 1.0));
        let b = concave_increasing_root(|x| (x - 2.0, 1.0), 1.0, 2.0, 1e-14, 10);
        assert_eq!((b.lo, b.hi), (2.0, 2.0));
    }
}
