//! One-dimensional optimizers used by the empirical Bayes fit.

/// Golden-section ratio `(3 - sqrt 5) / 2`.
const CGOLD: f64 = 0.381_966_011_250_105_1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
}

/// Brent's parabolic/golden-section minimizer on `[lo, hi]`.
///
/// Stops once the bracket is narrower than `2 * tol` around the best point
/// (plus a small relative term).
pub fn brent<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    tol: f64,
    max_iter: usize,
) -> Minimum {
    let (mut a, mut b) = if lo < hi { (lo, hi) } else { (hi, lo) };
    let mut evaluations = 0;
    let mut eval = |x: f64| {
        evaluations += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut x = a + CGOLD * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = eval(x);
    let (mut fw, mut fv) = (fx, fx);
    let (mut d, mut e) = (0.0f64, 0.0f64);

    for _ in 0..max_iter {
        let xm = 0.5 * (a + b);
        let tol1 = tol + 1e-12 * x.abs();
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let etemp = e;
            e = d;
            if p.abs() < (0.5 * q * etemp).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = tol1.copysign(xm - x);
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { a - x } else { b - x };
            d = CGOLD * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else {
            x + tol1.copysign(d)
        };
        let fu = eval(u);
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            (v, fv) = (w, fw);
            (w, fw) = (x, fx);
            (x, fx) = (u, fu);
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                (v, fv) = (w, fw);
                (w, fw) = (u, fu);
            } else if fu <= fv || v == x || v == w {
                (v, fv) = (u, fu);
            }
        }
    }
    Minimum {
        x,
        value: fx,
        evaluations,
    }
}

/// Root of a decreasing function on `[lo, hi]` by safeguarded Newton.
///
/// `fg` returns the value and derivative. Returns `lo` if `f(lo) <= 0` and
/// `hi` if `f(hi) >= 0`.
pub fn decreasing_root<F: FnMut(f64) -> (f64, f64)>(mut fg: F, lo: f64, hi: f64, tol: f64) -> f64 {
    let (flo, _) = fg(lo);
    if flo <= 0.0 {
        return lo;
    }
    let (fhi, _) = fg(hi);
    if fhi >= 0.0 {
        return hi;
    }
    let (mut a, mut b) = (lo, hi);
    let mut x = 0.5 * (a + b);
    for _ in 0..200 {
        let (fx, dfx) = fg(x);
        if fx > 0.0 {
            a = x;
        } else {
            b = x;
        }
        let newton = x - fx / dfx;
        let next = if dfx < 0.0 && newton > a && newton < b {
            newton
        } else {
            0.5 * (a + b)
        };
        if (next - x).abs() <= tol * (1.0 + x.abs()) || b - a <= tol {
            return next;
        }
        x = next;
    }
    x
}
