//! Bracketed one-dimensional solvers.

/// Bisection on a sign change of `f` over `[a, b]`.
///
/// Stops when `|f| ≤ ftol(x)` or the bracket collapses to adjacent floats.
pub fn bisect<F, T>(f: F, mut a: f64, mut b: f64, ftol: T) -> f64
where
    F: Fn(f64) -> f64,
    T: Fn(f64) -> f64,
{
    let mut fa = f(a);
    if fa == 0.0 {
        return a;
    }
    let fb = f(b);
    if fb == 0.0 {
        return b;
    }
    for _ in 0..400 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        if fm.abs() <= ftol(mid) {
            return mid;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// Last point where `pred` holds, given `pred(a)` and `!pred(b)`.
pub fn boundary<P: Fn(f64) -> bool>(pred: P, mut a: f64, mut b: f64) -> f64 {
    for _ in 0..400 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if pred(mid) {
            a = mid;
        } else {
            b = mid;
        }
    }
    a
}

/// Golden-section search for a maximum of a unimodal `f` on `[a, b]`.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, rel: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= rel * (a.abs() + b.abs()).max(1e-300) {
            break;
        }
        if fc >= fd {
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
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_cube_root() {
        let x = bisect(|x| x * x * x - 2.0, 0.0, 2.0, |_| 1e-14);
        assert!((x - 2f64.cbrt()).abs() < 1e-13);
    }

    #[test]
    fn boundary_of_interval() {
        let x = boundary(|x| x <= 0.3, 0.0, 1.0);
        assert!((x - 0.3).abs() < 1e-15);
    }

    #[test]
    fn golden_on_parabola() {
        let (x, v) = golden_max(|x| -(x - 0.7) * (x - 0.7), 0.0, 2.0, 1e-12);
        assert!((x - 0.7).abs() < 1e-6);
        assert!(v <= 0.0 && v > -1e-12);
    }
}
