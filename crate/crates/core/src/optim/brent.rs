/// Maximizes `f` on `[lo, hi]` by golden-section search with parabolic
/// steps, then compares the result with both endpoints. Returns
/// `(x_best, f_best)`. Every evaluation lies in `[lo, hi]`.
pub fn brent_max<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    assert!(lo < hi, "brent_max needs lo < hi");
    let golden = 0.5 * (3.0 - 5f64.sqrt());
    let eps = f64::EPSILON.sqrt();
    let tol = tol.max(0.0);
    let mut g = |x: f64| {
        let v = f(x.clamp(lo, hi));
        if v.is_nan() {
            f64::INFINITY
        } else {
            -v
        }
    };

    let (mut a, mut b) = (lo, hi);
    let mut x = a + golden * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = g(x);
    let (mut fw, mut fv) = (fx, fx);
    let (mut d, mut e) = (0.0f64, 0.0f64);

    for _ in 0..500 {
        let m = 0.5 * (a + b);
        let tol1 = eps * x.abs() + tol / 3.0;
        let tol2 = 2.0 * tol1;
        if (x - m).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden_step = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let e_prev = e;
            if p.abs() < (0.5 * q * e_prev).abs() && p > q * (a - x) && p < q * (b - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if x < m { tol1 } else { -tol1 };
                }
                golden_step = false;
            }
        }
        if golden_step {
            e = if x < m { b - x } else { a - x };
            d = golden * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else if d > 0.0 {
            x + tol1
        } else {
            x - tol1
        };
        let fu = g(u);
        if fu <= fx {
            if u < x {
                b = x;
            } else {
                a = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }

    let mut best = (x, fx);
    for end in [lo, hi] {
        let fe = g(end);
        if fe < best.1 {
            best = (end, fe);
        }
    }
    (best.0, -best.1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_interior_maximum() {
        let (x, fx) = brent_max(|x| -(x - 0.2) * (x - 0.2), -0.95, 0.95, 1e-10);
        assert!((x - 0.2).abs() < 1e-8);
        assert!(fx.abs() < 1e-15);
    }

    #[test]
    fn non_quadratic_maximum() {
        let (x, _) = brent_max(|x: f64| x.sin(), 0.0, 3.0, 1e-10);
        assert!((x - std::f64::consts::FRAC_PI_2).abs() < 1e-7);
    }

    #[test]
    fn monotone_returns_endpoint() {
        assert_eq!(brent_max(|x| x, -1.0, 2.0, 1e-8).0, 2.0);
        assert_eq!(brent_max(|x| -x, -1.0, 2.0, 1e-8).0, -1.0);
    }

    #[test]
    fn stays_inside_interval() {
        let mut seen = Vec::new();
        brent_max(
            |x| {
                seen.push(x);
                -(x - 5.0).powi(2)
            },
            -0.9987,
            0.9987,
            1e-10,
        );
        assert!(seen.iter().all(|&x| (-0.9987..=0.9987).contains(&x)));
    }
}
