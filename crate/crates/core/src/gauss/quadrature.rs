use std::collections::BinaryHeap;
use std::sync::OnceLock;

const ORDER: usize = 20;
/// Upper bound on the number of panels.
const MAX_PANELS: usize = 4096;
/// Errors below this are ignored; keeps subnormal integrands from forcing
/// endless subdivision.
const ABS_FLOOR: f64 = 1e-300;

/// Nodes and weights of the Gauss–Legendre rule on [-1, 1], found by Newton
/// iteration on the Legendre polynomial.
fn rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = ORDER;
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for j in 2..=n {
                    let jf = j as f64;
                    let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
        }
        out
    })
}

fn fixed<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    rule().iter().map(|&(x, w)| w * f(mid + half * x)).sum::<f64>() * half
}

struct Panel {
    a: f64,
    b: f64,
    /// Two-half estimate.
    value: f64,
    /// Fixed-rule estimates of the two halves.
    halves: (f64, f64),
    err: f64,
}

impl Panel {
    fn new<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, coarse: f64) -> Self {
        let m = 0.5 * (a + b);
        let halves = (fixed(f, a, m), fixed(f, m, b));
        let value = halves.0 + halves.1;
        Self {
            a,
            b,
            value,
            halves,
            err: (value - coarse).abs(),
        }
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other).is_eq()
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err).then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Globally adaptive Gauss–Legendre integration of `f` over `[a, b]`.
///
/// Each panel's error is estimated by comparing the 20-point rule on the
/// panel with the sum over its two halves. The panel with the largest error
/// is bisected until the summed error is at most `rel_tol` times the current
/// integral estimate.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    let mut heap = BinaryHeap::new();
    heap.push(Panel::new(f, a, b, fixed(f, a, b)));
    let (mut total, mut err) = (heap.peek().unwrap().value, heap.peek().unwrap().err);
    while heap.len() < MAX_PANELS && err > (rel_tol * total.abs()).max(ABS_FLOOR) {
        let worst = heap.pop().unwrap();
        let m = 0.5 * (worst.a + worst.b);
        let left = Panel::new(f, worst.a, m, worst.halves.0);
        let right = Panel::new(f, m, worst.b, worst.halves.1);
        total += left.value + right.value - worst.value;
        err += left.err + right.err - worst.err;
        heap.push(left);
        heap.push(right);
    }
    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    panels.iter().map(|p| p.value).sum()
}
