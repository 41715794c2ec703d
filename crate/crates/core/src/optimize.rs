//! One-dimensional derivative-free maximization.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a maximum of `f` on `[a, b]`, stopping when the
/// bracket is narrower than `tol`. Returns the best abscissa seen and its
/// value; the bracket endpoints themselves are never evaluated.
pub fn golden_section_max<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    if a > b {
        std::mem::swap(&mut a, &mut b);
    }
    let tol = tol.max(f64::EPSILON * (a.abs() + b.abs()).max(1.0));
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (b - a).abs() > tol {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Scans `f` on `points` evenly spaced nodes of `[a, b]` and refines the best
/// node by golden section inside its neighbouring cells. Ties keep the lowest
/// node.
pub fn grid_then_golden_max<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, points: usize, tol: f64) -> (f64, f64) {
    let points = points.max(3);
    let h = (b - a) / (points - 1) as f64;
    let mut best = (a, f64::NEG_INFINITY);
    let mut best_idx = 0;
    for i in 0..points {
        let x = a + h * i as f64;
        let v = f(x);
        if v > best.1 {
            best = (x, v);
            best_idx = i;
        }
    }
    let lo = a + h * best_idx.saturating_sub(1) as f64;
    let hi = a + h * (best_idx + 1).min(points - 1) as f64;
    let refined = golden_section_max(&mut f, lo, hi, tol);
    if refined.1 >= best.1 {
        refined
    } else {
        best
    }
}
