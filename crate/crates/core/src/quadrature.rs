//! One-dimensional quadrature helpers used by the oracles.

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let n = order as f64;
    for k in 0..order.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(order, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(order, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[k] = -x;
        nodes[order - 1 - k] = x;
        weights[k] = w;
        weights[order - 1 - k] = w;
    }
    (nodes, weights)
}

fn legendre(order: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=order {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = order as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss–Legendre rule on `[a, b]` with `panels` equal panels.
pub fn gauss_legendre_composite(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    panels: usize,
    order: usize,
) -> f64 {
    let (x, w) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        let mut s = 0.0;
        for (xi, wi) in x.iter().zip(&w) {
            s += wi * f(mid + 0.5 * h * xi);
        }
        total += 0.5 * h * s;
    }
    total
}

/// Adaptive Simpson quadrature on `[a, b]`. The interval is first cut into
/// panels no wider than `max_panel` so narrow features are not stepped over.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, max_panel: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let panels = ((b - a) / max_panel).ceil().max(1.0) as usize;
    let h = (b - a) / panels as f64;
    let ptol = tol / panels as f64;
    (0..panels)
        .map(|p| {
            let lo = a + p as f64 * h;
            let hi = if p + 1 == panels { b } else { lo + h };
            let fa = f(lo);
            let fb = f(hi);
            let m = 0.5 * (lo + hi);
            let fm = f(m);
            let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
            simpson_step(f, lo, hi, fa, fm, fb, whole, ptol, 40)
        })
        .sum()
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
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
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(8);
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        // ∫ x^14 = 2/15, degree 2n-2 is exact
        let m: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((m - 2.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn simpson_finds_narrow_bump() {
        let v = adaptive_simpson(&|s: f64| s * (-s * s).exp(), 0.0, 80.0, 1e-13, 0.25);
        assert!((v - 0.5).abs() < 1e-12);
    }
}
