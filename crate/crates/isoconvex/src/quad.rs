//! Gauss-Legendre nodes and tensorized quadrature helpers.

/// Nodes and weights on [-1, 1], computed by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integrates `f` over `[a, b]` with an `n`-node rule.
pub fn integrate_1d(a: f64, b: f64, n: usize, mut f: impl FnMut(f64) -> f64) -> f64 {
    let (nodes, weights) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = 0.0;
    for (x, w) in nodes.iter().zip(&weights) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Tensorized rule over `[0,1]^2` with per-axis node count `n`, where the
/// inner integration bounds may depend on the outer variable:
/// integral over s in [0,1], z in [zlo(s), zhi(s)] of f(s, z).
pub fn integrate_2d_nested(
    n: usize,
    zlo: impl Fn(f64) -> f64,
    zhi: impl Fn(f64) -> f64,
    f: impl Fn(f64, f64) -> f64,
) -> f64 {
    let (nodes, weights) = gauss_legendre(n);
    let mut acc = 0.0;
    for (xs, ws) in nodes.iter().zip(&weights) {
        let s = 0.5 * (xs + 1.0);
        let (lo, hi) = (zlo(s), zhi(s));
        if hi <= lo {
            continue;
        }
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (lo + hi);
        let mut inner = 0.0;
        for (xz, wz) in nodes.iter().zip(&weights) {
            inner += wz * f(s, mid + half * xz);
        }
        acc += ws * 0.5 * half * inner;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_integrate_high_degree_polynomials_exactly() {
        // 64 nodes are exact through degree 127.
        let val = integrate_1d(0.0, 1.0, 64, |x| x.powi(20));
        assert!((val - 1.0 / 21.0).abs() < 1e-15);
        let val = integrate_1d(-1.0, 2.0, 8, |x| 3.0 * x * x - x + 1.0);
        let exact = (8.0 + 1.0) - (4.0 - 1.0) / 2.0 + 3.0; // x^3 - x^2/2 + x over [-1,2]
        assert!((val - exact).abs() < 1e-13);
    }

    #[test]
    fn weights_sum_to_interval_length() {
        for n in [2, 5, 16, 64] {
            let (_, w) = gauss_legendre(n);
            let sum: f64 = w.iter().sum();
            assert!((sum - 2.0).abs() < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn nested_rule_recovers_triangle_area() {
        // Area between z = s^2 and z = 1 over s in [0,1]: 2/3.
        let val = integrate_2d_nested(32, |s| s * s, |_| 1.0, |_, _| 1.0);
        assert!((val - 2.0 / 3.0).abs() < 1e-14);
    }
}
