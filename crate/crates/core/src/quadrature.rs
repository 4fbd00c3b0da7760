//! Quadrature rules and deterministic summation.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

/// Gauss–Legendre rule on `[-1, 1]`, nodes in increasing order.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = libm::cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
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
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped affinely onto `[a, b]`.
    pub fn on_interval(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let terms: Vec<f64> = self.on_interval(a, b).map(|(x, w)| w * f(x)).collect();
        pairwise_sum(&terms)
    }

    /// Spectral differentiation matrix for polynomial interpolation on the
    /// nodes, row-major `n × n`, derivative with respect to the `[-1, 1]`
    /// variable.
    pub fn differentiation_matrix(&self) -> Vec<f64> {
        let n = self.len();
        // Barycentric weights of Gauss points: (-1)^j sqrt((1 - x_j²) w_j).
        let bary: Vec<f64> = (0..n)
            .map(|j| {
                let s = if j % 2 == 0 { 1.0 } else { -1.0 };
                s * libm::sqrt((1.0 - self.nodes[j] * self.nodes[j]) * self.weights[j])
            })
            .collect();
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            let mut diag = 0.0;
            for j in 0..n {
                if i != j {
                    let v = (bary[j] / bary[i]) / (self.nodes[i] - self.nodes[j]);
                    d[i * n + j] = v;
                    diag -= v;
                }
            }
            d[i * n + i] = diag;
        }
        d
    }
}

/// Legendre polynomial `P_n(x)` and its derivative.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Pairwise (cascade) summation in index order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if values.len() <= BLOCK {
        let mut s = 0.0;
        for &v in values {
            s += v;
        }
        s
    } else {
        let mid = values.len() / 2;
        pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
    }
}

/// Periodic trapezoid rule: `h Σ f(a + k h)` for `k = 0..n`, `h = period / n`.
pub fn periodic_trapezoid<F: FnMut(f64) -> f64>(a: f64, period: f64, n: usize, mut f: F) -> f64 {
    let h = period / n as f64;
    let terms: Vec<f64> = (0..n).map(|k| f(a + k as f64 * h)).collect();
    h * pairwise_sum(&terms)
}

/// Observed convergence order between consecutive residuals of a doubling
/// sequence, `log2(e_k / e_{k+1})`.
pub fn richardson_orders(residuals: &[f64]) -> Vec<f64> {
    residuals
        .windows(2)
        .map(|w| libm::log2(w[0].abs() / w[1].abs()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in [1usize, 2, 5, 16, 64, 128] {
            let gl = GaussLegendre::new(n);
            let total: f64 = gl.weights.iter().sum();
            assert!((total - 2.0).abs() < 1e-13, "n={n} weights sum {total}");
            let deg = 2 * n - 1;
            let exact = if deg % 2 == 1 {
                0.0
            } else {
                2.0 / (deg as f64 + 1.0)
            };
            let got = gl.integrate(-1.0, 1.0, |x| libm::pow(x, deg as f64));
            assert!((got - exact).abs() < 1e-12, "n={n}");
            let even = gl.integrate(-1.0, 1.0, |x| libm::pow(x, (deg - 1) as f64));
            assert!((even - 2.0 / deg as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn gauss_legendre_nodes_are_sorted_and_symmetric() {
        let gl = GaussLegendre::new(33);
        for w in gl.nodes.windows(2) {
            assert!(w[0] < w[1]);
        }
        for i in 0..33 {
            assert!((gl.nodes[i] + gl.nodes[32 - i]).abs() < 1e-15);
        }
    }

    #[test]
    fn differentiation_matrix_is_exact_on_polynomials() {
        let gl = GaussLegendre::new(24);
        let d = gl.differentiation_matrix();
        let f: Vec<f64> = gl
            .nodes
            .iter()
            .map(|&x| libm::pow(x, 7.0) - 3.0 * x * x)
            .collect();
        for i in 0..24 {
            let x = gl.nodes[i];
            let df: f64 = (0..24).map(|j| d[i * 24 + j] * f[j]).sum();
            let exact = 7.0 * libm::pow(x, 6.0) - 6.0 * x;
            assert!((df - exact).abs() < 1e-11, "{df} vs {exact}");
        }
    }

    #[test]
    fn differentiation_matrix_large_rule_is_accurate_on_smooth_data() {
        let gl = GaussLegendre::new(128);
        let d = gl.differentiation_matrix();
        let f: Vec<f64> = gl.nodes.iter().map(|&x| libm::sin(2.0 * x)).collect();
        let mut worst: f64 = 0.0;
        for i in 0..128 {
            let df: f64 = (0..128).map(|j| d[i * 128 + j] * f[j]).sum();
            worst = worst.max((df - 2.0 * libm::cos(2.0 * gl.nodes[i])).abs());
        }
        assert!(worst < 1e-9, "worst {worst}");
    }

    #[test]
    fn trapezoid_is_spectral_on_periodic_data() {
        // ∫_0^{2π} e^{cos t} dt = 2π I_0(1)
        let exact = 2.0 * PI * 1.266_065_877_752_008_4;
        let got = periodic_trapezoid(0.0, 2.0 * PI, 24, |t| libm::exp(libm::cos(t)));
        assert!((got - exact).abs() < 1e-13);
    }

    #[test]
    fn richardson_order_of_quadratic_sequence() {
        let orders = richardson_orders(&[1e-2, 2.5e-3, 6.25e-4]);
        for o in orders {
            assert!((o - 2.0).abs() < 1e-12);
        }
    }
}
