//! Composite Gauss–Legendre quadrature on truncated real lines.

use std::f64::consts::PI;

/// Truncation and panel layout for integrals over the real line.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadSpec {
    /// Integrals are cut to `|s| ≤ truncation_radius`.
    pub truncation_radius: f64,
    /// Panels per half-line `[0, R]` (and `[−R, 0]`).
    pub panels: usize,
    /// Gauss–Legendre order per panel; at least 8.
    pub nodes_per_panel: usize,
}

impl QuadSpec {
    /// Layout for kernels decaying like `e^{−min(γ⁻,γ⁺)|s|}`: the envelope tail is
    /// below `1e-12` at the radius, and panels are no wider than `min(1, 1/γ)`.
    pub fn for_gaps(gamma_minus: f64, gamma_plus: f64) -> Self {
        let finite: Vec<f64> = [gamma_minus, gamma_plus]
            .into_iter()
            .filter(|g| g.is_finite())
            .collect();
        assert!(!finite.is_empty(), "at least one gap must be finite");
        let gmin = finite.iter().copied().fold(f64::INFINITY, f64::min);
        let gsum: f64 = finite.iter().sum();
        let radius = 12.0 * std::f64::consts::LN_10 / gmin;
        let width = 1.0f64.min(1.0 / gsum);
        Self {
            truncation_radius: radius,
            panels: (radius / width).ceil() as usize,
            nodes_per_panel: 16,
        }
    }

    pub fn with_radius(mut self, radius: f64) -> Self {
        let width = self.truncation_radius / self.panels as f64;
        self.truncation_radius = radius;
        self.panels = (radius / width).ceil().max(1.0) as usize;
        self
    }

    pub fn validate(&self) -> bool {
        self.truncation_radius > 0.0 && self.panels > 0 && self.nodes_per_panel >= 8
    }
}

/// Nodes and weights of the `m`-point Gauss–Legendre rule on `[−1, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m > 0);
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_m.
        let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(m, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if m == 0 { 1.0 } else { p1 };
    let d = m as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// A fixed Gauss–Legendre rule reused across panels.
#[derive(Debug, Clone)]
pub struct GaussRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(order: usize) -> Self {
        let (nodes, weights) = gauss_legendre(order);
        Self { nodes, weights }
    }

    /// Physical nodes and weights of `panels` equal panels covering `[a, b]`.
    pub fn composite(&self, a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
        let h = (b - a) / panels as f64;
        let mut out = Vec::with_capacity(panels * self.nodes.len());
        for p in 0..panels {
            let lo = a + p as f64 * h;
            let mid = lo + 0.5 * h;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                out.push((mid + 0.5 * h * x, 0.5 * h * w));
            }
        }
        out
    }

    pub fn integrate(&self, a: f64, b: f64, panels: usize, f: impl Fn(f64) -> f64) -> f64 {
        self.composite(a, b, panels)
            .into_iter()
            .map(|(x, w)| w * f(x))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        for m in [1usize, 2, 5, 8, 16, 24] {
            let rule = GaussRule::new(m);
            for deg in 0..(2 * m) {
                let exact = if deg % 2 == 0 {
                    2.0 / (deg as f64 + 1.0)
                } else {
                    0.0
                };
                let got = rule.integrate(-1.0, 1.0, 1, |x| x.powi(deg as i32));
                assert!((got - exact).abs() < 1e-13, "m={m} deg={deg} {got} {exact}");
            }
        }
    }

    #[test]
    fn composite_exponential() {
        let rule = GaussRule::new(8);
        let got = rule.integrate(0.0, 30.0, 30, |x| (-x).exp());
        assert!((got - (1.0 - (-30f64).exp())).abs() < 1e-14);
    }

    #[test]
    fn spec_for_gaps_meets_envelope() {
        let q = QuadSpec::for_gaps(0.5, 2.0);
        assert!((-0.5 * q.truncation_radius).exp() <= 1e-12 * 1.000_001);
        assert!(q.truncation_radius / q.panels as f64 <= 0.4 + 1e-12);
        assert!(q.validate());
        let one_sided = QuadSpec::for_gaps(1.0, f64::INFINITY);
        assert!(one_sided.validate());
    }
}
