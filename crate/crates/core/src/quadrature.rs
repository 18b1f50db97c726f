//! Gauss–Legendre rules and panel decompositions of radial intervals.

use std::f64::consts::PI;

/// Nodes and weights of an `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess, refined by Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
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
        Self { nodes, weights }
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

    /// Integrate a real function over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.on_interval(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
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
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Geometric ladder of sample radii.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RadiusLadder {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Default for RadiusLadder {
    fn default() -> Self {
        Self {
            min: 4.0,
            max: 65536.0,
            count: 24,
        }
    }
}

impl RadiusLadder {
    pub fn new(min: f64, max: f64, count: usize) -> Self {
        Self { min, max, count }
    }

    /// The mirror ladder used near the origin: `[1/max, 1/min]`.
    pub fn default_at_zero() -> Self {
        Self {
            min: 1.0 / 65536.0,
            max: 0.25,
            count: 24,
        }
    }

    pub fn radii(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let ratio = (self.max / self.min).ln() / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.max
                } else {
                    self.min * (ratio * i as f64).exp()
                }
            })
            .collect()
    }

    pub fn validate(&self) -> crate::Result<()> {
        if !(self.min > 0.0 && self.max > self.min && self.count >= 2 && self.max.is_finite()) {
            return Err(crate::Error::InvalidInput(format!(
                "radius ladder needs 0 < min < max and at least two radii, got {self:?}"
            )));
        }
        Ok(())
    }
}

/// Panel edges for `[0, R_max]`: fine uniform panels on `[0, 1]` (where cutoffs live),
/// doubling panels up to the first ladder radius, then one panel per ladder gap.
pub fn radial_panel_edges(ladder: &[f64]) -> Vec<f64> {
    let mut edges: Vec<f64> = (0..=16).map(|i| i as f64 / 16.0).collect();
    edges.extend(ladder.iter().copied().filter(|&x| x > 0.0 && x < 1.0));
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    let first = ladder.first().copied().unwrap_or(1.0);
    let mut r = 1.0;
    while 2.0 * r < first {
        r *= 2.0;
        edges.push(r);
    }
    for &x in ladder {
        if x > *edges.last().unwrap() {
            // Keep panel ratios at most 2 so every panel stays well resolved.
            while x > 2.0 * edges.last().unwrap() {
                let next = 2.0 * edges.last().unwrap();
                edges.push(next);
            }
            edges.push(x);
        }
    }
    edges
}

/// Panel edges for `[a_min, 1]` used by half-line integrals near the origin.
pub fn zero_panel_edges(ladder: &[f64]) -> Vec<f64> {
    let mut edges: Vec<f64> = ladder.to_vec();
    let mut top = *edges.last().unwrap_or(&1.0);
    while top < 1.0 {
        top = (2.0 * top).min(1.0);
        edges.push(top);
    }
    let mut out: Vec<f64> = Vec::with_capacity(edges.len());
    for x in edges {
        if let Some(&prev) = out.last() {
            let mut prev = prev;
            while x > 2.0 * prev {
                prev *= 2.0;
                out.push(prev);
            }
        }
        out.push(x);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let rule = GaussLegendre::new(6);
        // Exact up to degree 11.
        let v = rule.integrate(0.0, 2.0, |x| x.powi(11));
        assert!((v - 2f64.powi(12) / 12.0).abs() < 1e-9);
        let s: f64 = rule.weights.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn gauss_legendre_on_smooth_function() {
        let rule = GaussLegendre::new(24);
        let v = rule.integrate(0.0, PI, f64::sin);
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn ladder_is_geometric_and_hits_endpoints() {
        let r = RadiusLadder::default().radii();
        assert_eq!(r.len(), 24);
        assert_eq!(r[0], 4.0);
        assert_eq!(r[23], 65536.0);
        let q = r[1] / r[0];
        for w in r.windows(2) {
            assert!((w[1] / w[0] - q).abs() < 1e-10);
        }
    }

    #[test]
    fn panel_edges_cover_ladder_with_bounded_ratio() {
        let ladder = RadiusLadder::new(256.0, 1e6, 10).radii();
        let edges = radial_panel_edges(&ladder);
        for x in &ladder {
            assert!(edges.iter().any(|e| e == x));
        }
        for w in edges.windows(2).skip(16) {
            assert!(w[1] / w[0] <= 2.0 + 1e-12);
        }
        let z = zero_panel_edges(&RadiusLadder::default_at_zero().radii());
        assert_eq!(*z.last().unwrap(), 1.0);
        for w in z.windows(2) {
            assert!(w[1] > w[0] && w[1] / w[0] <= 2.0 + 1e-12);
        }
    }
}
