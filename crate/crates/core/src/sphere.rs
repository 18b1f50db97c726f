//! Product quadrature rules on spheres `S^d ⊂ ℝ^{d+1}`.
//!
//! `S^0` is the two-point set `{±1}` with counting measure. `S^1` uses the
//! trapezoid rule in the angle. For `d ≥ 2` hyperspherical coordinates are
//! used: a polar angle carrying the weight `sin θ` is integrated by
//! Gauss–Legendre in `cos θ`, higher powers of `sin` by Gauss–Legendre in
//! the angle itself, and the azimuth by the trapezoid rule.

use std::f64::consts::PI;

use crate::quadrature::GaussLegendre;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SphereResolution {
    /// Nodes per polar angle.
    pub polar: usize,
    /// Nodes in the azimuth.
    pub azimuth: usize,
}

impl Default for SphereResolution {
    fn default() -> Self {
        Self {
            polar: 24,
            azimuth: 48,
        }
    }
}

impl SphereResolution {
    pub fn new(polar: usize, azimuth: usize) -> Self {
        Self { polar, azimuth }
    }

    /// Roughly half the resolution, used for the refinement check.
    pub fn coarser(&self) -> Self {
        Self {
            polar: (self.polar / 2).max(2),
            azimuth: (self.azimuth / 2).max(4),
        }
    }
}

/// Unit vectors with quadrature weights for the round measure on `S^d`.
#[derive(Debug, Clone)]
pub struct SphereRule {
    pub sphere_dim: usize,
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    pub fn new(sphere_dim: usize, res: SphereResolution) -> Self {
        let (points, weights) = match sphere_dim {
            0 => (vec![vec![1.0], vec![-1.0]], vec![1.0, 1.0]),
            1 => {
                let n = res.azimuth.max(1);
                let h = 2.0 * PI / n as f64;
                let pts = (0..n)
                    .map(|i| {
                        let t = h * i as f64;
                        vec![t.cos(), t.sin()]
                    })
                    .collect();
                (pts, vec![h; n])
            }
            d => {
                // Recursive build: x = (cos θ, sin θ · y), y ∈ S^{d-1}, weight sin^{d-1} θ.
                let lower = SphereRule::new(d - 1, res);
                let gl = GaussLegendre::new(res.polar.max(1));
                let mut pts = Vec::new();
                let mut wts = Vec::new();
                let polar: Vec<(f64, f64, f64)> = if d - 1 == 1 {
                    gl.on_interval(-1.0, 1.0)
                        .map(|(c, w)| (c, (1.0 - c * c).max(0.0).sqrt(), w))
                        .collect()
                } else {
                    gl.on_interval(0.0, PI)
                        .map(|(t, w)| (t.cos(), t.sin(), w * t.sin().powi((d - 1) as i32)))
                        .collect()
                };
                for &(c, s, w) in &polar {
                    for (y, wy) in lower.points.iter().zip(&lower.weights) {
                        let mut x = Vec::with_capacity(d + 1);
                        x.push(c);
                        x.extend(y.iter().map(|v| s * v));
                        pts.push(x);
                        wts.push(w * wy);
                    }
                }
                (pts, wts)
            }
        };
        Self {
            sphere_dim,
            points,
            weights,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn ambient_dim(&self) -> usize {
        self.sphere_dim + 1
    }
}

/// Exact volume of the unit sphere `S^d`.
pub fn sphere_volume(d: usize) -> f64 {
    let n = (d + 1) as f64;
    2.0 * PI.powf(n / 2.0) / statrs::function::gamma::gamma(n / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn volumes_of_low_dimensional_spheres() {
        for d in 0..=4 {
            let rule = SphereRule::new(d, SphereResolution::new(12, 24));
            let v: f64 = rule.weights.iter().sum();
            assert!((v - sphere_volume(d)).abs() < 1e-10, "d = {d}: {v}");
        }
        assert!((sphere_volume(1) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_volume(3) - 2.0 * PI * PI).abs() < 1e-13);
    }

    #[test]
    fn points_are_unit_vectors() {
        let rule = SphereRule::new(3, SphereResolution::new(6, 8));
        for p in &rule.points {
            let n: f64 = p.iter().map(|x| x * x).sum();
            assert!((n - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn second_moments_on_s2() {
        let rule = SphereRule::new(2, SphereResolution::default());
        for j in 0..3 {
            let m: f64 = rule
                .points
                .iter()
                .zip(&rule.weights)
                .map(|(p, w)| w * p[j] * p[j])
                .sum();
            assert!((m - 4.0 * PI / 3.0).abs() < 1e-13);
        }
    }
}
