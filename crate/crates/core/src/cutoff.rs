//! The fixed smooth cutoff used by every "homogeneous for |ξ| ≥ 1" test function.

#[inline]
fn psi(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

/// Smooth step: 0 for `t ≤ 0`, 1 for `t ≥ 1`, `C^∞` in between.
#[inline]
pub fn smooth_step(t: f64) -> f64 {
    let a = psi(t);
    let b = psi(1.0 - t);
    if a + b == 0.0 {
        return if t >= 1.0 { 1.0 } else { 0.0 };
    }
    a / (a + b)
}

/// Derivative of [`smooth_step`].
pub fn smooth_step_derivative(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        return 0.0;
    }
    let a = psi(t);
    let b = psi(1.0 - t);
    let da = a / (t * t);
    let db = -b / ((1.0 - t) * (1.0 - t));
    (da * b - a * db) / ((a + b) * (a + b))
}

/// Radial cutoff `χ(r)`: 0 on `[0, 1/2]`, 1 on `[1, ∞)`.
#[inline]
pub fn chi(r: f64) -> f64 {
    smooth_step(2.0 * r - 1.0)
}

/// `χ'(r)`.
#[inline]
pub fn chi_derivative(r: f64) -> f64 {
    2.0 * smooth_step_derivative(2.0 * r - 1.0)
}
