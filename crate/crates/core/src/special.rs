//! Special functions: Hurwitz zeta by Euler–Maclaurin summation.

/// Even-index Bernoulli numbers `B_2, B_4, …, B_30`.
const BERNOULLI_EVEN: [f64; 15] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
];

/// Hurwitz zeta `ζ(s, q) = Σ_{n≥0} (n+q)^{-s}` for real `s ≠ 1`, `q > 0`,
/// continued analytically to `s < 1` through the Euler–Maclaurin formula.
pub fn hurwitz_zeta(s: f64, q: f64) -> f64 {
    assert!(q > 0.0, "hurwitz_zeta requires q > 0");
    assert!(s != 1.0, "hurwitz_zeta has a pole at s = 1");
    // Shift q past max(s, 0) + 30 so the asymptotic series converges fast.
    let shift_to = s.abs() + 30.0;
    let mut head = 0.0;
    let mut x = q;
    while x < shift_to {
        head += x.powf(-s);
        x += 1.0;
    }
    let mut tail = x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s);
    // rising = s (s+1) … (s+2j-2); fact = (2j)!
    let mut rising = s;
    let mut fact = 2.0;
    let mut xpow = x.powf(-s - 1.0);
    for (j, b) in BERNOULLI_EVEN.iter().enumerate() {
        let term = b / fact * rising * xpow;
        tail += term;
        if term.abs() <= 1e-18 * tail.abs().max(head.abs()) || rising == 0.0 {
            break;
        }
        let m = 2.0 * (j as f64 + 1.0);
        rising *= (s + m - 1.0) * (s + m);
        fact *= (m + 1.0) * (m + 2.0);
        xpow /= x * x;
    }
    head + tail
}

/// `Σ_{λ ∈ a+ℤ, λ > cut} λ^{-s}` and `Σ_{λ ∈ a+ℤ, λ < -cut} λ^{-s}` for integer `s ≥ 2`.
pub fn lattice_tails(s: i32, a: f64, cut: f64) -> (f64, f64) {
    // Smallest positive lattice point above cut, smallest |λ| below -cut.
    let q_pos = a + (cut - a).floor() + 1.0;
    let q_neg = -a + (cut + a).floor() + 1.0;
    let pos = hurwitz_zeta(s as f64, q_pos);
    let neg = hurwitz_zeta(s as f64, q_neg);
    let sign = if s % 2 == 0 { 1.0 } else { -1.0 };
    (pos, sign * neg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn brute(s: f64, q: f64) -> f64 {
        // Partial sum plus integral tail with trapezoid correction.
        let n = 200_000;
        let mut acc = 0.0;
        for k in (0..n).rev() {
            acc += (q + k as f64).powf(-s);
        }
        let x = q + n as f64;
        acc + x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s)
    }

    #[test]
    fn riemann_values() {
        assert!((hurwitz_zeta(2.0, 1.0) - PI * PI / 6.0).abs() < 1e-15);
        assert!((hurwitz_zeta(4.0, 1.0) - PI.powi(4) / 90.0).abs() < 1e-15);
        assert!((hurwitz_zeta(0.0, 1.0) + 0.5).abs() < 1e-15);
        assert!((hurwitz_zeta(-1.0, 1.0) + 1.0 / 12.0).abs() < 1e-12);
    }

    #[test]
    fn matches_brute_force() {
        for &(s, q) in &[(3.0, 0.25), (3.0, 0.75), (2.5, 1.7), (7.0, 0.1), (2.0, 65.25)] {
            let a = hurwitz_zeta(s, q);
            let b = brute(s, q);
            assert!((a - b).abs() < 1e-12 * a.abs().max(1.0), "{s} {q}: {a} vs {b}");
        }
    }

    #[test]
    fn value_at_zero_is_half_minus_q() {
        for &q in &[0.1, 0.25, 0.4, 3.7] {
            assert!((hurwitz_zeta(0.0, q) - (0.5 - q)).abs() < 1e-13);
        }
    }

    #[test]
    fn lattice_tails_match_direct_sums() {
        let a = 0.25;
        let cut = 10.0;
        let (p, n) = lattice_tails(3, a, cut);
        let mut dp = 0.0;
        let mut dn = 0.0;
        for k in -400_000i64..=400_000 {
            let l = k as f64 + a;
            if l > cut {
                dp += l.powi(-3);
            } else if l < -cut {
                dn += l.powi(-3);
            }
        }
        assert!((p - dp).abs() < 1e-11);
        assert!((n - dn).abs() < 1e-11);
        assert!(n < 0.0);
    }
}
