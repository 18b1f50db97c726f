use num_complex::Complex64;

use super::family::MatrixFamily;
use crate::clifford::CliffordRep;
use crate::ids::{expect_args, parse_call, positive_int};
use crate::{CMat, Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn scalar(z: Complex64) -> CMat {
    CMat::from_element(1, 1, z)
}

/// `((x - ic)/(x + ic))^n` on the line, with exact derivatives.
pub fn moebius_family(c: f64, n: i32) -> MatrixFamily {
    let f = move |x: f64| ((x - I * c) / (x + I * c)).powi(n);
    // f'/f = n (1/(x-ic) - 1/(x+ic)) = n·2ic/(x²+c²)
    let logd = move |x: f64| Complex64::new(n as f64, 0.0) * (1.0 / (x - I * c) - 1.0 / (x + I * c));
    let logd2 = move |x: f64| {
        Complex64::new(n as f64, 0.0) * (-1.0 / ((x - I * c) * (x - I * c)) + 1.0 / ((x + I * c) * (x + I * c)))
    };
    MatrixFamily::new(1, 1, move |x: &[f64]| Ok(scalar(f(x[0]))))
        .with_partials(move |x: &[f64]| Ok(vec![scalar(f(x[0]) * logd(x[0]))]))
        .with_second(move |x: &[f64]| {
            let (v, l) = (f(x[0]), logd(x[0]));
            Ok(vec![vec![scalar(v * (l * l + logd2(x[0])))]])
        })
        .invertible()
}

/// `a + c(x)` on `ℝ^{2k-1}`.
pub fn affine_clifford(a: f64, rep: &CliffordRep) -> MatrixFamily {
    let n = rep.rank;
    MatrixFamily::affine(CMat::identity(n, n) * Complex64::new(a, 0.0), rep.generators.clone()).invertible()
}

/// `x_0 + c(x')` on `ℝ^{2k}`.
pub fn clifford_cone(rep: &CliffordRep) -> MatrixFamily {
    let n = rep.rank;
    let mut slopes = vec![CMat::identity(n, n)];
    slopes.extend(rep.generators.iter().cloned());
    MatrixFamily::affine(CMat::zeros(n, n), slopes).invertible()
}

/// `1 + c(x)/⟨x⟩` with `⟨x⟩ = (1+|x|²)^{1/2}`.
pub fn unit_clifford(rep: &CliffordRep) -> MatrixFamily {
    let p = rep.p;
    let n = rep.rank;
    let (r0, r1, r2) = (rep.clone(), rep.clone(), rep.clone());
    let jb = |x: &[f64]| (1.0 + x.iter().map(|v| v * v).sum::<f64>()).sqrt();
    MatrixFamily::new(p, n, move |x: &[f64]| {
        Ok(CMat::identity(n, n) + r0.action(x)? * Complex64::new(1.0 / jb(x), 0.0))
    })
    .with_partials(move |x: &[f64]| {
        let b = jb(x);
        let c = r1.action(x)?;
        Ok((0..p)
            .map(|j| &r1.generators[j] * Complex64::new(1.0 / b, 0.0) - &c * Complex64::new(x[j] / b.powi(3), 0.0))
            .collect())
    })
    .with_second(move |x: &[f64]| {
        let b = jb(x);
        let c = r2.action(x)?;
        let e = &r2.generators;
        Ok((0..p)
            .map(|i| {
                (0..p)
                    .map(|j| {
                        let delta = if i == j { 1.0 } else { 0.0 };
                        -(&e[j] * Complex64::new(x[i] / b.powi(3), 0.0))
                            - &e[i] * Complex64::new(x[j] / b.powi(3), 0.0)
                            - &c * Complex64::new(delta / b.powi(3), 0.0)
                            + &c * Complex64::new(3.0 * x[i] * x[j] / b.powi(5), 0.0)
                    })
                    .collect()
            })
            .collect())
    })
    .invertible()
}

/// Ids: `moebius`, `moebius_power(n)`, `scaled_moebius(c)`, `affine_clifford(a,k)`,
/// `spectral_slice(λ,k)`, `clifford_cone(k)`, `unit_clifford(k)`.
pub fn named_family(id: &str) -> Result<MatrixFamily> {
    let (name, args) = parse_call(id)?;
    match name.as_str() {
        "moebius" => {
            expect_args(&name, &args, 0)?;
            Ok(moebius_family(1.0, 1))
        }
        "moebius_power" => {
            expect_args(&name, &args, 1)?;
            if args[0].fract() != 0.0 || args[0].abs() > 64.0 {
                return Err(Error::InvalidInput("moebius_power needs an integer |n| <= 64".into()));
            }
            Ok(moebius_family(1.0, args[0] as i32))
        }
        "scaled_moebius" => {
            expect_args(&name, &args, 1)?;
            if !(args[0] > 0.0) {
                return Err(Error::InvalidInput("scaled_moebius needs c > 0".into()));
            }
            Ok(moebius_family(args[0], 1))
        }
        "affine_clifford" | "spectral_slice" => {
            expect_args(&name, &args, 2)?;
            if args[0] == 0.0 {
                return Err(Error::InvalidInput(format!("`{name}` needs a nonzero constant (family not invertible at 0)")));
            }
            let rep = CliffordRep::standard(positive_int(&name, args[1])?)?;
            Ok(affine_clifford(args[0], &rep))
        }
        "clifford_cone" => {
            expect_args(&name, &args, 1)?;
            Ok(clifford_cone(&CliffordRep::standard(positive_int(&name, args[0])?)?))
        }
        "unit_clifford" => {
            expect_args(&name, &args, 1)?;
            Ok(unit_clifford(&CliffordRep::standard(positive_int(&name, args[0])?)?))
        }
        other => Err(Error::InvalidInput(format!("unknown family id `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fd::partial;

    #[test]
    fn analytic_derivatives_match_differences() {
        for id in ["moebius", "moebius_power(3)", "scaled_moebius(2)", "unit_clifford(2)", "affine_clifford(-1,2)"] {
            let f = named_family(id).unwrap();
            let x: Vec<f64> = (0..f.p).map(|i| 0.3 + 0.4 * i as f64).collect();
            let d = f.partials(&x).unwrap();
            let h = f.second(&x).unwrap();
            for j in 0..f.p {
                let fd = partial(&|y: &[f64]| f.eval(y), &x, j, 1e-4).unwrap();
                assert!((&fd - &d[j]).norm() < 1e-8, "{id} d{j}");
                for i in 0..f.p {
                    let fd2 = partial(&|y: &[f64]| Ok(f.partials(y)?[i].clone()), &x, j, 1e-4).unwrap();
                    assert!((&fd2 - &h[i][j]).norm() < 1e-7, "{id} d{i}d{j}");
                }
            }
        }
    }

    #[test]
    fn unknown_and_degenerate_ids_fail() {
        assert!(named_family("affine_clifford(0, 2)").is_err());
        assert!(named_family("clifford_cone(9)").is_err());
        assert!(named_family("whatever").is_err());
    }
}
