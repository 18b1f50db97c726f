use std::collections::BTreeMap;
use std::io::Read;

use num_complex::Complex64;
use serde::Deserialize;

use super::fit::{fit_samples, FitConfig, FittedExpansion};
use super::model::ExpansionModel;
use super::regint::{regint_from_primitive, RegularizedValue};
use crate::{Error, Result};

#[derive(Debug, Deserialize)]
struct Row {
    radius: f64,
    #[serde(rename = "direction-index", alias = "direction_index", alias = "direction")]
    direction: usize,
    re: f64,
    im: f64,
}

/// Samples `f(r_i ω_d)` read from CSV with columns `radius, direction-index, re, im`.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedSamples {
    pub radii: Vec<f64>,
    /// `values[d][i]` for direction `d` and radius `radii[i]`.
    pub values: Vec<Vec<Complex64>>,
}

impl TabulatedSamples {
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let mut by_dir: BTreeMap<usize, BTreeMap<u64, Complex64>> = BTreeMap::new();
        for row in rdr.deserialize::<Row>() {
            let row = row.map_err(|e| Error::InvalidInput(format!("tabulated samples: {e}")))?;
            if !(row.radius > 0.0 && row.radius.is_finite()) {
                return Err(Error::InvalidInput(format!("radius {} must be positive", row.radius)));
            }
            let v = Complex64::new(row.re, row.im);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFinite { at: vec![row.radius] });
            }
            by_dir.entry(row.direction).or_default().insert(row.radius.to_bits(), v);
        }
        if by_dir.is_empty() {
            return Err(Error::InvalidInput("tabulated samples: no rows".into()));
        }
        if by_dir.keys().copied().ne(0..by_dir.len()) {
            return Err(Error::InvalidInput("direction indices must be 0..n without gaps".into()));
        }
        let first: Vec<u64> = by_dir[&0].keys().copied().collect();
        let mut radii: Vec<f64> = first.iter().map(|b| f64::from_bits(*b)).collect();
        radii.sort_by(f64::total_cmp);
        let mut values = Vec::with_capacity(by_dir.len());
        for (d, m) in &by_dir {
            if m.len() != radii.len() {
                return Err(Error::InvalidInput(format!(
                    "direction {d} has {} radii, direction 0 has {}",
                    m.len(),
                    radii.len()
                )));
            }
            let col = radii
                .iter()
                .map(|r| {
                    m.get(&r.to_bits()).copied().ok_or_else(|| {
                        Error::InvalidInput(format!("direction {d} lacks radius {r}"))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            values.push(col);
        }
        Ok(Self { radii, values })
    }

    /// Fit the samples against the model, direction by direction (unit weights).
    pub fn fit(&self, model: &ExpansionModel, cfg: &FitConfig) -> Result<FittedExpansion> {
        let n = self.values.len();
        fit_samples(
            model,
            self.radii.clone(),
            vec![Vec::new(); n],
            vec![1.0; n],
            self.values.clone(),
            cfg,
        )
    }

    /// Treat direction 0 as samples of a primitive `I(R)` and return its constant term.
    pub fn regularized_constant(
        &self,
        primitive_model: &ExpansionModel,
        cfg: &FitConfig,
    ) -> Result<RegularizedValue> {
        regint_from_primitive(&self.radii, &self.values[0], primitive_model, cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_and_fits_csv() {
        let mut csv = String::from("radius,direction-index,re,im\n");
        for i in 0..12 {
            let r = 4.0 * 2f64.powi(i);
            csv.push_str(&format!("{r},0,{},0\n", 3.0 / r + 1.0 / (r * r)));
            csv.push_str(&format!("{r},1,{},{}\n", -1.0 / r, 2.0 / (r * r)));
        }
        let t = TabulatedSamples::from_csv(csv.as_bytes()).unwrap();
        assert_eq!(t.values.len(), 2);
        let model = ExpansionModel::powers(&[-1.0, -2.0], -3.0).unwrap();
        let fit = t.fit(&model, &FitConfig::default()).unwrap();
        let c1 = fit.coefficient(-1.0, 0).unwrap();
        assert!((c1[0].re - 3.0).abs() < 1e-10);
        assert!((c1[1].re + 1.0).abs() < 1e-10);
        assert!((fit.coefficient(-2.0, 0).unwrap()[1].im - 2.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_ragged_tables() {
        let csv = "radius,direction-index,re,im\n1,0,1,0\n2,0,1,0\n1,1,1,0\n";
        assert!(TabulatedSamples::from_csv(csv.as_bytes()).is_err());
        let csv = "radius,direction-index,re,im\n1,0,1,0\n1,2,1,0\n";
        assert!(TabulatedSamples::from_csv(csv.as_bytes()).is_err());
    }
}
