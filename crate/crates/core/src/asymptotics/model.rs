use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Which end of the axis an expansion describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    #[default]
    Infinity,
    Zero,
}

/// One family of terms `r^deg log^l r`, `0 ≤ l ≤ logpow`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    #[serde(rename = "deg")]
    pub degree: f64,
    #[serde(rename = "logpow")]
    pub log_power: u32,
}

impl Term {
    pub fn new(degree: f64, log_power: u32) -> Self {
        Self { degree, log_power }
    }
}

/// Declared ladder of asymptotic terms.
///
/// At infinity the degrees are strictly decreasing and every true term below
/// `remainder` is absorbed into the remainder. At zero the order is reversed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionModel {
    pub terms: Vec<Term>,
    pub remainder: f64,
    #[serde(default)]
    pub side: Side,
}

impl ExpansionModel {
    pub fn at_infinity(terms: Vec<Term>, remainder: f64) -> Result<Self> {
        let m = Self {
            terms,
            remainder,
            side: Side::Infinity,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn at_zero(terms: Vec<Term>, remainder: f64) -> Result<Self> {
        let m = Self {
            terms,
            remainder,
            side: Side::Zero,
        };
        m.validate()?;
        Ok(m)
    }

    /// Pure powers `deg` (no logs) at infinity.
    pub fn powers(degrees: &[f64], remainder: f64) -> Result<Self> {
        Self::at_infinity(degrees.iter().map(|&d| Term::new(d, 0)).collect(), remainder)
    }

    /// Pure powers `deg` (no logs) at zero.
    pub fn powers_at_zero(degrees: &[f64], remainder: f64) -> Result<Self> {
        Self::at_zero(degrees.iter().map(|&d| Term::new(d, 0)).collect(), remainder)
    }

    /// Model with no terms at all: the function is `O(r^remainder)`.
    pub fn empty(remainder: f64) -> Self {
        Self {
            terms: Vec::new(),
            remainder,
            side: Side::Infinity,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.remainder.is_finite() || self.terms.iter().any(|t| !t.degree.is_finite()) {
            return Err(Error::InvalidInput("expansion degrees must be finite".into()));
        }
        let ordered = match self.side {
            Side::Infinity => self.terms.windows(2).all(|w| w[0].degree > w[1].degree),
            Side::Zero => self.terms.windows(2).all(|w| w[0].degree < w[1].degree),
        };
        if !ordered {
            return Err(Error::InvalidInput(format!(
                "expansion degrees must be strictly monotone toward the remainder ({:?})",
                self.side
            )));
        }
        let ok = match self.side {
            Side::Infinity => self.terms.iter().all(|t| self.remainder < t.degree),
            Side::Zero => self.terms.iter().all(|t| self.remainder > t.degree),
        };
        if !ok {
            return Err(Error::InvalidInput(
                "remainder degree must lie beyond every listed degree".into(),
            ));
        }
        Ok(())
    }

    /// Number of basis functions `r^deg log^l r` spanned by the model.
    pub fn basis_len(&self) -> usize {
        self.terms.iter().map(|t| t.log_power as usize + 1).sum()
    }

    pub fn basis(&self) -> Vec<Term> {
        self.terms
            .iter()
            .flat_map(|t| (0..=t.log_power).map(move |l| Term::new(t.degree, l)))
            .collect()
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let m: Self = serde_json::from_str(s)
            .map_err(|e| Error::InvalidInput(format!("expansion model JSON: {e}")))?;
        m.validate()?;
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serializes")
    }

    /// Model of the primitive `∫_{|x| ≤ R} f` (or `∫_1^b f`, `∫_a^1 f` on the
    /// half-line) given the model of `f` on a `p`-dimensional cone.
    ///
    /// Degree `α` contributes `R^{α+p} log^j R` for `j ≤ L(α)`; degree `−p`
    /// contributes `log^{j} R` for `1 ≤ j ≤ L+1`. The constant is always present.
    pub fn primitive(&self, p: usize) -> Result<Self> {
        let pf = p as f64;
        match self.side {
            Side::Infinity if self.remainder >= -pf => {
                return Err(Error::InvalidInput(format!(
                    "model remainder degree {} must lie below -p = {}: all non-integrable terms must be declared",
                    self.remainder, -pf
                )))
            }
            Side::Zero if self.remainder <= -1.0 => {
                return Err(Error::InvalidInput(format!(
                    "model remainder degree {} at zero must exceed -1",
                    self.remainder
                )))
            }
            _ => {}
        }
        let mut terms: Vec<Term> = Vec::new();
        let mut const_log = 0;
        for t in &self.terms {
            let d = t.degree + pf;
            if d.abs() < 1e-12 {
                const_log = const_log.max(t.log_power + 1);
            } else {
                terms.push(Term::new(d, t.log_power));
            }
        }
        terms.push(Term::new(0.0, const_log));
        match self.side {
            Side::Infinity => terms.sort_by(|a, b| b.degree.total_cmp(&a.degree)),
            Side::Zero => terms.sort_by(|a, b| a.degree.total_cmp(&b.degree)),
        }
        // Merge coincident degrees (a term of degree -p next to an explicit constant).
        let mut merged: Vec<Term> = Vec::new();
        for t in terms {
            match merged.last_mut() {
                Some(last) if (last.degree - t.degree).abs() < 1e-12 => {
                    last.log_power = last.log_power.max(t.log_power)
                }
                _ => merged.push(t),
            }
        }
        Ok(Self {
            terms: merged,
            remainder: self.remainder + pf,
            side: self.side,
        })
    }

    /// Shift every degree by `delta` (e.g. `-1` for a derivative).
    pub fn shifted(&self, delta: f64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| Term::new(t.degree + delta, t.log_power))
                .collect(),
            remainder: self.remainder + delta,
            side: self.side,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_and_shape() {
        let m = ExpansionModel::at_infinity(vec![Term::new(-1.0, 1), Term::new(-2.0, 0)], -3.0)
            .unwrap();
        let s = m.to_json();
        assert!(s.contains("\"terms\":[{\"deg\":-1.0,\"logpow\":1}"));
        assert!(s.contains("\"remainder\":-3.0"));
        let back = ExpansionModel::from_json(r#"{"terms":[{"deg":-1,"logpow":1},{"deg":-2,"logpow":0}],"remainder":-3}"#).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn rejects_unordered_or_overlapping_terms() {
        assert!(ExpansionModel::powers(&[-2.0, -1.0], -3.0).is_err());
        assert!(ExpansionModel::powers(&[-1.0, -2.0], -1.5).is_err());
        assert!(ExpansionModel::powers_at_zero(&[-1.0, 0.0], 1.0).is_ok());
        assert!(ExpansionModel::powers_at_zero(&[0.0, -1.0], 1.0).is_err());
    }

    #[test]
    fn primitive_tracks_logs() {
        // f ~ r^{-1} log r + r^{-2} on the line: primitive has log^2 R and R^{-1}.
        let m = ExpansionModel::at_infinity(vec![Term::new(-1.0, 1), Term::new(-2.0, 0)], -3.0)
            .unwrap();
        let prim = m.primitive(1).unwrap();
        assert_eq!(prim.terms, vec![Term::new(0.0, 2), Term::new(-1.0, 0)]);
        assert_eq!(prim.remainder, -2.0);
        // Growing polynomial terms on R^3.
        let m = ExpansionModel::powers(&[2.0, 0.0], -4.0).unwrap();
        let prim = m.primitive(3).unwrap();
        assert_eq!(
            prim.terms,
            vec![Term::new(5.0, 0), Term::new(3.0, 0), Term::new(0.0, 0)]
        );
        assert!(ExpansionModel::powers(&[-1.0], -2.0).unwrap().primitive(3).is_err());
    }
}
