use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::asymptotics::{FittedExpansion, RegularizedValue};

/// Complex number written as `{"re": .., "im": ..}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cplx {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for Cplx {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<Cplx> for Complex64 {
    fn from(z: Cplx) -> Self {
        Complex64::new(z.re, z.im)
    }
}

/// Where a reference value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// A closed-form value of the theory.
    ClosedForm,
    /// An independent numerical route or classical identity.
    Oracle,
    /// Holds by construction.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ToleranceKind {
    Absolute,
    Relative,
}

/// One computed value compared against its reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: Cplx,
    pub reference: Cplx,
    pub provenance: Provenance,
    /// Short description of the reference.
    pub source: String,
    pub abs_deviation: f64,
    pub rel_deviation: f64,
    pub tolerance: f64,
    pub tolerance_kind: ToleranceKind,
    pub pass: bool,
}

impl Check {
    fn build(
        name: &str,
        value: Complex64,
        reference: Complex64,
        tolerance: f64,
        kind: ToleranceKind,
        provenance: Provenance,
        source: &str,
    ) -> Self {
        let abs = (value - reference).norm();
        let rel = if reference.norm() > 0.0 {
            abs / reference.norm()
        } else if abs == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        let dev = match kind {
            ToleranceKind::Absolute => abs,
            ToleranceKind::Relative => rel,
        };
        Self {
            name: name.into(),
            value: value.into(),
            reference: reference.into(),
            provenance,
            source: source.into(),
            abs_deviation: abs,
            rel_deviation: rel,
            tolerance,
            tolerance_kind: kind,
            pass: dev <= tolerance,
        }
    }

    pub fn abs(name: &str, value: Complex64, reference: Complex64, tol: f64, prov: Provenance, source: &str) -> Self {
        Self::build(name, value, reference, tol, ToleranceKind::Absolute, prov, source)
    }

    pub fn rel(name: &str, value: Complex64, reference: Complex64, tol: f64, prov: Provenance, source: &str) -> Self {
        Self::build(name, value, reference, tol, ToleranceKind::Relative, prov, source)
    }

    pub fn real_abs(name: &str, value: Complex64, reference: f64, tol: f64, prov: Provenance, source: &str) -> Self {
        Self::abs(name, value, Complex64::new(reference, 0.0), tol, prov, source)
    }

    pub fn real_rel(name: &str, value: Complex64, reference: f64, tol: f64, prov: Provenance, source: &str) -> Self {
        Self::rel(name, value, Complex64::new(reference, 0.0), tol, prov, source)
    }
}

/// Columns of numbers for CSV export.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    /// Raw fit samples as `radius, direction-index, re, im`.
    pub fn from_fit(name: &str, fit: &FittedExpansion) -> Self {
        let mut rows = Vec::new();
        for (d, col) in fit.samples.iter().enumerate() {
            for (r, v) in fit.radii.iter().zip(col) {
                rows.push(vec![*r, d as f64, v.re, v.im]);
            }
        }
        Self {
            name: name.into(),
            columns: ["radius", "direction-index", "re", "im"].map(String::from).to_vec(),
            rows,
        }
    }

    pub fn from_regint(name: &str, rv: &RegularizedValue) -> Vec<Self> {
        match rv.diagnostics.as_slice() {
            [one] => vec![Self::from_fit(name, one)],
            many => many
                .iter()
                .enumerate()
                .map(|(i, f)| Self::from_fit(&format!("{name}-{i}"), f))
                .collect(),
        }
    }

    pub fn write_csv(&self, path: &Path) -> std::io::Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format!("{v:e}")))?;
        }
        w.flush()
    }
}

/// What an experiment hands back before the report is assembled.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub checks: Vec<Check>,
    pub route: Option<String>,
    pub error_estimate: Option<f64>,
    pub tables: Vec<Table>,
}

impl Outcome {
    pub fn new(checks: Vec<Check>) -> Self {
        Self {
            checks,
            ..Default::default()
        }
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn table(mut self, t: Vec<Table>) -> Self {
        self.tables.extend(t);
        self
    }

    pub fn route(mut self, route: &str) -> Self {
        self.route = Some(route.into());
        self
    }

    pub fn error_estimate(mut self, e: f64) -> Self {
        self.error_estimate = Some(self.error_estimate.map_or(e, |x| x.max(e)));
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub wall_ms: f64,
}

/// Self-contained record of one experiment run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub experiment: String,
    pub inputs: Value,
    /// Value of the first check.
    pub value: Cplx,
    pub reference: Cplx,
    pub provenance: Provenance,
    pub checks: Vec<Check>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub route: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_estimate: Option<f64>,
    pub config_hash: String,
    pub timing: Timing,
    #[serde(skip)]
    pub tables: Vec<Table>,
}

impl Report {
    pub fn assemble(experiment: &str, inputs: Value, config_hash: String, out: Outcome, wall_ms: f64) -> Self {
        let first = out.checks.first();
        let zero = Cplx { re: 0.0, im: 0.0 };
        Self {
            experiment: experiment.into(),
            inputs,
            value: first.map_or(zero, |c| c.value),
            reference: first.map_or(zero, |c| c.reference),
            provenance: first.map_or(Provenance::Exact, |c| c.provenance),
            pass: out.checks.iter().all(|c| c.pass),
            checks: out.checks,
            route: out.route,
            error_estimate: out.error_estimate,
            config_hash,
            timing: Timing { wall_ms },
            tables: out.tables,
        }
    }

    /// The report as JSON with the timing field removed.
    pub fn without_timing(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Value::Object(m) = &mut v {
            m.remove("timing");
        }
        v
    }

    pub fn summary_line(&self) -> String {
        let worst = self
            .checks
            .iter()
            .map(|c| match c.tolerance_kind {
                ToleranceKind::Absolute => c.abs_deviation / c.tolerance,
                ToleranceKind::Relative => c.rel_deviation / c.tolerance,
            })
            .fold(0.0, f64::max);
        format!(
            "{} {:<20} checks={:<3} worst/tol={:.2e} {:.0} ms",
            if self.pass { "PASS" } else { "FAIL" },
            self.experiment,
            self.checks.len(),
            worst,
            self.timing.wall_ms
        )
    }
}

/// A numerical failure with its diagnostic payload (exit code 3).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Failure {
    pub experiment: String,
    pub inputs: Value,
    pub config_hash: String,
    pub error: String,
    pub diagnostic: Value,
}

impl Failure {
    pub fn summary_line(&self) -> String {
        format!("ERROR {:<20} {}", self.experiment, self.error)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_iff_deviation_within_tolerance() {
        let c = Check::real_abs("x", Complex64::new(1.0 + 1e-9, 0.0), 1.0, 1e-8, Provenance::Exact, "one");
        assert!(c.pass);
        let c = Check::real_rel("x", Complex64::new(2.0, 0.0), 1.0, 0.5, Provenance::Exact, "one");
        assert!(!c.pass && c.rel_deviation == 1.0);
        let c = Check::real_rel("z", Complex64::new(1e-20, 0.0), 0.0, 1e-3, Provenance::Exact, "zero");
        assert!(!c.pass);
        let c = Check::real_rel("z", Complex64::new(0.0, 0.0), 0.0, 1e-3, Provenance::Exact, "zero");
        assert!(c.pass);
    }

    #[test]
    fn report_takes_first_check_and_all_passes() {
        let out = Outcome::new(vec![
            Check::real_abs("a", Complex64::new(1.0, 0.0), 1.0, 1e-8, Provenance::Exact, "one"),
            Check::real_abs("b", Complex64::new(3.0, 0.0), 1.0, 1e-8, Provenance::Oracle, "one"),
        ]);
        let r = Report::assemble("demo", Value::Null, "h".into(), out, 1.0);
        assert!(!r.pass);
        assert_eq!(r.value.re, 1.0);
        assert!(r.without_timing().get("timing").is_none());
    }
}
