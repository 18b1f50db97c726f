use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use super::experiments::ExperimentParams;
use crate::asymptotics::{HalflineConfig, RegintConfig};
use crate::partrace::TraceConfig;
use crate::sphere::SphereResolution;

/// Hard caps on budget overrides.
pub const MAX_LADDER_COUNT: usize = 96;
pub const MAX_RADIAL_NODES: usize = 64;
pub const MAX_SPHERE_POLAR: usize = 192;
pub const MAX_SPHERE_AZIMUTH: usize = 384;
pub const MAX_EIGEN_WINDOW: f64 = 16_777_216.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Quick,
    #[default]
    Standard,
    Precise,
}

/// Numeric budget: a preset plus optional overrides.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budget {
    #[serde(default)]
    pub preset: Preset,
    /// Radii per LIM ladder.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii: Option<usize>,
    /// Gauss–Legendre nodes per radial panel.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radial_nodes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sphere_polar: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sphere_azimuth: Option<usize>,
    /// Largest direct eigenvalue window.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eigen_window: Option<f64>,
    /// Relative fit residual threshold.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_tolerance: Option<f64>,
    /// Relative tail tolerance of eigenvalue sums.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_tolerance: Option<f64>,
}

fn in_range<T: PartialOrd + std::fmt::Display + Copy>(name: &str, v: Option<T>, lo: T, hi: T) -> Result<(), String> {
    match v {
        Some(x) if !(x >= lo && x <= hi) => Err(format!("budget.{name} = {x} outside [{lo}, {hi}]")),
        _ => Ok(()),
    }
}

impl Budget {
    pub fn preset(preset: Preset) -> Self {
        Self {
            preset,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        in_range("radii", self.radii, 4, MAX_LADDER_COUNT)?;
        in_range("radial_nodes", self.radial_nodes, 4, MAX_RADIAL_NODES)?;
        in_range("sphere_polar", self.sphere_polar, 2, MAX_SPHERE_POLAR)?;
        in_range("sphere_azimuth", self.sphere_azimuth, 4, MAX_SPHERE_AZIMUTH)?;
        in_range("eigen_window", self.eigen_window, 64.0, MAX_EIGEN_WINDOW)?;
        in_range("fit_tolerance", self.fit_tolerance, 1e-14, 1e-2)?;
        in_range("tail_tolerance", self.tail_tolerance, 1e-15, 1e-4)?;
        Ok(())
    }

    fn scale_count(&self, n: usize) -> usize {
        match self.preset {
            Preset::Quick => (n * 2).div_ceil(3),
            Preset::Standard => n,
            Preset::Precise => (n * 3).div_ceil(2),
        }
    }

    /// Applies the preset and overrides to an experiment's base settings.
    pub fn regint(&self, base: RegintConfig) -> RegintConfig {
        let mut c = base;
        // a ladder needs two radii per model term, so `quick` keeps its length
        let count = match self.preset {
            Preset::Precise => self.scale_count(c.ladder.count),
            _ => c.ladder.count,
        };
        c.ladder.count = self.radii.unwrap_or(count.min(MAX_LADDER_COUNT));
        c.radial_nodes = self
            .radial_nodes
            .unwrap_or_else(|| self.scale_count(c.radial_nodes).clamp(4, MAX_RADIAL_NODES));
        c.sphere = self.sphere(c.sphere);
        if let Some(t) = self.fit_tolerance {
            c.fit.residual_threshold = t;
        }
        c
    }

    pub fn halfline(&self, base: HalflineConfig) -> HalflineConfig {
        let r = self.regint(RegintConfig {
            ladder: base.ladder_at_infinity,
            radial_nodes: base.radial_nodes,
            fit: base.fit,
            ..Default::default()
        });
        let mut zero = base.ladder_at_zero;
        zero.count = r.ladder.count;
        HalflineConfig {
            ladder_at_infinity: r.ladder,
            ladder_at_zero: zero,
            radial_nodes: r.radial_nodes,
            fit: r.fit,
        }
    }

    pub fn sphere(&self, base: SphereResolution) -> SphereResolution {
        let scaled = match self.preset {
            Preset::Precise => SphereResolution::new(
                (base.polar * 3).div_ceil(2).min(MAX_SPHERE_POLAR),
                (base.azimuth * 3).div_ceil(2).min(MAX_SPHERE_AZIMUTH),
            ),
            _ => base,
        };
        SphereResolution::new(
            self.sphere_polar.unwrap_or(scaled.polar),
            self.sphere_azimuth.unwrap_or(scaled.azimuth),
        )
    }

    pub fn trace(&self, base: TraceConfig) -> TraceConfig {
        let mut t = base;
        if let Some(w) = self.eigen_window {
            t.max_window = w;
        }
        if let Some(tol) = self.tail_tolerance {
            t.tail_tolerance = tol;
        }
        t
    }

    /// Node count for one-dimensional rules (parameter integrals).
    pub fn nodes(&self, base: usize) -> usize {
        self.scale_count(base)
    }
}

/// Errors in a configuration; reported with exit code 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

/// A parsed experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub params: ExperimentParams,
    pub budget: Budget,
    pub output: Option<String>,
}

impl ExperimentConfig {
    pub fn new(params: ExperimentParams) -> Self {
        Self {
            params,
            budget: Budget::default(),
            output: None,
        }
    }

    /// Parses `{"experiment": id, <parameters>, "budget": .., "output": ..}`.
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let v: Value = serde_json::from_str(text).map_err(|e| ConfigError(format!("invalid JSON: {e}")))?;
        Self::from_value(v)
    }

    pub fn from_value(v: Value) -> Result<Self, ConfigError> {
        let Value::Object(mut map) = v else {
            return Err(ConfigError("config must be a JSON object".into()));
        };
        let budget = match map.remove("budget") {
            None => Budget::default(),
            Some(Value::String(s)) => Budget::preset(
                serde_json::from_value(Value::String(s)).map_err(|e| ConfigError(format!("budget: {e}")))?,
            ),
            Some(b) => serde_json::from_value(b).map_err(|e| ConfigError(format!("budget: {e}")))?,
        };
        budget.validate().map_err(ConfigError)?;
        let output = match map.remove("output") {
            None | Some(Value::Null) => None,
            Some(Value::String(s)) => Some(s),
            Some(_) => return Err(ConfigError("output must be a path string".into())),
        };
        if !map.contains_key("experiment") {
            return Err(ConfigError("missing `experiment`".into()));
        }
        let params: ExperimentParams =
            serde_json::from_value(Value::Object(map)).map_err(|e| ConfigError(e.to_string()))?;
        params.validate().map_err(ConfigError)?;
        Ok(Self { params, budget, output })
    }

    pub fn id(&self) -> &'static str {
        self.params.id()
    }

    /// Parameters with defaults filled in, plus the budget. Keys are sorted.
    pub fn canonical(&self) -> Value {
        let mut map = match serde_json::to_value(&self.params).expect("parameters serialize") {
            Value::Object(m) => m,
            _ => Map::new(),
        };
        map.insert("budget".into(), serde_json::to_value(self.budget).expect("budget serializes"));
        Value::Object(map)
    }

    /// SHA-256 of the canonical JSON text.
    pub fn hash(&self) -> String {
        let text = self.canonical().to_string();
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}
