//! Run configuration: one flat JSON object whose field names double as the
//! command-line flag names.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::overlap::Method;
use crate::quadrature::QuadratureSettings;
use crate::spectral::{Model, ScenarioSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub omega0: f64,
    pub delta: f64,
    pub omegad: f64,
    pub gamma: f64,
    pub taup: f64,
    pub tau: f64,
    pub model: Model,
    pub method: Method,
    pub relative_tolerance: f64,
    pub initial_half_width_multiplier: f64,
    pub max_domain_doublings: u32,
    /// Worker threads for sweeps; 0 means the available parallelism.
    pub workers: usize,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let q = QuadratureSettings::default();
        RunConfig {
            omega0: 5e14,
            delta: 1e12,
            omegad: 4.5e14,
            gamma: 1e12,
            taup: 0.0,
            tau: 0.0,
            model: Model::Gaussian,
            method: Method::ClosedForm,
            relative_tolerance: q.relative_tolerance,
            initial_half_width_multiplier: q.initial_half_width_multiplier,
            max_domain_doublings: q.max_domain_doublings,
            workers: 0,
            out: PathBuf::from("out"),
        }
    }
}

/// Per-field overrides, applied on top of a file or the defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub omega0: Option<f64>,
    pub delta: Option<f64>,
    pub omegad: Option<f64>,
    pub gamma: Option<f64>,
    pub taup: Option<f64>,
    pub tau: Option<f64>,
    pub model: Option<Model>,
    pub method: Option<Method>,
    pub relative_tolerance: Option<f64>,
    pub initial_half_width_multiplier: Option<f64>,
    pub max_domain_doublings: Option<u32>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        RunConfig::from_json(&text)
    }

    /// Defaults, then the optional file, then the overrides.
    pub fn resolve(path: Option<&Path>, overrides: &Overrides) -> Result<Self> {
        let mut config = match path {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        config.apply(overrides);
        config.validate()?;
        Ok(config)
    }

    pub fn apply(&mut self, o: &Overrides) {
        macro_rules! take {
            ($($field:ident),*) => {
                $(if let Some(v) = o.$field.clone() { self.$field = v; })*
            };
        }
        take!(
            omega0,
            delta,
            omegad,
            gamma,
            taup,
            tau,
            model,
            method,
            relative_tolerance,
            initial_half_width_multiplier,
            max_domain_doublings,
            workers,
            out
        );
    }

    pub fn scenario(&self) -> ScenarioSpec {
        ScenarioSpec {
            photon_model: self.model,
            omega0: self.omega0,
            delta: self.delta,
            taup: self.taup,
            omegad: self.omegad,
            gamma: self.gamma,
            tau: self.tau,
        }
    }

    pub fn quadrature(&self) -> QuadratureSettings {
        QuadratureSettings {
            relative_tolerance: self.relative_tolerance,
            initial_half_width_multiplier: self.initial_half_width_multiplier,
            max_domain_doublings: self.max_domain_doublings,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let as_config = |e: Error| match e {
            Error::Domain(m) => Error::Config(m),
            other => other,
        };
        self.scenario().validate().map_err(as_config)?;
        self.quadrature().validate().map_err(as_config)?;
        if self.out.as_os_str().is_empty() {
            return Err(Error::Config("out must not be empty".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("RunConfig serializes")
    }
}
