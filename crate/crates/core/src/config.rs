//! Run configuration: every tunable of a run in one TOML document.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cad::CadParams;
use crate::catalog::{Catalog, CatalogError};
use crate::constraints::ConstraintParams;
use crate::design::Topology;
use crate::kinematics::MeshEfficiencyModel;
use crate::mass::{MassError, MassModel, TemplateSet};
use crate::optimizer::{CostWeights, Problem};
use crate::scope::LayoutParams;
use crate::sizing::SizingParams;

pub const EXAMPLE_CONFIG: &str = include_str!("../data/config.toml");

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid configuration: {0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Mass(#[from] MassError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub lo: u32,
    pub hi: u32,
    pub topologies: Vec<Topology>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            lo: 4,
            hi: 60,
            topologies: Topology::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub motor: String,
    /// Catalog directory or file; the built-in catalog when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub catalog: Option<PathBuf>,
    /// Component template file; the built-in templates when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub templates: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    pub constraints: ConstraintParams,
    pub weights: CostWeights,
    pub mesh: MeshEfficiencyModel,
    pub sizing: SizingParams,
    pub layout: LayoutParams,
    pub cad: CadParams,
    pub sweep: SweepConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            motor: "MAD-M6C12".into(),
            catalog: None,
            templates: None,
            workers: None,
            constraints: ConstraintParams::default(),
            weights: CostWeights::default(),
            mesh: MeshEfficiencyModel::default(),
            sizing: SizingParams::default(),
            layout: LayoutParams::default(),
            cad: CadParams::default(),
            sweep: SweepConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let c: RunConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut c = RunConfig::from_toml_str(&text)?;
        // Relative paths are taken relative to the file that names them.
        let dir = path.parent().unwrap_or(Path::new("."));
        for p in [&mut c.catalog, &mut c.templates].into_iter().flatten() {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        }
        Ok(c)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = ConfigError::Invalid;
        self.constraints.validate().map_err(invalid)?;
        self.weights.validate().map_err(invalid)?;
        MeshEfficiencyModel::new(self.mesh.friction_factor).map_err(|e| invalid(e.to_string()))?;
        let s = &self.sizing;
        if !(s.allowable_stress > 0.0 && s.safety_factor > 0.0) {
            return Err(invalid("sizing stress and safety factor must be positive".into()));
        }
        if !(s.min_face_width > 0.0 && s.min_face_width <= s.max_face_width) {
            return Err(invalid(format!(
                "face width bounds [{}, {}] are not an interval of positive widths",
                s.min_face_width, s.max_face_width
            )));
        }
        for (name, v) in [
            ("axial_clearance", s.axial_clearance),
            ("wall_thickness", s.wall_thickness),
            ("carrier_plate_thickness", s.carrier_plate_thickness),
            ("compound_land", s.compound_land),
        ] {
            if !(v >= 0.0) {
                return Err(invalid(format!("sizing.{name} = {v} must be non-negative")));
            }
        }
        if self.sweep.lo >= self.sweep.hi {
            return Err(invalid(format!("sweep range {}..{} is empty", self.sweep.lo, self.sweep.hi)));
        }
        if self.workers == Some(0) {
            return Err(invalid("workers must be at least 1".into()));
        }
        Ok(())
    }

    pub fn catalog(&self) -> Result<Catalog, ConfigError> {
        Ok(match &self.catalog {
            Some(p) => Catalog::load(p)?,
            None => Catalog::builtin(),
        })
    }

    pub fn mass_model(&self, catalog: &Catalog) -> Result<MassModel, ConfigError> {
        let templates = match &self.templates {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|source| ConfigError::Io {
                    path: p.display().to_string(),
                    source,
                })?;
                TemplateSet::parse(&text, catalog)?
            }
            None => TemplateSet::builtin(catalog)?,
        };
        Ok(MassModel::new(catalog.clone(), templates))
    }

    /// The optimisation problem this configuration describes.
    pub fn problem(&self) -> Result<Problem, ConfigError> {
        let catalog = self.catalog()?;
        let motor = catalog.motor(&self.motor)?.clone();
        let mass = self.mass_model(&catalog)?;
        Ok(Problem::new(
            motor,
            self.constraints.clone(),
            self.sizing,
            self.layout,
            self.mesh,
            self.weights,
            mass,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_config_parses_and_round_trips() {
        let c = RunConfig::from_toml_str(EXAMPLE_CONFIG).unwrap();
        let again = RunConfig::from_toml_str(&c.to_toml_string()).unwrap();
        assert_eq!(c, again);
        c.problem().unwrap();
    }

    #[test]
    fn empty_document_is_the_default() {
        assert_eq!(RunConfig::from_toml_str("").unwrap(), RunConfig::default());
    }

    #[test]
    fn unknown_keys_and_bad_values_are_rejected() {
        assert!(RunConfig::from_toml_str("motr = \"x\"").is_err());
        assert!(RunConfig::from_toml_str("[weights]\nk_m = -1.0").is_err());
        assert!(RunConfig::from_toml_str("[constraints]\ngr_min = 20.0\ngr_max = 10.0").is_err());
        assert!(RunConfig::from_toml_str("[mesh]\nfriction_factor = 3.0").is_err());
    }
}
