//! Motors, bearings, fasteners and materials loaded from TOML documents.
//!
//! A catalog is either a directory holding `motors.toml`, `hardware.toml` and
//! `materials.toml`, or a single file carrying all sections. The defaults are
//! compiled in so the library works without any files on disk.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

const DEFAULT_MOTORS: &str = include_str!("../data/motors.toml");
const DEFAULT_HARDWARE: &str = include_str!("../data/hardware.toml");
const DEFAULT_MATERIALS: &str = include_str!("../data/materials.toml");

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse {origin}: {message}")]
    Parse { origin: String, message: String },
    #[error("{kind} `{name}`: {field} = {value} is invalid ({rule})")]
    Invalid {
        kind: &'static str,
        name: String,
        field: &'static str,
        value: f64,
        rule: &'static str,
    },
    #[error("duplicate {kind} `{name}`")]
    Duplicate { kind: &'static str, name: String },
    #[error("catalog has no {0} entries")]
    Missing(&'static str),
    #[error("unknown motor `{0}`")]
    UnknownMotor(String),
    #[error("unknown material `{0}`")]
    UnknownMaterial(String),
    #[error("no bearing with bore >= {bore_required} mm")]
    NoBearing { bore_required: f64 },
    #[error("no M{diameter} fastener of length >= {length} mm")]
    NoFastener { diameter: f64, length: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotorSpec {
    pub name: String,
    pub outer_diameter: f64,
    pub stack_length: f64,
    pub mass: f64,
    pub peak_torque: f64,
    pub shaft_diameter: f64,
    pub bolt_circle_diameter: f64,
    pub bolt_count: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BearingEntry {
    pub designation: String,
    pub bore: f64,
    pub outer_diameter: f64,
    pub width: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FastenerKind {
    #[default]
    Bolt,
    Nut,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FastenerEntry {
    pub designation: String,
    #[serde(default)]
    pub kind: FastenerKind,
    pub nominal_diameter: f64,
    pub length: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Material {
    pub name: String,
    pub density: f64,
    pub allowable_bending_stress: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    #[serde(default)]
    motor: Vec<MotorSpec>,
    #[serde(default)]
    bearing: Vec<BearingEntry>,
    #[serde(default)]
    fastener: Vec<FastenerEntry>,
    #[serde(default)]
    material: Vec<Material>,
}

impl Document {
    fn parse(text: &str, origin: &str) -> Result<Self, CatalogError> {
        if text.trim().is_empty() {
            return Err(CatalogError::Parse {
                origin: origin.to_string(),
                message: "document is empty".into(),
            });
        }
        toml::from_str(text).map_err(|e| CatalogError::Parse {
            origin: origin.to_string(),
            message: e.to_string(),
        })
    }

    fn merge(&mut self, other: Document) {
        self.motor.extend(other.motor);
        self.bearing.extend(other.bearing);
        self.fastener.extend(other.fastener);
        self.material.extend(other.material);
    }
}

/// Immutable registry. Bearings are kept sorted by (mass, designation) and
/// fasteners by (diameter, length, designation) so selection is a scan.
#[derive(Debug, Clone, PartialEq)]
pub struct Catalog {
    motors: Vec<MotorSpec>,
    bearings: Vec<BearingEntry>,
    fasteners: Vec<FastenerEntry>,
    materials: Vec<Material>,
}

fn positive(kind: &'static str, name: &str, field: &'static str, value: f64) -> Result<(), CatalogError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(CatalogError::Invalid {
            kind,
            name: name.to_string(),
            field,
            value,
            rule: "must be positive",
        })
    }
}

fn unique<'a>(kind: &'static str, names: impl Iterator<Item = &'a str>) -> Result<(), CatalogError> {
    let mut seen = std::collections::BTreeSet::new();
    for name in names {
        if !seen.insert(name) {
            return Err(CatalogError::Duplicate {
                kind,
                name: name.to_string(),
            });
        }
    }
    Ok(())
}

impl MotorSpec {
    pub fn validate(&self) -> Result<(), CatalogError> {
        let n = &self.name;
        positive("motor", n, "outer_diameter", self.outer_diameter)?;
        positive("motor", n, "stack_length", self.stack_length)?;
        positive("motor", n, "mass", self.mass)?;
        positive("motor", n, "peak_torque", self.peak_torque)?;
        positive("motor", n, "shaft_diameter", self.shaft_diameter)?;
        positive("motor", n, "bolt_circle_diameter", self.bolt_circle_diameter)?;
        if self.bolt_count < 3 {
            return Err(CatalogError::Invalid {
                kind: "motor",
                name: n.clone(),
                field: "bolt_count",
                value: self.bolt_count as f64,
                rule: "at least 3 bolts",
            });
        }
        Ok(())
    }
}

impl BearingEntry {
    pub fn validate(&self) -> Result<(), CatalogError> {
        let n = &self.designation;
        positive("bearing", n, "bore", self.bore)?;
        positive("bearing", n, "outer_diameter", self.outer_diameter)?;
        positive("bearing", n, "width", self.width)?;
        positive("bearing", n, "mass", self.mass)?;
        if self.bore >= self.outer_diameter {
            return Err(CatalogError::Invalid {
                kind: "bearing",
                name: n.clone(),
                field: "bore",
                value: self.bore,
                rule: "bore must be smaller than outer_diameter",
            });
        }
        Ok(())
    }
}

impl FastenerEntry {
    pub fn validate(&self) -> Result<(), CatalogError> {
        let n = &self.designation;
        positive("fastener", n, "nominal_diameter", self.nominal_diameter)?;
        positive("fastener", n, "length", self.length)?;
        positive("fastener", n, "mass", self.mass)
    }
}

impl Material {
    pub fn validate(&self) -> Result<(), CatalogError> {
        positive("material", &self.name, "density", self.density)?;
        positive("material", &self.name, "allowable_bending_stress", self.allowable_bending_stress)
    }
}

impl Catalog {
    fn from_document(doc: Document) -> Result<Self, CatalogError> {
        if doc.motor.is_empty() {
            return Err(CatalogError::Missing("motor"));
        }
        if doc.bearing.is_empty() {
            return Err(CatalogError::Missing("bearing"));
        }
        if doc.material.is_empty() {
            return Err(CatalogError::Missing("material"));
        }
        doc.motor.iter().try_for_each(MotorSpec::validate)?;
        doc.bearing.iter().try_for_each(BearingEntry::validate)?;
        doc.fastener.iter().try_for_each(FastenerEntry::validate)?;
        doc.material.iter().try_for_each(Material::validate)?;
        unique("motor", doc.motor.iter().map(|m| m.name.as_str()))?;
        unique("bearing", doc.bearing.iter().map(|b| b.designation.as_str()))?;
        unique("fastener", doc.fastener.iter().map(|f| f.designation.as_str()))?;
        unique("material", doc.material.iter().map(|m| m.name.as_str()))?;

        let mut bearings = doc.bearing;
        bearings.sort_by(|a, b| a.mass.total_cmp(&b.mass).then_with(|| a.designation.cmp(&b.designation)));
        let mut fasteners = doc.fastener;
        fasteners.sort_by(|a, b| {
            a.nominal_diameter
                .total_cmp(&b.nominal_diameter)
                .then(a.length.total_cmp(&b.length))
                .then_with(|| a.designation.cmp(&b.designation))
        });
        Ok(Catalog {
            motors: doc.motor,
            bearings,
            fasteners,
            materials: doc.material,
        })
    }

    /// The catalog shipped with the crate.
    pub fn builtin() -> Self {
        let mut doc = Document::parse(DEFAULT_MOTORS, "built-in motors.toml").expect("built-in motors parse");
        doc.merge(Document::parse(DEFAULT_HARDWARE, "built-in hardware.toml").expect("built-in hardware parses"));
        doc.merge(Document::parse(DEFAULT_MATERIALS, "built-in materials.toml").expect("built-in materials parse"));
        Catalog::from_document(doc).expect("built-in catalog is valid")
    }

    /// Parses one document holding every section.
    pub fn from_toml_str(text: &str) -> Result<Self, CatalogError> {
        Catalog::from_document(Document::parse(text, "<string>")?)
    }

    pub fn load(path: &Path) -> Result<Self, CatalogError> {
        let read = |p: &Path| {
            fs::read_to_string(p).map_err(|source| CatalogError::Io {
                path: p.to_path_buf(),
                source,
            })
        };
        let doc = if path.is_dir() {
            let mut doc = Document::default();
            for file in ["motors.toml", "hardware.toml", "materials.toml"] {
                let p = path.join(file);
                doc.merge(Document::parse(&read(&p)?, &p.display().to_string())?);
            }
            doc
        } else {
            Document::parse(&read(path)?, &path.display().to_string())?
        };
        Catalog::from_document(doc)
    }

    pub fn motors(&self) -> &[MotorSpec] {
        &self.motors
    }

    pub fn bearings(&self) -> &[BearingEntry] {
        &self.bearings
    }

    pub fn fasteners(&self) -> &[FastenerEntry] {
        &self.fasteners
    }

    pub fn materials(&self) -> &[Material] {
        &self.materials
    }

    pub fn motor(&self, name: &str) -> Result<&MotorSpec, CatalogError> {
        self.motors
            .iter()
            .find(|m| m.name.eq_ignore_ascii_case(name))
            .ok_or_else(|| CatalogError::UnknownMotor(name.to_string()))
    }

    pub fn material(&self, name: &str) -> Result<&Material, CatalogError> {
        self.materials
            .iter()
            .find(|m| m.name.eq_ignore_ascii_case(name))
            .ok_or_else(|| CatalogError::UnknownMaterial(name.to_string()))
    }

    /// Lightest bearing whose bore is at least `bore_required`.
    pub fn select_bearing(&self, bore_required: f64) -> Result<&BearingEntry, CatalogError> {
        self.bearings
            .iter()
            .find(|b| b.bore >= bore_required)
            .ok_or(CatalogError::NoBearing { bore_required })
    }

    /// Shortest bolt of the given diameter reaching `length`.
    pub fn select_bolt(&self, diameter: f64, length: f64) -> Result<&FastenerEntry, CatalogError> {
        self.fasteners
            .iter()
            .find(|f| f.kind == FastenerKind::Bolt && f.nominal_diameter == diameter && f.length >= length)
            .ok_or(CatalogError::NoFastener { diameter, length })
    }

    pub fn select_nut(&self, diameter: f64) -> Result<&FastenerEntry, CatalogError> {
        self.fasteners
            .iter()
            .find(|f| f.kind == FastenerKind::Nut && f.nominal_diameter == diameter)
            .ok_or(CatalogError::NoFastener { diameter, length: 0.0 })
    }
}

/// Free-function form used by code that holds the catalog by reference.
pub fn select_bearing(bore_required: f64, catalog: &Catalog) -> Result<&BearingEntry, CatalogError> {
    catalog.select_bearing(bore_required)
}

pub fn load_catalog(path: &Path) -> Result<Catalog, CatalogError> {
    Catalog::load(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"
        [[motor]]
        name = "M"
        outer_diameter = 50.0
        stack_length = 20.0
        mass = 0.1
        peak_torque = 1.0
        shaft_diameter = 5.0
        bolt_circle_diameter = 20.0
        bolt_count = 3

        [[bearing]]
        designation = "61802"
        bore = 15.0
        outer_diameter = 24.0
        width = 5.0
        mass = 0.0074

        [[bearing]]
        designation = "61800"
        bore = 10.0
        outer_diameter = 19.0
        width = 5.0
        mass = 0.0055

        [[material]]
        name = "PLA"
        density = 1240.0
        allowable_bending_stress = 30.0
    "#;

    #[test]
    fn builtin_has_reference_motors() {
        let c = Catalog::builtin();
        assert_eq!(c.motor("MAD-M6C12").unwrap().outer_diameter, 72.0);
        assert_eq!(c.motor("mn8014").unwrap().outer_diameter, 87.8);
        assert!(c.material("PLA").is_ok());
    }

    #[test]
    fn bearing_selection_picks_lightest_fit() {
        let c = Catalog::from_toml_str(SMALL).unwrap();
        assert_eq!(c.select_bearing(10.0).unwrap().designation, "61800");
        assert_eq!(c.select_bearing(12.0).unwrap().designation, "61802");
        assert!(matches!(c.select_bearing(40.0), Err(CatalogError::NoBearing { .. })));
    }

    #[test]
    fn empty_document_is_a_parse_error() {
        assert!(matches!(Catalog::from_toml_str("  \n"), Err(CatalogError::Parse { .. })));
    }

    #[test]
    fn invalid_entry_names_field() {
        let bad = SMALL.replace("width = 5.0\n        mass = 0.0055", "width = 0.0\n        mass = 0.0055");
        match Catalog::from_toml_str(&bad) {
            Err(CatalogError::Invalid { name, field, .. }) => {
                assert_eq!(name, "61800");
                assert_eq!(field, "width");
            }
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn bearing_selection_is_monotone_over_builtin() {
        let c = Catalog::builtin();
        let mut last = 0.0;
        for bore in 1..=120 {
            let b = c.select_bearing(bore as f64).unwrap();
            assert!(b.mass >= last);
            last = b.mass;
        }
    }

    #[test]
    fn bolt_selection_rounds_length_up() {
        let c = Catalog::builtin();
        assert_eq!(c.select_bolt(3.0, 21.0).unwrap().designation, "M3x25");
        assert_eq!(c.select_nut(3.0).unwrap().designation, "M3 nut");
        assert!(c.select_bolt(3.0, 500.0).is_err());
    }
}
