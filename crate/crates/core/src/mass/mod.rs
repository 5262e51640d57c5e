//! Actuator mass from a decomposition into cylinders, shells, cones and
//! catalog hardware.

mod template;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use template::{Component, Shape, TemplateSet, DEFAULT_TEMPLATES};

use crate::catalog::{Catalog, CatalogError, Material, MotorSpec};
use crate::constraints::ConstraintParams;
use crate::design::{GearStage, GearboxDesign};
use crate::scope::{Dependence, LayoutParams, Scope};
use crate::sizing::{SizingParams, WidthBreakdown};

#[derive(Debug, Error)]
pub enum MassError {
    #[error("cannot parse component template: {0}")]
    TemplateParse(String),
    #[error("template entry `{component}`: {message}")]
    Template { component: String, message: String },
    #[error("component `{component}`: {source}")]
    Hardware {
        component: String,
        #[source]
        source: CatalogError,
    },
    #[error("component `{component}` has invalid dimension {field} = {value}")]
    Dimension {
        component: String,
        field: &'static str,
        value: f64,
    },
    #[error("{role} gear is absent from this stage")]
    MissingGear { role: GearRole },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrimitiveKind {
    SolidCylinder,
    HollowCylinder,
    Cone,
}

/// A simple solid. Dimensions in mm, density in kg/m³.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryPrimitive {
    pub kind: PrimitiveKind,
    pub outer_diameter: f64,
    pub inner_diameter: f64,
    pub height: f64,
    pub density: f64,
}

impl GeometryPrimitive {
    pub fn solid_cylinder(diameter: f64, height: f64, material: &Material) -> Self {
        GeometryPrimitive {
            kind: PrimitiveKind::SolidCylinder,
            outer_diameter: diameter,
            inner_diameter: 0.0,
            height,
            density: material.density,
        }
    }

    pub fn hollow_cylinder(outer: f64, inner: f64, height: f64, material: &Material) -> Self {
        GeometryPrimitive {
            kind: PrimitiveKind::HollowCylinder,
            outer_diameter: outer,
            inner_diameter: inner,
            height,
            density: material.density,
        }
    }

    pub fn cone(base_diameter: f64, height: f64, material: &Material) -> Self {
        GeometryPrimitive {
            kind: PrimitiveKind::Cone,
            outer_diameter: base_diameter,
            inner_diameter: 0.0,
            height,
            density: material.density,
        }
    }
}

const MM3_TO_M3: f64 = 1e-9;

fn volume(kind: PrimitiveKind, outer: f64, inner: f64, height: f64) -> f64 {
    let ro = outer / 2.0;
    let ri = inner / 2.0;
    match kind {
        PrimitiveKind::SolidCylinder => PI * ro * ro * height,
        PrimitiveKind::HollowCylinder => PI * (ro * ro - ri * ri) * height,
        PrimitiveKind::Cone => PI / 3.0 * ro * ro * height,
    }
}

/// Mass in kg.
pub fn primitive_mass(p: &GeometryPrimitive) -> f64 {
    volume(p.kind, p.outer_diameter, p.inner_diameter, p.height) * MM3_TO_M3 * p.density
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GearRole {
    Sun,
    Planet,
    Ring,
}

impl std::fmt::Display for GearRole {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GearRole::Sun => "sun",
            GearRole::Planet => "planet",
            GearRole::Ring => "ring",
        })
    }
}

/// Mass of one gear body: pitch-diameter disc for sun and planet, a shell of
/// radial width `ring_radial_width` outside the pitch circle for the ring.
pub fn gear_mass(stage: &GearStage, role: GearRole, face_width: f64, material: &Material, ring_radial_width: f64) -> Result<f64, MassError> {
    let teeth = match role {
        GearRole::Sun => stage.sun_teeth,
        GearRole::Planet => stage.planet_teeth,
        GearRole::Ring => stage.ring_teeth,
    };
    if teeth == 0 {
        return Err(MassError::MissingGear { role });
    }
    let d = stage.pitch_diameter(teeth);
    let p = match role {
        GearRole::Ring => GeometryPrimitive::hollow_cylinder(d + 2.0 * ring_radial_width, d, face_width, material),
        _ => GeometryPrimitive::solid_cylinder(d, face_width, material),
    };
    Ok(primitive_mass(&p))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassBreakdown {
    /// kg per named part (already multiplied by its count).
    pub per_component: BTreeMap<String, f64>,
    pub gearbox_mass: f64,
    pub motor_mass: f64,
    pub total: f64,
}

/// Compiled templates bound to a catalog.
#[derive(Debug, Clone)]
pub struct MassModel {
    catalog: Catalog,
    templates: TemplateSet,
}

impl MassModel {
    pub fn new(catalog: Catalog, templates: TemplateSet) -> Self {
        MassModel { catalog, templates }
    }

    pub fn builtin(catalog: &Catalog) -> Result<Self, MassError> {
        Ok(MassModel::new(catalog.clone(), TemplateSet::builtin(catalog)?))
    }

    pub fn templates(&self) -> &TemplateSet {
        &self.templates
    }

    pub fn catalog(&self) -> &Catalog {
        &self.catalog
    }

    /// Parts that apply to the scope's design: the shared housing parts,
    /// plus the layout's parts unless the gearbox is empty.
    pub fn components<'a>(&'a self, scope: &Scope, empty: bool) -> impl Iterator<Item = &'a Component> + 'a {
        let layout: &[Component] = if empty { &[] } else { self.templates.for_topology(scope.topology()) };
        self.templates.common.iter().chain(layout.iter())
    }

    /// Mass of one template entry, count included.
    pub fn component_mass(&self, c: &Component, scope: &Scope) -> Result<f64, MassError> {
        let v = scope.values();
        let count = c.count.eval(v).round();
        if !(count >= 0.0) {
            return Err(MassError::Dimension {
                component: c.name.clone(),
                field: "count",
                value: count,
            });
        }
        if count == 0.0 {
            return Ok(0.0);
        }
        let hardware = |e: CatalogError| MassError::Hardware {
            component: c.name.clone(),
            source: e,
        };
        let each = match &c.shape {
            Shape::Primitive {
                kind,
                density,
                outer_diameter,
                inner_diameter,
                height,
                ..
            } => {
                let od = outer_diameter.eval(v);
                let id = inner_diameter.as_ref().map_or(0.0, |e| e.eval(v));
                let h = height.eval(v);
                if !(od >= 0.0 && h >= 0.0 && id >= 0.0 && id <= od) {
                    let (field, value) = if !(od >= 0.0) {
                        ("outer_diameter", od)
                    } else if !(h >= 0.0) {
                        ("height", h)
                    } else {
                        ("inner_diameter", id)
                    };
                    return Err(MassError::Dimension {
                        component: c.name.clone(),
                        field,
                        value,
                    });
                }
                volume(*kind, od, id, h) * MM3_TO_M3 * density
            }
            Shape::Bearing { bore } => self.catalog.select_bearing(bore.eval(v)).map_err(hardware)?.mass,
            Shape::Bolt { diameter, length } => {
                self.catalog
                    .select_bolt(diameter.eval(v), length.eval(v))
                    .map_err(hardware)?
                    .mass
            }
            Shape::Nut { diameter } => self.catalog.select_nut(diameter.eval(v)).map_err(hardware)?.mass,
        };
        Ok(each * count)
    }

    /// Sum over parts of one dependence class, in template order.
    pub fn class_mass(&self, scope: &Scope, empty: bool, class: Dependence) -> Result<f64, MassError> {
        let mut total = 0.0;
        for c in self.components(scope, empty).filter(|c| c.dependence == class) {
            total += self.component_mass(c, scope)?;
        }
        Ok(total)
    }

    /// Like [`MassModel::class_mass`], but gives up with `None` as soon as
    /// `stop` accepts the running sum. Part masses are never negative, so the
    /// running sum only grows.
    pub fn class_mass_until(&self, scope: &Scope, empty: bool, class: Dependence, mut stop: impl FnMut(f64) -> bool) -> Result<Option<f64>, MassError> {
        let mut total = 0.0;
        for c in self.components(scope, empty).filter(|c| c.dependence == class) {
            total += self.component_mass(c, scope)?;
            if stop(total) {
                return Ok(None);
            }
        }
        Ok(Some(total))
    }

    /// Gearbox mass (motor excluded) without building the breakdown map.
    /// Summed class by class so that two-stage searches can reuse per-stage
    /// partial sums and still reproduce this value bit for bit.
    pub fn gearbox_mass(&self, scope: &Scope, empty: bool) -> Result<f64, MassError> {
        let mut total = 0.0;
        for class in [Dependence::Const, Dependence::Stage1, Dependence::Stage2, Dependence::Global] {
            total += self.class_mass(scope, empty, class)?;
        }
        Ok(total)
    }

    pub fn breakdown(&self, scope: &Scope, empty: bool, motor_mass: f64) -> Result<MassBreakdown, MassError> {
        let mut per_component = BTreeMap::new();
        for c in self.components(scope, empty) {
            per_component.insert(c.name.clone(), self.component_mass(c, scope)?);
        }
        let gearbox_mass: f64 = per_component.values().sum();
        Ok(MassBreakdown {
            per_component,
            gearbox_mass,
            motor_mass,
            total: gearbox_mass + motor_mass,
        })
    }
}

/// Breakdown for a design with given widths, using the built-in templates and
/// default constraint and layout parameters.
pub fn actuator_mass(design: &GearboxDesign, motor: &MotorSpec, widths: &WidthBreakdown, catalog: &Catalog) -> Result<MassBreakdown, MassError> {
    let model = MassModel::builtin(catalog)?;
    let base = Scope::fixed(motor, &ConstraintParams::default(), &SizingParams::default(), &LayoutParams::default());
    let mut faces = [0.0; 2];
    for (i, b) in widths.stage_face_widths.iter().take(2).enumerate() {
        faces[i] = *b;
    }
    let scope = base.with_design(design, faces, widths.gearbox_width);
    model.breakdown(&scope, design.is_empty(), motor.mass)
}
