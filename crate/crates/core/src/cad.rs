//! Parametric CAD variable file.
//!
//! Every named dimension of a design is written as `name = value unit`, split
//! into optimization, fixed and dependent groups. Dependent entries carry
//! their defining expression as a trailing comment so that a CAD equation
//! table can be driven from the file directly.
//!
//! ```text
//! # gearbox variables
//! # schema: 1
//! # topology: sspg
//! # [optimization]
//! N_p1 = 65 count
//! module_1 = 0.500 mm
//! # [dependent]
//! a_1 = 22.500 mm  # module_1 * (N_s1 + N_p1) / 2
//! ```

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::design::{GearboxDesign, Topology};
use crate::optimizer::Problem;
use crate::scope::{dependent_expression, Group, Scope, Sym, Unit};
use crate::sizing::SizingError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CadError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("design has no gears")]
    EmptyDesign,
    #[error(transparent)]
    Sizing(#[from] SizingError),
}

/// Drawing constants that only the CAD model uses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CadParams {
    /// Degrees.
    pub pressure_angle: f64,
    pub addendum_coeff: f64,
    pub dedendum_coeff: f64,
    pub fillet_coeff: f64,
    pub backlash: f64,
    pub fit_clearance: f64,
    pub chamfer: f64,
    pub bolt_head_clearance: f64,
}

impl Default for CadParams {
    fn default() -> Self {
        CadParams {
            pressure_angle: 20.0,
            addendum_coeff: 1.0,
            dedendum_coeff: 1.25,
            fillet_coeff: 0.38,
            backlash: 0.1,
            fit_clearance: 0.2,
            chamfer: 0.5,
            bolt_head_clearance: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CadVariable {
    pub name: String,
    pub value: f64,
    pub unit: Unit,
    pub group: Group,
    /// Defining expression over other names, for dependent entries.
    pub expression: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CadVariableSet {
    pub topology: Topology,
    pub variables: Vec<CadVariable>,
}

fn round_to(value: f64, decimals: usize) -> f64 {
    let scale = 10f64.powi(decimals as i32);
    let r = (value * scale).round() / scale;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

struct Builder {
    vars: Vec<CadVariable>,
}

impl Builder {
    fn get(&self, name: &str) -> f64 {
        self.vars
            .iter()
            .find(|v| v.name == name)
            .unwrap_or_else(|| panic!("`{name}` is defined before use"))
            .value
    }

    fn fixed(&mut self, name: &str, value: f64, unit: Unit) {
        self.vars.push(CadVariable {
            name: name.into(),
            value,
            unit,
            group: Group::Fixed,
            expression: None,
        });
    }

    fn dep(&mut self, name: impl Into<String>, value: f64, unit: Unit, expression: impl Into<String>) -> f64 {
        self.vars.push(CadVariable {
            name: name.into(),
            value,
            unit,
            group: Group::Dependent,
            expression: Some(expression.into()),
        });
        value
    }

    /// Points on a circle: angle, x and y for each of `count` positions.
    fn pattern(&mut self, prefix: &str, count: u32, radius_name: &str, radius_expr_scale: &str, radius: f64) {
        for k in 1..=count {
            let angle_name = format!("{prefix}_{k}_angle");
            let angle = self.dep(
                &angle_name,
                360.0 * (k - 1) as f64 / count as f64,
                Unit::Deg,
                format!("360 * {} / {count}", k - 1),
            );
            let rad = angle * PI / 180.0;
            self.dep(
                format!("{prefix}_{k}_x"),
                radius * rad.cos(),
                Unit::Mm,
                format!("{radius_expr_scale}{radius_name} * cos({angle_name} * pi / 180)"),
            );
            self.dep(
                format!("{prefix}_{k}_y"),
                radius * rad.sin(),
                Unit::Mm,
                format!("{radius_expr_scale}{radius_name} * sin({angle_name} * pi / 180)"),
            );
        }
    }
}

/// `(gear, stage, internal)` for the gears that exist in `topology`.
fn gears(topology: Topology) -> Vec<(&'static str, u8, bool)> {
    let all = [("s1", 1, false), ("p1", 1, false), ("r1", 1, true), ("s2", 2, false), ("p2", 2, false), ("r2", 2, true)];
    all.into_iter()
        .filter(|(g, _, _)| Sym::from_name(&format!("d_{g}")).is_some_and(|s| s.active(topology)))
        .collect()
}

impl CadVariableSet {
    /// Variables for `design` with face widths sized by the problem's models.
    pub fn from_design(problem: &Problem, design: &GearboxDesign, params: &CadParams) -> Result<Self, CadError> {
        if design.is_empty() {
            return Err(CadError::EmptyDesign);
        }
        let scope = problem.scope(design)?;
        Ok(CadVariableSet::from_scope(&scope, params))
    }

    pub fn from_scope(scope: &Scope, params: &CadParams) -> Self {
        let topology = scope.topology();
        let mut b = Builder { vars: Vec::new() };
        for (sym, value) in scope.entries() {
            b.vars.push(CadVariable {
                name: sym.name().into(),
                value,
                unit: sym.unit(),
                group: sym.group(),
                expression: dependent_expression(sym, topology),
            });
        }
        b.fixed("pressure_angle", params.pressure_angle, Unit::Deg);
        b.fixed("addendum_coeff", params.addendum_coeff, Unit::Dimensionless);
        b.fixed("dedendum_coeff", params.dedendum_coeff, Unit::Dimensionless);
        b.fixed("fillet_coeff", params.fillet_coeff, Unit::Dimensionless);
        b.fixed("backlash", params.backlash, Unit::Mm);
        b.fixed("fit_clearance", params.fit_clearance, Unit::Mm);
        b.fixed("chamfer", params.chamfer, Unit::Mm);
        b.fixed("bolt_head_clearance", params.bolt_head_clearance, Unit::Mm);

        let stages: &[u8] = if topology == Topology::Sspg { &[1] } else { &[1, 2] };
        for &i in stages {
            let m = b.get(&format!("module_{i}"));
            let n = b.get(&format!("n_p{i}"));
            let cp = b.dep(format!("circular_pitch_{i}"), PI * m, Unit::Mm, format!("pi * module_{i}"));
            b.dep(
                format!("tooth_thickness_{i}"),
                cp / 2.0 - params.backlash / 2.0,
                Unit::Mm,
                format!("circular_pitch_{i} / 2 - backlash / 2"),
            );
            let ha = b.dep(format!("addendum_{i}"), params.addendum_coeff * m, Unit::Mm, format!("addendum_coeff * module_{i}"));
            let hf = b.dep(format!("dedendum_{i}"), params.dedendum_coeff * m, Unit::Mm, format!("dedendum_coeff * module_{i}"));
            b.dep(format!("whole_depth_{i}"), ha + hf, Unit::Mm, format!("addendum_{i} + dedendum_{i}"));
            b.dep(format!("fillet_radius_{i}"), params.fillet_coeff * m, Unit::Mm, format!("fillet_coeff * module_{i}"));
            b.dep(
                format!("pin_hole_d_{i}"),
                b.get("planet_pin_d") + params.fit_clearance,
                Unit::Mm,
                "planet_pin_d + fit_clearance",
            );
            b.dep(format!("planet_spacing_{i}"), 360.0 / n, Unit::Deg, format!("360 / n_p{i}"));
        }

        let cos_pa = (params.pressure_angle * PI / 180.0).cos();
        for (g, i, internal) in gears(topology) {
            let d = b.get(&format!("d_{g}"));
            let z = b.get(&format!("N_{g}"));
            let (ha, hf) = (b.get(&format!("addendum_{i}")), b.get(&format!("dedendum_{i}")));
            let (tip, tip_e, root, root_e) = if internal {
                (d - 2.0 * ha, "-", d + 2.0 * hf, "+")
            } else {
                (d + 2.0 * ha, "+", d - 2.0 * hf, "-")
            };
            b.dep(format!("tip_d_{g}"), tip, Unit::Mm, format!("d_{g} {tip_e} 2 * addendum_{i}"));
            b.dep(format!("root_d_{g}"), root, Unit::Mm, format!("d_{g} {root_e} 2 * dedendum_{i}"));
            b.dep(format!("base_d_{g}"), d * cos_pa, Unit::Mm, format!("d_{g} * cos(pressure_angle * pi / 180)"));
            b.dep(format!("angular_pitch_{g}"), 360.0 / z, Unit::Deg, format!("360 / N_{g}"));
        }
        b.dep(
            "sun_1_bore",
            b.get("motor_shaft_d") + params.fit_clearance,
            Unit::Mm,
            "motor_shaft_d + fit_clearance",
        );

        let planet_stages: &[u8] = if topology == Topology::Dspg { &[1, 2] } else { &[1] };
        for &i in planet_stages {
            let n = b.get(&format!("n_p{i}")) as u32;
            let a = b.get(&format!("a_{i}"));
            b.pattern(&format!("planet_{i}"), n, &format!("a_{i}"), "", a);
        }
        let n1 = b.get("n_p1") as u32;
        let (zs, zp) = (b.get("N_s1"), b.get("N_p1"));
        for k in 1..=n1 {
            let angle = b.get(&format!("planet_1_{k}_angle"));
            b.dep(
                format!("planet_1_{k}_phase"),
                angle * zs / zp,
                Unit::Deg,
                format!("planet_1_{k}_angle * N_s1 / N_p1"),
            );
        }

        let circle = b.dep(
            "housing_bolt_circle",
            b.get("housing_id") + b.get("wall"),
            Unit::Mm,
            "housing_id + wall",
        );
        let count = b.get("housing_bolt_count") as u32;
        b.pattern("housing_bolt", count, "housing_bolt_circle", "0.5 * ", circle / 2.0);
        let count = b.get("motor_bolt_count") as u32;
        let motor_circle = b.get("motor_bolt_circle");
        b.pattern("motor_bolt", count, "motor_bolt_circle", "0.5 * ", motor_circle / 2.0);
        b.dep("motor_cap_id", b.get("motor_shaft_d") + 2.0, Unit::Mm, "motor_shaft_d + 2");
        b.dep("output_cap_id", 0.5 * b.get("housing_id"), Unit::Mm, "0.5 * housing_id");

        let (clear, plate) = (b.get("axial_clearance"), b.get("carrier_plate_t"));
        let start = b.dep("z_gearbox_start", b.get("wall") + b.get("motor_stack"), Unit::Mm, "wall + motor_stack");
        let layer1 = b.dep("z_layer_1", start + clear, Unit::Mm, "z_gearbox_start + axial_clearance");
        let b1 = b.get("b_1");
        match topology {
            Topology::Sspg => {
                b.dep("z_carrier_1", layer1 + b1 + clear, Unit::Mm, "z_layer_1 + b_1 + axial_clearance");
            }
            Topology::Dspg => {
                let c1 = b.dep("z_carrier_1", layer1 + b1 + clear, Unit::Mm, "z_layer_1 + b_1 + axial_clearance");
                let l2 = b.dep(
                    "z_layer_2",
                    c1 + plate + clear,
                    Unit::Mm,
                    "z_carrier_1 + carrier_plate_t + axial_clearance",
                );
                let b2 = b.get("b_2");
                b.dep("z_carrier_2", l2 + b2 + clear, Unit::Mm, "z_layer_2 + b_2 + axial_clearance");
            }
            Topology::Cpg | Topology::Wpg => {
                let l2 = b.dep(
                    "z_layer_2",
                    layer1 + b1 + 2.0 * clear + b.get("compound_land"),
                    Unit::Mm,
                    "z_layer_1 + b_1 + 2 * axial_clearance + compound_land",
                );
                let b2 = b.get("b_2");
                b.dep("z_carrier_1", l2 + b2 + clear, Unit::Mm, "z_layer_2 + b_2 + axial_clearance");
            }
        }
        let end = b.dep(
            "z_gearbox_end",
            start + b.get("gearbox_width"),
            Unit::Mm,
            "z_gearbox_start + gearbox_width",
        );
        b.dep("z_output_face", end + b.get("wall"), Unit::Mm, "z_gearbox_end + wall");

        let mut variables = b.vars;
        variables.sort_by(|a, b| a.group.cmp(&b.group).then_with(|| a.name.cmp(&b.name)));
        CadVariableSet { topology, variables }
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&CadVariable> {
        self.variables.iter().find(|v| v.name == name)
    }

    pub fn count(&self, group: Group) -> usize {
        self.variables.iter().filter(|v| v.group == group).count()
    }

    /// Values rounded to the precision they are written with.
    pub fn rounded(&self) -> Self {
        let mut out = self.clone();
        for v in &mut out.variables {
            v.value = round_to(v.value, v.unit.decimals());
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("# gearbox variables\n");
        let _ = writeln!(out, "# schema: {SCHEMA_VERSION}");
        let _ = writeln!(out, "# topology: {}", self.topology.as_str());
        let mut group = None;
        for v in &self.variables {
            if group != Some(v.group) {
                let _ = writeln!(out, "# [{}]", v.group.as_str());
                group = Some(v.group);
            }
            let decimals = v.unit.decimals();
            let _ = write!(
                out,
                "{} = {:.*} {}",
                v.name,
                decimals,
                round_to(v.value, decimals),
                v.unit.as_str()
            );
            if let Some(e) = &v.expression {
                let _ = write!(out, "  # {e}");
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, CadError> {
        let err = |line: usize, message: String| CadError::Parse { line, message };
        let mut topology = None;
        let mut schema = None;
        let mut group = None;
        let mut variables: Vec<CadVariable> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                let comment = comment.trim();
                if let Some(v) = comment.strip_prefix("schema:") {
                    let v: u32 = v.trim().parse().map_err(|_| err(line_no, format!("bad schema `{}`", v.trim())))?;
                    if v != SCHEMA_VERSION {
                        return Err(err(line_no, format!("unsupported schema {v}")));
                    }
                    schema = Some(v);
                } else if let Some(t) = comment.strip_prefix("topology:") {
                    topology = Some(t.trim().parse::<Topology>().map_err(|e| err(line_no, e.to_string()))?);
                } else if let Some(g) = comment.strip_prefix('[').and_then(|g| g.strip_suffix(']')) {
                    group = Some(
                        Group::ALL
                            .into_iter()
                            .find(|x| x.as_str() == g)
                            .ok_or_else(|| err(line_no, format!("unknown group `{g}`")))?,
                    );
                }
                continue;
            }
            let group = group.ok_or_else(|| err(line_no, "entry before any group header".into()))?;
            let (body, expression) = match line.split_once('#') {
                Some((body, e)) => (body.trim(), Some(e.trim().to_string())),
                None => (line, None),
            };
            let (name, rest) = body
                .split_once('=')
                .ok_or_else(|| err(line_no, "expected `name = value unit`".into()))?;
            let name = name.trim();
            if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(err(line_no, format!("bad name `{name}`")));
            }
            let mut parts = rest.split_whitespace();
            let (Some(value), Some(unit), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(err(line_no, "expected `name = value unit`".into()));
            };
            let value: f64 = value.parse().map_err(|_| err(line_no, format!("bad number `{value}`")))?;
            let unit = Unit::parse(unit).ok_or_else(|| err(line_no, format!("unknown unit `{unit}`")))?;
            if variables.iter().any(|v| v.name == name) {
                return Err(err(line_no, format!("duplicate name `{name}`")));
            }
            variables.push(CadVariable {
                name: name.into(),
                value,
                unit,
                group,
                expression,
            });
        }
        if schema.is_none() {
            return Err(err(0, "missing `# schema:` header".into()));
        }
        let topology = topology.ok_or_else(|| err(0, "missing `# topology:` header".into()))?;
        Ok(CadVariableSet { topology, variables })
    }

    pub fn write(&self, path: &Path) -> Result<(), CadError> {
        std::fs::write(path, self.to_text()).map_err(|source| CadError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn read(path: &Path) -> Result<Self, CadError> {
        let text = std::fs::read_to_string(path).map_err(|source| CadError::Io {
            path: path.display().to_string(),
            source,
        })?;
        CadVariableSet::parse(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::Catalog;
    use crate::design::{GearStage, Module};

    #[test]
    fn sspg_file_shape() {
        let c = Catalog::builtin();
        let p = Problem::for_motor(&c, "MN8014").unwrap();
        let d = GearboxDesign::sspg(GearStage::new(25, 65, 155, Module::from_tenths(5), 3));
        let v = CadVariableSet::from_design(&p, &d, &CadParams::default()).unwrap();
        let text = v.to_text();
        assert!(text.starts_with("# gearbox variables\n# schema: 1\n# topology: sspg\n# [optimization]\n"));
        assert!(text.contains("\nN_s1 = 25 count\n"));
        assert!(text.contains("\nmodule_1 = 0.500 mm\n"));
        assert!(text.contains("\na_1 = 22.500 mm  # module_1 * (N_s1 + N_p1) / 2\n"));
        assert!(v.get("N_s2").is_none());
        assert_eq!(v.get("planet_1_2_angle").unwrap().value, 120.0);
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(CadVariableSet::parse("# schema: 1\n# topology: sspg\n# [fixed]\nx = 1\n").is_err());
        assert!(CadVariableSet::parse("# schema: 1\n# topology: sspg\nx = 1 mm\n").is_err());
        assert!(CadVariableSet::parse("# schema: 2\n# topology: sspg\n").is_err());
        assert!(CadVariableSet::parse("# schema: 1\n# topology: sspg\n# [fixed]\nx = 1 furlong\n").is_err());
        let ok = CadVariableSet::parse("# schema: 1\n# topology: cpg\n# [fixed]\nx = 1.500 mm\n").unwrap();
        assert_eq!(ok.get("x").unwrap().value, 1.5);
    }

    #[test]
    fn rounding_normalizes_negative_zero() {
        assert_eq!(round_to(-1e-12, 3).to_bits(), 0f64.to_bits());
        assert_eq!(round_to(2.0004, 3), 2.0);
    }
}
