//! Parsing and compiling the per-layout component tables.

use std::collections::BTreeSet;

use serde::Deserialize;

use crate::catalog::Catalog;
use crate::design::Topology;
use crate::expr::Expr;
use crate::scope::{Dependence, Sym};

use super::{MassError, PrimitiveKind};

pub const DEFAULT_TEMPLATES: &str = include_str!("../../data/templates.toml");

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Source {
    Text(String),
    Number(f64),
}

impl Source {
    fn text(&self) -> String {
        match self {
            Source::Text(s) => s.clone(),
            Source::Number(v) => format!("{v}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
enum RawKind {
    SolidCylinder,
    HollowCylinder,
    Cone,
    Bearing,
    Fastener,
    Nut,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawComponent {
    name: String,
    kind: RawKind,
    material: Option<String>,
    outer_diameter: Option<Source>,
    inner_diameter: Option<Source>,
    height: Option<Source>,
    bore: Option<Source>,
    diameter: Option<Source>,
    length: Option<Source>,
    count: Option<Source>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTemplates {
    #[serde(default)]
    common: Vec<RawComponent>,
    #[serde(default)]
    sspg: Vec<RawComponent>,
    #[serde(default)]
    cpg: Vec<RawComponent>,
    #[serde(default)]
    dspg: Vec<RawComponent>,
    #[serde(default)]
    wpg: Vec<RawComponent>,
}

#[derive(Debug, Clone)]
pub enum Shape {
    Primitive {
        kind: PrimitiveKind,
        material: String,
        density: f64,
        outer_diameter: Expr,
        inner_diameter: Option<Expr>,
        height: Expr,
    },
    Bearing {
        bore: Expr,
    },
    Bolt {
        diameter: Expr,
        length: Expr,
    },
    Nut {
        diameter: Expr,
    },
}

/// One compiled template entry.
#[derive(Debug, Clone)]
pub struct Component {
    pub name: String,
    pub shape: Shape,
    pub count: Expr,
    /// Which design stages the part's dimensions depend on.
    pub dependence: Dependence,
}

impl Component {
    fn exprs(&self) -> Vec<&Expr> {
        let mut v = vec![&self.count];
        match &self.shape {
            Shape::Primitive {
                outer_diameter,
                inner_diameter,
                height,
                ..
            } => {
                v.push(outer_diameter);
                v.push(height);
                v.extend(inner_diameter.iter());
            }
            Shape::Bearing { bore } => v.push(bore),
            Shape::Bolt { diameter, length } => {
                v.push(diameter);
                v.push(length);
            }
            Shape::Nut { diameter } => v.push(diameter),
        }
        v
    }

    /// Symbols referenced by any of the part's expressions.
    pub fn symbols(&self) -> BTreeSet<Sym> {
        self.exprs()
            .into_iter()
            .flat_map(|e| e.slots())
            .map(|i| Sym::ALL[i])
            .collect()
    }
}

/// Compiled templates for all layouts.
#[derive(Debug, Clone)]
pub struct TemplateSet {
    pub common: Vec<Component>,
    pub per_topology: [Vec<Component>; 4],
}

fn topology_slot(t: Topology) -> usize {
    match t {
        Topology::Sspg => 0,
        Topology::Cpg => 1,
        Topology::Dspg => 2,
        Topology::Wpg => 3,
    }
}

impl TemplateSet {
    pub fn builtin(catalog: &Catalog) -> Result<TemplateSet, MassError> {
        TemplateSet::parse(DEFAULT_TEMPLATES, catalog)
    }

    /// Parses and compiles a template document, resolving materials against `catalog`.
    pub fn parse(text: &str, catalog: &Catalog) -> Result<TemplateSet, MassError> {
        let raw: RawTemplates = toml::from_str(text).map_err(|e| MassError::TemplateParse(e.to_string()))?;
        let compile_all = |list: &[RawComponent], section: &str| -> Result<Vec<Component>, MassError> {
            let mut seen = BTreeSet::new();
            list.iter()
                .map(|c| {
                    if !seen.insert(c.name.clone()) {
                        return Err(MassError::Template {
                            component: format!("{section}.{}", c.name),
                            message: "duplicate name".into(),
                        });
                    }
                    compile(c, catalog).map_err(|message| MassError::Template {
                        component: format!("{section}.{}", c.name),
                        message,
                    })
                })
                .collect()
        };
        let set = TemplateSet {
            common: compile_all(&raw.common, "common")?,
            per_topology: [
                compile_all(&raw.sspg, "sspg")?,
                compile_all(&raw.cpg, "cpg")?,
                compile_all(&raw.dspg, "dspg")?,
                compile_all(&raw.wpg, "wpg")?,
            ],
        };
        for t in Topology::ALL {
            for c in set.common.iter().chain(set.for_topology(t)) {
                if let Some(sym) = c.symbols().into_iter().find(|s| !s.active(t)) {
                    return Err(MassError::Template {
                        component: format!("{}.{}", t.as_str(), c.name),
                        message: format!("`{}` is not defined for {t}", sym.name()),
                    });
                }
            }
            let clash = set
                .for_topology(t)
                .iter()
                .find(|c| set.common.iter().any(|k| k.name == c.name));
            if let Some(c) = clash {
                return Err(MassError::Template {
                    component: format!("{}.{}", t.as_str(), c.name),
                    message: "name also used in `common`".into(),
                });
            }
        }
        Ok(set)
    }

    pub fn for_topology(&self, t: Topology) -> &[Component] {
        &self.per_topology[topology_slot(t)]
    }
}

fn compile(raw: &RawComponent, catalog: &Catalog) -> Result<Component, String> {
    let expr = |field: &str, src: &Option<Source>| -> Result<Expr, String> {
        let src = src.as_ref().ok_or_else(|| format!("missing `{field}`"))?;
        Expr::compile(&src.text(), |n| Sym::from_name(n).map(Sym::index)).map_err(|e| format!("{field}: {e}"))
    };
    let forbid = |fields: &[(&str, bool)]| -> Result<(), String> {
        match fields.iter().find(|(_, present)| *present) {
            Some((name, _)) => Err(format!("`{name}` does not apply to {:?}", raw.kind)),
            None => Ok(()),
        }
    };
    let count = match &raw.count {
        Some(_) => expr("count", &raw.count)?,
        None => Expr::compile("1", |_| None).expect("literal"),
    };
    let shape = match raw.kind {
        RawKind::SolidCylinder | RawKind::HollowCylinder | RawKind::Cone => {
            let kind = match raw.kind {
                RawKind::SolidCylinder => PrimitiveKind::SolidCylinder,
                RawKind::HollowCylinder => PrimitiveKind::HollowCylinder,
                _ => PrimitiveKind::Cone,
            };
            forbid(&[
                ("bore", raw.bore.is_some()),
                ("diameter", raw.diameter.is_some()),
                ("length", raw.length.is_some()),
            ])?;
            let hollow = kind == PrimitiveKind::HollowCylinder;
            if !hollow && raw.inner_diameter.is_some() {
                return Err(format!("`inner_diameter` does not apply to {:?}", raw.kind));
            }
            let material = raw.material.clone().ok_or("missing `material`")?;
            let density = catalog.material(&material).map_err(|e| e.to_string())?.density;
            Shape::Primitive {
                kind,
                material,
                density,
                outer_diameter: expr("outer_diameter", &raw.outer_diameter)?,
                inner_diameter: if hollow { Some(expr("inner_diameter", &raw.inner_diameter)?) } else { None },
                height: expr("height", &raw.height)?,
            }
        }
        RawKind::Bearing => {
            forbid(&[
                ("material", raw.material.is_some()),
                ("outer_diameter", raw.outer_diameter.is_some()),
                ("inner_diameter", raw.inner_diameter.is_some()),
                ("height", raw.height.is_some()),
                ("diameter", raw.diameter.is_some()),
                ("length", raw.length.is_some()),
            ])?;
            Shape::Bearing {
                bore: expr("bore", &raw.bore)?,
            }
        }
        RawKind::Fastener | RawKind::Nut => {
            forbid(&[
                ("material", raw.material.is_some()),
                ("outer_diameter", raw.outer_diameter.is_some()),
                ("inner_diameter", raw.inner_diameter.is_some()),
                ("height", raw.height.is_some()),
                ("bore", raw.bore.is_some()),
            ])?;
            let diameter = expr("diameter", &raw.diameter)?;
            if raw.kind == RawKind::Nut {
                forbid(&[("length", raw.length.is_some())])?;
                Shape::Nut { diameter }
            } else {
                Shape::Bolt {
                    diameter,
                    length: expr("length", &raw.length)?,
                }
            }
        }
    };
    let mut c = Component {
        name: raw.name.clone(),
        shape,
        count,
        dependence: Dependence::Const,
    };
    c.dependence = c
        .symbols()
        .into_iter()
        .fold(Dependence::Const, |acc, s| acc.join(s.dependence()));
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_templates_compile() {
        let c = Catalog::builtin();
        let set = TemplateSet::builtin(&c).unwrap();
        assert!(!set.common.is_empty());
        for t in Topology::ALL {
            assert!(set.for_topology(t).len() >= 8, "{t}");
        }
        let sun = &set.for_topology(Topology::Dspg)[0];
        assert_eq!(sun.dependence, Dependence::Stage1);
    }

    #[test]
    fn rejects_unknown_symbol_and_missing_field() {
        let c = Catalog::builtin();
        let bad = "[[sspg]]\nname = \"x\"\nkind = \"solid_cylinder\"\nmaterial = \"PLA\"\nouter_diameter = \"d_q1\"\nheight = \"1\"\n";
        let err = TemplateSet::parse(bad, &c).unwrap_err();
        assert!(err.to_string().contains("d_q1"), "{err}");
        let missing = "[[sspg]]\nname = \"x\"\nkind = \"bearing\"\n";
        assert!(TemplateSet::parse(missing, &c).unwrap_err().to_string().contains("bore"));
    }

    #[test]
    fn rejects_stage_two_symbol_in_single_stage() {
        let c = Catalog::builtin();
        let bad = "[[sspg]]\nname = \"x\"\nkind = \"bearing\"\nbore = \"d_p2\"\n";
        assert!(TemplateSet::parse(bad, &c).is_err());
    }
}
