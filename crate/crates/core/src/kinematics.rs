//! Closed-form reduction ratios and mesh-loss efficiencies for the four layouts.
//!
//! Ratios are carried as exact rationals (tooth counts are integers) next to
//! an independently computed `f64`. Efficiencies compose per-mesh basic
//! driving efficiencies of the form `1 - k_f (1/z_a ± 1/z_b)`.

use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize, Serializer};

use crate::design::{DesignError, GearStage, GearboxDesign, Topology};

/// Per-mesh loss model: external meshes lose `k_f (1/z_a + 1/z_b)`, internal
/// meshes `k_f (1/z_p - 1/z_r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeshEfficiencyModel {
    pub friction_factor: f64,
}

impl MeshEfficiencyModel {
    pub const DEFAULT_FRICTION_FACTOR: f64 = 0.7223;

    pub fn new(friction_factor: f64) -> Result<Self, DesignError> {
        if !(0.0..2.0).contains(&friction_factor) {
            return Err(DesignError::InvalidFrictionFactor(friction_factor));
        }
        Ok(MeshEfficiencyModel { friction_factor })
    }

    pub fn lossless() -> Self {
        MeshEfficiencyModel { friction_factor: 0.0 }
    }

    pub fn external(&self, z_a: u32, z_b: u32) -> f64 {
        mesh_efficiency_external(z_a, z_b, self)
    }

    pub fn internal(&self, z_planet: u32, z_ring: u32) -> f64 {
        mesh_efficiency_internal(z_planet, z_ring, self)
    }
}

impl Default for MeshEfficiencyModel {
    fn default() -> Self {
        MeshEfficiencyModel {
            friction_factor: Self::DEFAULT_FRICTION_FACTOR,
        }
    }
}

pub fn mesh_efficiency_external(z_a: u32, z_b: u32, model: &MeshEfficiencyModel) -> f64 {
    1.0 - model.friction_factor * (1.0 / z_a as f64 + 1.0 / z_b as f64)
}

pub fn mesh_efficiency_internal(z_planet: u32, z_ring: u32, model: &MeshEfficiencyModel) -> f64 {
    1.0 - model.friction_factor * (1.0 / z_planet as f64 - 1.0 / z_ring as f64)
}

/// Reduction ratio `ω_in / ω_out` as a magnitude. `reversed` is set when the
/// output turns against the input (Wolfrom trains with `I_2 > 1`).
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct GearRatio {
    #[serde(deserialize_with = "deserialize_ratio")]
    pub exact: Ratio<i64>,
    pub value: f64,
    pub reversed: bool,
}

impl GearRatio {
    fn from_parts(exact: Ratio<i64>, value: f64) -> Self {
        GearRatio {
            exact: exact.abs(),
            value: value.abs(),
            reversed: exact.is_negative(),
        }
    }

    /// Rational converted to float, for cross-checking `value`.
    pub fn exact_f64(&self) -> f64 {
        self.exact.to_f64().unwrap_or(f64::NAN)
    }
}

impl Serialize for GearRatio {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("GearRatio", 3)?;
        s.serialize_field("exact", &format!("{}/{}", self.exact.numer(), self.exact.denom()))?;
        s.serialize_field("value", &self.value)?;
        s.serialize_field("reversed", &self.reversed)?;
        s.end()
    }
}

fn deserialize_ratio<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Ratio<i64>, D::Error> {
    let text = String::deserialize(d)?;
    let (n, den) = text
        .split_once('/')
        .ok_or_else(|| serde::de::Error::custom(format!("expected `num/den`, got `{text}`")))?;
    let n: i64 = n.trim().parse().map_err(serde::de::Error::custom)?;
    let den: i64 = den.trim().parse().map_err(serde::de::Error::custom)?;
    if den == 0 {
        return Err(serde::de::Error::custom("zero denominator"));
    }
    Ok(Ratio::new(n, den))
}

fn int(n: u32) -> i64 {
    n as i64
}

/// Ratio of one sun-input, ring-fixed, carrier-output stage: `(N_s + N_r) / N_s`.
pub fn stage_ratio(stage: &GearStage) -> GearRatio {
    let exact = Ratio::new(int(stage.sun_teeth + stage.ring_teeth), int(stage.sun_teeth));
    let value = (stage.sun_teeth + stage.ring_teeth) as f64 / stage.sun_teeth as f64;
    GearRatio::from_parts(exact, value)
}

/// Efficiency of one sun-input, ring-fixed, carrier-output stage.
pub fn stage_efficiency(stage: &GearStage, model: &MeshEfficiencyModel) -> f64 {
    let ns = stage.sun_teeth as f64;
    let nr = stage.ring_teeth as f64;
    let sun_planet = model.external(stage.sun_teeth, stage.planet_teeth);
    let planet_ring = model.internal(stage.planet_teeth, stage.ring_teeth);
    (ns + sun_planet * planet_ring * nr) / (ns + nr)
}

/// Wolfrom intermediate ratios `I_1 = N_r1 / N_s1` and `I_2 = N_r1 N_p2 / (N_p1 N_r2)`.
pub fn wolfrom_ratios(design: &GearboxDesign) -> (Ratio<i64>, Ratio<i64>) {
    let (s1, s2) = (&design.stage1, &design.stage2);
    let i1 = Ratio::new(int(s1.ring_teeth), int(s1.sun_teeth));
    let i2 = Ratio::new(
        int(s1.ring_teeth) * int(s2.planet_teeth),
        int(s1.planet_teeth) * int(s2.ring_teeth),
    );
    (i1, i2)
}

pub fn gear_ratio(design: &GearboxDesign) -> Result<GearRatio, DesignError> {
    design.validate()?;
    let (s1, s2) = (&design.stage1, &design.stage2);
    Ok(match design.topology {
        Topology::Sspg => stage_ratio(s1),
        Topology::Cpg => {
            let (ns, np1, np2) = (s1.sun_teeth, s1.planet_teeth, s2.planet_teeth);
            let num = int(ns + np1) * int(np2 + np1);
            let den = int(ns) * int(np2);
            let value = ((ns + np1) as f64 * (np2 + np1) as f64) / (ns as f64 * np2 as f64);
            GearRatio::from_parts(Ratio::new(num, den), value)
        }
        Topology::Dspg => {
            let (a, b) = (stage_ratio(s1), stage_ratio(s2));
            GearRatio::from_parts(a.exact * b.exact, a.value * b.value)
        }
        Topology::Wpg => {
            let (i1, i2) = wolfrom_ratios(design);
            if i2.is_one() {
                return Err(DesignError::DegenerateRatio);
            }
            let one = Ratio::one();
            let exact = (one + i1) / (one - i2);
            let i1f = s1.ring_teeth as f64 / s1.sun_teeth as f64;
            let i2f = (s1.ring_teeth as f64 * s2.planet_teeth as f64) / (s1.planet_teeth as f64 * s2.ring_teeth as f64);
            GearRatio::from_parts(exact, (1.0 + i1f) / (1.0 - i2f))
        }
    })
}

/// Mesh-loss efficiency of the whole train. Values outside `(0, 1]` are
/// reported as errors rather than clamped.
pub fn efficiency(design: &GearboxDesign, model: &MeshEfficiencyModel) -> Result<f64, DesignError> {
    design.validate()?;
    let (s1, s2) = (&design.stage1, &design.stage2);
    let value = match design.topology {
        Topology::Sspg => stage_efficiency(s1, model),
        Topology::Dspg => stage_efficiency(s1, model) * stage_efficiency(s2, model),
        Topology::Cpg => {
            let ns = s1.sun_teeth as f64;
            let np1 = s1.planet_teeth as f64;
            let np2 = s2.planet_teeth as f64;
            let nr2 = s2.ring_teeth as f64;
            let sun_planet = model.external(s1.sun_teeth, s1.planet_teeth);
            let planet_ring = model.internal(s2.planet_teeth, s2.ring_teeth);
            (ns * np2 + sun_planet * planet_ring * np1 * nr2) / ((ns + np1) * (np2 + np1))
        }
        Topology::Wpg => {
            let i1 = s1.ring_teeth as f64 / s1.sun_teeth as f64;
            let i2 = (s1.ring_teeth as f64 * s2.planet_teeth as f64) / (s1.planet_teeth as f64 * s2.ring_teeth as f64);
            let sun_planet = model.external(s1.sun_teeth, s1.planet_teeth);
            let ring1 = model.internal(s1.planet_teeth, s1.ring_teeth);
            let ring2 = model.internal(s2.planet_teeth, s2.ring_teeth);
            let denominator = ring1 * ring2 - i2;
            if denominator.abs() < 1e-12 {
                return Err(DesignError::DegenerateEfficiency { denominator });
            }
            ring2 * (ring1 + sun_planet * i1) * (1.0 - i2) / ((1.0 + i1) * denominator)
        }
    };
    if !(value > 0.0 && value <= 1.0) {
        return Err(DesignError::EfficiencyOutOfRange { value });
    }
    Ok(value)
}

/// Exact comparison `lo <= ratio <= hi`.
pub fn ratio_within(ratio: &Ratio<i64>, lo: &Ratio<i64>, hi: &Ratio<i64>) -> bool {
    ratio >= lo && ratio <= hi && !ratio.is_zero()
}
