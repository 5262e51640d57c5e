//! Face widths from the Lewis bending equation and the resulting axial stack.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::MotorSpec;
use crate::design::{DesignError, GearStage, GearboxDesign, Topology};
use crate::kinematics::stage_ratio;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SizingError {
    #[error("tangential force must be positive, got {0} N")]
    NonPositiveForce(f64),
    #[error("Lewis form factor is not positive for {0} teeth")]
    FormFactor(u32),
    #[error("stage {0} has no planets")]
    NoPlanets(usize),
    #[error("stage {0} is not active in this design")]
    InactiveStage(usize),
    #[error(transparent)]
    Design(#[from] DesignError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SizingParams {
    /// MPa.
    pub allowable_stress: f64,
    pub safety_factor: f64,
    pub min_face_width: f64,
    pub max_face_width: f64,
    /// Per interface; each gear layer has two.
    pub axial_clearance: f64,
    pub wall_thickness: f64,
    pub carrier_plate_thickness: f64,
    /// Land between the two gears of a stepped planet.
    pub compound_land: f64,
    /// `Y(z) = lewis_y0 - lewis_y1 / z`.
    pub lewis_y0: f64,
    pub lewis_y1: f64,
}

impl Default for SizingParams {
    fn default() -> Self {
        SizingParams {
            allowable_stress: 30.0,
            safety_factor: 2.0,
            min_face_width: 5.0,
            max_face_width: 30.0,
            axial_clearance: 1.0,
            wall_thickness: 3.0,
            carrier_plate_thickness: 5.0,
            compound_land: 2.0,
            lewis_y0: 0.484,
            lewis_y1: 2.87,
        }
    }
}

impl SizingParams {
    pub fn form_factor(&self, teeth: u32) -> f64 {
        self.lewis_y0 - self.lewis_y1 / teeth as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WidthBreakdown {
    pub stage_face_widths: Vec<f64>,
    pub gearbox_width: f64,
    pub actuator_width: f64,
}

/// Load on the weakest gear of one mesh layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshLoad {
    pub force: f64,
    pub module: f64,
    pub teeth: u32,
}

/// `b = clamp(SF F / (σ m Y(z)), b_min, b_max)` in mm for `F` in N, `m` in mm, `σ` in MPa.
pub fn lewis_face_width(force: f64, module: f64, teeth: u32, params: &SizingParams) -> Result<f64, SizingError> {
    if !(force > 0.0) {
        return Err(SizingError::NonPositiveForce(force));
    }
    let y = params.form_factor(teeth);
    if !(y > 0.0) {
        return Err(SizingError::FormFactor(teeth));
    }
    let b = params.safety_factor * force / (params.allowable_stress * module * y);
    Ok(b.clamp(params.min_face_width, params.max_face_width))
}

fn tangential(torque_nm: f64, pitch_mm: f64, planets: u32) -> f64 {
    2000.0 * torque_nm / (pitch_mm * planets as f64)
}

/// Tangential tooth load for the gear layer `stage_index` at the motor's peak torque.
pub fn stage_tangential_force(design: &GearboxDesign, stage_index: usize, motor: &MotorSpec) -> Result<MeshLoad, SizingError> {
    design.validate()?;
    let (s1, s2) = (&design.stage1, &design.stage2);
    if stage_index == 2 && design.topology == Topology::Sspg || !(1..=2).contains(&stage_index) {
        return Err(SizingError::InactiveStage(stage_index));
    }
    let stage = design.stage(stage_index);
    if stage.planet_count == 0 {
        return Err(SizingError::NoPlanets(stage_index));
    }
    let torque = motor.peak_torque;
    let n = s1.planet_count;
    let sun_force = tangential(torque, s1.pitch_diameter(s1.sun_teeth), n);
    let load = match (design.topology, stage_index) {
        (_, 1) => MeshLoad {
            force: sun_force,
            module: s1.module.mm(),
            teeth: s1.sun_teeth.min(s1.planet_teeth),
        },
        (Topology::Dspg, _) => series_second_load(stage_ratio(s1).value, s2, motor),
        (Topology::Cpg, _) => {
            // Carrier-mounted stepped planet: moments balance about the planet axis.
            let rp1 = s1.pitch_diameter(s1.planet_teeth);
            let rp2 = s2.pitch_diameter(s2.planet_teeth);
            MeshLoad {
                force: sun_force * rp1 / rp2,
                module: s2.module.mm(),
                teeth: s2.planet_teeth,
            }
        }
        (Topology::Wpg, _) => {
            // Free-floating carrier: force and moment balance on the stepped planet.
            let rp1 = s1.pitch_diameter(s1.planet_teeth);
            let rp2 = s2.pitch_diameter(s2.planet_teeth);
            let lever = (rp2 - rp1).abs().max(f64::EPSILON);
            MeshLoad {
                force: sun_force * 2.0 * rp1 / lever,
                module: s2.module.mm(),
                teeth: s2.planet_teeth,
            }
        }
        (Topology::Sspg, _) => unreachable!(),
    };
    Ok(load)
}

/// Load on the second stage of a series pair whose first stage reduces by `first_ratio`.
pub fn series_second_load(first_ratio: f64, s2: &GearStage, motor: &MotorSpec) -> MeshLoad {
    MeshLoad {
        force: tangential(motor.peak_torque * first_ratio, s2.pitch_diameter(s2.sun_teeth), s2.planet_count),
        module: s2.module.mm(),
        teeth: s2.sun_teeth.min(s2.planet_teeth),
    }
}

/// The first-layer planet of a Wolfrom train also carries the ring-1 reaction,
/// which exceeds the sun load; size that layer on the larger of the two.
fn first_layer_load(design: &GearboxDesign, motor: &MotorSpec) -> Result<MeshLoad, SizingError> {
    let load = stage_tangential_force(design, 1, motor)?;
    if design.topology != Topology::Wpg {
        return Ok(load);
    }
    let (s1, s2) = (&design.stage1, &design.stage2);
    let rp1 = s1.pitch_diameter(s1.planet_teeth);
    let rp2 = s2.pitch_diameter(s2.planet_teeth);
    let lever = (rp2 - rp1).abs().max(f64::EPSILON);
    Ok(MeshLoad {
        force: load.force * (rp1 + rp2) / lever,
        module: s1.module.mm(),
        teeth: s1.planet_teeth.min(s1.sun_teeth),
    })
}

/// Face width of each active gear layer; inactive layers report 0.
pub fn stage_face_widths(design: &GearboxDesign, motor: &MotorSpec, params: &SizingParams) -> Result<[f64; 2], SizingError> {
    let first = first_layer_load(design, motor)?;
    let b1 = lewis_face_width(first.force, first.module, first.teeth, params)?;
    let b2 = if design.topology == Topology::Sspg {
        0.0
    } else {
        let second = stage_tangential_force(design, 2, motor)?;
        lewis_face_width(second.force, second.module, second.teeth, params)?
    };
    Ok([b1, b2])
}

/// `(gearbox_width, actuator_width)` for given face widths.
pub fn stack_widths(topology: Topology, faces: [f64; 2], motor: &MotorSpec, params: &SizingParams) -> (f64, f64) {
    let layers = topology.stage_count() as f64;
    let carriers = if topology == Topology::Dspg { 2.0 } else { 1.0 };
    let land = if topology.has_compound_planets() { params.compound_land } else { 0.0 };
    let faces_total = if topology == Topology::Sspg { faces[0] } else { faces[0] + faces[1] };
    let gearbox = faces_total + land + 2.0 * params.axial_clearance * layers + params.carrier_plate_thickness * carriers;
    (gearbox, gearbox + motor.stack_length + 2.0 * params.wall_thickness)
}

/// Axial stack from given face widths.
pub fn width_from_faces(topology: Topology, faces: [f64; 2], motor: &MotorSpec, params: &SizingParams) -> WidthBreakdown {
    let (gearbox_width, actuator_width) = stack_widths(topology, faces, motor, params);
    WidthBreakdown {
        stage_face_widths: faces[..topology.stage_count()].to_vec(),
        gearbox_width,
        actuator_width,
    }
}

pub fn actuator_width(design: &GearboxDesign, motor: &MotorSpec, params: &SizingParams) -> Result<WidthBreakdown, SizingError> {
    let faces = stage_face_widths(design, motor, params)?;
    Ok(width_from_faces(design.topology, faces, motor, params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::Module;

    fn motor(torque: f64) -> MotorSpec {
        MotorSpec {
            name: "test".into(),
            outer_diameter: 80.0,
            stack_length: 26.0,
            mass: 0.2,
            peak_torque: torque,
            shaft_diameter: 8.0,
            bolt_circle_diameter: 30.0,
            bolt_count: 4,
        }
    }

    fn sspg(n: u32) -> GearboxDesign {
        GearboxDesign::sspg(GearStage::new(25, 65, 155, Module::from_tenths(5), n))
    }

    #[test]
    fn lewis_width_matches_hand_value() {
        let p = SizingParams {
            max_face_width: 100.0,
            ..SizingParams::default()
        };
        let b = lewis_face_width(100.0, 1.0, 18, &p).unwrap();
        assert!((b - 2.0 * 100.0 / (30.0 * (0.484 - 2.87 / 18.0))).abs() < 1e-12);
        assert!((b - 20.54).abs() < 0.01);
    }

    #[test]
    fn lewis_width_clamps_and_rejects() {
        let p = SizingParams::default();
        assert_eq!(lewis_face_width(1e-6, 1.0, 30, &p).unwrap(), p.min_face_width);
        assert_eq!(lewis_face_width(1e6, 1.0, 30, &p).unwrap(), p.max_face_width);
        assert!(lewis_face_width(0.0, 1.0, 30, &p).is_err());
    }

    #[test]
    fn module_doubling_halves_unclamped_width() {
        let p = SizingParams {
            min_face_width: 1e-9,
            max_face_width: 1e9,
            ..SizingParams::default()
        };
        let a = lewis_face_width(300.0, 0.5, 30, &p).unwrap();
        let b = lewis_face_width(300.0, 1.0, 30, &p).unwrap();
        assert!((a - 2.0 * b).abs() < 1e-12);
    }

    #[test]
    fn sun_force_is_shared_across_planets() {
        let f3 = stage_tangential_force(&sspg(3), 1, &motor(4.8)).unwrap().force;
        assert!((f3 - 256.0).abs() < 1e-9);
        // n_p = 6 is geometrically impossible but the load split is what matters here.
        let f6 = stage_tangential_force(&sspg(6), 1, &motor(4.8)).unwrap().force;
        assert!((f3 - 2.0 * f6).abs() < 1e-9);
        let t2 = stage_tangential_force(&sspg(3), 1, &motor(9.6)).unwrap().force;
        assert!((t2 - 2.0 * f3).abs() < 1e-9);
    }

    #[test]
    fn additive_width_example() {
        let p = SizingParams {
            axial_clearance: 1.0,
            ..SizingParams::default()
        };
        let w = width_from_faces(Topology::Sspg, [10.0, 0.0], &motor(1.0), &p);
        assert_eq!(w.gearbox_width, 17.0);
        assert_eq!(w.actuator_width, 49.0);
    }

    #[test]
    fn dspg_is_wider_than_its_first_stage() {
        let m = motor(1.0);
        let p = SizingParams::default();
        let s1 = GearStage::new(35, 52, 139, Module::from_tenths(5), 3);
        let s2 = GearStage::new(23, 28, 79, Module::from_tenths(10), 3);
        let dspg = actuator_width(&GearboxDesign::dspg(s1, s2), &m, &p).unwrap();
        let single = actuator_width(&GearboxDesign::sspg(s1), &m, &p).unwrap();
        assert!(dspg.actuator_width > single.actuator_width);
    }

    #[test]
    fn sspg_has_no_second_layer() {
        assert!(matches!(
            stage_tangential_force(&sspg(3), 2, &motor(1.0)),
            Err(SizingError::InactiveStage(2))
        ));
    }
}
