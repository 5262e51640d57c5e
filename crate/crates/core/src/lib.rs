//! Planetary gearbox design search for robot actuators.
//!
//! Given a motor and a gear-ratio target or range, the crate enumerates
//! single-stage, compound, double-stage and Wolfrom planetary designs, scores
//! them by mass, efficiency, axial width and ratio error, and returns the
//! global optimum. The winning design can be written out as a parametric CAD
//! variable file.

pub mod cad;
pub mod catalog;
pub mod cli;
pub mod config;
pub mod constraints;
pub mod design;
pub mod expr;
pub mod kinematics;
pub mod mass;
pub mod optimizer;
pub mod scope;
pub mod sizing;
