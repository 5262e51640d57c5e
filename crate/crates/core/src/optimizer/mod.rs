//! Cost evaluation and exhaustive search.
//!
//! `C = K_m M + K_w W - K_e η + K_g |GR_req - GR|` is minimised over every
//! design that passes all constraint families. Candidates are produced by
//! constraint-driven enumerators (derived ring teeth, diameter-bounded loops),
//! split into static partitions and scanned in parallel. Each partition keeps
//! its own incumbent and the partial results are merged by `(cost, X)`, so the
//! optimum and the statistics do not depend on the worker count.

mod dspg;
mod enumerate;
mod sweep;

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use dspg::SeriesIndex;
pub use enumerate::enumerate_designs;
pub use sweep::{sweep, SweepResult, SweepRow};

use crate::catalog::{Catalog, CatalogError, MotorSpec};
use crate::constraints::{check_all, ConstraintParams, FeasibilityReport};
use crate::design::{DesignError, GearboxDesign, Topology, VariableVector};
use crate::kinematics::{efficiency, gear_ratio, GearRatio, MeshEfficiencyModel};
use crate::mass::{MassBreakdown, MassError, MassModel};
use crate::scope::{LayoutParams, Scope};
use crate::sizing::{stage_face_widths, width_from_faces, SizingError, SizingParams, WidthBreakdown};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CostWeights {
    /// Per kg.
    pub k_m: f64,
    pub k_e: f64,
    /// Per mm.
    pub k_w: f64,
    pub k_g: f64,
    /// Target ratio; without one the ratio term is dropped.
    pub gr_req: Option<f64>,
}

impl Default for CostWeights {
    fn default() -> Self {
        CostWeights {
            k_m: 1.0,
            k_e: 1.0,
            k_w: 0.01,
            k_g: 1.0,
            gr_req: None,
        }
    }
}

impl CostWeights {
    pub fn new(k_m: f64, k_e: f64, k_w: f64, k_g: f64) -> Self {
        CostWeights {
            k_m,
            k_e,
            k_w,
            k_g,
            gr_req: None,
        }
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        CostWeights {
            k_m: self.k_m * lambda,
            k_e: self.k_e * lambda,
            k_w: self.k_w * lambda,
            k_g: self.k_g * lambda,
            gr_req: self.gr_req,
        }
    }

    /// `K_g` as applied: zero in range mode.
    pub fn effective_k_g(&self) -> f64 {
        if self.gr_req.is_some() {
            self.k_g
        } else {
            0.0
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        for (name, v) in [("k_m", self.k_m), ("k_e", self.k_e), ("k_w", self.k_w), ("k_g", self.k_g)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(format!("weight {name} = {v} must be a non-negative number"));
            }
        }
        if let Some(t) = self.gr_req {
            if !(t.is_finite() && t > 0.0) {
                return Err(format!("target ratio {t} must be positive"));
            }
        }
        Ok(())
    }

    pub fn cost(&self, mass: f64, efficiency: f64, width: f64, ratio: f64) -> f64 {
        let deviation = self.gr_req.map_or(0.0, |t| (t - ratio).abs());
        self.k_m * mass - self.k_e * efficiency + self.k_w * width + self.effective_k_g() * deviation
    }
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("design is infeasible: {}", .0.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Infeasible(FeasibilityReport),
    #[error(transparent)]
    Kinematics(#[from] DesignError),
    #[error(transparent)]
    Sizing(#[from] SizingError),
    #[error(transparent)]
    Mass(#[from] MassError),
}

/// Everything known about one feasible design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignEvaluation {
    pub design: GearboxDesign,
    pub ratio: GearRatio,
    pub efficiency: f64,
    pub mass: MassBreakdown,
    pub width: WidthBreakdown,
    pub cost: f64,
    pub feasibility: FeasibilityReport,
}

/// Metrics of a design whether or not it is feasible, for what-if checks.
#[derive(Debug, Clone, Serialize)]
pub struct Assessment {
    pub design: GearboxDesign,
    pub feasibility: FeasibilityReport,
    pub ratio: Option<GearRatio>,
    pub efficiency: Result<f64, String>,
    pub width: Option<WidthBreakdown>,
    pub mass: Option<MassBreakdown>,
    pub cost: Option<f64>,
}

/// Scalar results used inside the search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Score {
    pub cost: f64,
}

/// A motor, all model parameters and the cost weights: one optimisation problem.
#[derive(Debug, Clone)]
pub struct Problem {
    motor: MotorSpec,
    constraints: ConstraintParams,
    sizing: SizingParams,
    layout: LayoutParams,
    mesh: MeshEfficiencyModel,
    weights: CostWeights,
    mass: MassModel,
    base: Scope,
}

impl Problem {
    pub fn new(
        motor: MotorSpec,
        constraints: ConstraintParams,
        sizing: SizingParams,
        layout: LayoutParams,
        mesh: MeshEfficiencyModel,
        weights: CostWeights,
        mass: MassModel,
    ) -> Self {
        let base = Scope::fixed(&motor, &constraints, &sizing, &layout);
        Problem {
            motor,
            constraints,
            sizing,
            layout,
            mesh,
            weights,
            mass,
            base,
        }
    }

    /// Default parameters and the built-in component templates for a catalog motor.
    pub fn for_motor(catalog: &Catalog, motor: &str) -> Result<Self, CatalogError> {
        let motor = catalog.motor(motor)?.clone();
        let mass = MassModel::builtin(catalog).expect("built-in templates compile against a catalog with PLA");
        Ok(Problem::new(
            motor,
            ConstraintParams::default(),
            SizingParams::default(),
            LayoutParams::default(),
            MeshEfficiencyModel::default(),
            CostWeights::default(),
            mass,
        ))
    }

    fn rebuild(mut self) -> Self {
        self.base = Scope::fixed(&self.motor, &self.constraints, &self.sizing, &self.layout);
        self
    }

    pub fn with_constraints(mut self, c: ConstraintParams) -> Self {
        self.constraints = c;
        self.rebuild()
    }

    pub fn with_sizing(mut self, s: SizingParams) -> Self {
        self.sizing = s;
        self.rebuild()
    }

    pub fn with_layout(mut self, l: LayoutParams) -> Self {
        self.layout = l;
        self.rebuild()
    }

    pub fn with_mesh(mut self, m: MeshEfficiencyModel) -> Self {
        self.mesh = m;
        self
    }

    pub fn with_weights(mut self, w: CostWeights) -> Self {
        self.weights = w;
        self
    }

    pub fn with_mass_model(mut self, m: MassModel) -> Self {
        self.mass = m;
        self
    }

    /// Ratio range mode: bounds `[lo, hi]`, no target.
    pub fn with_ratio_range(mut self, lo: f64, hi: f64) -> Self {
        self.constraints.gr_min = lo;
        self.constraints.gr_max = hi;
        self.weights.gr_req = None;
        self
    }

    /// Target mode: bounds `[t - 1, t + 1]` and the ratio term active.
    pub fn with_ratio_target(mut self, target: f64) -> Self {
        self.constraints.gr_min = target - 1.0;
        self.constraints.gr_max = target + 1.0;
        self.weights.gr_req = Some(target);
        self
    }

    pub fn with_diameter_factor(mut self, k: f64) -> Self {
        self.constraints.diameter_factor = k;
        self.rebuild()
    }

    pub fn motor(&self) -> &MotorSpec {
        &self.motor
    }

    pub fn constraints(&self) -> &ConstraintParams {
        &self.constraints
    }

    pub fn sizing(&self) -> &SizingParams {
        &self.sizing
    }

    pub fn layout(&self) -> &LayoutParams {
        &self.layout
    }

    pub fn mesh(&self) -> &MeshEfficiencyModel {
        &self.mesh
    }

    pub fn weights(&self) -> &CostWeights {
        &self.weights
    }

    pub fn mass_model(&self) -> &MassModel {
        &self.mass
    }

    pub fn base_scope(&self) -> &Scope {
        &self.base
    }

    /// Named dimensions of `design` with its computed face widths.
    pub fn scope(&self, design: &GearboxDesign) -> Result<Scope, SizingError> {
        let faces = stage_face_widths(design, &self.motor, &self.sizing)?;
        let w = width_from_faces(design.topology, faces, &self.motor, &self.sizing);
        Ok(self.base.with_design(design, faces, w.gearbox_width))
    }

    /// Cost of a design already known to satisfy the constraints. `None` when
    /// the models reject it (efficiency outside (0, 1], no fitting hardware).
    pub(crate) fn score(&self, design: &GearboxDesign) -> Option<Score> {
        let eta = efficiency(design, &self.mesh).ok()?;
        let ratio = gear_ratio(design).ok()?;
        let faces = stage_face_widths(design, &self.motor, &self.sizing).ok()?;
        let w = width_from_faces(design.topology, faces, &self.motor, &self.sizing);
        let scope = self.base.with_design(design, faces, w.gearbox_width);
        let gearbox = self.mass.gearbox_mass(&scope, false).ok()?;
        Some(Score {
            cost: self.weights.cost(gearbox + self.motor.mass, eta, w.actuator_width, ratio.value),
        })
    }

    /// Cost used by the search, or `None` if the design is rejected.
    pub fn cost_of(&self, design: &GearboxDesign) -> Option<f64> {
        if !crate::constraints::is_feasible(design, &self.motor, &self.constraints) {
            return None;
        }
        self.score(design).map(|s| s.cost)
    }

    /// Full evaluation of a feasible design.
    pub fn evaluate(&self, design: &GearboxDesign) -> Result<DesignEvaluation, EvalError> {
        let feasibility = check_all(design, &self.motor, &self.constraints, false);
        if !feasibility.feasible {
            return Err(EvalError::Infeasible(feasibility));
        }
        let ratio = gear_ratio(design)?;
        let eta = efficiency(design, &self.mesh)?;
        let faces = stage_face_widths(design, &self.motor, &self.sizing)?;
        let width = width_from_faces(design.topology, faces, &self.motor, &self.sizing);
        let scope = self.base.with_design(design, faces, width.gearbox_width);
        let mass = self.mass.breakdown(&scope, false, self.motor.mass)?;
        let gearbox = self.mass.gearbox_mass(&scope, false)?;
        let cost = self
            .weights
            .cost(gearbox + self.motor.mass, eta, width.actuator_width, ratio.value);
        Ok(DesignEvaluation {
            design: *design,
            ratio,
            efficiency: eta,
            mass,
            width,
            cost,
            feasibility,
        })
    }

    /// Constraint report plus whatever metrics can be computed.
    pub fn assess(&self, design: &GearboxDesign) -> Assessment {
        let feasibility = check_all(design, &self.motor, &self.constraints, false);
        let ratio = gear_ratio(design).ok();
        let eta = efficiency(design, &self.mesh).map_err(|e| e.to_string());
        let faces = stage_face_widths(design, &self.motor, &self.sizing).ok();
        let width = faces.map(|f| width_from_faces(design.topology, f, &self.motor, &self.sizing));
        let mass = match (faces, &width) {
            (Some(f), Some(w)) => {
                let scope = self.base.with_design(design, f, w.gearbox_width);
                self.mass.breakdown(&scope, design.is_empty(), self.motor.mass).ok()
            }
            _ => None,
        };
        let cost = match (&ratio, &eta, &width, &mass) {
            (Some(r), Ok(e), Some(w), Some(m)) => Some(self.weights.cost(m.total, *e, w.actuator_width, r.value)),
            _ => None,
        };
        Assessment {
            design: *design,
            feasibility,
            ratio,
            efficiency: eta,
            width,
            mass,
            cost,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchStats {
    /// Candidates produced by the enumerator before per-design checks.
    pub examined: u64,
    /// Candidates passing every constraint family.
    pub feasible: u64,
    /// Feasible candidates whose full cost was computed.
    pub evaluated: u64,
    /// Feasible candidates skipped because a cost lower bound exceeded the incumbent.
    pub pruned: u64,
    /// Feasible candidates rejected by the efficiency or hardware models.
    pub rejected: u64,
    pub partitions: u64,
    pub elapsed_ms: f64,
}

impl SearchStats {
    fn absorb(&mut self, o: &SearchStats) {
        self.examined += o.examined;
        self.feasible += o.feasible;
        self.evaluated += o.evaluated;
        self.pruned += o.pruned;
        self.rejected += o.rejected;
        self.partitions += o.partitions;
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeOutcome {
    pub topology: Topology,
    pub best: Option<DesignEvaluation>,
    pub stats: SearchStats,
}

/// Best candidate of one partition.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Local {
    pub best: Option<(f64, VariableVector, GearboxDesign)>,
    pub stats: SearchStats,
}

impl Local {
    pub fn offer(&mut self, cost: f64, design: GearboxDesign) {
        let x = design.variables();
        let better = match &self.best {
            None => true,
            Some((c, bx, _)) => cost.total_cmp(c).then_with(|| x.cmp(bx)).is_lt(),
        };
        if better {
            self.best = Some((cost, x, design));
        }
    }

    pub fn incumbent(&self) -> f64 {
        self.best.map_or(f64::INFINITY, |b| b.0)
    }

    fn merge(mut self, other: Local) -> Local {
        self.stats.absorb(&other.stats);
        if let Some((c, _, d)) = other.best {
            self.offer(c, d);
        }
        self
    }
}

/// Runs `f` over the partitions on `workers` threads and merges in partition order.
pub(crate) fn run_partitions<K: Sync>(keys: &[K], options: &SearchOptions, f: impl Fn(&K) -> Local + Sync) -> Local {
    let work = || keys.par_iter().map(&f).collect::<Vec<_>>();
    let parts = match options.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("thread pool")
            .install(work),
        None => work(),
    };
    parts.into_iter().fold(Local::default(), Local::merge)
}

/// Global optimum for one topology under the problem's bounds and weights.
pub fn optimize(problem: &Problem, topology: Topology, options: &SearchOptions) -> OptimizeOutcome {
    let start = Instant::now();
    let local = match topology {
        Topology::Dspg => SeriesIndex::build(problem).search(problem, options),
        _ => enumerate::search(problem, topology, options),
    };
    finish(problem, topology, local, start)
}

pub(crate) fn finish(problem: &Problem, topology: Topology, local: Local, start: Instant) -> OptimizeOutcome {
    let best = local.best.and_then(|(cost, _, design)| {
        let eval = problem.evaluate(&design);
        debug_assert!(eval.is_ok(), "search returned a design that fails evaluation: {design}");
        let eval = eval.ok()?;
        debug_assert_eq!(eval.cost.to_bits(), cost.to_bits(), "search cost disagrees with evaluation");
        Some(eval)
    });
    let mut stats = local.stats;
    stats.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    OptimizeOutcome { topology, best, stats }
}
