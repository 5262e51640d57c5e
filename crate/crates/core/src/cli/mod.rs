//! Command-line front end behind the `gearbox-opt` binary.
//!
//! Every flag can also be set through an environment variable named
//! `GEARBOX_OPT_<FLAG>` (for example `GEARBOX_OPT_MOTOR`). Flags override the
//! configuration file, which overrides the built-in defaults.
//!
//! Exit codes: 0 success, 2 usage error, 3 no feasible design, 4 I/O error,
//! 5 catalog or template error.

pub mod plot;
pub mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::cad::{CadError, CadVariableSet};
use crate::config::{ConfigError, RunConfig};
use crate::design::{GearboxDesign, Topology};
use crate::optimizer::{optimize, sweep, OptimizeOutcome, Problem, SearchOptions};

use report::{EvalReport, OptimizeReport, SweepReport};

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INFEASIBLE: u8 = 3;
pub const EXIT_IO: u8 = 4;
pub const EXIT_CATALOG: u8 = 5;

#[derive(Debug, Parser)]
#[command(name = "gearbox-opt", version, about = "Exhaustive planetary gearbox design search")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GearboxArg {
    Sspg,
    Cpg,
    Dspg,
    Wpg,
    All,
}

impl GearboxArg {
    fn topologies(self) -> Vec<Topology> {
        match self {
            GearboxArg::Sspg => vec![Topology::Sspg],
            GearboxArg::Cpg => vec![Topology::Cpg],
            GearboxArg::Dspg => vec![Topology::Dspg],
            GearboxArg::Wpg => vec![Topology::Wpg],
            GearboxArg::All => Topology::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Layout to search or evaluate.
    #[arg(long, global = true, value_enum, env = "GEARBOX_OPT_GEARBOX")]
    pub gearbox: Option<GearboxArg>,
    /// Motor name from the catalog.
    #[arg(long, global = true, env = "GEARBOX_OPT_MOTOR")]
    pub motor: Option<String>,
    #[arg(long, global = true, env = "GEARBOX_OPT_GR_MIN")]
    pub gr_min: Option<f64>,
    #[arg(long, global = true, env = "GEARBOX_OPT_GR_MAX")]
    pub gr_max: Option<f64>,
    /// Target ratio: bounds become target +- 1 and the ratio term is active.
    #[arg(long, global = true, env = "GEARBOX_OPT_GR_TARGET", conflicts_with_all = ["gr_min", "gr_max"])]
    pub gr_target: Option<f64>,
    /// Maximum gearbox diameter as a multiple of the motor diameter.
    #[arg(long, global = true, env = "GEARBOX_OPT_KMGD")]
    pub kmgd: Option<f64>,
    /// Cost weights `k_m,k_e,k_w,k_g`.
    #[arg(long, global = true, env = "GEARBOX_OPT_WEIGHTS")]
    pub weights: Option<String>,
    #[arg(long, global = true, env = "GEARBOX_OPT_CONFIG")]
    pub config: Option<PathBuf>,
    /// Catalog directory or TOML file.
    #[arg(long, global = true, env = "GEARBOX_OPT_CATALOG")]
    pub catalog: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, env = "GEARBOX_OPT_OUT")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, env = "GEARBOX_OPT_WORKERS")]
    pub workers: Option<usize>,
    #[arg(long, global = true, value_enum, env = "GEARBOX_OPT_FORMAT")]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Find the cheapest feasible design.
    Optimize,
    /// Optimum per unit ratio bin, with CSV and SVG charts.
    Sweep {
        #[arg(long)]
        lo: Option<u32>,
        #[arg(long)]
        hi: Option<u32>,
        #[arg(long)]
        no_plots: bool,
    },
    /// Check and score an explicit design.
    Eval(DesignArgs),
    /// Write the CAD variable file of a design.
    Export {
        #[command(flatten)]
        design: DesignArgs,
        /// Optimisation result (JSON) whose design to export.
        #[arg(long, conflicts_with_all = ["stage1", "stage2"])]
        from: Option<PathBuf>,
        /// Output file; defaults to `<out>/<layout>_variables.txt`.
        #[arg(long)]
        file: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct DesignArgs {
    /// Stage 1 as `N_s,N_p,N_r,module,n_p`.
    #[arg(long)]
    pub stage1: Option<String>,
    /// Stage 2 as `N_s,N_p,N_r,module,n_p`.
    #[arg(long)]
    pub stage2: Option<String>,
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        CliError {
            code: EXIT_IO,
            message: format!("{}: {e}", path.display()),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        let code = match &e {
            ConfigError::Io { .. } => EXIT_IO,
            ConfigError::Catalog(_) | ConfigError::Mass(_) => EXIT_CATALOG,
            ConfigError::Parse(_) | ConfigError::Invalid(_) => EXIT_USAGE,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<CadError> for CliError {
    fn from(e: CadError) -> Self {
        let code = match &e {
            CadError::Io { .. } => EXIT_IO,
            _ => EXIT_USAGE,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

fn parse_weights(s: &str) -> Result<[f64; 4], CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || CliError::usage(format!("--weights expects four numbers k_m,k_e,k_w,k_g, got `{s}`"));
    if parts.len() != 4 {
        return Err(bad());
    }
    let mut w = [0.0; 4];
    for (slot, p) in w.iter_mut().zip(parts) {
        *slot = p.parse().map_err(|_| bad())?;
    }
    Ok(w)
}

type Row = ([u32; 3], f64, u32);

fn parse_stage(s: &str) -> Result<Row, CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || CliError::usage(format!("stage expects N_s,N_p,N_r,module,n_p, got `{s}`"));
    if parts.len() != 5 {
        return Err(bad());
    }
    let int = |p: &str| p.parse::<u32>().map_err(|_| bad());
    Ok((
        [int(parts[0])?, int(parts[1])?, int(parts[2])?],
        parts[3].parse::<f64>().map_err(|_| bad())?,
        int(parts[4])?,
    ))
}

/// Configuration file (if any) with flags applied on top.
pub fn resolve_config(args: &CommonArgs) -> Result<RunConfig, CliError> {
    let mut c = match &args.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(m) = &args.motor {
        c.motor = m.clone();
    }
    if let Some(p) = &args.catalog {
        c.catalog = Some(p.clone());
    }
    if let Some(k) = args.kmgd {
        c.constraints.diameter_factor = k;
    }
    if let Some(w) = &args.weights {
        let [k_m, k_e, k_w, k_g] = parse_weights(w)?;
        c.weights = crate::optimizer::CostWeights {
            k_m,
            k_e,
            k_w,
            k_g,
            gr_req: c.weights.gr_req,
        };
    }
    if let Some(t) = args.gr_target {
        c.constraints.gr_min = t - 1.0;
        c.constraints.gr_max = t + 1.0;
        c.weights.gr_req = Some(t);
    }
    if args.gr_min.is_some() || args.gr_max.is_some() {
        c.weights.gr_req = None;
    }
    if let Some(v) = args.gr_min {
        c.constraints.gr_min = v;
    }
    if let Some(v) = args.gr_max {
        c.constraints.gr_max = v;
    }
    if let Some(n) = args.workers {
        c.workers = Some(n);
    }
    c.validate()?;
    Ok(c)
}

fn out_dir(args: &CommonArgs) -> Result<PathBuf, CliError> {
    let dir = args.out.clone().unwrap_or_else(|| PathBuf::from("gearbox-out"));
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    Ok(dir)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

fn single_topology(args: &CommonArgs) -> Result<Topology, CliError> {
    match args.gearbox {
        Some(GearboxArg::All) | None => Err(CliError::usage("this command needs one --gearbox of sspg, cpg, dspg or wpg")),
        Some(g) => Ok(g.topologies()[0]),
    }
}

fn explicit_design(topology: Topology, d: &DesignArgs) -> Result<Option<GearboxDesign>, CliError> {
    let Some(s1) = &d.stage1 else {
        return Ok(None);
    };
    let row1 = parse_stage(s1)?;
    let row2 = match (&d.stage2, topology) {
        (Some(s2), _) => parse_stage(s2)?,
        (None, Topology::Sspg) => ([0; 3], 0.0, 0),
        (None, _) => return Err(CliError::usage(format!("{topology} needs --stage2"))),
    };
    GearboxDesign::from_rows(topology, row1, row2)
        .map(Some)
        .map_err(|e| CliError::usage(e.to_string()))
}

fn search_options(config: &RunConfig) -> SearchOptions {
    SearchOptions {
        workers: config.workers,
    }
}

fn cmd_optimize(args: &CommonArgs) -> Result<u8, CliError> {
    let config = resolve_config(args)?;
    let problem = config.problem()?;
    let topologies = args.gearbox.unwrap_or(GearboxArg::All).topologies();
    let options = search_options(&config);
    let results: Vec<OptimizeOutcome> = topologies.iter().map(|&t| optimize(&problem, t, &options)).collect();
    print!("{}", report::optimize_table(&results));
    let dir = out_dir(args)?;
    let path = match args.format.unwrap_or(Format::Json) {
        Format::Json => {
            let p = dir.join("optimize.json");
            let r = OptimizeReport {
                config: config.clone(),
                results: results.clone(),
            };
            write_file(&p, serde_json::to_string_pretty(&r).expect("serializable").as_bytes())?;
            p
        }
        Format::Csv => {
            let p = dir.join("optimize.csv");
            let mut buf = Vec::new();
            report::optimize_csv(&config, &results, &mut buf).map_err(|e| CliError::io(&p, e))?;
            write_file(&p, &buf)?;
            p
        }
    };
    eprintln!("wrote {}", path.display());
    Ok(if results.iter().any(|r| r.best.is_some()) { 0 } else { EXIT_INFEASIBLE })
}

fn cmd_sweep(args: &CommonArgs, lo: Option<u32>, hi: Option<u32>, no_plots: bool) -> Result<u8, CliError> {
    let mut config = resolve_config(args)?;
    if let Some(lo) = lo {
        config.sweep.lo = lo;
    }
    if let Some(hi) = hi {
        config.sweep.hi = hi;
    }
    if let Some(g) = args.gearbox {
        config.sweep.topologies = g.topologies();
    }
    config.validate()?;
    let problem = config.problem()?;
    let result = sweep(
        &problem,
        &config.sweep.topologies,
        config.sweep.lo,
        config.sweep.hi,
        &search_options(&config),
    );
    let dir = out_dir(args)?;
    let path = match args.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let p = dir.join("sweep.csv");
            let mut buf = Vec::new();
            report::sweep_csv(&config, &result, &mut buf).map_err(|e| CliError::io(&p, e))?;
            write_file(&p, &buf)?;
            p
        }
        Format::Json => {
            let p = dir.join("sweep.json");
            let r = SweepReport {
                config: config.clone(),
                sweep: result.clone(),
            };
            write_file(&p, serde_json::to_string_pretty(&r).expect("serializable").as_bytes())?;
            p
        }
    };
    eprintln!("wrote {}", path.display());
    if !no_plots {
        for (stem, svg) in report::sweep_charts(&result) {
            write_file(&dir.join(format!("{stem}.svg")), svg.as_bytes())?;
        }
    }
    for t in &config.sweep.topologies {
        let max = result.rows_for(*t).filter(|r| r.best.is_some()).map(|r| r.bin_hi).max();
        match max {
            Some(m) => println!("{:<5} feasible up to ratio {m}", t.label()),
            None => println!("{:<5} infeasible in every bin", t.label()),
        }
    }
    Ok(if result.rows.iter().any(|r| r.best.is_some()) { 0 } else { EXIT_INFEASIBLE })
}

fn cmd_eval(args: &CommonArgs, d: &DesignArgs) -> Result<u8, CliError> {
    let config = resolve_config(args)?;
    let topology = single_topology(args)?;
    let design = explicit_design(topology, d)?.ok_or_else(|| CliError::usage("eval needs --stage1"))?;
    let problem = config.problem()?;
    let assessment = problem.assess(&design);
    print!("{}", report::assessment_text(&assessment));
    if args.format == Some(Format::Json) || args.out.is_some() {
        let dir = out_dir(args)?;
        let p = dir.join("eval.json");
        let r = EvalReport {
            config: &config,
            assessment: &assessment,
        };
        write_file(&p, serde_json::to_string_pretty(&r).expect("serializable").as_bytes())?;
        eprintln!("wrote {}", p.display());
    }
    Ok(if assessment.feasibility.feasible { 0 } else { EXIT_INFEASIBLE })
}

fn cmd_export(args: &CommonArgs, d: &DesignArgs, from: Option<&Path>, file: Option<&Path>) -> Result<u8, CliError> {
    let mut config = resolve_config(args)?;
    let design = if let Some(path) = from {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let stored: OptimizeReport =
            serde_json::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
        let wanted = args.gearbox.filter(|g| *g != GearboxArg::All).map(|g| g.topologies()[0]);
        let best = stored
            .results
            .iter()
            .filter(|r| wanted.is_none_or(|t| r.topology == t))
            .find_map(|r| r.best.as_ref())
            .ok_or_else(|| CliError {
                code: EXIT_INFEASIBLE,
                message: format!("{} holds no feasible design", path.display()),
            })?;
        config = stored.config.clone();
        best.design
    } else {
        let topology = single_topology(args)?;
        match explicit_design(topology, d)? {
            Some(design) => design,
            None => {
                let problem = config.problem()?;
                match optimize(&problem, topology, &search_options(&config)).best {
                    Some(b) => b.design,
                    None => {
                        return Err(CliError {
                            code: EXIT_INFEASIBLE,
                            message: format!("no feasible {topology} design"),
                        })
                    }
                }
            }
        }
    };
    let problem: Problem = config.problem()?;
    let vars = CadVariableSet::from_design(&problem, &design, &config.cad)?;
    let path = match file {
        Some(p) => p.to_path_buf(),
        None => out_dir(args)?.join(format!("{}_variables.txt", design.topology.as_str())),
    };
    vars.write(&path)?;
    println!("{} variables for {} written to {}", vars.len(), design, path.display());
    Ok(0)
}

pub fn run(cli: &Cli) -> Result<u8, CliError> {
    match &cli.command {
        Command::Optimize => cmd_optimize(&cli.common),
        Command::Sweep { lo, hi, no_plots } => cmd_sweep(&cli.common, *lo, *hi, *no_plots),
        Command::Eval(d) => cmd_eval(&cli.common, d),
        Command::Export { design, from, file } => cmd_export(&cli.common, design, from.as_deref(), file.as_deref()),
    }
}

/// Entry point of the binary.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
