use std::path::Path;
use std::process::{Command, Output};

use gearbox_opt::cad::CadVariableSet;
use gearbox_opt::cli::report::{OptimizeReport, CSV_COLUMNS};

fn run(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gearbox-opt"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env_remove("GEARBOX_OPT_MOTOR")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

const CPG_14: [&str; 8] = ["--gearbox", "cpg", "--kmgd", "1.25", "--gr-min", "14", "--gr-max", "15"];

#[test]
fn optimize_then_export_from_result() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &[&CPG_14[..], &["optimize"]].concat());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("CPG"));
    let json = dir.path().join("optimize.json");
    let report: OptimizeReport = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    let best = report.results[0].best.as_ref().unwrap();
    assert!(best.ratio.value >= 14.0 && best.ratio.value <= 15.0);

    let o = run(dir.path(), &["export", "--from", json.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let vars = CadVariableSet::read(&dir.path().join("cpg_variables.txt")).unwrap();
    assert_eq!(vars.get("N_s1").unwrap().value, best.design.stage1.sun_teeth as f64);
}

#[test]
fn optimize_csv_has_fixed_columns() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &[&CPG_14[..], &["--format", "csv", "optimize"]].concat());
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(dir.path().join("optimize.csv")).unwrap();
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body[0], CSV_COLUMNS.join(","));
    assert!(body[1].starts_with("cpg,14,15,true,"));
}

#[test]
fn sweep_writes_csv_and_charts() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["--gearbox", "cpg", "--kmgd", "1.25", "sweep", "--lo", "12", "--hi", "15"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 3);
    for stem in ["sweep_mass", "sweep_efficiency", "sweep_width", "sweep_cost"] {
        let svg = std::fs::read_to_string(dir.path().join(format!("{stem}.svg"))).unwrap();
        assert!(svg.starts_with("<svg") && svg.contains("<polyline"));
    }
}

#[test]
fn eval_reports_violations_and_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["--gearbox", "sspg", "--motor", "MN8014", "--gr-min", "7", "--gr-max", "8", "eval", "--stage1", "25,65,155,0.5,3"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("36/5"));
    let o = run(
        dir.path(),
        &["--gearbox", "wpg", "--kmgd", "1.25", "--gr-min", "16", "--gr-max", "17", "eval", "--stage1", "66,45,156,0.5,6", "--stage2", "0,33,144,0.5,6"],
    );
    assert_eq!(code(&o), 3);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("II (geometric)") && text.contains("IV (interference)"), "{text}");
}

#[test]
fn error_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(dir.path(), &["--gr-min", "9", "--gr-max", "8", "optimize"])), 2);
    assert_eq!(code(&run(dir.path(), &["--weights", "1,2", "optimize"])), 2);
    assert_eq!(code(&run(dir.path(), &["--gearbox", "sspg", "eval"])), 2);
    assert_eq!(code(&run(dir.path(), &["--motor", "nope", "optimize"])), 5);
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_gearbox-opt"))
        .args(["--out", blocker.to_str().unwrap()])
        .args(CPG_14)
        .arg("optimize")
        .output()
        .unwrap();
    assert_eq!(code(&o), 4);
}

#[test]
fn environment_and_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_gearbox-opt"))
        .args(["--out", dir.path().to_str().unwrap(), "optimize"])
        .env("GEARBOX_OPT_MOTOR", "nope")
        .output()
        .unwrap();
    assert_eq!(code(&o), 5);

    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "motor = \"MN8014\"\n[constraints]\ngr_min = 7.0\ngr_max = 8.0\n").unwrap();
    let o = run(dir.path(), &["--config", cfg.to_str().unwrap(), "--gearbox", "sspg", "optimize"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report: OptimizeReport =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("optimize.json")).unwrap()).unwrap();
    assert_eq!(report.config.motor, "MN8014");
    let r = report.results[0].best.as_ref().unwrap().ratio.value;
    assert!((7.0..=8.0).contains(&r));
}
