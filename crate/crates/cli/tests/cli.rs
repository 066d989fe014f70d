use std::path::Path;
use std::process::{Command, Output};

use dipolar::reproduce::log_log_slope;
use serde_json::Value;

fn dipolar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dipolar")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let o = dipolar(args);
    assert!(o.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).expect("utf-8")
}

fn json(args: &[&str]) -> Value {
    let mut a = args.to_vec();
    a.extend(["--format", "json"]);
    serde_json::from_str(&stdout(&a)).expect("valid json")
}

fn code(args: &[&str]) -> i32 {
    dipolar(args).status.code().expect("exit code")
}

fn schema() -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/output.schema.json");
    let s: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&s).expect("schema compiles")
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

const RUNS: &[&[&str]] = &[
    &["phase-error", "--r", "500nm", "--sigma-r", "1.5nm", "--samples", "4000"],
    &["phase-error", "--r", "200nm", "--lattice-depth", "100", "--periods", "5", "--samples", "4000"],
    &["gate", "--scheme", "direct", "--preset", "co", "--r", "100nm", "--omega", "1e5"],
    &["gate", "--scheme", "direct", "--u", "inf"],
    &["gate", "--scheme", "inverted", "--phases", "pi", "--repeat", "2"],
    &["gate", "--scheme", "inverted", "--r", "400nm"],
    &["gate", "--scheme", "rotational"],
    &["feasibility", "--scenario", "direct-lattice"],
    &["feasibility", "--scenario", "inverted-lattice"],
    &["feasibility", "--scenario", "rotational-trap", "--set", "r=5um"],
    &["hyperfine", "--preset", "bai", "--nmax", "2"],
    &["sweep", "--param", "omega", "--from", "1e4", "--to", "1e5", "--steps", "3"],
    &[
        "sweep",
        "--kind",
        "feasibility",
        "--scenario",
        "direct-lattice",
        "--param",
        "r",
        "--from",
        "100",
        "--to",
        "300",
        "--steps",
        "3",
    ],
    &["reproduce", "--criterion", "1"],
];

#[test]
fn json_output_matches_schema() {
    let v = schema();
    for args in RUNS {
        let out = json(args);
        let errors: Vec<String> = v.iter_errors(&out).map(|e| format!("{} at {}", e, e.instance_path)).collect();
        assert!(errors.is_empty(), "{args:?}: {errors:#?}");
    }
}

#[test]
fn schema_rejects_malformed_output() {
    let v = schema();
    let mut out = json(&["hyperfine", "--nmax", "0"]);
    out["result"]["levels"][0]["F"] = Value::from(2.25);
    assert!(!v.is_valid(&out));
    out["command"] = Value::from("nonsense");
    assert!(!v.is_valid(&out));
}

#[test]
fn repeated_runs_are_byte_identical() {
    for args in [
        &[
            "phase-error",
            "--r",
            "500nm",
            "--sigma-theta",
            "0.05",
            "--sigma-r",
            "1nm",
            "--samples",
            "20000",
            "--seed",
            "9",
            "--format",
            "json",
        ][..],
        &["sweep", "--param", "u", "--from", "1e5", "--to", "1e7", "--steps", "12", "--log", "--format", "csv"],
        &["feasibility", "--scenario", "inverted-lattice", "--format", "csv"],
    ] {
        assert_eq!(stdout(args), stdout(args), "{args:?}");
    }
}

#[test]
fn seed_changes_monte_carlo() {
    let base = ["phase-error", "--r", "500nm", "--sigma-r", "1nm", "--samples", "4000", "--format", "csv"];
    let a = stdout(&[&base[..], &["--seed", "1"]].concat());
    let b = stdout(&[&base[..], &["--seed", "2"]].concat());
    assert_ne!(a, b);
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["hyperfine", "--nmax", "0"]), 0);
    // validation
    assert_eq!(code(&["gate", "--preset", "h2o"]), 2);
    assert_eq!(code(&["phase-error", "--r", "500"]), 2);
    assert_eq!(code(&["phase-error", "--r", "5D"]), 2);
    assert_eq!(code(&["feasibility", "--scenario", "direct-lattice", "--set", "colour=red"]), 2);
    assert_eq!(code(&["feasibility", "--scenario", "direct-lattice", "--set", "r=3s"]), 2);
    assert_eq!(code(&["feasibility", "--scenario", "rotational-trap", "--preset", "nf"]), 2);
    assert_eq!(code(&["feasibility", "--scenario", "sideways"]), 2);
    assert_eq!(code(&["hyperfine", "--preset", "lics"]), 2);
    assert_eq!(code(&["sweep", "--param", "u", "--from", "1", "--to", "2", "--steps", "0"]), 2);
    assert_eq!(code(&["reproduce", "--criterion", "13"]), 2);
    assert_eq!(code(&["gate", "--frobnicate"]), 2);
    assert_eq!(code(&["run", "/nonexistent/config.json"]), 2);
    // numerical: every sweep point fails
    assert_eq!(
        code(&[
            "sweep",
            "--kind",
            "feasibility",
            "--scenario",
            "direct-lattice",
            "--param",
            "r",
            "--from",
            "-3",
            "--to",
            "-1",
            "--steps",
            "3"
        ]),
        1
    );
    assert_eq!(code(&["reproduce", "--criterion", "3", "--samples", "20000", "--strict"]), 1);
    assert_eq!(code(&["reproduce", "--criterion", "3", "--samples", "20000"]), 0);
}

#[test]
fn partial_sweep_failure_keeps_going() {
    let o = dipolar(&[
        "sweep",
        "--kind",
        "feasibility",
        "--scenario",
        "direct-lattice",
        "--param",
        "r",
        "--from",
        "-100",
        "--to",
        "100",
        "--steps",
        "3",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let s = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = s.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(!lines[1].ends_with(','), "first row should carry an error: {}", lines[1]);
    assert!(lines[3].ends_with(','), "last row should succeed: {}", lines[3]);
}

#[test]
fn phase_error_budget_example() {
    let v = json(&["phase-error", "--preset", "co", "--r", "500nm", "--sigma-r", "1.5nm"]);
    let r = &v["result"]["channels"][0];
    assert_eq!(r["channel"], "r");
    let analytic = num(&r["analytic"]);
    assert!(analytic <= 0.01 && analytic > 0.0085, "{analytic}");
    assert_eq!(r["agrees"], true);
    assert!(num(&r["z"]) < 3.0);
}

#[test]
fn phase_error_zero_spread_is_zero() {
    let v = json(&["phase-error", "--r", "500nm", "--samples", "2000"]);
    for c in v["result"]["channels"].as_array().unwrap() {
        assert_eq!(num(&c["analytic"]), 0.0);
        assert_eq!(num(&c["monte_carlo"]["rel_rms_error"]), 0.0);
    }
    assert_eq!(num(&v["result"]["combined"]["rel_rms_error"]), 0.0);
}

#[test]
fn phase_error_theta_matches_quadratic_law() {
    let v = json(&["phase-error", "--r", "500nm", "--sigma-theta", "0.05"]);
    let c = &v["result"]["channels"][1];
    assert_eq!(c["channel"], "theta");
    let expect = 3.0 * 3f64.sqrt() * 0.05f64.powi(2);
    assert!((num(&c["analytic"]) - expect).abs() < 1e-12);
    assert_eq!(c["agrees"], true);
    let deg = json(&["phase-error", "--r", "500nm", "--sigma-theta", "2.8647889756541161deg", "--samples", "2000"]);
    assert!((num(&deg["result"]["channels"][1]["analytic"]) - expect).abs() < 1e-12);
}

#[test]
fn direct_gate_example() {
    let v = json(&["gate", "--scheme", "direct", "--preset", "co", "--r", "100nm", "--omega", "1e5"]);
    let r = &v["result"];
    assert!(num(&r["result"]["fidelity"]) >= 0.99);
    let t = num(&r["gate_time"]["value"]);
    assert_eq!(r["gate_time"]["unit"], "Microsecond");
    assert!((t - 126.0).abs() / 126.0 < 0.02, "{t}");
}

fn assert_diag(r: &Value, phases: [f64; 4]) {
    let mag = &r["result"]["magnitude"];
    let ph = &r["result"]["phase"];
    for i in 0..4 {
        for j in 0..4 {
            let m = num(&mag[i][j]);
            if i == j {
                assert!((m - 1.0).abs() < 1e-9, "|U_{i}{j}| = {m}");
                let d = (num(&ph[i][j]) - phases[i]).rem_euclid(std::f64::consts::TAU);
                assert!(!(1e-9..=std::f64::consts::TAU - 1e-9).contains(&d), "arg U_{i}{i} = {}", num(&ph[i][j]));
            } else {
                assert!(m < 1e-9, "|U_{i}{j}| = {m}");
            }
        }
    }
}

#[test]
fn ideal_blockade_gives_exact_sign_flips() {
    let v = json(&["gate", "--scheme", "direct", "--u", "inf"]);
    let pi = std::f64::consts::PI;
    assert_diag(&v["result"], [0.0, pi, pi, pi]);
    assert!(v["result"]["interaction"]["u_ee"].is_null());
}

#[test]
fn inverted_gate_twice_is_controlled_phase() {
    let pi = std::f64::consts::PI;
    let once = json(&["gate", "--scheme", "inverted", "--preset", "lics", "--phases", "pi"]);
    assert_diag(&once["result"], [0.0, 0.0, 0.0, pi / 2.0]);
    let twice = json(&["gate", "--scheme", "inverted", "--preset", "lics", "--phases", "pi", "--repeat", "2"]);
    assert_diag(&twice["result"], [0.0, 0.0, 0.0, pi]);
    assert!(num(&twice["result"]["result"]["fidelity"]) > 1.0 - 1e-12);
}

#[test]
fn feasibility_flags_trap_interaction() {
    let t = stdout(&["feasibility", "--preset", "bai", "--scenario", "rotational-trap"]);
    let line = t.lines().find(|l| l.starts_with("v_trap")).expect("v_trap row");
    assert!(line.contains("within ±10% of 3.600e5"), "{line}");
    let v = json(&["feasibility", "--preset", "bai", "--scenario", "rotational-trap"]);
    let row = v["result"]["rows"].as_array().unwrap().iter().find(|r| r["name"] == "v_trap").unwrap();
    assert!((num(&row["value"]) - 3.4e5).abs() / 3.4e5 < 0.02);
    assert_eq!(row["within"], true);
}

#[test]
fn feasibility_overrides_take_units() {
    let v = json(&["feasibility", "--scenario", "direct-lattice", "--set", "r=200nm", "--set", "omega_pi=2e5"]);
    let inputs = &v["result"]["inputs"];
    assert_eq!(num(&inputs["r"]["value"]), 200.0);
    assert_eq!(inputs["omega_pi"]["unit"], "RadPerSecond");
    assert_eq!(num(&inputs["omega_pi"]["value"]), 2e5);
}

#[test]
fn hyperfine_ground_level_has_two_sublevels() {
    let v = json(&["hyperfine", "--preset", "bai", "--nmax", "0"]);
    let levels = v["result"]["levels"].as_array().unwrap();
    let f: Vec<f64> = levels.iter().map(|l| num(&l["F"])).collect();
    assert_eq!(f, vec![2.0, 3.0]);
    let csv = stdout(&["hyperfine", "--preset", "bai", "--nmax", "0", "--format", "csv"]);
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.starts_with("N,J,F,energy_mhz,degeneracy,purity\n"));
}

#[test]
fn blockade_sweep_residual_scales_inversely() {
    let csv =
        stdout(&["sweep", "--param", "u", "--from", "1e5", "--to", "1e7", "--steps", "20", "--log", "--format", "csv"]);
    let mut rdr = csv::Reader::from_reader(csv.as_bytes());
    let h = rdr.headers().unwrap().clone();
    assert_eq!(&h[0], "index");
    assert_eq!(&h[1], "u");
    let col = |name: &str| h.iter().position(|c| c == name).unwrap();
    let (iu, ires) = (col("u"), col("residual_phase_11"));
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 20);
    let u: Vec<f64> = rows.iter().map(|r| r[iu].parse().unwrap()).collect();
    let res: Vec<f64> = rows.iter().map(|r| r[ires].parse().unwrap()).collect();
    assert!(res.windows(2).all(|w| w[1] < w[0]), "{res:?}");
    let slope = log_log_slope(&u, &res);
    assert!((slope + 1.0).abs() < 0.15, "slope {slope}");
}

#[test]
fn run_config_mirrors_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{ "format": "csv", "seed": 4,
             "command": { "phase-error": { "r": "500nm", "sigma-r": "1nm", "samples": 4000 } } }"#,
    )
    .unwrap();
    let from_cfg = stdout(&["run", cfg.to_str().unwrap()]);
    let from_flags = stdout(&[
        "phase-error",
        "--r",
        "500nm",
        "--sigma-r",
        "1nm",
        "--samples",
        "4000",
        "--seed",
        "4",
        "--format",
        "csv",
    ]);
    assert_eq!(from_cfg, from_flags);

    std::fs::write(
        &cfg,
        r#"{ "command": { "feasibility": { "scenario": "direct-lattice", "set": { "r": "200nm" } } }, "format": "json" }"#,
    )
    .unwrap();
    let v: Value = serde_json::from_str(&stdout(&["run", cfg.to_str().unwrap()])).unwrap();
    assert_eq!(num(&v["result"]["inputs"]["r"]["value"]), 200.0);

    std::fs::write(&cfg, r#"{ "command": { "hyperfine": { "nmax": 0, "colour": "red" } } }"#).unwrap();
    assert_eq!(code(&["run", cfg.to_str().unwrap()]), 2);
    std::fs::write(&cfg, r#"{ "command": { "teleport": {} } }"#).unwrap();
    assert_eq!(code(&["run", cfg.to_str().unwrap()]), 2);
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("levels.csv");
    let o = dipolar(&["hyperfine", "--nmax", "1", "--format", "csv", "--output", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let s = std::fs::read_to_string(&path).unwrap();
    assert!(s.starts_with("N,J,F,"));
}
