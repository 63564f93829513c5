use std::path::Path;
use std::process::{Command, Output};

use ringlab_core::CoefficientTensor;
use serde_json::Value;
use sha2::{Digest, Sha256};

fn ringlab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ringlab"))
        .args(args)
        .current_dir(dir)
        .env_remove("VAL_SEED")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

const DESK: &str = "J = 4\nK = 6\nn_s = 64\nn_time = 16\n";

fn workdir() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("desk.toml"), DESK).unwrap();
    dir
}

#[test]
fn baseline_outputs() {
    let dir = workdir();
    let out = ringlab(&["baseline", "--config", "desk.toml", "--out", "base"], dir.path());
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let base = dir.path().join("base");

    let report = json(&base.join("madc_report.json"));
    let ff = report["feasible_fraction"].as_f64().unwrap();
    assert!(ff > 0.0 && ff < 1.0);

    let grid = std::fs::read_to_string(base.join("grid.csv")).unwrap();
    let mut lines = grid.lines();
    assert_eq!(lines.next().unwrap(), "t,s,x,y,z,zsx,zsy,zsz,zx,zy,zz,corr,feasible");
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 17 * 64);
    for row in &rows {
        let corr: f64 = row[11].parse().unwrap();
        assert!(corr.is_nan() || (-1.0..=1.0).contains(&corr));
        assert_eq!(corr.is_nan(), row[12] == "0");
    }

    let manifest = json(&base.join("manifest.json"));
    let outputs = manifest["outputs"].as_array().unwrap();
    assert_eq!(outputs.len(), 2);
    for entry in outputs {
        let bytes = std::fs::read(base.join(entry["path"].as_str().unwrap())).unwrap();
        assert_eq!(entry["sha256"].as_str().unwrap(), hex::encode(Sha256::digest(&bytes)));
    }
    assert_eq!(manifest["config"]["n_s"], 64);
    assert_eq!(manifest["inputs"].as_array().unwrap().len(), 1);
}

#[test]
fn simulate_input_errors() {
    let dir = workdir();
    let out = ringlab(&["simulate", "--config", "desk.toml", "--coeffs", "missing.json", "--out", "o"], dir.path());
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("missing.json"));

    // coefficients shaped for a different J, K
    std::fs::write(dir.path().join("c.json"), CoefficientTensor::zeros(2, 2).to_json()).unwrap();
    let out = ringlab(&["simulate", "--config", "desk.toml", "--coeffs", "c.json", "--out", "o"], dir.path());
    assert_eq!(code(&out), 2);

    std::fs::write(dir.path().join("bad.toml"), "J = 4\nn_steps = 3\n").unwrap();
    let out = ringlab(&["baseline", "--config", "bad.toml", "--out", "o"], dir.path());
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("n_steps"));
}

#[test]
fn infeasible_everywhere() {
    // with angles in radians the radius decreases over all of s ∈ (0, 1),
    // so the undeformed ring has no positively aligned column
    let dir = workdir();
    std::fs::write(dir.path().join("rad.toml"), format!("{DESK}angle_convention = \"radians\"\n")).unwrap();
    let out = ringlab(&["baseline", "--config", "rad.toml", "--out", "o"], dir.path());
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("misaligned"));
}

#[test]
fn optimize_is_deterministic_and_resumable() {
    let dir = workdir();
    let run = |study: &str, extra: &[&str]| {
        let mut args = vec![
            "optimize",
            "--config",
            "desk.toml",
            "--study",
            study,
            "--trials-qmc",
            "5",
            "--trials-refine",
            "3",
            "--seed",
            "7",
        ];
        args.extend_from_slice(extra);
        let out = ringlab(&args, dir.path());
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        out
    };
    let first = run("a", &[]);
    assert!(stdout(&first).contains("best trial"));
    run("b", &[]);
    let log = |s: &str| std::fs::read(dir.path().join(s).join("trials.jsonl")).unwrap();
    assert_eq!(log("a"), log("b"));

    run("c", &["--stop-after", "4"]);
    assert_eq!(String::from_utf8(log("c")).unwrap().lines().count(), 4);
    run("c", &[]);
    assert_eq!(log("a"), log("c"));

    let summary = json(&dir.path().join("a/study.json"));
    assert_eq!(summary["n_trials"], 8);
    assert_eq!(summary["seed"], 7);
    let best = summary["best_trial_id"].as_u64().unwrap() as usize;
    let record: Value = serde_json::from_str(String::from_utf8(log("a")).unwrap().lines().nth(best).unwrap()).unwrap();
    let coeffs = CoefficientTensor::load(&dir.path().join("a/best_coeffs.json")).unwrap();
    let logged: Vec<f64> = record["coeffs"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert_eq!(coeffs.as_slice(), logged.as_slice());
}

#[test]
fn seed_environment_overrides_flag() {
    let dir = workdir();
    let base = ["optimize", "--config", "desk.toml", "--trials-qmc", "3", "--trials-refine", "0"];
    let mut with_env = Command::new(env!("CARGO_BIN_EXE_ringlab"));
    with_env
        .args(base)
        .args(["--study", "env", "--seed", "1"])
        .current_dir(dir.path())
        .env("VAL_SEED", "9");
    assert!(with_env.output().unwrap().status.success());
    let out = ringlab(&[&base[..], &["--study", "flag", "--seed", "9"]].concat(), dir.path());
    assert_eq!(code(&out), 0);
    let log = |s: &str| std::fs::read(dir.path().join(s).join("trials.jsonl")).unwrap();
    assert_eq!(log("env"), log("flag"));
    assert_eq!(json(&dir.path().join("env/study.json"))["seed"], 9);
}

#[test]
fn corrupt_log_is_refused() {
    let dir = workdir();
    let args = ["optimize", "--config", "desk.toml", "--study", "s", "--trials-qmc", "4", "--trials-refine", "0"];
    assert_eq!(code(&ringlab(&[&args[..], &["--stop-after", "2"]].concat(), dir.path())), 0);
    let log = dir.path().join("s/trials.jsonl");
    let mut text = std::fs::read_to_string(&log).unwrap();
    text.push_str("{\"trial_id\":2,\"phase\":\"q");
    std::fs::write(&log, text).unwrap();
    let out = ringlab(&args, dir.path());
    assert_eq!(code(&out), 4);
    assert!(stderr(&out).contains(":3:"), "{}", stderr(&out));
}

#[test]
fn full_scale_defaults() {
    let dir = workdir();
    let out = ringlab(&["optimize", "--study", "p", "--stop-after", "1"], dir.path());
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let config = &json(&dir.path().join("p/study.json"))["config"];
    assert_eq!(config["n_qmc"], 10000);
    assert_eq!(config["n_refine"], 50);
    assert_eq!(config["c_max"], 30.0);
    assert_eq!((config["J"].as_u64(), config["K"].as_u64()), (Some(20), Some(10)));
    assert!(stdout(&out).contains("trials 1 of 10050"));
}

#[test]
fn render_snapshots() {
    let dir = workdir();
    assert_eq!(code(&ringlab(&["baseline", "--config", "desk.toml", "--out", "b"], dir.path())), 0);
    let out = ringlab(&["render", "--grid", "b/grid.csv", "--times", "initial,terminal", "--format", "svg", "--out", "f"], dir.path());
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let terminal = std::fs::read_to_string(dir.path().join("f/ring_terminal.svg")).unwrap();
    assert!(terminal.contains("radius 1.4900 to 1.5100"));
    assert!(dir.path().join("f/ring_initial.svg").exists());
    assert!(dir.path().join("f/manifest.json").exists());

    let again = ringlab(&["render", "--grid", "b/grid.csv", "--out", "g"], dir.path());
    assert_eq!(code(&again), 0);
    assert_eq!(terminal, std::fs::read_to_string(dir.path().join("g/ring_terminal.svg")).unwrap());

    std::fs::write(dir.path().join("empty.csv"), "").unwrap();
    assert_eq!(code(&ringlab(&["render", "--grid", "empty.csv", "--out", "h"], dir.path())), 2);
    std::fs::write(dir.path().join("junk.csv"), "t,s\n1,2\n").unwrap();
    assert_eq!(code(&ringlab(&["render", "--grid", "junk.csv", "--out", "h"], dir.path())), 2);
}

#[test]
fn spectrum_counts() {
    let dir = workdir();
    let mut c = CoefficientTensor::zeros(4, 6);
    c.set(0, 1, 0, 1, 7.0);
    std::fs::write(dir.path().join("one.json"), c.to_json()).unwrap();
    std::fs::write(dir.path().join("zero.json"), CoefficientTensor::zeros(4, 6).to_json()).unwrap();

    let out = ringlab(&["spectrum", "--config", "desk.toml", "--coeffs", "one.json", "--time", "terminal", "--out", "s1"], dir.path());
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("dominant modes: 1 [1]"));
    let csv = std::fs::read_to_string(dir.path().join("s1/spectrum.csv")).unwrap();
    assert!(csv.starts_with("k,E_k,dominant\n"));
    assert_eq!(csv.lines().count(), 8);

    let out = ringlab(&["spectrum", "--config", "desk.toml", "--coeffs", "zero.json", "--out", "s0"], dir.path());
    assert!(stdout(&out).contains("dominant modes: 0"));

    std::fs::write(dir.path().join("broken.json"), "{\"J\": 4").unwrap();
    let out = ringlab(&["spectrum", "--config", "desk.toml", "--coeffs", "broken.json"], dir.path());
    assert_eq!(code(&out), 2);
}

#[test]
fn verify_table_and_fault() {
    let dir = workdir();
    let out = ringlab(&["verify"], dir.path());
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert_eq!(text.matches("PASS").count(), 4);
    for name in ["inverse matrix", "D^-1 expansion", "Leibniz identity", "closure rearrangement"] {
        assert!(text.contains(name));
    }
    let out = ringlab(&["verify", "--inject-fault", "inverse-sign"], dir.path());
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("FAIL"));
}
