use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn lopsim(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lopsim")).args(args).current_dir(dir).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad report ({e}): {}\n{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn write(dir: &Path, name: &str, value: &Value) -> String {
    let path = dir.join(name);
    fs::write(&path, serde_json::to_string(value).unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

fn beam_splitter_json(theta: f64) -> Value {
    let (c, s) = (theta.cos(), theta.sin());
    json!({ "n_modes": 2, "convention": "schrodinger", "matrix": [[[c, 0.0], [-s, 0.0]], [[s, 0.0], [c, 0.0]]] })
}

fn two_photons_11() -> Value {
    json!({ "n_modes": 2, "total_photons": 2, "amplitudes": [[0.0, 0.0], [1.0, 0.0], [0.0, 0.0]] })
}

#[test]
fn theorem1_default_suite_passes() {
    let dir = TempDir::new().unwrap();
    let out = lopsim(&["verify-theorem1"], dir.path());
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert!(r["result"]["max_observed_expectation"].as_f64().unwrap() <= 1.0 + 1e-9);
    assert!(r["result"]["trials"].as_u64().unwrap() >= 1000);
    assert_eq!(r["result"]["configurations"].as_array().unwrap().len(), 5);
    assert_eq!(r["tool"]["name"], "lopsim");
    assert!(r["config"]["seed"].is_u64());
}

#[test]
fn theorem1_single_photon_single_mode() {
    let dir = TempDir::new().unwrap();
    let out = lopsim(&["verify-theorem1", "--trials", "1", "--configs", "1x1"], dir.path());
    assert_eq!(code(&out), 0);
    assert_eq!(report(&out)["result"]["max_observed_expectation"].as_f64(), Some(1.0));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("missing").join("report.json");
    let out = lopsim(&["verify-theorem1", "--trials", "1", "--out", bad.to_str().unwrap()], dir.path());
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot write"));
}

#[test]
fn bounds_table() {
    let dir = TempDir::new().unwrap();
    let out = lopsim(&["reproduce-bounds"], dir.path());
    assert_eq!(code(&out), 0);
    let rows = report(&out)["result"]["rows"].clone();
    assert_eq!(rows[0]["gate"], "NS");
    assert!((rows[0]["expectation"].as_f64().unwrap() - 2.0).abs() < 1e-10);
    assert_eq!(rows[0]["bound"].as_f64(), Some(0.5));
    assert_eq!(rows[0]["best_known"].as_f64(), Some(0.25));
    assert_eq!(rows[1]["gate"], "CS");
    assert!((rows[1]["expectation"].as_f64().unwrap() - 4.0 / 3.0).abs() < 1e-10);
    assert_eq!(rows[1]["bound"].as_f64(), Some(0.75));
    assert_eq!(rows[1]["best_known"].as_f64(), Some(2.0 / 27.0));
}

#[test]
fn csv_and_json_carry_the_same_numbers() {
    let dir = TempDir::new().unwrap();
    let json_out = report(&lopsim(&["reproduce-bounds"], dir.path()));
    let csv_out = lopsim(&["reproduce-bounds", "--format", "csv"], dir.path());
    assert_eq!(code(&csv_out), 0);
    let mut reader = csv::Reader::from_reader(csv_out.stdout.as_slice());
    let mut n = 0;
    for row in reader.records() {
        let row = row.unwrap();
        let pointer = format!("/{}", row[0].replace('.', "/"));
        let leaf = json_out.pointer(&pointer).unwrap_or_else(|| panic!("{pointer} missing from JSON"));
        let expected = match leaf {
            Value::String(s) => s.clone(),
            Value::Null => String::new(),
            other => other.to_string(),
        };
        assert_eq!(&row[1], expected, "{pointer}");
        n += 1;
    }
    assert!(n > 50);
}

#[test]
fn optimize_then_check_round_trip() {
    let dir = TempDir::new().unwrap();
    let out = lopsim(&["optimize", "--gate", "NS", "--circuit-out", "ns.json", "--out", "opt.json"], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let opt: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("opt.json")).unwrap()).unwrap();
    let p = opt["result"]["best_success_probability"].as_f64().unwrap();
    assert!((0.2499..=0.5 + 1e-8).contains(&p), "{p}");
    assert_eq!(opt["config"]["restarts"].as_u64(), Some(20));

    let check = lopsim(&["check-circuit", "ns.json", "--gate", "NS"], dir.path());
    assert_eq!(code(&check), 0);
    let check = report(&check);
    assert_eq!(check["result"]["is_valid"], true);
    assert!((check["result"]["success_probability"].as_f64().unwrap() - p).abs() <= 1e-10);
    assert!(check["result"]["conditional_matrix"].is_array());
    assert!(check["result"]["scale"].is_array());
}

#[test]
fn rerunning_a_report_reproduces_it() {
    let dir = TempDir::new().unwrap();
    let first = lopsim(
        &["optimize", "--restarts", "2", "--max-iterations", "2000", "--seed", "9", "--out", "a.json"],
        dir.path(),
    );
    assert!(code(&first) <= 1);
    let second = lopsim(&["optimize", "--config", "a.json", "--out", "b.json"], dir.path());
    assert_eq!(code(&first), code(&second));
    let a = fs::read(dir.path().join("a.json")).unwrap();
    let b = fs::read(dir.path().join("b.json")).unwrap();
    assert_eq!(a, b);

    lopsim(&["verify-theorem1", "--trials", "7", "--seed", "3", "--out", "t1.json"], dir.path());
    lopsim(&["verify-theorem1", "--config", "t1.json", "--out", "t2.json"], dir.path());
    assert_eq!(fs::read(dir.path().join("t1.json")).unwrap(), fs::read(dir.path().join("t2.json")).unwrap());
}

#[test]
fn identity_circuit_is_not_ns() {
    let dir = TempDir::new().unwrap();
    let circuit = json!({
        "n_signal_modes": 1,
        "n_ancilla_modes": 0,
        "ancilla_preparation": [],
        "unitary": { "n_modes": 1, "convention": "schrodinger", "matrix": [[[1.0, 0.0]]] },
        "pattern": { "measured_modes": [], "required_counts": [] }
    });
    let path = write(dir.path(), "id.json", &circuit);
    let out = lopsim(&["check-circuit", &path, "--gate", "NS"], dir.path());
    assert_eq!(code(&out), 1);
    let r = report(&out);
    assert_eq!(r["status"], "claim_violated");
    assert_eq!(r["result"]["is_valid"], false);
    assert!(r["result"]["deviation"].as_f64().unwrap() > 0.1);
}

#[test]
fn malformed_circuit_names_the_field() {
    let dir = TempDir::new().unwrap();
    let circuit = json!({
        "n_signal_modes": 1,
        "n_ancilla_modes": 1,
        "ancilla_preparation": [3],
        "unitary": { "n_modes": 2, "convention": "schrodinger", "matrix": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]] },
        "pattern": { "measured_modes": [1], "required_counts": [1] }
    });
    let path = write(dir.path(), "bad.json", &circuit);
    let out = lopsim(&["check-circuit", &path], dir.path());
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("ancilla_preparation"));

    let out = lopsim(&["check-circuit", "absent.json"], dir.path());
    assert_eq!(code(&out), 2);
}

#[test]
fn evolve_beam_splitter_and_postselect() {
    let dir = TempDir::new().unwrap();
    let state = write(dir.path(), "s.json", &two_photons_11());
    let bs = write(dir.path(), "bs.json", &beam_splitter_json(std::f64::consts::FRAC_PI_4));
    let pattern = write(dir.path(), "p.json", &json!({ "measured_modes": [1], "required_counts": [0] }));
    let out = lopsim(&["evolve", "--state", &state, "--unitary", &bs, "--pattern", &pattern], dir.path());
    assert_eq!(code(&out), 0);
    let r = report(&out)["result"].clone();
    assert!((r["probability"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    let amp = &r["conditional_state"]["amplitudes"][0];
    let norm = (amp[0].as_f64().unwrap().powi(2) + amp[1].as_f64().unwrap().powi(2)).sqrt();
    assert!((norm - 1.0).abs() < 1e-12);
    assert_eq!(r["conditional_state"]["n_modes"], 1);
    assert_eq!(r["conditional_state"]["total_photons"], 2);
}

#[test]
fn evolve_identity_echoes_input() {
    let dir = TempDir::new().unwrap();
    let input = json!({ "n_modes": 2, "total_photons": 2, "amplitudes": [[0.0, 0.8], [0.6, 0.0], [0.0, 0.0]] });
    let state = write(dir.path(), "s.json", &input);
    let id = write(dir.path(), "id.json", &beam_splitter_json(0.0));
    let out = lopsim(&["evolve", "--state", &state, "--unitary", &id], dir.path());
    assert_eq!(code(&out), 0);
    assert_eq!(report(&out)["result"]["state"], input);
}

#[test]
fn evolve_pi_over_8_splitter() {
    let dir = TempDir::new().unwrap();
    let state = write(dir.path(), "s.json", &two_photons_11());
    let bs = write(dir.path(), "bs.json", &beam_splitter_json(std::f64::consts::FRAC_PI_8));
    let out = lopsim(&["evolve", "--state", &state, "--unitary", &bs], dir.path());
    let amps = report(&out)["result"]["state"]["amplitudes"].clone();
    let expected = [-0.5, std::f64::consts::FRAC_1_SQRT_2, 0.5];
    for (i, e) in expected.iter().enumerate() {
        assert!((amps[i][0].as_f64().unwrap() - e).abs() < 1e-12);
        assert!(amps[i][1].as_f64().unwrap().abs() < 1e-12);
    }
}

#[test]
fn evolve_rejects_mismatched_sizes() {
    let dir = TempDir::new().unwrap();
    let state = write(dir.path(), "s.json", &two_photons_11());
    let u3 = json!({ "n_modes": 3, "convention": "schrodinger", "matrix": [
        [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
        [[0.0, 0.0], [1.0, 0.0], [0.0, 0.0]],
        [[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]] });
    let u = write(dir.path(), "u.json", &u3);
    let out = lopsim(&["evolve", "--state", &state, "--unitary", &u], dir.path());
    assert_eq!(code(&out), 2);
}

#[test]
fn entangled_cs_report() {
    let dir = TempDir::new().unwrap();
    let out = lopsim(&["entangled-cs"], dir.path());
    assert_eq!(code(&out), 0);
    let r = report(&out)["result"].clone();
    assert!(r["fidelity"].as_f64().unwrap() >= 1.0 - 1e-8);
    assert_eq!(r["cs_applications"], 1);
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&lopsim(&["optimize", "--gate", "XYZ"], dir.path())), 2);
    assert_eq!(code(&lopsim(&["no-such-command"], dir.path())), 2);
    assert_eq!(code(&lopsim(&["verify-theorem1", "--configs", "3by2"], dir.path())), 2);
}
