use std::path::Path;
use std::process::Command;

fn dyncool() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dyncool"))
}

fn write_config(dir: &Path, trials: usize) -> std::path::PathBuf {
    let path = dir.join("cfg.json");
    let text = format!(
        r#"{{"system": {{"kind": "random_hermitian", "dim": 4, "seed": 2}},
            "perturbation": {{"kind": "gue"}}, "epsilon": 0.3, "d": 4, "trials": {trials}, "seed": 9}}"#
    );
    std::fs::write(&path, text).unwrap();
    path
}

fn only_file(dir: &Path) -> std::path::PathBuf {
    let entries: Vec<_> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(entries.len(), 1, "{entries:?}");
    entries[0].clone()
}

#[test]
fn run_is_byte_identical_across_invocations() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), 100);
    let mut outputs = Vec::new();
    for name in ["a", "b"] {
        let out = tmp.path().join(name);
        let status = dyncool()
            .args(["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--format", "csv"])
            .status()
            .unwrap();
        assert!(status.success());
        outputs.push(std::fs::read(only_file(&out)).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let text = String::from_utf8(outputs.remove(0)).unwrap();
    assert!(text.starts_with("trial,step,energy_estimate,true_energy,ground_overlap,leakage_weight,queries_eiH,queries_UA,success\n"));
    assert_eq!(text.lines().count(), 1 + 100 * 4);
}

#[test]
fn seed_and_trial_flags_override_the_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), 5);
    let out = tmp.path().join("o");
    let status = dyncool()
        .args(["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--seed", "77", "--trials", "0"])
        .status()
        .unwrap();
    assert!(status.success());
    let record = dyncool::format::parse_structured(&std::fs::read_to_string(only_file(&out)).unwrap(), "run").unwrap();
    assert_eq!(record.config.seed, 77);
    assert!(record.trials.is_empty());
    assert_eq!(record.config_hash, record.config.hash());
}

#[test]
fn signpoly_then_gqsp() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    let sign = dyncool().args(["signpoly", "--epsilon", "0.3", "--delta", "0.1", "--out", out]).output().unwrap();
    assert!(sign.status.success(), "{}", String::from_utf8_lossy(&sign.stderr));
    let stdout = String::from_utf8(sign.stdout).unwrap();
    assert!(stdout.lines().filter(|l| l.starts_with("PASS")).count() >= 5, "{stdout}");

    let poly = tmp.path().join("sign-eps0.3-delta0.1.json");
    let gqsp = dyncool().args(["gqsp", "--config", poly.to_str().unwrap(), "--out", out]).output().unwrap();
    assert!(gqsp.status.success(), "{}", String::from_utf8_lossy(&gqsp.stderr));
    let angles: dyncool::gqsp::AngleSequence =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("angles.json")).unwrap()).unwrap();
    assert_eq!(angles.len(), 2 * 27 + 1);
}

#[test]
fn failing_certification_sets_exit_code() {
    let tmp = tempfile::tempdir().unwrap();
    // |P| > 1 on the circle: completion must refuse it.
    let poly = tmp.path().join("p.json");
    std::fs::write(&poly, r#"{"neg_degree": 0, "pos_degree": 1, "coefficients": [[0.8, 0], [0.8, 0]]}"#).unwrap();
    let status = dyncool().args(["gqsp", "--config", poly.to_str().unwrap()]).status().unwrap();
    assert_eq!(status.code(), Some(2));

    let status = dyncool().args(["signpoly", "--epsilon", "0.3", "--delta", "0.1", "--format", "csv"]).status().unwrap();
    assert_eq!(status.code(), Some(0));
}

#[test]
fn parse_errors_name_the_file() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.json");
    std::fs::write(&cfg, "{\n  \"system\": {\"kind\": \"random_hermitian\", \"dim\": \"four\"}\n}").unwrap();
    let out = dyncool().args(["run", "--config", cfg.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("bad.json") && err.contains("line ") && err.contains("\"four\""), "{err}");
}
