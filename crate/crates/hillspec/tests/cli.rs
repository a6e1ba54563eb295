use std::path::Path;
use std::process::Command;

fn hillspec(args: &[&str], cache: &Path) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_hillspec"))
        .args(args)
        .env("HILLSPEC_CACHE_DIR", cache)
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn free_spectrum_passes_and_lands_in_the_cache() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.json", r#"{"schema_version": 1, "spectrum": {"n_max": 8}}"#);
    let (code, stdout, _) = hillspec(&["spectrum", "--config", &cfg, "--jobs", "1"], tmp.path());
    assert_eq!(code, 0, "{stdout}");
    let config = hillspec::CampaignConfig::load(Path::new(&cfg)).unwrap();
    let dir = tmp.path().join(hillspec::cache::cache_key(&config));
    let csv = std::fs::read_to_string(dir.join("spectrum_0.csv")).unwrap();
    let rows = hillspec::formats::parse_spectral_csv(&csv).unwrap();
    for r in &rows {
        let e = (r.n as f64 * std::f64::consts::PI).powi(2);
        assert!((r.mu - e).abs() <= 1e-9 * e);
    }
    assert!(dir.join("summary_spectrum.txt").exists());
}

#[test]
fn explicit_out_and_seed_override() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let out_s = out.to_string_lossy().into_owned();
    let (code, _, _) = hillspec(&["baseline", "--out", &out_s, "--seed", "5"], tmp.path());
    assert_eq!(code, 0);
    let first = std::fs::read(out.join("baseline.csv")).unwrap();
    let (code, _, _) = hillspec(&["baseline", "--out", &out_s, "--seed", "6"], tmp.path());
    assert_eq!(code, 0);
    assert_ne!(std::fs::read(out.join("baseline.csv")).unwrap(), first);
}

#[test]
fn bad_config_exits_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.json", r#"{"schema_version": 1, "spectrum": {"nmax": 8}}"#);
    let (code, _, stderr) = hillspec(&["spectrum", "--config", &cfg], tmp.path());
    assert_eq!(code, 2);
    assert!(stderr.contains("configuration error"), "{stderr}");
    let (code, _, _) = hillspec(&["spectrum", "--config", "/nonexistent.json"], tmp.path());
    assert_eq!(code, 2);
}

#[test]
fn violated_property_exits_with_one() {
    let tmp = tempfile::tempdir().unwrap();
    // demand an impossibly fast decay
    let cfg = write(
        tmp.path(),
        "c.json",
        r#"{"schema_version": 1, "residuals": {"s_list": [0], "seeds": 1, "max_freq": 8, "n_max": 20,
            "stability_n": 16, "slope_slack": 0, "stability_tol": 1e-300}}"#,
    );
    let (code, stdout, _) = hillspec(&["residuals", "--config", &cfg], tmp.path());
    assert_eq!(code, 1, "{stdout}");
    assert!(stdout.contains("FAIL"));
}

#[test]
fn solver_failure_exits_with_three() {
    let tmp = tempfile::tempdir().unwrap();
    // far too stiff for the step budget at this tolerance
    let cfg = write(
        tmp.path(),
        "c.json",
        r#"{"schema_version": 1, "spectrum": {"n_max": 1, "tol": 1e-13,
            "potentials": [{"kind": "cosine", "n": 128, "amplitude": 1e12}]}}"#,
    );
    let (code, _, stderr) = hillspec(&["spectrum", "--config", &cfg], tmp.path());
    assert_eq!(code, 3, "{stderr}");
    assert!(stderr.contains("solver failure"), "{stderr}");
}
