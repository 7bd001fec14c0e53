use std::path::Path;
use std::process::{Command, Output};

const CONFIG: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/acsr_345kv.json");

fn freqflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freqflow")).args(args).output().unwrap()
}

fn with_config(args: &[&str]) -> Output {
    let mut all = args.to_vec();
    all.extend(["--config", CONFIG]);
    freqflow(&all)
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("cfg.json");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn line_info_reports_anchor() {
    let out = with_config(&["line-info", "--lengths", "250"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("gamma_ell_abs = 0.321255"), "{text}");
    assert!(text.contains("pi_error_pu = 0.0022100"), "{text}");
}

#[test]
fn line_info_at_dc_notes_undefined_z0() {
    let out = with_config(&["line-info", "--freq", "0"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("z0_ohm = undefined"));
}

#[test]
fn pi_error_rows() {
    let out = with_config(&["pi-error", "--lengths", "700,250", "--freq-min", "0", "--freq-max", "60"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("length_km,f_hz,gamma_ell,pi_error_pu\n"));
    assert!(!text.contains('\r'));
    let rows = rows(&text);
    assert_eq!(rows.len(), 120);
    assert_eq!(rows[0][0], "250", "sorted by length");
    let at = |len: &str, f: &str| rows.iter().find(|r| r[0] == len && r[1] == f).unwrap().clone();
    let r = at("250", "60");
    assert!((r[2].parse::<f64>().unwrap() - 0.321).abs() < 1e-3);
    assert!((r[3].parse::<f64>().unwrap() - 2.21e-3).abs() < 0.05e-3);
    let r = at("700", "18");
    assert!((r[2].parse::<f64>().unwrap() - 0.280).abs() < 1e-3);
    let low = at("700", "1")[3].parse::<f64>().unwrap();
    assert!(low < 1e-2 * at("700", "60")[3].parse::<f64>().unwrap(), "{low}");
}

#[test]
fn max_power_writes_table_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("mp.csv");
    let out = with_config(&["max-power", "--out", out_path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = std::fs::read_to_string(&out_path).unwrap();
    let rows = rows(&table);
    assert_eq!(rows.len(), 1201);
    assert!(rows.iter().filter(|r| r[5] == "3").all(|r| r[1] == "9"));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("mp.csv.json")).unwrap()).unwrap();
    let cross = json["crossover_hz"].as_f64().unwrap();
    assert!((cross - 53.0).abs() < 1.0);
    assert_eq!(json["breakpoints"].as_array().unwrap().len(), 3);
    assert_eq!(json["regions_descending"], serde_json::json!([1, 2, 3, 4, 5]));
}

#[test]
fn max_power_single_region_range() {
    let out = with_config(&["max-power", "--freq-min", "45", "--freq-max", "60", "--freq-step", "1"]);
    assert!(out.status.success());
    let rows = rows(&stdout(&out));
    assert_eq!(rows.len(), 16);
    assert!(rows.iter().all(|r| r[5] == "1" && r[4] == "V_D_MAX+ANGLE_POS"));
}

#[test]
fn power_circle_radii_scale_with_voltage() {
    let out = with_config(&["power-circle", "--resolution", "11x61"]);
    assert!(out.status.success());
    let rows = rows(&stdout(&out));
    let circles: Vec<_> = rows.iter().filter(|r| r[0] == "circle").collect();
    assert_eq!(circles.len(), 2);
    let ratio = circles[1][9].parse::<f64>().unwrap() / circles[0][9].parse::<f64>().unwrap();
    assert!((ratio - 1.1 / 0.9).abs() < 1e-8);
    assert_eq!(rows.iter().filter(|r| r[0] == "sample").count(), 11 * 61);
}

#[test]
fn power_circle_at_dc_is_segment() {
    let out = with_config(&["power-circle", "--freq", "0"]);
    assert!(out.status.success());
    let rows = rows(&stdout(&out));
    assert!(rows.iter().all(|r| r[0] != "circle"));
    let boundary: Vec<_> = rows.iter().filter(|r| r[0] == "boundary").collect();
    assert_eq!(boundary.len(), 2);
    assert!(boundary.iter().all(|r| r[5] == "0"));
}

#[test]
fn power_circle_near_thermal_onset_reaches_limit() {
    let out = with_config(&["power-circle", "--freq", "41.24"]);
    let max = rows(&stdout(&out))
        .iter()
        .filter(|r| r[0] == "boundary")
        .map(|r| r[4].parse::<f64>().unwrap())
        .fold(f64::NEG_INFINITY, f64::max);
    assert!((max - 9.0).abs() < 0.05, "{max}");
}

#[test]
fn samples_round_trip_through_check() {
    let out = with_config(&["power-circle", "--freq", "30", "--resolution", "5x9"]);
    for r in rows(&stdout(&out)).iter().filter(|r| r[0] == "sample") {
        let check = with_config(&["check", "--freq", "30", "--v-d", &r[2], "--theta-deg", &r[3]]);
        let feasible = check.status.code() == Some(0);
        assert_eq!(feasible, r[6] == "1", "sample {r:?}");
    }
}

#[test]
fn check_exit_codes() {
    let ok = with_config(&["check", "--v-d", "1", "--theta-deg", "0"]);
    assert_eq!(ok.status.code(), Some(0));
    let angle = with_config(&["check", "--v-d", "1", "--theta-deg", "50"]);
    assert_eq!(angle.status.code(), Some(3));
    assert!(stdout(&angle).contains("violated = ANGLE_POS"));
    let onset = with_config(&["check", "--freq", "41.22804402", "--v-d", "1.1", "--theta-deg", "40"]);
    assert!(stdout(&onset).contains("active = THERMAL_O+V_D_MAX+ANGLE_POS"), "{}", stdout(&onset));
}

#[test]
fn computation_error_exits_2_with_name() {
    let out = with_config(&["check", "--freq", "0", "--v-d", "1", "--theta-deg", "5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("InvalidOperatingPoint"));
}

#[test]
fn usage_and_config_errors_exit_1() {
    assert_eq!(freqflow(&["nonsense"]).status.code(), Some(1));
    assert_eq!(freqflow(&["check", "--config", "/does/not/exist", "--v-d", "1", "--theta-deg", "0"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let good = std::fs::read_to_string(CONFIG).unwrap();

    let cfg = write_config(dir.path(), &good.replace("\"k_dc\"", "\"kdc\""));
    let out = freqflow(&["line-info", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("kdc"));

    let cfg = write_config(dir.path(), &good.replace("\"theta_max_deg\": 40", "\"theta_max_deg\": 95"));
    let out = freqflow(&["max-power", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("theta_max"));

    let cfg = write_config(dir.path(), "{ not json");
    assert_eq!(freqflow(&["line-info", "--config", &cfg]).status.code(), Some(1));

    let out = with_config(&["power-circle", "--resolution", "41by721"]);
    assert_eq!(out.status.code(), Some(1));
    let out = with_config(&["pi-error", "--freq-step", "0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn origin_only_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let good = std::fs::read_to_string(CONFIG).unwrap();
    let cfg = write_config(dir.path(), &good.replace("\"origin_only_thermal\": true", "\"origin_only_thermal\": false"));
    let args = ["check", "--config", &cfg, "--freq", "41.228", "--v-d", "1.1", "--theta-deg", "40"];
    let both = stdout(&freqflow(&args));
    assert!(both.contains("THERMAL_D,") && both.lines().any(|l| l.starts_with("THERMAL_D,") && l.contains(",1,")));
    let mut with_flag = args.to_vec();
    with_flag.push("--origin-only-thermal");
    let origin = stdout(&freqflow(&with_flag));
    assert!(origin.lines().any(|l| l.starts_with("THERMAL_D,") && l.split(',').nth(4) == Some("0")));
}

#[test]
fn repeated_runs_are_identical() {
    for args in [&["pi-error"][..], &["power-circle", "--freq", "15.48"], &["max-power", "--freq-max", "10"]] {
        let a = with_config(args);
        let b = with_config(args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}
