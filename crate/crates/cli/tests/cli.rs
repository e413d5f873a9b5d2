use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use speclab_cli::commands::birth::BirthSummary;
use speclab_cli::commands::simulate::SimulateSummary;
use speclab_cli::commands::spectrum::MappingSummary;
use speclab_core::Verdict;
use tempfile::TempDir;

fn speclab(cmd: &str, config: &str) -> (i32, TempDir, String) {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("config.json");
    fs::write(&cfg, config).unwrap();
    let out = dir.path().join("out");
    let o = Command::new(env!("CARGO_BIN_EXE_speclab"))
        .args([cmd, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    (
        o.status.code().unwrap(),
        dir,
        String::from_utf8_lossy(&o.stderr).into_owned(),
    )
}

fn out(dir: &TempDir) -> PathBuf {
    dir.path().join("out")
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect()
}

const FREE: &str = r#"{ "model": { "kind": "custom-table", "lo": 0, "coins": [ { "a": 0.0, "b": [1.0, 0.0] } ] },
  "window": 16, "time": 3, "initial": { "site": 0, "spinor": [[1.0, 0.0], [0.0, 0.0]] } }"#;

const ANISO_03: &str = r#"{ "model": { "kind": "anisotropic", "epsilon": 0.3 }, "window": 200, "time": 25,
  "initial": "birth:+" }"#;

#[test]
fn simulate_free_walk_moves_left() {
    let (code, dir, err) = speclab("simulate", FREE);
    assert_eq!(code, 0, "{err}");
    let rows = read_csv(&out(&dir).join("distribution.csv"));
    for t in 0..=3i64 {
        let at: Vec<_> = rows.iter().filter(|r| r[0] == t.to_string()).collect();
        let mass: f64 = at
            .iter()
            .filter(|r| r[1] == (-t).to_string())
            .map(|r| r[2].parse::<f64>().unwrap())
            .sum();
        assert!((mass - 1.0).abs() < 1e-12, "t={t}");
    }
    let s: SimulateSummary =
        serde_json::from_str(&fs::read_to_string(out(&dir).join("summary.json")).unwrap()).unwrap();
    assert_eq!(s.return_probability.len(), 4);
    assert!(s.max_norm_drift < 1e-12);
}

#[test]
fn simulate_zero_time_has_one_row() {
    let cfg = FREE.replace(r#""time": 3"#, r#""time": 0"#);
    let (code, dir, _) = speclab("simulate", &cfg);
    assert_eq!(code, 0);
    let rows = read_csv(&out(&dir).join("distribution.csv"));
    assert_eq!(rows, vec![vec!["0".to_string(), "0".to_string(), "1.0".to_string()]]);
}

#[test]
fn simulate_birth_state_is_stationary() {
    let (code, dir, err) = speclab("simulate", ANISO_03);
    assert_eq!(code, 0, "{err}");
    let s: SimulateSummary =
        serde_json::from_str(&fs::read_to_string(out(&dir).join("summary.json")).unwrap()).unwrap();
    assert!(s.overlap_probability.iter().all(|p| (p - 1.0).abs() <= 1e-8));
    assert!(s.max_distribution_drift <= 1e-10);
    let p0 = s.return_probability[0];
    assert!(s.return_probability.iter().all(|p| (p - p0).abs() <= 1e-10));
}

#[test]
fn simulate_trivial_birth_exits_2() {
    let cfg = ANISO_03.replace("0.3", "0.9");
    let (code, _, err) = speclab("simulate", &cfg);
    assert_eq!(code, 2);
    assert!(err.contains("Trivial"), "{err}");
}

#[test]
fn spectrum_of_the_free_walk() {
    let (code, dir, err) = speclab("spectrum", FREE);
    assert_eq!(code, 0, "{err}");
    let mut t: Vec<f64> = read_csv(&out(&dir).join("spectrum_T.csv"))
        .iter()
        .map(|r| r[0].parse().unwrap())
        .collect();
    let mut want: Vec<f64> = (0..16)
        .map(|k| (2.0 * std::f64::consts::PI * k as f64 / 16.0).cos())
        .collect();
    t.sort_by(f64::total_cmp);
    want.sort_by(f64::total_cmp);
    for (a, b) in t.iter().zip(&want) {
        assert!((a - b).abs() <= 1e-9);
    }
    for r in read_csv(&out(&dir).join("spectrum_U.csv")) {
        let (re, im): (f64, f64) = (r[0].parse().unwrap(), r[1].parse().unwrap());
        assert!((re.hypot(im) - 1.0).abs() <= 1e-9);
    }
    let text = fs::read_to_string(out(&dir).join("mapping.json")).unwrap();
    let m: MappingSummary = serde_json::from_str(&text).unwrap();
    assert!(m.max_interior_defect <= 1e-9 && m.within_tolerance);
    assert_eq!(serde_json::to_string_pretty(&m).unwrap() + "\n", text);
}

#[test]
fn spectrum_rejects_tiny_rings() {
    let cfg = FREE.replace(r#""window": 16"#, r#""window": 3"#);
    assert_eq!(speclab("spectrum", &cfg).0, 1);
}

#[test]
fn birth_reports_round_trip() {
    let (code, dir, err) = speclab("birth", ANISO_03);
    assert_eq!(code, 0, "{err}");
    for stem in ["birth_plus", "birth_minus"] {
        let text = fs::read_to_string(out(&dir).join(format!("{stem}.json"))).unwrap();
        let s: BirthSummary = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string_pretty(&s).unwrap() + "\n", text);
        assert_eq!(s.verdict, Verdict::NontrivialDim1);
        assert!(s.residual.unwrap() <= 1e-8 && s.verified == Some(true));
        let [a, b] = s.slope_ratio.unwrap();
        assert!((a - 1.0).abs() < 0.02 && (b - 1.0).abs() < 0.02);
        let rows = read_csv(&out(&dir).join(format!("{stem}.csv")));
        assert_eq!(rows.len(), 401);
    }
}

#[test]
fn trivial_birth_writes_no_profile() {
    let (code, dir, _) = speclab("birth", &ANISO_03.replace("0.3", "0.9"));
    assert_eq!(code, 0);
    assert!(out(&dir).join("birth_plus.json").exists());
    assert!(!out(&dir).join("birth_plus.csv").exists());
    assert!(!out(&dir).join("birth_minus.csv").exists());
}

#[test]
fn kitagawa_worked_point() {
    let cfg = r#"{ "model": { "kind": "kitagawa", "theta2": -1.0471975511965976,
                   "theta1": { "kind": "step", "minus": 4.71238898038469, "plus": 0.0 } }, "window": 200 }"#;
    let (code, dir, err) = speclab("birth", cfg);
    assert_eq!(code, 0, "{err}");
    let read = |s: &str| -> BirthSummary {
        serde_json::from_str(&fs::read_to_string(out(&dir).join(format!("{s}.json"))).unwrap()).unwrap()
    };
    assert_eq!(read("birth_plus").verdict, Verdict::NontrivialDim1);
    assert_eq!(read("birth_minus").verdict, Verdict::Trivial);
}

#[test]
fn vanishing_chi_component_exits_3() {
    let cfg = r#"{ "model": { "kind": "custom-table", "lo": 0,
                   "coins": [ { "a": 0.6, "b": [0.8, 0.0] }, { "a": 1.0, "b": [0.0, 0.0] } ],
                   "limit_minus": { "a": 0.6, "b": [0.8, 0.0] }, "limit_plus": { "a": -0.6, "b": [0.8, 0.0] } },
                   "window": 20 }"#;
    let (code, _, err) = speclab("birth", cfg);
    assert_eq!(code, 3, "{err}");
    assert!(err.contains("1"), "{err}");
}

#[test]
fn config_errors_exit_1() {
    assert_eq!(speclab("birth", "{ not json").0, 1);
    assert_eq!(
        speclab(
            "birth",
            r#"{ "model": { "kind": "anisotropic", "epsilon": 0.3 }, "window": 5, "x": 1 }"#
        )
        .0,
        1
    );
    assert_eq!(
        speclab(
            "birth",
            r#"{ "model": { "kind": "anisotropic", "epsilon": 1.3 }, "window": 5 }"#
        )
        .0,
        1
    );
    let o = Command::new(env!("CARGO_BIN_EXE_speclab"))
        .args(["frobnicate"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    let o = Command::new(env!("CARGO_BIN_EXE_speclab"))
        .args(["--help"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
}

const SWEEP_1D: &str = r#"{ "model": { "kind": "anisotropic", "epsilon": 0.3 }, "window": 50,
  "command-options": { "sweep": { "parameters": [ { "name": "epsilon", "start": 0.1, "stop": 0.9, "step": 0.1 } ] } } }"#;

#[test]
fn sweep_over_epsilon_agrees() {
    let (code, dir, err) = speclab("sweep", SWEEP_1D);
    assert_eq!(code, 0, "{err}");
    let rows = read_csv(&out(&dir).join("sweep.csv"));
    assert_eq!(rows.len(), 9);
    assert!(rows.iter().all(|r| r.last().unwrap() == "true"));
    assert_eq!(rows[2][1], "0.3");
    assert_eq!(rows[2][2], "NontrivialDim1");
    assert_eq!(rows[8][2], "Trivial");
}

#[test]
fn sweep_usage_errors() {
    let empty = SWEEP_1D.replace(r#"{ "name": "epsilon", "start": 0.1, "stop": 0.9, "step": 0.1 }"#, "");
    assert_eq!(speclab("sweep", &empty).0, 1);
    let non_numeric = SWEEP_1D.replace(r#""name": "epsilon""#, r#""name": "profile""#);
    let (code, _, err) = speclab("sweep", &non_numeric);
    assert_eq!(code, 1);
    assert!(err.contains("not a numeric field"), "{err}");
}

#[test]
fn sweep_exits_4_on_disagreement() {
    // A classification margin wider than the distance to the boundary
    // turns verdicts Inconclusive near ε₀ while the predictor still commits.
    let cfg = r#"{ "model": { "kind": "anisotropic", "epsilon": 0.3 }, "window": 50,
      "tolerances": { "classify_margin": 0.5 },
      "command-options": { "sweep": { "parameters": [ { "name": "epsilon", "values": [0.6] } ] } } }"#;
    let (code, dir, _) = speclab("sweep", cfg);
    assert_eq!(code, 4);
    let rows = read_csv(&out(&dir).join("sweep.csv"));
    assert_eq!(rows[0].last().unwrap(), "false");
}

#[test]
fn shipped_configs_parse_and_build() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            let cfg = speclab_cli::ExperimentConfig::load(&path).unwrap();
            cfg.build().unwrap();
            seen += 1;
        }
    }
    assert!(seen >= 4);
}

#[test]
fn kitagawa_sweep_config_runs_clean() {
    let text =
        fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/kitagawa_step.json")).unwrap();
    let (code, dir, err) = speclab("sweep", &text);
    assert_eq!(code, 0, "{err}");
    assert_eq!(read_csv(&out(&dir).join("sweep.csv")).len(), 25);
}
