use std::path::Path;
use std::process::Command;

use alr_cli::{recipe, run_spec_text, RunSettings, EXIT_GATE, EXIT_VALIDATION};

const QUICK: &str = r#"{
  "schema": 1,
  "name": "quick",
  "runs": [
    {
      "name": "quick-sweep",
      "kind": "sweep",
      "geometry": { "r_shell": 2.0, "q": 3.0, "core": 1.0 },
      "source": { "algebraic": { "p": 2.0, "k_max": 8 } },
      "eta": { "decades": { "from": 1, "to": 4 } }
    },
    {
      "name": "quick-dual",
      "kind": "dual-cert",
      "geometry": { "r_shell": 1.5, "q": 2.0 },
      "source": { "modes": { "alpha": [[3, 1.0]], "beta": [[2, 0.5]] } },
      "eta": { "values": [0.1, 0.01] }
    }
  ]
}"#;

fn settings(root: &Path, use_cache: bool) -> RunSettings {
    RunSettings { out_dir: root.join("out"), cache_dir: root.join("cache"), use_cache, svg: true }
}

fn alr(args: &[&str], cache: &Path, cwd: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_alr"))
        .args(args)
        .env("ALR_CACHE_DIR", cache)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

#[test]
fn cache_hit_reproduces_fresh_csv_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let first = run_spec_text(QUICK, &settings(dir.path(), true)).unwrap();
    assert!(!first.cache_hit);
    let csv_first = std::fs::read(dir.path().join("out/quick-sweep.csv")).unwrap();

    let second = run_spec_text(QUICK, &settings(dir.path(), true)).unwrap();
    assert!(second.cache_hit);
    assert_eq!(std::fs::read(dir.path().join("out/quick-sweep.csv")).unwrap(), csv_first);

    let forced = run_spec_text(QUICK, &settings(dir.path(), false)).unwrap();
    assert!(!forced.cache_hit);
    assert_eq!(forced.record.runs, first.record.runs);
    assert_eq!(std::fs::read(dir.path().join("out/quick-sweep.csv")).unwrap(), csv_first);
    assert!(dir.path().join("out/quick-sweep.svg").exists());
    assert!(dir.path().join("out/quick.record.json").exists());
}

#[test]
fn csv_layout_and_sweep_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let outcome = run_spec_text(QUICK, &settings(dir.path(), true)).unwrap();
    let csv = std::fs::read_to_string(dir.path().join("out/quick-sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "eta,value,term_coupling,term_psi,term_v,residual_constraint,verdict");
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 4);
    // q = 3 > R^{3/2}: finite spectrum, E ∝ η
    let verdict = outcome.record.runs[0].verdict.clone().unwrap();
    assert_ne!(verdict, "resonant");
    for (row, eta) in rows.iter().zip([1e-1, 1e-2, 1e-3, 1e-4]) {
        assert_eq!(row.len(), 7);
        assert_eq!(row[0].parse::<f64>().unwrap(), eta);
        assert!(row[1].parse::<f64>().unwrap() > 0.0);
        assert_eq!(row[6], verdict);
    }
    let dual = std::fs::read_to_string(dir.path().join("out/quick-dual.csv")).unwrap();
    for line in dual.lines().skip(1) {
        let cols: Vec<f64> = line.split(',').take(6).map(|c| c.parse().unwrap()).collect();
        assert!((cols[2] + cols[3] + cols[4] - cols[1]).abs() <= 1e-12 * cols[1].abs().max(1e-300));
    }
}

#[test]
fn binary_runs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("quick.json");
    std::fs::write(&spec, QUICK).unwrap();
    let spec = spec.to_str().unwrap();
    let a = alr(&["run", spec, "--out", "a", "--no-cache"], &dir.path().join("c1"), dir.path());
    let b = alr(&["run", spec, "--out", "b", "--no-cache"], &dir.path().join("c2"), dir.path());
    assert!(a.status.success() && b.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    for f in ["quick-sweep.csv", "quick-dual.csv"] {
        assert_eq!(std::fs::read(dir.path().join("a").join(f)).unwrap(), std::fs::read(dir.path().join("b").join(f)).unwrap());
    }
    assert!(dir.path().join("c1").read_dir().unwrap().count() == 1);
}

#[test]
fn validation_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        QUICK.replace(r#"{ "decades": { "from": 1, "to": 4 } }"#, r#"{ "values": [] }"#),
        QUICK.replace(r#""schema": 1"#, r#""schema": 7"#),
        QUICK.replace(r#""q": 3.0"#, r#""q": 1.5"#),
        QUICK.replace(r#""kind": "sweep""#, r#""kind": "eccentric-cert""#),
        QUICK.replace(r#""alpha": [[3, 1.0]]"#, r#""alpha": [[0, 1.0]]"#),
    ];
    for (i, text) in cases.iter().enumerate() {
        let path = dir.path().join(format!("bad{i}.json"));
        std::fs::write(&path, text).unwrap();
        let out = alr(&["run", path.to_str().unwrap(), "--out", "o"], &dir.path().join("cache"), dir.path());
        assert_eq!(out.status.code(), Some(EXIT_VALIDATION), "case {i}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(String::from_utf8_lossy(&out.stderr).contains("validation error"));
    }
    assert!(!dir.path().join("o").exists());
}

#[test]
fn failed_gate_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    // A conformal certificate whose quadrature cannot self-converge at the
    // requested tolerance.
    let text = r#"{"schema":1,"name":"gate","runs":[{"name":"g","kind":"conformal-cert",
      "geometry":{"r_shell":1.5,"q":1.7,"s":2.2,"cutoff":2.1,"map":[[0.1,0.0]]},
      "source":{"algebraic":{"p":2.0,"k_max":8}},"eta":{"values":[0.1]},
      "options":{"k":4,"radial_nodes":2,"angular_extra":1,"convergence_tolerance":1e-15}}]}"#;
    let path = dir.path().join("gate.json");
    std::fs::write(&path, text).unwrap();
    let out = alr(&["run", path.to_str().unwrap()], &dir.path().join("cache"), dir.path());
    assert_eq!(out.status.code(), Some(EXIT_GATE), "{}", String::from_utf8_lossy(&out.stderr));
    // failures are never cached
    assert!(!dir.path().join("cache").exists() || dir.path().join("cache").read_dir().unwrap().count() == 0);
}

#[test]
fn recipes_are_listed_and_appendix_runs() {
    let dir = tempfile::tempdir().unwrap();
    let list = alr(&["recipes"], &dir.path().join("cache"), dir.path());
    assert!(list.status.success());
    let stdout = String::from_utf8_lossy(&list.stdout);
    for name in ["appendix.json", "radial-critical.json", "eccentric.json", "conformal.json", "certificates.json"] {
        assert!(stdout.contains(name), "{stdout}");
    }
    let out = alr(&["run", "appendix", "--out", "o"], &dir.path().join("cache"), dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("o/appendix-spheres.csv")).unwrap();
    // 2 dimensions × 10 degrees × 3 radii
    assert_eq!(csv.lines().count(), 1 + 60);
    for line in csv.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols[0], "");
        assert_eq!(cols[5].parse::<f64>().unwrap(), 0.0, "{line}");
    }
    assert!(recipe("radial-critical").is_some());
}
