use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn subharm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_subharm")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

fn run_ok(args: &[&str]) {
    let out = subharm(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

/// `z_j = j²`: a single ray of zeros with `n(r) = ⌊√r⌋`.
fn squares(n: usize) -> String {
    let atoms: Vec<String> = (1..=n).map(|j| format!(r#"{{"re": {}, "im": 0, "mass": 1}}"#, j * j)).collect();
    format!(r#"{{"atoms": [{}]}}"#, atoms.join(","))
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn analyze_squares() {
    let tmp = TempDir::new().unwrap();
    let input = write(tmp.path(), "z.json", &squares(10_000));
    let out = tmp.path().join("a");
    run_ok(&["analyze", s(&input), "--out", s(&out)]);
    let r = report(&out);
    assert!((r["growth"]["order"].as_f64().unwrap() - 0.5).abs() < 0.02);
    assert_eq!(r["growth"]["genus"].as_u64(), Some(0));
    assert_eq!(r["crg"]["crg"].as_bool(), Some(true));
    for f in ["jensen_privalov.csv", "indicator.csv", "sector_density.csv"] {
        let text = fs::read_to_string(out.join(f)).unwrap();
        assert!(text.lines().count() > 1, "{f}");
    }
    assert!(fs::read_to_string(out.join("indicator.csv")).unwrap().starts_with("phi,h,h_lower\n"));

    // A finer angular grid and a wider window move nothing beyond tolerance.
    let fine = tmp.path().join("b");
    run_ok(&["analyze", s(&input), "--out", s(&fine), "--phi-grid", "512", "--t-decades", "3"]);
    let q = report(&fine);
    assert_eq!(q["flags"]["phi_grid"].as_u64(), Some(512));
    assert_eq!(q["crg"]["crg"], r["crg"]["crg"]);
    assert_eq!(q["growth"]["genus"], r["growth"]["genus"]);
    assert!((q["growth"]["order"].as_f64().unwrap() - r["growth"]["order"].as_f64().unwrap()).abs() < 0.01);
    let h = |dir: &Path, stride: usize| -> Vec<f64> {
        fs::read_to_string(dir.join("indicator.csv"))
            .unwrap()
            .lines()
            .skip(1)
            .step_by(stride)
            .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
            .collect()
    };
    let (a, b) = (h(&out, 1), h(&fine, 2));
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 0.05 * scale, "{x} vs {y}");
    }
}

#[test]
fn analyze_rejects_bad_input() {
    let tmp = TempDir::new().unwrap();
    let empty = write(tmp.path(), "empty.json", "");
    assert_eq!(subharm(&["analyze", s(&empty), "--out", s(&tmp.path().join("o"))]).status.code(), Some(2));
    let junk = write(tmp.path(), "junk.json", r#"{"atoms": [{"re": "x"}]}"#);
    assert_eq!(subharm(&["analyze", s(&junk), "--out", s(&tmp.path().join("o"))]).status.code(), Some(2));
    let missing = tmp.path().join("none.json");
    assert_eq!(subharm(&["analyze", s(&missing)]).status.code(), Some(2));
    let input = write(tmp.path(), "z.json", &squares(10));
    let bad_grid = subharm(&["analyze", s(&input), "--phi-grid", "100", "--out", s(&tmp.path().join("o"))]);
    assert_eq!(bad_grid.status.code(), Some(2));
}

#[test]
fn synth_cosine_at_integer_order() {
    let tmp = TempDir::new().unwrap();
    let input = write(tmp.path(), "t.json", r#"{"rho": 1, "h1": {"cos": {"amplitude": 1}}}"#);
    let out = tmp.path().join("o");
    run_ok(&["synth", s(&input), "--out", s(&out)]);
    let r = report(&out);
    let pair = &r["pair"];
    assert_eq!(pair["pass"].as_bool(), Some(true));
    assert!(pair["upper_error"].as_f64().unwrap() < 0.05);
    assert!(pair["lower_error"].as_f64().unwrap() < 0.05);
    assert_eq!(r["zero_set"]["status"].as_str(), Some("empty"));
}

#[test]
fn synth_two_indicators() {
    let tmp = TempDir::new().unwrap();
    let input = write(
        tmp.path(),
        "t.json",
        r#"{"rho": 1.5, "h1": {"cos": {"amplitude": -1}}, "h2": {"cos": {"amplitude": -1, "phase": 3.141592653589793}}, "max_zeros": 5000}"#,
    );
    let out = tmp.path().join("o");
    run_ok(&["synth", s(&input), "--out", s(&out)]);
    let r = report(&out);
    assert_eq!(r["pair"]["pass"].as_bool(), Some(true), "{}", r["pair"]);
    assert_eq!(r["pair"]["crg"].as_bool(), Some(false));
    assert_eq!(r["zero_set"]["status"].as_str(), Some("written"));
    let zeros: Value = serde_json::from_str(&fs::read_to_string(out.join("zeros.json")).unwrap()).unwrap();
    let atoms = zeros["atoms"].as_array().unwrap();
    assert!(!atoms.is_empty());
    for a in atoms {
        let m = a["mass"].as_f64().unwrap();
        assert!(m >= 1.0 && m.fract() == 0.0);
    }
}

#[test]
fn synth_lower_indicator_pins() {
    let tmp = TempDir::new().unwrap();
    let input = write(tmp.path(), "g.json", r#"{"rho": 0.5, "g": {"constant": -1}}"#);
    let out = tmp.path().join("o");
    run_ok(&["synth", s(&input), "--out", s(&out)]);
    let r = report(&out);
    let lower = &r["lower"];
    assert_eq!(lower["pass"].as_bool(), Some(true));
    assert!(lower["pin_error"].as_f64().unwrap() < 1e-9);
    assert!(lower["family_min_error"].as_f64().unwrap() < 1e-9);
    assert_eq!(r["zero_set"]["status"].as_str(), Some("written"));
    assert!(fs::read_to_string(out.join("zeros.csv")).unwrap().starts_with("re,im,multiplicity\n"));
}

#[test]
fn synth_rejects_bad_specs() {
    let tmp = TempDir::new().unwrap();
    let o = tmp.path().join("o");
    for (name, text) in [
        ("a.json", r#"{"rho": 1.5}"#),
        ("b.json", r#"{"rho": 1.5, "h1": {"constant": 1}, "extra": 3}"#),
        ("c.json", r#"{"rho": -1, "h1": {"constant": 1}}"#),
        ("d.json", "not json"),
    ] {
        let p = write(tmp.path(), name, text);
        assert_eq!(subharm(&["synth", s(&p), "--out", s(&o)]).status.code(), Some(2), "{name}");
    }
    // cos ρφ with ρ > 1 has a concave kink at π: no function has it as indicator.
    let p = write(tmp.path(), "e.json", r#"{"rho": 1.5, "h1": {"cos": {"amplitude": 1}}}"#);
    let out = subharm(&["synth", s(&p), "--out", s(&o)]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("trigonometrically convex"));
    // A lower indicator above the indicator.
    let p = write(tmp.path(), "f.json", r#"{"rho": 0.5, "g": {"constant": 2}, "h": {"constant": 1}}"#);
    assert_eq!(subharm(&["synth", s(&p), "--out", s(&o)]).status.code(), Some(4));
}

fn statuses(r: &Value) -> Vec<String> {
    r["statuses"].as_array().unwrap().iter().map(|s| s["kind"].as_str().unwrap().to_string()).collect()
}

#[test]
fn complete_segments_in_disc() {
    let tmp = TempDir::new().unwrap();
    let input = write(
        tmp.path(),
        "b.json",
        r#"{"G": {"disc": 1.05}, "h1": {"segment": [[1, -1], [1, 1]]}, "h2": {"segment": [[-1, -1], [-1, 1]]}}"#,
    );
    let out = tmp.path().join("o");
    run_ok(&["complete", s(&input), "--out", s(&out), "--period", "6.283185307179586"]);
    let r = report(&out);
    assert_eq!(statuses(&r), ["free", "free", "not_enclosed"]);
    assert_eq!(r["complete"].as_bool(), Some(false));
    assert_eq!(r["spiral"][0]["rho_min"].as_f64(), Some(1.0));
    assert!(fs::read_to_string(out.join("mixes.csv")).unwrap().starts_with("c,kind,margin\n"));
}

#[test]
fn complete_rotated_triangles() {
    let tri = |a: f64| -> String {
        let v: Vec<String> = (0..3)
            .map(|k| {
                let t = a + std::f64::consts::TAU * k as f64 / 3.0;
                format!("[{}, {}]", t.cos(), t.sin())
            })
            .collect();
        format!(r#"{{"vertices": [{}]}}"#, v.join(","))
    };
    let text = format!(
        r#"{{"G": {{"disc": 1}}, "h1": {}, "h2": {}}}"#,
        tri(0.0),
        tri(std::f64::consts::FRAC_PI_6)
    );
    let tmp = TempDir::new().unwrap();
    let input = write(tmp.path(), "b.json", &text);
    let out = tmp.path().join("o");
    run_ok(&["complete", s(&input), "--out", s(&out)]);
    let r = report(&out);
    assert_eq!(&statuses(&r)[..2], ["rigid", "rigid"]);
    let half = r["mixes"].as_array().unwrap().iter().find(|m| m["c"].as_f64() == Some(0.5)).unwrap();
    assert_eq!(half["status"]["kind"].as_str(), Some("free"));
    assert_eq!(r["extremely_overcomplete"].as_bool(), Some(false));
}

#[test]
fn complete_rejects_bad_bodies() {
    let tmp = TempDir::new().unwrap();
    let o = tmp.path().join("o");
    let p = write(tmp.path(), "a.json", r#"{"G": {"disc": 1}}"#);
    assert_eq!(subharm(&["complete", s(&p), "--out", s(&o)]).status.code(), Some(2));
    let p = write(tmp.path(), "b.json", r#"{"G": {"disc": 1}, "h1": {"vertices": []}}"#);
    assert_eq!(subharm(&["complete", s(&p), "--out", s(&o)]).status.code(), Some(2));
    let p = write(tmp.path(), "c.json", r#"{"G": {"disc": 1}, "h1": {"disc": 0.5}, "periods": [-1]}"#);
    assert_eq!(subharm(&["complete", s(&p), "--out", s(&o)]).status.code(), Some(2));
}

#[test]
fn reports_are_deterministic() {
    let tmp = TempDir::new().unwrap();
    let input = write(tmp.path(), "g.json", r#"{"rho": 0.5, "g": {"values": [-1, -1, -1, -1, -1, -1, -1, -1, -0.5, -0.5, -0.5, -0.5, -0.5, -0.5, -0.5, -0.5]}}"#);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    run_ok(&["synth", s(&input), "--out", s(&a), "--seed", "7"]);
    run_ok(&["synth", s(&input), "--out", s(&b), "--seed", "7"]);
    for f in ["report.json", "lower.csv", "zeros.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    assert_eq!(report(&a)["seed"].as_u64(), Some(7));
}
