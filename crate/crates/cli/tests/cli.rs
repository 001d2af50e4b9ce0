use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use heisproj::heisenberg::to_plane_coords;
use heisproj::measures::product_cantor_measure;
use heisproj::Angle;
use serde_json::Value;
use tempfile::TempDir;

fn heisproj(dir: &Path, args: &[&str]) -> (i32, PathBuf, String) {
    let out = dir.join(format!("out-{}", fs::read_dir(dir).unwrap().count()));
    let output = Command::new(env!("CARGO_BIN_EXE_heisproj"))
        .args(args)
        .arg("--out")
        .arg(&out)
        .current_dir(dir)
        .output()
        .unwrap();
    let stderr = String::from_utf8_lossy(&output.stderr).into_owned();
    (output.status.code().unwrap_or(-1), out, stderr)
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

/// Data rows of a CSV file, parsed as numbers (booleans as 0 and 1).
fn rows(path: PathBuf) -> Vec<Vec<f64>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| {
            l.split(',')
                .map(|x| match x {
                    "true" => 1.0,
                    "false" => 0.0,
                    _ => x.parse().unwrap(),
                })
                .collect()
        })
        .collect()
}

#[test]
fn quarter_turn_flattens_the_parabola() {
    let dir = TempDir::new().unwrap();
    let (code, out, _) = heisproj(dir.path(), &["project", "--measure", "parabola:n=4096,beta=1", "--theta", "0.7853981633974483"]);
    assert_eq!(code, 0);
    let rows = rows(out.join("projection.csv"));
    assert_eq!(rows.len(), 4096);
    assert!(rows.iter().all(|r| r[1].abs() <= 1e-12));
    let mass: f64 = rows.iter().map(|r| r[2]).sum();
    assert!((mass - 1.0).abs() <= 1e-12);
}

#[test]
fn projecting_onto_its_own_plane_returns_plane_coordinates() {
    let dir = TempDir::new().unwrap();
    let (code, out, _) = heisproj(
        dir.path(),
        &["project", "--measure", "cantor:a=1,b=0.5,depth=3,theta0=0.3,R=2", "--theta", "0.3"],
    );
    assert_eq!(code, 0);
    let theta = Angle::new(0.3).unwrap();
    let mu = product_cantor_measure(theta, 1.0, 0.5, 3, 2.0).unwrap();
    let got = rows(out.join("projection.csv"));
    for (row, p) in got.iter().zip(mu.points()) {
        let want = to_plane_coords(theta, *p);
        assert!((row[0] - want.v).abs() <= 1e-12 && (row[1] - want.t).abs() <= 1e-12);
    }
}

#[test]
fn unexcluded_sweep_spikes_at_the_exceptional_angle() {
    let dir = TempDir::new().unwrap();
    let (code, out, _) = heisproj(
        dir.path(),
        &["sweep", "--measure", "parabola:n=1024,beta=1", "--epsilon", "0", "--n-theta", "66"],
    );
    assert_eq!(code, 0);
    let summary = &json(out.join("sweep.json"))["summary"];
    assert!(summary["max_over_median"].as_f64().unwrap() >= 10.0, "{summary}");
    assert!(fs::read_to_string(out.join("sweep.svg")).unwrap().starts_with("<svg"));
}

#[test]
fn empty_domain_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let (code, _, err) = heisproj(dir.path(), &["sweep", "--measure", "parabola:n=64,beta=1", "--epsilon", "2"]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn parabola_dimension_dips_at_the_quarter_turn() {
    let dir = TempDir::new().unwrap();
    let (code, out, _) = heisproj(
        dir.path(),
        &["dims", "--measure", "parabola:n=65536,beta=1", "--thetas", "0,0.7853981633974483,1"],
    );
    assert_eq!(code, 0);
    let slopes: Vec<f64> = rows(out.join("dims.csv")).iter().map(|r| r[1]).collect();
    assert!((slopes[0] - 2.0).abs() <= 0.3 && (slopes[2] - 2.0).abs() <= 0.3, "{slopes:?}");
    assert!((slopes[1] - 1.0).abs() <= 0.2, "{slopes:?}");
}

#[test]
fn product_cantor_keeps_its_dimension_off_the_excluded_angles() {
    let dir = TempDir::new().unwrap();
    let (code, out, err) = heisproj(
        dir.path(),
        &[
            "dims", "--measure", "cantor:a=0.5,b=1,depth=10,theta0=0,R=1", "--theta0", "0", "--epsilon", "0.15",
            "--modulus", "4", "--n-theta", "4", "--deltas", "2..5",
        ],
    );
    assert_eq!(code, 0, "{err}");
    for row in rows(out.join("dims.csv")) {
        assert!(row[1] >= 2.2, "θ = {}: {}", row[0], row[1]);
    }
}

#[test]
fn single_atom_has_flat_saturated_profile_and_closed_form_pair_sum() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("atom.csv"), "x,y,t,w\n0.5,0.2,0.1,1\n").unwrap();
    let (code, out, _) = heisproj(dir.path(), &["dims", "--measure", "file:atom.csv", "--n-theta", "3"]);
    assert_eq!(code, 0);
    let report = json(out.join("dims.json"));
    for row in rows(out.join("dims.csv")) {
        assert_eq!(row[1], 0.0);
        assert_eq!(row[3], 1.0);
    }
    assert!(report["profile"].as_array().is_some_and(|p| p.len() == 3), "{report}");

    let (code, out, _) = heisproj(dir.path(), &["oscillatory", "--measure", "file:atom.csv", "--j", "0..0"]);
    assert_eq!(code, 0);
    let report = json(out.join("oscillatory.json"));
    let length = report["domain_length"].as_f64().unwrap();
    let lhs = report["rows"][0]["lhs"].as_f64().unwrap();
    assert!((lhs - 4.0 * length).abs() <= 1e-9 * lhs);
}

#[test]
fn smaller_domain_gives_smaller_pair_sums() {
    let dir = TempDir::new().unwrap();
    let lhs = |modulus: &str| {
        let (code, out, _) = heisproj(
            dir.path(),
            &["oscillatory", "--measure", "parabola:n=32,beta=1", "--j", "0..3", "--modulus", modulus],
        );
        assert_eq!(code, 0);
        rows(out.join("oscillatory.csv")).iter().map(|r| r[1]).collect::<Vec<f64>>()
    };
    let (four, two) = (lhs("4"), lhs("2"));
    for (a, b) in four.iter().zip(&two) {
        assert!(a <= b, "{four:?} vs {two:?}");
    }
}

#[test]
fn fourier_check_passes_and_rejects_out_of_band_requests() {
    let dir = TempDir::new().unwrap();
    for s in ["1.5", "2", "2.5"] {
        let (code, out, err) = heisproj(dir.path(), &["fourier-check", "--s", s, "--n-dir", "3", "--n-rad", "2"]);
        assert_eq!(code, 0, "{err}");
        let report = &json(out.join("fourier.json"))["report"];
        assert_eq!(report["positivity_violations"].as_u64(), Some(0));
        assert!(report["constant"].as_f64().unwrap().is_finite());
    }
    let (code, _, _) = heisproj(dir.path(), &["fourier-check", "--frequencies", "1000:0"]);
    assert_eq!(code, 2);
}

#[test]
fn exit_codes_separate_config_numerical_and_io_failures() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("bad.ini"), "thetta = 1\n").unwrap();
    assert_eq!(heisproj(dir.path(), &["project", "--config", "bad.ini"]).0, 2);
    assert_eq!(heisproj(dir.path(), &["project", "--measure", "blob"]).0, 2);
    assert_eq!(heisproj(dir.path(), &["project", "--config", "missing.ini"]).0, 4);
    assert_eq!(heisproj(dir.path(), &["project", "--measure", "file:missing.csv"]).0, 4);
    fs::write(dir.path().join("two.csv"), "x,y,t,w\n1,0,0,0.5\n1,0,0,0.5\n").unwrap();
    let (code, _, err) = heisproj(dir.path(), &["sweep", "--measure", "file:two.csv", "--n-theta", "4"]);
    assert_eq!(code, 3, "{err}");
    let blocker = dir.path().join("blocker");
    fs::write(&blocker, "").unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_heisproj"))
        .args(["project", "--measure", "parabola:n=8,beta=1", "--out"])
        .arg(blocker.join("sub"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(4));
}

#[test]
fn flags_override_sections_which_override_top_level_keys() {
    let dir = TempDir::new().unwrap();
    fs::write(
        dir.path().join("run.ini"),
        "# shared settings\nmeasure = parabola:n=16,beta=1\ntheta = 0.5\n\n[project]\ntheta = 0.6\n\n[sweep]\ns = 1.2\n",
    )
    .unwrap();
    let theta = |extra: &[&str]| {
        let mut args = vec!["project", "--config", "run.ini"];
        args.extend_from_slice(extra);
        let (code, out, err) = heisproj(dir.path(), &args);
        assert_eq!(code, 0, "{err}");
        let config = &json(out.join("projection.json"))["config"];
        assert_eq!(config["measure"], "parabola:n=16,beta=1");
        config["theta"].as_f64().unwrap()
    };
    assert_eq!(theta(&[]), 0.6);
    assert_eq!(theta(&["--theta", "0.7"]), 0.7);
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let dir = TempDir::new().unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "3"] {
        let (code, out, _) = heisproj(
            dir.path(),
            &["oscillatory", "--measure", "parabola:n=40,beta=1", "--j", "0..2", "--threads", threads],
        );
        assert_eq!(code, 0);
        let mut files: Vec<(PathBuf, Vec<u8>)> = fs::read_dir(&out)
            .unwrap()
            .map(|e| {
                let p = e.unwrap().path();
                (p.file_name().unwrap().into(), fs::read(&p).unwrap())
            })
            .collect();
        files.sort();
        outputs.push(files);
    }
    assert_eq!(outputs[0], outputs[1]);
}
