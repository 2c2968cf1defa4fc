use std::fs;
use std::path::Path;
use std::process::Command;

use obstacle_scattering::cli::{parse_scene, serialize_scene};
use obstacle_scattering::geometry::{Ellipse, Scene, Vec2};
use proptest::prelude::*;

fn scatter(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_scatter")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn data_rows(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).skip(1).collect()
}

#[test]
fn spectrum_csv_has_one_row_per_node() {
    let dir = tempfile::tempdir().unwrap();
    let scene = write(dir.path(), "one_disc.scn", "ball 3.0\nellipse 0 0 1 1 0\n");
    let out = dir.path().join("s.csv");
    let (code, stdout, _) = scatter(&[
        "spectrum", "--scene", &scene, "--n-psi", "200", "--n-phi", "200", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let csv = fs::read_to_string(out).unwrap();
    let header: Vec<&str> = csv.lines().take_while(|l| l.starts_with('#')).collect();
    assert!(header[0].starts_with("# scatter "));
    assert!(header.iter().any(|l| l.starts_with("# command: ")));
    assert!(header.iter().any(|l| l.starts_with("# seed: ")));
    assert!(header.iter().any(|l| l.contains("counterclockwise")));
    assert_eq!(csv.lines().find(|l| !l.starts_with('#')), Some("psi,phi,status,t,reflections,tangencies"));
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 40_000);
    for r in &rows {
        let f: Vec<&str> = r.split(',').collect();
        assert_eq!(f.len(), 6);
        // numeric fields survive parse → format unchanged
        for x in [f[0], f[1], f[3]] {
            let v: f64 = x.parse().unwrap();
            assert_eq!(v.to_string(), x);
        }
        assert!(["finite", "grazing", "cutoff"].contains(&f[2]));
    }
}

#[test]
fn santalo_report_for_one_disc() {
    let dir = tempfile::tempdir().unwrap();
    let scene = write(dir.path(), "one_disc.scn", "ball 3.0\nellipse 0 0 1 1 0\n");
    let (code, stdout, _) = scatter(&["santalo", "--scene", &scene, "--n-psi", "400", "--n-phi", "400"]);
    assert_eq!(code, 0);
    let get = |key: &str| -> f64 {
        stdout
            .lines()
            .find_map(|l| l.strip_prefix(&format!("{key},")))
            .unwrap()
            .parse()
            .unwrap()
    };
    let volume = 16.0 * std::f64::consts::PI.powi(2);
    assert!((get("integral") - 157.91367).abs() < 5e-3 * volume);
    assert!((get("phase_volume") - volume).abs() < 1e-12);
    assert_eq!(get("excluded_weight"), 0.0);
    assert!((get("defect") - (get("phase_volume") - get("integral"))).abs() < 1e-12);
}

#[test]
fn compare_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.scn", "ball 3\nellipse 0 0 1 1 0\n");
    let a2 = write(dir.path(), "a2.scn", "# same disc, drawn as a rotated ellipse\nball 3\nellipse 0 0 1 1 0.3\n");
    let b = write(dir.path(), "b.scn", "ball 3\nellipse 0.2 0 1 1 0\n");
    let (code, stdout, _) = scatter(&["compare", "--scene-a", &a, "--scene-b", &a2, "--n-psi", "60", "--n-phi", "60", "--tol", "1e-7"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("verdict,indistinguishable"));
    let (code, stdout, _) = scatter(&["compare", "--scene-a", &a, "--scene-b", &b, "--n-psi", "60", "--n-phi", "60", "--tol", "1e-7"]);
    assert_eq!(code, 3);
    assert!(stdout.contains("verdict,different"));
    assert!(stdout.contains("witness_psi,"));
}

#[test]
fn input_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "good.scn", "ball 3\nellipse 0 0 1 1 0\n");
    let no_ball = write(dir.path(), "bad.scn", "ellipse 0 0 1 1 0\n");
    let overlap = write(dir.path(), "overlap.scn", "ball 5\nellipse 0 0 1 1 0\nellipse 1 0 1 1 0\n");
    let syntax = write(dir.path(), "syntax.scn", "ball 3\n\nellipse 0 0 one 1 0\n");

    let (code, _, err) = scatter(&["spectrum", "--scene", &no_ball]);
    assert_eq!(code, 2);
    assert!(err.contains("ball"));
    let (code, _, err) = scatter(&["spectrum", "--scene", &overlap]);
    assert_eq!(code, 2);
    assert!(err.contains("1") && err.contains("2"));
    let (code, _, err) = scatter(&["spectrum", "--scene", &syntax]);
    assert_eq!(code, 2);
    assert!(err.contains("line 3"), "{err}");

    for args in [
        vec!["spectrum", "--scene", good.as_str(), "--n-psi", "0"],
        vec!["trace", "--scene", good.as_str(), "--q", "5,0", "--v", "1,0"],
        vec!["trace", "--scene", good.as_str(), "--q", "0,0", "--v", "1,0"],
        vec!["trace", "--scene", good.as_str(), "--q", "-2,0", "--v", "0,0"],
        vec!["involute", "--scene", good.as_str(), "--obstacle-index", "2", "--s0", "0", "--eps0", "0.5"],
        vec!["involute", "--scene", good.as_str(), "--obstacle-index", "1", "--s0", "0", "--eps0", "0.5", "--delta", "0.6"],
        vec!["front", "--scene", good.as_str(), "--q", "-2,1", "--v", "1,0"],
        vec!["trapped", "--scene", good.as_str(), "--cutoffs", "5,3"],
        vec!["sls", "--scene", "/nonexistent.scn"],
        vec!["bogus"],
    ] {
        let (code, _, err) = scatter(&args);
        assert_eq!(code, 2, "{args:?}: {err}");
        assert!(!err.is_empty());
    }
}

#[test]
fn trace_prints_events() {
    let dir = tempfile::tempdir().unwrap();
    let scene = write(dir.path(), "two.scn", "ball 5\nellipse -2 0 1 1 0\nellipse 2 0 1 1 0\n");
    let (code, stdout, _) = scatter(&["trace", "--scene", &scene, "--q", "-5,0", "--v", "1,0"]);
    assert_eq!(code, 0);
    let rows = data_rows(&stdout);
    assert_eq!(rows, vec!["start,0,0,-5,0,1,0,", "reflection,2,1,-3,0,-1,0,1", "exit,4,0,-5,0,-1,0,"]);

    let (code, stdout, _) = scatter(&["trace", "--scene", &scene, "--q", "0,0", "--v", "1,0", "--max-reflections", "7"]);
    assert_eq!(code, 0);
    assert_eq!(data_rows(&stdout).len(), 8);
    assert!(stdout.contains("# cutoff: reflections = 7"));
}

#[test]
fn trapped_header_records_seed() {
    let dir = tempfile::tempdir().unwrap();
    let scene = write(dir.path(), "two.scn", "ball 5\nellipse -2 0 1 1 0\nellipse 2 0 1 1 0\n");
    let args = ["trapped", "--scene", scene.as_str(), "--n-samples", "5000", "--seed", "42", "--cutoffs", "1,2,3"];
    let (code, first, _) = scatter(&args);
    assert_eq!(code, 0);
    assert!(first.contains("# seed: 42"));
    let rows = data_rows(&first);
    assert_eq!(rows.len(), 3);
    let (_, second, _) = scatter(&args);
    assert_eq!(first, second);
}

#[test]
fn front_and_involute_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let scene = write(dir.path(), "disc.scn", "ball 3\nellipse 0 0 1 1 0\n");
    let (code, stdout, _) = scatter(&["front", "--scene", &scene, "--q", "-3,0", "--v", "1,0", "--kappa0", "0"]);
    assert_eq!(code, 0);
    let kappas: Vec<f64> = data_rows(&stdout).iter().map(|r| r.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(kappas.len(), 3);
    assert_eq!(kappas[0], 0.0);
    assert!((kappas[1] - 2.0).abs() < 1e-12);
    assert!((kappas[2] - 0.4).abs() < 1e-12);

    let (code, stdout, _) = scatter(&["involute", "--scene", &scene, "--obstacle-index", "1", "--s0", "0", "--eps0", "0.5", "--n-samples", "11"]);
    assert_eq!(code, 0);
    let rows = data_rows(&stdout);
    assert_eq!(rows.len(), 11);
    // the tangent at the start is (-0, 1) exactly
    assert_eq!(rows[0], "0,1,0.5,-0,1,2");
}

fn ellipse_strategy() -> impl Strategy<Value = (f64, f64, f64, f64, f64)> {
    (-1.0f64..1.0, -1.0f64..1.0, 0.2f64..1.0, 0.2f64..1.0, -10.0f64..10.0)
        .prop_map(|(x, y, p, q, rot)| (x, y, p.max(q), p.min(q), rot))
}

proptest! {
    #[test]
    fn scene_files_round_trip(
        a in 3.5f64..20.0,
        e1 in ellipse_strategy(),
        e2 in ellipse_strategy(),
        two in any::<bool>(),
    ) {
        let mut obstacles = vec![Ellipse::new(Vec2::new(e1.0 - 1.2, e1.1), e1.2, e1.3, e1.4).unwrap()];
        if two {
            obstacles.push(Ellipse::new(Vec2::new(e2.0 + 1.2, e2.1), e2.2, e2.3, e2.4).unwrap());
        }
        let Ok(scene) = Scene::new(a, obstacles) else {
            return Ok(());
        };
        let text = serialize_scene(&scene);
        let back = parse_scene(&text).unwrap();
        prop_assert_eq!(&back, &scene);
        prop_assert_eq!(serialize_scene(&back), text);
    }
}
