use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_halftrans")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn scratch(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("halftrans-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn info_reports_invariants() {
    let v: Value = serde_json::from_str(&stdout(&["--builtin", "regular_octagon", "info"])).unwrap();
    assert_eq!(v["genus"], 2);
    assert_eq!(v["stratum"], serde_json::json!([4]));
    assert_eq!(v["is_translation"], true);
}

#[test]
fn graph_dot_small_torus() {
    let dot = stdout(&["--builtin", "square_torus", "graph", "--len2", "2", "--format", "dot"]);
    assert_eq!(dot.lines().filter(|l| l.ends_with(';') && !l.contains(" -- ")).count(), 4);
    assert_eq!(dot.matches(" -- ").count(), 5);
}

#[test]
fn enum_counts_primitive_vectors() {
    let out = stdout(&["--builtin", "square_torus", "enum", "--len2", "25"]);
    assert_eq!(out.lines().count(), 24);
    for line in out.lines() {
        let v: Value = serde_json::from_str(line).unwrap();
        assert!(v["id"].is_string());
    }
}

#[test]
fn modular_generators_give_one_orbit() {
    let gens = scratch("gens.json");
    std::fs::write(&gens, r#"["0,-1;1,0", [[1,1],[0,1]]]"#).unwrap();
    let out = stdout(&["--builtin", "square_torus", "orbits", "--len2", "5", "--generators", gens.to_str().unwrap()]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["vertex_orbit_count"], 1);
    assert_eq!(v["edge_orbit_count"], 1);
    assert_eq!(v["vertex_exactness"], "certified");
}

#[test]
fn surface_file_and_output_file() {
    let surf = scratch("octagon.json");
    let out = scratch("info.json");
    let info = stdout(&["--builtin", "regular_octagon", "info"]);
    // A surface file written by hand in the documented format.
    std::fs::write(
        &surf,
        r#"{"field_d": 1, "polygons": [{"name": "sq", "vertices": [[["0","0"],["0","0"]], [["1","0"],["0","0"]], [["1","0"],["1","0"]], [["0","0"],["1","0"]]]}],
            "gluings": [{"from": [0,0], "to": [0,2], "sign": 1}, {"from": [0,1], "to": [0,3], "sign": 1}]}"#,
    )
    .unwrap();
    let torus = stdout(&["--surface", surf.to_str().unwrap(), "info"]);
    assert_eq!(torus, stdout(&["--builtin", "square_torus", "info"]));
    assert!(stdout(&["--builtin", "regular_octagon", "-o", out.to_str().unwrap(), "info"]).is_empty());
    assert_eq!(std::fs::read_to_string(&out).unwrap(), info);
}

#[test]
fn cylinders_and_drawing() {
    let v: Value = serde_json::from_str(&stdout(&["--builtin", "L_shape_2x1", "cylinders", "--dir", "1,0"])).unwrap();
    assert_eq!(v["status"], "periodic");
    assert_eq!(v["cylinders"].as_array().unwrap().len(), 2);
    let svg = stdout(&["--builtin", "square_torus", "draw", "--len2", "5"]);
    assert!(svg.starts_with("<svg") && svg.contains("<line"));
}

#[test]
fn errors_are_json_with_exit_codes() {
    let out = run(&["--builtin", "nope", "info"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(v["error"], "UnknownName");

    let out = run(&["--builtin", "square_torus", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(v["error"], "UsageError");

    let out = run(&["--builtin", "square_torus", "graph", "--len2", "2", "--format", "gml"]);
    assert_eq!(out.status.code(), Some(1));

    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn output_is_deterministic() {
    let args = ["--builtin", "regular_octagon", "graph", "--len2", "20"];
    assert_eq!(stdout(&args), stdout(&args));
    let args = ["--builtin", "regular_octagon", "flips", "--depth", "1"];
    assert_eq!(stdout(&args), stdout(&args));
}
