use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_multicut")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn temp(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("multicut-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn fixtures_match_their_goldens() {
    for name in ["triangle.txt", "multiway.txt", "torus.txt", "planar.json"] {
        let out = run(&["solve", fixture(name).to_str().unwrap()]);
        assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        let stem = name.split('.').next().unwrap();
        let golden = std::fs::read_to_string(fixture(&format!("{stem}.golden.json"))).unwrap();
        assert_eq!(stdout(&out), golden, "{name}");
    }
}

#[test]
fn goldens_agree_with_the_oracle_command() {
    for name in ["triangle.txt", "multiway.txt", "torus.txt", "planar.json"] {
        let out = run(&["oracle", fixture(name).to_str().unwrap()]);
        assert!(out.status.success());
        let oracle: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        let stem = name.split('.').next().unwrap();
        let golden: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(fixture(&format!("{stem}.golden.json"))).unwrap()).unwrap();
        assert_eq!(oracle["weight"], golden["weight"], "{name}");
    }
}

#[test]
fn triangle_weight_and_flow() {
    let out = run(&["oracle", fixture("triangle.txt").to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!((v["weight"].as_u64(), v["max_flow"].as_u64()), (Some(3), Some(3)));
}

#[test]
fn output_is_deterministic_across_runs_and_jobs() {
    let f = fixture("multiway.txt");
    let f = f.to_str().unwrap();
    let a = run(&["solve", f]);
    let b = run(&["solve", f]);
    let c = run(&["solve", f, "--jobs", "3"]);
    let d = run(&["solve", f, "--dp", "naive"]);
    assert_eq!(stdout(&a), stdout(&b));
    assert_eq!(stdout(&a), stdout(&c));
    let wa: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    let wd: serde_json::Value = serde_json::from_slice(&d.stdout).unwrap();
    assert_eq!(wa["weight"], wd["weight"]);
}

#[test]
fn dot_output_marks_the_cut() {
    let out = run(&["solve", fixture("triangle.txt").to_str().unwrap(), "--format", "dot"]);
    let dot = stdout(&out);
    assert!(dot.starts_with("graph multicut {"));
    assert_eq!(dot.matches("color=red").count(), 2);
}

#[test]
fn parse_errors_exit_with_two() {
    let text = std::fs::read_to_string(fixture("triangle.txt")).unwrap();
    let p = temp("twice.txt", &text.replace("rotation 0 ab+ ca-", "rotation 0 ab+ ca- ab+"));
    let out = run(&["solve", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("`ab+`") && err.contains("line 7"), "{err}");
    let p = temp("garbage.json", "{\"version\": 1, \"vertices\": }");
    assert_eq!(run(&["solve", p.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn resource_guards_exit_with_three() {
    let grid = run(&["gen", "--vertices", "12", "--edges", "30", "--seed", "1"]);
    let p = temp("big.txt", &stdout(&grid));
    assert_eq!(run(&["oracle", p.to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn bad_multipliers_are_rejected() {
    let out = run(&["solve", fixture("triangle.txt").to_str().unwrap(), "--c-tree", "0"]);
    assert!(!out.status.success());
}

#[test]
fn generator_is_seeded_and_round_trips() {
    let args = ["gen", "--surface", "torus", "--vertices", "4", "--edges", "9", "--seed", "42"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let g = multicut_core::parse_instance(&stdout(&a)).unwrap();
    assert_eq!(multicut_core::trace_faces(&g).unwrap().euler_genus, 2);
    let json = run(&["gen", "--surface", "torus", "--vertices", "4", "--edges", "9", "--seed", "42", "--format", "json"]);
    assert_eq!(multicut_core::parse_instance(&stdout(&json)).unwrap(), g);
    assert_ne!(run(&["gen", "--seed", "43"]).stdout, run(&["gen", "--seed", "44"]).stdout);
}
