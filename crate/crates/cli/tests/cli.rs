use std::process::Command;

fn bddcso() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bddcso"))
}

const SMALL: &str = "[[run]]\ncells = [8, 8]\nsubdomains = [2, 2]\npreconditioner = \"bddc\"\nrecipe = \"ve\"\n\n\
[[run]]\ncells = [8, 8]\nsubdomains = [2, 2]\nsplit = { mode = \"uniform\", s = 2 }\npreconditioner = \"bddc-so\"\nrecipe = \"ve\"\n";

#[test]
fn count_prints_the_coarse_size() {
    let out = bddcso().args(["count", "10x10x10", "2", "vef"]).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "32319");
    let out = bddcso().args(["count", "10x10x10", "s=1", "v"]).output().unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "729");
}

#[test]
fn run_writes_csv_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.toml");
    std::fs::write(&cfg, SMALL).unwrap();
    let out_path = dir.path().join("out.csv");
    let status = bddcso()
        .args(["run", cfg.to_str().unwrap(), "--out", out_path.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let text = std::fs::read_to_string(out_path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "mesh,subdomains,split,precond,recipe,weighting,dofs,coarse_size,iters,kappa,setup_s,solve_s,converged"
    );
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("8x8,2x2,s=1,bddc,ve,cardinality,49,5,"));
    assert!(lines[2].starts_with("8x8,2x2,s=2,bddc-so,ve,cardinality,49,"));
}

#[test]
fn json_format_has_uniform_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.toml");
    std::fs::write(&cfg, SMALL).unwrap();
    let out = bddcso().args(["run", cfg.to_str().unwrap(), "--format", "json"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.trim_start().starts_with('['));
    assert_eq!(text.matches("\"coarse_size\"").count(), 2);
    assert_eq!(text.matches("\"kappa\"").count(), 2);
}

#[test]
fn iteration_cap_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("vertices.toml");
    std::fs::write(&cfg, "cells = [16, 16]\nsubdomains = [4, 4]\npreconditioner = \"bddc\"\nrecipe = \"v\"\n").unwrap();
    let out = bddcso()
        .args(["run", cfg.to_str().unwrap(), "--max-iters", "1", "--tol", "1e-12"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stdout).unwrap().contains(",false"));
}

#[test]
fn bad_input_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "cells = [9, 9]\nsubdomains = [2, 2]\npreconditioner = \"bddc\"\nrecipe = \"ve\"\n").unwrap();
    let out = bddcso().args(["run", cfg.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
    let missing = bddcso().args(["run", "/nonexistent/cfg.toml"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn coarse_counts_preset_runs() {
    let out = bddcso().args(["preset", "coarse-counts"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for n in ["5859", "32319", "150039", "354159"] {
        assert!(text.contains(&format!(",{n},")), "{n} missing from\n{text}");
    }
}
