use std::path::Path;
use std::process::{Command, Output};

fn dshell(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dshell")).args(args).output().unwrap()
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn gen(dir: &Path, kind: &str) -> std::path::PathBuf {
    let mesh = dir.join(format!("{kind}.json"));
    let o = dshell(&["gen", kind, "--out", arg(&mesh)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    mesh
}

fn listing(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    out.sort();
    out
}

#[test]
fn run_prints_the_table_and_writes_the_job() {
    let tmp = tempfile::tempdir().unwrap();
    let mesh = gen(tmp.path(), "grid");
    let job = tmp.path().join("job");
    let o = dshell(&["run", "--input", arg(&mesh), "--out", arg(&job)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let table = String::from_utf8(o.stdout).unwrap();
    assert!(table.starts_with("Model "));
    assert!(table.lines().nth(2).unwrap().starts_with("grid "));
    for f in ["mesh.json", "config.json", "partition.json", "shell.json", "validation.json", "report.json", "report.txt"] {
        assert!(job.join(f).is_file(), "missing {f}");
    }
}

#[test]
fn staged_commands_match_run() {
    let tmp = tempfile::tempdir().unwrap();
    let mesh = gen(tmp.path(), "saddle");
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert!(dshell(&["run", "--input", arg(&mesh), "--out", arg(&a)]).status.success());
    assert!(dshell(&["partition", "--input", arg(&mesh), "--out", arg(&b)]).status.success());
    for stage in ["shell", "slice", "report"] {
        let o = dshell(&[stage, "--input", arg(&b)]);
        assert!(o.status.success(), "{stage}: {}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(listing(&a), listing(&b));
}

#[test]
fn repeated_runs_are_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let mesh = gen(tmp.path(), "d6");
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for d in [&a, &b] {
        assert!(dshell(&["run", "--input", arg(&mesh), "--out", arg(d)]).status.success());
    }
    assert_eq!(listing(&a), listing(&b));
}

#[test]
fn bad_mesh_leaves_no_output() {
    let tmp = tempfile::tempdir().unwrap();
    let mesh = tmp.path().join("bad.json");
    std::fs::write(&mesh, r#"{"vertices": [[0,0,0]], "quads": [[0,1,2,3]]}"#).unwrap();
    let job = tmp.path().join("job");
    let o = dshell(&["run", "--input", arg(&mesh), "--out", arg(&job)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("dshell: "));
    assert!(!job.exists());
}

#[test]
fn invalid_parameters_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let mesh = gen(tmp.path(), "grid");
    let job = tmp.path().join("job");
    for extra in [&["--gamma", "0"][..], &["--bbox", "0,10,10"], &["--preview", "mesh"], &["--nozzle", "-1"]] {
        let mut args = vec!["run", "--input", arg(&mesh), "--out", arg(&job)];
        args.extend_from_slice(extra);
        assert_eq!(dshell(&args).status.code(), Some(2), "{extra:?}");
    }
    assert!(!job.exists());
    assert_eq!(dshell(&["gen", "sphere"]).status.code(), Some(2));
    assert_eq!(dshell(&["analyze", "--input", arg(&tmp.path().join("missing.json"))]).status.code(), Some(2));
}

#[test]
fn analyze_reports_singularities() {
    let tmp = tempfile::tempdir().unwrap();
    let mesh = gen(tmp.path(), "d2");
    let o = dshell(&["analyze", "--input", arg(&mesh)]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["singularities"].as_array().unwrap().len(), 1);
}

#[test]
fn preview_adds_obj_and_svg() {
    let tmp = tempfile::tempdir().unwrap();
    let mesh = gen(tmp.path(), "grid");
    let job = tmp.path().join("job");
    assert!(dshell(&["run", "--input", arg(&mesh), "--out", arg(&job), "--preview", "patches"]).status.success());
    assert!(job.join("preview_patches.obj").is_file());
    assert!(std::fs::read_to_string(job.join("preview_patches.svg")).unwrap().starts_with("<svg"));
}
