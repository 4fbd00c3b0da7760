use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use scatterlab::artifacts::{CHORDS_CSV, HEATMAP, METADATA, REPORT, RESIDUAL_CSV};
use scatterlab::{run, RunConfig};

const DISK: &str = r#"
tasks = ["energy", "identity", "convex", "symmetry"]

[domain]
kind = "disk"

[resolution]
n_boundary = 64
n_theta = 32
symmetry_samples = 16
chord_table_nodes = 4
"#;

fn scatterlab(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_scatterlab"));
    cmd.args(args);
    match threads {
        Some(t) => cmd.env("SCATTERLAB_THREADS", t),
        None => cmd.env_remove("SCATTERLAB_THREADS"),
    };
    cmd.output().unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn disk_run_writes_every_artifact() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "disk.toml", DISK);
    let out = tmp.path().join("out");
    let o = scatterlab(&["run", &cfg, "--out", out.to_str().unwrap()], None);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stdout)
    );
    for f in [REPORT, METADATA, RESIDUAL_CSV, HEATMAP, CHORDS_CSV] {
        assert!(out.join(f).exists(), "{f}");
    }
    let csv = fs::read_to_string(out.join(RESIDUAL_CSV)).unwrap();
    assert_eq!(csv.lines().count(), 1 + 64 * 64);
    let chords = fs::read_to_string(out.join(CHORDS_CSV)).unwrap();
    assert_eq!(chords.lines().count(), 1 + 4 * 32);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join(REPORT)).unwrap()).unwrap();
    assert_eq!(report["pass"], true);
    // timings live only in the metadata
    assert!(!fs::read_to_string(out.join(REPORT))
        .unwrap()
        .contains("seconds"));
    assert!(fs::read_to_string(out.join(METADATA))
        .unwrap()
        .contains("task_seconds"));
    let svg = fs::read_to_string(out.join(HEATMAP)).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("s (arclength of y)"));
}

#[test]
fn reports_are_byte_identical_across_runs_and_thread_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "disk.toml", DISK);
    let mut reports = Vec::new();
    for (k, threads) in [None, Some("1"), Some("2")].into_iter().enumerate() {
        let out = tmp.path().join(format!("out{k}"));
        let o = scatterlab(&["run", &cfg, "--out", out.to_str().unwrap()], threads);
        assert_eq!(o.status.code(), Some(0));
        reports.push(fs::read(out.join(REPORT)).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
    assert_eq!(reports[0], reports[2]);
}

#[test]
fn level_doubles_the_boundary_nodes() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "disk.toml",
        &DISK.replace("\"identity\", \"convex\", \"symmetry\"", ""),
    );
    let out = tmp.path().join("out");
    let o = scatterlab(
        &["run", &cfg, "--out", out.to_str().unwrap(), "--level", "1"],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join(REPORT)).unwrap()).unwrap();
    assert_eq!(report["level"], 1);
    assert_eq!(report["tasks"][0]["values"]["n_boundary"], 128);
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let out = out.to_str().unwrap();

    let good = write_config(tmp.path(), "good.toml", DISK);
    let o = scatterlab(&["validate", &good], None);
    assert_eq!(o.status.code(), Some(0));

    let bad = write_config(
        tmp.path(),
        "bad.toml",
        &format!("{DISK}\n[tolerances]\nidentity = -1.0\n"),
    );
    let o = scatterlab(&["validate", &bad], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("tolerances.identity"));

    let small = write_config(
        tmp.path(),
        "small.toml",
        &DISK.replace("n_boundary = 64", "n_boundary = 8"),
    );
    let o = scatterlab(&["run", &small, "--out", out], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("resolution.n_boundary"));

    let o = scatterlab(&["run", &good, "--out", out], Some("zero"));
    assert_eq!(o.status.code(), Some(2));

    let o = scatterlab(&["converge", &good, "--levels", "1", "--out", out], None);
    assert_eq!(o.status.code(), Some(2));

    let strict = write_config(
        tmp.path(),
        "strict.toml",
        "tasks = [\"energy\"]\n[domain]\nkind = \"ellipse\"\na = 2.0\nb = 1.0\n[resolution]\nn_boundary = 64\n\
         [[checks]]\nvalue = \"energy.e_direct\"\nmax = 1.0\n",
    );
    let o = scatterlab(&["run", &strict, "--out", out], None);
    assert_eq!(o.status.code(), Some(1));

    // a figure eight cannot bound a domain
    let eight = write_config(
        tmp.path(),
        "eight.toml",
        "tasks = [\"energy\", \"symmetry\"]\n[domain]\nkind = \"fourier\"\nx_cos = [0.0, 1.0]\ny_sin = [0.0, 0.0, 1.0]\n\
         [resolution]\nn_boundary = 64\n",
    );
    let o = scatterlab(&["run", &eight, "--out", out], None);
    assert_eq!(o.status.code(), Some(3));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(Path::new(out).join(REPORT)).unwrap()).unwrap();
    // both tasks are recorded even though the first failed
    assert_eq!(report["tasks"].as_array().unwrap().len(), 2);
    assert_eq!(report["tasks"][1]["status"], "error");
}

#[test]
fn converge_writes_a_table() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "disk.toml", DISK);
    let out = tmp.path().join("out");
    let o = scatterlab(
        &[
            "converge",
            &cfg,
            "--levels",
            "2",
            "--out",
            out.to_str().unwrap(),
        ],
        None,
    );
    // the disk is resolved to round-off at every level, so no order emerges
    assert!(matches!(o.status.code(), Some(0) | Some(1)));
    let table = fs::read_to_string(out.join("converge.csv")).unwrap();
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("level,n_boundary,santalo_residual,identity_residual,length"));
    // the circle length is a closed-form quantity and does not move with the level
    let length = |l: &str| l.split(',').nth(4).unwrap().parse::<f64>().unwrap();
    assert!((length(lines[1]) - 2.0 * std::f64::consts::PI).abs() < 1e-12);
    assert_eq!(length(lines[1]), length(lines[2]));
}

#[test]
fn ellipse_residual_grid_inherits_the_ellipse_symmetry() {
    let cfg = RunConfig::parse(
        "tasks = [\"energy\"]\n[domain]\nkind = \"ellipse\"\na = 2.0\nb = 1.0\n[resolution]\nn_boundary = 64\n",
    )
    .unwrap();
    let out = run(&cfg, 0);
    let (grid, _, _) = out.tables.residual_grid.unwrap();
    let n = grid.n;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            // reflection across the major axis sends arclength s to L − s
            worst = worst.max((grid.get(i, j) - grid.get((n - i) % n, (n - j) % n)).abs());
            // and the half turn sends s to s + L/2
            worst = worst.max((grid.get(i, j) - grid.get((i + n / 2) % n, (j + n / 2) % n)).abs());
        }
    }
    assert!(worst < 1e-10, "{worst}");
    assert!(grid.max() > 0.1);
}
