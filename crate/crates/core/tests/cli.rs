use std::path::Path;
use std::process::{Command, Output};

use harq_scaling::analytic::evaluate;
use harq_scaling::sweep::log_grid;
use harq_scaling::{Regime, Scheme, SchemeParams};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_harq-scaling"))
        .args(args)
        .env_remove("HARQ_SCALING_OUTPUT_DIR")
        .output()
        .unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = bin(args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn curve_csv_round_trips() {
    let text = stdout(&[
        "curve", "--scheme", "cc-noma", "--regime", "sum", "--T", "2", "--J", "10", "--points",
        "25",
    ]);
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(
        reader.headers().unwrap(),
        vec![
            "sweep_var",
            "rho_or_J",
            "ebn0_db",
            "ebn0_linear",
            "se_or_density"
        ]
    );
    let grid = log_grid(1e-3, 1e2, 25).unwrap();
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), grid.len());
    for (row, rho) in rows.iter().zip(grid) {
        assert_eq!(&row[0], "rho");
        let parsed: Vec<f64> = (1..5).map(|i| row[i].parse().unwrap()).collect();
        assert_eq!(parsed[0], rho);
        let m = evaluate(
            Scheme::CcNoma,
            Regime::SumOptimal,
            &SchemeParams::new(rho, 2, 10.0),
        )
        .unwrap();
        let want = [m.ebn0_db, m.ebn0_linear, m.se];
        for (got, want) in parsed[1..].iter().zip(want) {
            assert_eq!(format!("{got:.14e}"), format!("{want:.14e}"));
        }
    }
}

#[test]
fn density_uses_user_grid() {
    let text = stdout(&[
        "density", "--scheme", "cc-oma", "--regime", "tin", "--T", "2", "--rho", "1", "--L", "50",
        "--min", "2", "--max", "20", "--points", "4", "--scale", "linear",
    ]);
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 4);
    assert_eq!(&rows[0][0], "J");
    assert_eq!(&rows[3][1], "20");
}

#[test]
fn json_curve_carries_metadata() {
    let text = stdout(&[
        "curve", "--scheme", "ir-oma", "--regime", "tin", "--T", "3", "--J", "10", "--c-buf", "2",
        "--points", "5", "--format", "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["meta"]["tool_version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["points"].as_array().unwrap().len(), 5);
}

#[test]
fn limits_lists_floor() {
    let text = stdout(&[
        "limits", "--scheme", "cc-noma", "--regime", "tin", "--T", "2", "--J", "10",
    ]);
    assert!(text.contains("-1.59"), "{text}");
}

#[test]
fn validate_example_passes() {
    let text = stdout(&[
        "validate",
        "--eta",
        "0.1",
        "--T",
        "2",
        "--users-per-slot",
        "5",
        "--rho",
        "1",
        "--trials",
        "2000",
        "--seed",
        "7",
    ]);
    assert!(text.trim_end().ends_with("PASS"), "{text}");
}

#[test]
fn bad_input_exits_with_error() {
    let out = bin(&[
        "point", "--scheme", "cc-noma", "--regime", "sum", "--rho", "-1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    assert_eq!(
        bin(&["point", "--scheme", "nope", "--regime", "sum"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn config_file_and_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(
        &cfg,
        "# sweep\nscheme = cc-oma\nregime = sum\nT = 2\nJ = 10\npoints = 3\n",
    )
    .unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_harq-scaling"))
        .args([
            "curve", "--regime", "tin", "--output", "out.csv", "--config",
        ])
        .arg(&cfg)
        .env("HARQ_SCALING_OUTPUT_DIR", dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let written = std::fs::read_to_string(Path::new(dir.path()).join("out.csv")).unwrap();
    let direct = stdout(&[
        "curve", "--scheme", "cc-oma", "--regime", "tin", "--T", "2", "--J", "10", "--points", "3",
    ]);
    assert_eq!(written, direct);
}
