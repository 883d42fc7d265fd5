//! Runs every shipped config through the binary and compares the outputs
//! byte-for-byte with `tests/golden/<config stem>/`. Set `DFSL_BLESS=1` to
//! regenerate the expected files.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn dfsl() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dfsl"))
}

fn manifest() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn sorted_files(dir: &Path) -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file())
        .collect();
    files.sort();
    files
}

#[test]
fn shipped_configs_reproduce_golden_outputs() {
    let bless = std::env::var_os("DFSL_BLESS").is_some();
    let configs = sorted_files(&manifest().join("configs"));
    assert!(!configs.is_empty());
    let mut mismatches = Vec::new();
    for config in configs {
        let stem = config.file_stem().unwrap().to_str().unwrap().to_string();
        let command = stem.split('_').next().unwrap();
        let out = tempfile::tempdir().unwrap();
        let status = dfsl()
            .args([command, "--config"])
            .arg(&config)
            .arg("--out")
            .arg(out.path())
            .status()
            .unwrap();
        assert!(status.success(), "{stem}: exit {status}");
        let golden = manifest().join("tests/golden").join(&stem);
        if bless {
            let _ = fs::remove_dir_all(&golden);
            fs::create_dir_all(&golden).unwrap();
            for f in sorted_files(out.path()) {
                fs::copy(&f, golden.join(f.file_name().unwrap())).unwrap();
            }
            continue;
        }
        let produced = sorted_files(out.path());
        let expected = sorted_files(&golden);
        let names = |v: &[PathBuf]| {
            v.iter()
                .map(|p| p.file_name().unwrap().to_owned())
                .collect::<Vec<_>>()
        };
        assert_eq!(
            names(&produced),
            names(&expected),
            "{stem}: file set differs"
        );
        for (p, e) in produced.iter().zip(&expected) {
            if fs::read(p).unwrap() != fs::read(e).unwrap() {
                mismatches.push(format!(
                    "{stem}/{}",
                    e.file_name().unwrap().to_string_lossy()
                ));
            }
        }
    }
    assert!(mismatches.is_empty(), "golden mismatches: {mismatches:?}");
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("run.toml");
    fs::write(&path, text).unwrap();
    path
}

fn exit_code(dir: &Path, args: &[&str], config: &Path) -> i32 {
    dfsl()
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(dir)
        .output()
        .unwrap()
        .status
        .code()
        .unwrap()
}

#[test]
fn malformed_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    for text in ["mu = ", "mu = \"3/2\"", "mu = \"1/2\"\nwidth = 3"] {
        let config = write_config(dir.path(), text);
        assert_eq!(exit_code(dir.path(), &["kernels"], &config), 2, "{text:?}");
    }
    let degenerate = write_config(dir.path(), "mu = \"1/2\"\n[grid]\na = 0\nb = 2");
    assert_eq!(exit_code(dir.path(), &["eig"], &degenerate), 2);
    let missing = dir.path().join("absent.toml");
    assert_eq!(exit_code(dir.path(), &["kernels"], &missing), 2);
}

#[test]
fn irrational_scale_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "mu = \"1/2\"\noperator = \"NablaLeftGL\"\n[grid]\na = 0\nb = \"3/2\"\nh = \"1/2\"",
    );
    assert_eq!(exit_code(dir.path(), &["opmat"], &config), 2);
}

#[test]
fn strict_mode_exits_one_on_violation_only() {
    let dir = tempfile::tempdir().unwrap();
    let config = manifest().join("configs/compare_gl_mu05.toml");
    assert_eq!(exit_code(dir.path(), &["compare"], &config), 0);
    assert_eq!(exit_code(dir.path(), &["compare", "--strict"], &config), 1);
    let kernels = manifest().join("configs/kernels_gl_half.toml");
    assert_eq!(exit_code(dir.path(), &["kernels", "--strict"], &kernels), 0);
}

#[test]
fn unmet_hypothesis_writes_no_report() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "mu = \"1/2\"\n[grid]\na = 0\nb = 10\n[coefficients]\nq1 = 0\nq2 = 0\n[selection]\nk1 = 1\nk2 = 1",
    );
    assert_eq!(exit_code(dir.path(), &["compare", "--strict"], &config), 1);
    assert!(!dir.path().join("report.json").exists());
}
