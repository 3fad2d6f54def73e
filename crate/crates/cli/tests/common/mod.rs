//! Helpers shared by the CLI integration and acceptance suites.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn rcs_bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rcs"))
}

/// Run and require success, echoing the child's stderr on failure.
pub fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("spawning rcs");
    assert!(
        out.status.success(),
        "rcs failed ({:?}):\n{}",
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

pub fn data_file(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

/// Simulate the golden target and sphere scenes into `dir` as `scan.csv`,
/// `background.csv`, `sphere.csv`, and drop the golden pipeline config next
/// to them.
pub fn stage_golden_inputs(dir: &Path) {
    run_ok(
        rcs_bin()
            .arg("simulate")
            .arg("--scene")
            .arg(data_file("golden_scene.json"))
            .arg("--out")
            .arg(dir.join("scan.csv"))
            .arg("--background-out")
            .arg(dir.join("background.csv")),
    );
    run_ok(
        rcs_bin()
            .arg("simulate")
            .arg("--scene")
            .arg(data_file("golden_sphere_scene.json"))
            .arg("--out")
            .arg(dir.join("sphere.csv")),
    );
    std::fs::copy(data_file("golden_config.json"), dir.join("config.json")).unwrap();
}

/// Parse a CSV produced by the CLI into rows of f64 columns, skipping the header.
pub fn parse_numeric_csv(text: &str, columns: usize) -> Vec<Vec<f64>> {
    text.lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let fields: Vec<f64> = l
                .split(',')
                .take(columns)
                .map(|f| f.parse::<f64>().unwrap_or(f64::NAN))
                .collect();
            assert_eq!(fields.len(), columns, "short row: {l}");
            fields
        })
        .collect()
}
