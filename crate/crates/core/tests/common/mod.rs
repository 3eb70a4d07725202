//! CLI cases shared by the golden-file tests and the acceptance run.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;

pub fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// Runs the binary and returns its exit code and stderr.
pub fn unitopo(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_unitopo"))
        .args(args)
        .env("UNITOPO_LOG", "off")
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

pub struct Case {
    pub name: &'static str,
    pub args: Vec<String>,
}

fn case(name: &'static str, subcommand: &str, dataset: &[&str], extra: &[&str]) -> Case {
    let mut args = vec![subcommand.to_string()];
    args.extend(dataset.iter().map(|s| s.to_string()));
    args.extend(extra.iter().map(|s| s.to_string()));
    Case { name, args }
}

/// Every golden case. Outputs go to `-o <dir>/<name>`.
pub fn cases() -> Vec<Case> {
    let f0 = [
        "--grid".to_string(),
        "3x3".into(),
        "--values".into(),
        data("f0.txt"),
    ];
    let oct = [
        "--mesh".to_string(),
        data("octahedron.off"),
        "--values".into(),
        data("octahedron.txt"),
    ];
    let bumps = [
        "--grid".to_string(),
        "4x4x4".into(),
        "--values".into(),
        data("bumps.txt"),
    ];
    let f0: Vec<&str> = f0.iter().map(String::as_str).collect();
    let oct: Vec<&str> = oct.iter().map(String::as_str).collect();
    let bumps: Vec<&str> = bumps.iter().map(String::as_str).collect();
    vec![
        case("f0-info.txt", "info", &f0, &[]),
        case("f0-critical-points.csv", "critical-points", &f0, &[]),
        case("f0-diagram.csv", "persistence-diagram", &f0, &[]),
        case("f0-curve.csv", "persistence-curve", &f0, &[]),
        case("f0-contour", "contour-tree", &f0, &[]),
        case("f0-morse-smale", "morse-smale", &f0, &[]),
        case("f0-simplified.txt", "simplify", &f0, &["--threshold", "3"]),
        case("f0-check.txt", "check", &f0, &[]),
        case("octahedron-info.txt", "info", &oct, &[]),
        case(
            "octahedron-critical-points.csv",
            "critical-points",
            &oct,
            &[],
        ),
        case("octahedron-diagram.csv", "persistence-diagram", &oct, &[]),
        case("octahedron-contour", "contour-tree", &oct, &[]),
        case("octahedron-morse-smale", "morse-smale", &oct, &[]),
        case("octahedron-check.txt", "check", &oct, &[]),
        case("bumps-critical-points.csv", "critical-points", &bumps, &[]),
        case(
            "bumps-diagram.csv",
            "persistence-diagram",
            &bumps,
            &["--saddle-pairs"],
        ),
        case(
            "bumps-curve.csv",
            "persistence-curve",
            &bumps,
            &["--saddle-pairs"],
        ),
        case("bumps-contour", "contour-tree", &bumps, &[]),
        case("bumps-morse-smale", "morse-smale", &bumps, &[]),
        case(
            "bumps-simplified.txt",
            "simplify",
            &bumps,
            &["--threshold", "0.01"],
        ),
    ]
}

/// Runs `case` with `threads` workers into `dir` and returns every file it
/// wrote, by name.
pub fn run_case(case: &Case, dir: &Path, threads: usize) -> BTreeMap<String, Vec<u8>> {
    let sub = dir.join(format!("{}-t{threads}", case.name));
    std::fs::create_dir_all(&sub).unwrap();
    let prefix = sub.join(case.name);
    let mut args: Vec<String> = case.args.clone();
    args.extend(["--threads".to_string(), threads.to_string()]);
    args.extend(["-o".to_string(), prefix.to_string_lossy().into_owned()]);
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    let (code, stderr) = unitopo(&refs);
    assert_eq!(code, 0, "{}: {stderr}", case.name);
    let mut files = BTreeMap::new();
    for entry in std::fs::read_dir(&sub).unwrap() {
        let entry = entry.unwrap();
        files.insert(
            entry.file_name().to_string_lossy().into_owned(),
            std::fs::read(entry.path()).unwrap(),
        );
    }
    files
}
