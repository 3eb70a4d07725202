mod common;

use std::collections::BTreeSet;

use common::{cases, data, golden_dir, run_case, unitopo};
use unitopo::io::{load, DatasetSpec, Domain, FieldFormat};
use unitopo::scalar::extract_critical_points;
use unitopo::simplify::{select_by_persistence, simplify_field};
use unitopo::trees::build_diagram;

/// Set UNITOPO_BLESS=1 to rewrite the golden files.
#[test]
fn outputs_match_golden_files() {
    let dir = tempfile::tempdir().unwrap();
    let bless = std::env::var_os("UNITOPO_BLESS").is_some();
    for case in cases() {
        for (name, bytes) in run_case(&case, dir.path(), 1) {
            let path = golden_dir().join(&name);
            if bless {
                std::fs::write(&path, &bytes).unwrap();
                continue;
            }
            let want = std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            assert!(want == bytes, "{name} differs from {}", path.display());
        }
    }
}

#[test]
fn outputs_do_not_depend_on_runs_or_threads() {
    let dir = tempfile::tempdir().unwrap();
    for case in cases() {
        let first = run_case(&case, &dir.path().join("a"), 1);
        let again = run_case(&case, &dir.path().join("b"), 1);
        let parallel = run_case(&case, dir.path(), 4);
        assert_eq!(first, again, "{}", case.name);
        assert_eq!(first, parallel, "{}", case.name);
    }
}

#[test]
fn f0_diagram_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d.csv");
    let out = out.to_str().unwrap();
    let f0 = data("f0.txt");
    let (code, _) = unitopo(&[
        "persistence-diagram",
        "--grid",
        "3x3",
        "--values",
        &f0,
        "-o",
        out,
    ]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(out).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(
        rows[0],
        "birthVertex,deathVertex,birthValue,deathValue,persistence,pairClass"
    );
    assert_eq!(&rows[1..], ["2,1,2,4,2,0-1", "0,8,0,10,10,essential"]);
}

fn critical_counts(csv: &str) -> [usize; 3] {
    let mut counts = [0; 3];
    for row in csv.lines().skip(1) {
        let index: usize = row.split(',').nth(4).unwrap().parse().unwrap();
        counts[index] += 1;
    }
    counts
}

#[test]
fn simplify_then_critical_points() {
    let dir = tempfile::tempdir().unwrap();
    let simplified = dir.path().join("f.txt");
    let simplified = simplified.to_str().unwrap();
    let offsets = format!("{simplified}.offsets");
    let cp = dir.path().join("cp.csv");
    let cp = cp.to_str().unwrap();
    let f0 = data("f0.txt");
    let grid = ["--grid", "3x3"];
    let (code, _) = unitopo(
        &[
            &["simplify"],
            &grid[..],
            &["--values", &f0, "--threshold", "3", "-o", simplified],
        ]
        .concat(),
    );
    assert_eq!(code, 0);
    let (code, _) = unitopo(
        &[
            &["critical-points"],
            &grid[..],
            &["--values", simplified, "--offsets", &offsets, "-o", cp],
        ]
        .concat(),
    );
    assert_eq!(code, 0);
    assert_eq!(
        critical_counts(&std::fs::read_to_string(cp).unwrap()),
        [1, 0, 1]
    );
}

#[test]
fn reloaded_simplification_classifies_like_the_in_process_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.txt");
    let bumps = data("bumps.txt");
    let (code, err) = unitopo(&[
        "simplify",
        "--grid",
        "4x4x4",
        "--values",
        &bumps,
        "--threshold",
        "0.01",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let spec = DatasetSpec {
        domain: Domain::Grid(vec![4, 4, 4]),
        field: bumps.into(),
        format: FieldFormat::Ascii,
        offsets: None,
    };
    let (mesh, field) = load(&spec).unwrap();
    let g = unitopo::gradient::build_gradient(&mesh, &field).unwrap();
    let req =
        select_by_persistence(&build_diagram(&mesh, &field, Some(&g)).unwrap(), 0.01).unwrap();
    let in_process = simplify_field(&mesh, &field, &req).unwrap();
    let reloaded = load(&DatasetSpec {
        field: out.clone(),
        offsets: Some(format!("{}.offsets", out.display()).into()),
        ..spec
    })
    .unwrap()
    .1;
    assert_eq!(reloaded, in_process);
    let classes = |f| -> BTreeSet<(usize, usize)> {
        extract_critical_points(&mesh, f)
            .unwrap()
            .iter()
            .map(|p| (p.vertex, p.index))
            .collect()
    };
    assert_eq!(classes(&reloaded), classes(&in_process));
}

#[test]
fn error_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let short = dir.path().join("short.txt");
    std::fs::write(&short, "0\n1\n2\n3\n4\n5\n6\n7\n").unwrap();
    let short = short.to_str().unwrap();
    let (code, err) = unitopo(&["info", "--grid", "3x3", "--values", short]);
    assert_eq!(code, 2);
    assert!(
        err.contains("8 entries") && err.contains("9 vertices"),
        "{err}"
    );

    let f0 = data("f0.txt");
    let (code, _) = unitopo(&[
        "persistence-diagram",
        "--grid",
        "3x3",
        "--values",
        &f0,
        "--saddle-pairs",
    ]);
    assert_eq!(code, 1);
    let (code, _) = unitopo(&["info", "--grid", "3x3", "--values", &f0, "--bogus"]);
    assert_eq!(code, 1);
    let (code, _) = unitopo(&["info", "--mesh", "x.off", "--grid", "3x3", "--values", &f0]);
    assert_eq!(code, 1);
    let (code, _) = unitopo(&["--help"]);
    assert_eq!(code, 0);
    let missing = dir.path().join("missing.txt");
    let (code, _) = unitopo(&[
        "info",
        "--grid",
        "3x3",
        "--values",
        missing.to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
}

#[test]
fn check_passes_on_the_octahedron() {
    let (code, err) = unitopo(&[
        "check",
        "--mesh",
        &data("octahedron.off"),
        "--values",
        &data("octahedron.txt"),
    ]);
    assert_eq!(code, 0, "{err}");
}
