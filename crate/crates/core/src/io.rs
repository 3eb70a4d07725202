//! Mesh, field and offset files.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::scalar::{FieldError, OrderField};
use crate::triangulation::{
    ExplicitTriangulation, ImplicitGrid, Mesh, Triangulation, TriangulationError,
};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}:{line}: {message}", .path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{}: {source}", .path.display())]
    Mesh {
        path: PathBuf,
        #[source]
        source: TriangulationError,
    },
    #[error(transparent)]
    Triangulation(#[from] TriangulationError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("{what} has {found} entries but the domain has {expected} vertices")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("invalid grid dimensions {0:?} (expected WxH or WxHxD)")]
    GridSpec(String),
}

type Result<T> = std::result::Result<T, IoError>;

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::File::create(path)
        .and_then(|mut f| f.write_all(bytes))
        .map_err(|source| IoError::Io {
            path: path.to_path_buf(),
            source,
        })
}

/// Non-empty lines with comments stripped, with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

/// Reads an ASCII OFF file. Faces with three indices are triangles; faces
/// with four indices are read as tetrahedra, so volumes can use the same
/// format. Mixed arities are rejected.
pub fn read_off(path: &Path) -> Result<ExplicitTriangulation> {
    let text = read_text(path)?;
    let parse_err = |line: usize, message: String| IoError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = content_lines(&text);
    let (first_line, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty file".into()))?;
    let mut header_tokens = header.split_whitespace();
    if header_tokens.next() != Some("OFF") {
        return Err(parse_err(first_line, "missing OFF header".into()));
    }
    let mut rest: Vec<&str> = header_tokens.collect();
    let mut counts_line = first_line;
    if rest.is_empty() {
        let (n, l) = lines
            .next()
            .ok_or_else(|| parse_err(first_line, "missing counts".into()))?;
        counts_line = n;
        rest = l.split_whitespace().collect();
    }
    let counts: Vec<usize> = rest
        .iter()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| parse_err(counts_line, format!("bad counts: {e}")))?;
    if counts.len() < 2 {
        return Err(parse_err(
            counts_line,
            "expected vertex and face counts".into(),
        ));
    }
    let (nv, nf) = (counts[0], counts[1]);
    let mut points = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (n, l) = lines
            .next()
            .ok_or_else(|| parse_err(counts_line, format!("expected {nv} vertices")))?;
        let coords: Vec<f64> = l
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| parse_err(n, format!("bad coordinate: {e}")))?;
        if coords.len() < 3 {
            return Err(parse_err(
                n,
                format!("expected 3 coordinates, found {}", coords.len()),
            ));
        }
        points.push([coords[0], coords[1], coords[2]]);
    }
    let mut cells: Vec<Vec<usize>> = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (n, l) = lines
            .next()
            .ok_or_else(|| parse_err(counts_line, format!("expected {nf} faces")))?;
        let idx: Vec<usize> = l
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| parse_err(n, format!("bad index: {e}")))?;
        let Some((&k, rest)) = idx.split_first() else {
            return Err(parse_err(n, "empty face".into()));
        };
        if rest.len() < k {
            return Err(parse_err(
                n,
                format!("face declares {k} indices, found {}", rest.len()),
            ));
        }
        if k != 3 && k != 4 {
            return Err(parse_err(
                n,
                format!("faces with {k} vertices are not supported"),
            ));
        }
        cells.push(rest[..k].to_vec());
    }
    ExplicitTriangulation::new(points, cells).map_err(|source| IoError::Mesh {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes the cells of `t` as OFF faces (tetrahedra as 4-index faces).
pub fn write_off(path: &Path, t: &ExplicitTriangulation) -> Result<()> {
    let mut out = String::new();
    out.push_str("OFF\n");
    out.push_str(&format!("{} {} 0\n", t.vertex_count(), t.cell_count()));
    for p in t.points() {
        out.push_str(&format!("{} {} {}\n", p[0], p[1], p[2]));
    }
    for c in 0..t.cell_count() {
        let cell = t.cell(c);
        out.push_str(&cell.len().to_string());
        for v in cell {
            out.push_str(&format!(" {v}"));
        }
        out.push('\n');
    }
    write_bytes(path, out.as_bytes())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FieldFormat {
    /// One real per line.
    #[default]
    Ascii,
    /// Raw little-endian `f32`.
    F32,
    /// Raw little-endian `f64`.
    F64,
}

pub fn read_field(path: &Path, format: FieldFormat) -> Result<Vec<f64>> {
    let raw_err = |message: String| IoError::Parse {
        path: path.to_path_buf(),
        line: 0,
        message,
    };
    match format {
        FieldFormat::Ascii => {
            let text = read_text(path)?;
            content_lines(&text)
                .map(|(n, l)| {
                    l.parse::<f64>().map_err(|e| IoError::Parse {
                        path: path.to_path_buf(),
                        line: n,
                        message: format!("bad value {l:?}: {e}"),
                    })
                })
                .collect()
        }
        FieldFormat::F32 | FieldFormat::F64 => {
            let bytes = fs::read(path).map_err(|source| IoError::Io {
                path: path.to_path_buf(),
                source,
            })?;
            let width = if format == FieldFormat::F32 { 4 } else { 8 };
            if bytes.len() % width != 0 {
                return Err(raw_err(format!(
                    "{} bytes is not a multiple of {width}",
                    bytes.len()
                )));
            }
            Ok(bytes
                .chunks_exact(width)
                .map(|c| match width {
                    4 => f64::from(f32::from_le_bytes(c.try_into().expect("4 bytes"))),
                    _ => f64::from_le_bytes(c.try_into().expect("8 bytes")),
                })
                .collect())
        }
    }
}

/// Writes values so that reading them back gives the same bits.
pub fn write_field(path: &Path, values: &[f64], format: FieldFormat) -> Result<()> {
    let bytes = match format {
        FieldFormat::Ascii => {
            let mut s = String::with_capacity(values.len() * 8);
            for v in values {
                s.push_str(&format!("{v:?}\n"));
            }
            s.into_bytes()
        }
        FieldFormat::F32 => values
            .iter()
            .flat_map(|&v| (v as f32).to_le_bytes())
            .collect(),
        FieldFormat::F64 => values.iter().flat_map(|v| v.to_le_bytes()).collect(),
    };
    write_bytes(path, &bytes)
}

/// One integer per line.
pub fn read_offsets(path: &Path) -> Result<Vec<i64>> {
    let text = read_text(path)?;
    content_lines(&text)
        .map(|(n, l)| {
            l.parse::<i64>().map_err(|e| IoError::Parse {
                path: path.to_path_buf(),
                line: n,
                message: format!("bad offset {l:?}: {e}"),
            })
        })
        .collect()
}

pub fn write_offsets(path: &Path, offsets: &[i64]) -> Result<()> {
    let mut s = String::with_capacity(offsets.len() * 6);
    for o in offsets {
        s.push_str(&format!("{o}\n"));
    }
    write_bytes(path, s.as_bytes())
}

/// `WxH` or `WxHxD`, x fastest.
pub fn parse_grid_dims(spec: &str) -> Result<Vec<usize>> {
    let dims: Vec<usize> = spec
        .split(['x', 'X'])
        .map(|s| s.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| IoError::GridSpec(spec.to_string()))?;
    if !(2..=3).contains(&dims.len()) {
        return Err(IoError::GridSpec(spec.to_string()));
    }
    Ok(dims)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Domain {
    Off(PathBuf),
    Grid(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetSpec {
    pub domain: Domain,
    pub field: PathBuf,
    pub format: FieldFormat,
    pub offsets: Option<PathBuf>,
}

/// Loads the domain and the order field; offsets default to vertex ids.
/// Explicit meshes come back fully preconditioned.
pub fn load(spec: &DatasetSpec) -> Result<(Mesh, OrderField)> {
    let mesh = match &spec.domain {
        Domain::Off(path) => {
            let mut t = read_off(path)?;
            t.precondition_all();
            Mesh::Explicit(t)
        }
        Domain::Grid(dims) => Mesh::Implicit(ImplicitGrid::new(dims)?),
    };
    let values = read_field(&spec.field, spec.format)?;
    let n = mesh.vertex_count();
    if values.len() != n {
        return Err(IoError::LengthMismatch {
            what: "field",
            expected: n,
            found: values.len(),
        });
    }
    let field = match &spec.offsets {
        Some(path) => {
            let offsets = read_offsets(path)?;
            if offsets.len() != n {
                return Err(IoError::LengthMismatch {
                    what: "offsets",
                    expected: n,
                    found: offsets.len(),
                });
            }
            OrderField::new(values, offsets)?
        }
        None => OrderField::from_values(values)?,
    };
    Ok((mesh, field))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::octahedron;

    #[test]
    fn off_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("o.off");
        let t = octahedron();
        write_off(&path, &t).unwrap();
        let back = read_off(&path).unwrap();
        assert_eq!(back.points(), t.points());
        assert_eq!(back.cell_count(), 8);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.off");
        fs::write(
            &path,
            "OFF\n# comment\n3 1 0\n0 0 0\n1 0 0\n1 x 0\n3 0 1 2\n",
        )
        .unwrap();
        match read_off(&path) {
            Err(IoError::Parse { line, .. }) => assert_eq!(line, 6),
            other => panic!("unexpected {other:?}"),
        }
        fs::write(&path, "OFF 3 1 0\n0 0 0\n1 0 0\n0 1 0\n5 0 1 2 3 4\n").unwrap();
        assert!(matches!(
            read_off(&path),
            Err(IoError::Parse { line: 5, .. })
        ));
    }

    #[test]
    fn field_formats_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let values = vec![0.1, -2.5, 1e-300, 3.0];
        for format in [FieldFormat::Ascii, FieldFormat::F64] {
            let path = dir.path().join("f");
            write_field(&path, &values, format).unwrap();
            assert_eq!(read_field(&path, format).unwrap(), values);
        }
        let path = dir.path().join("f32");
        write_field(&path, &[0.5, 2.0], FieldFormat::F32).unwrap();
        assert_eq!(read_field(&path, FieldFormat::F32).unwrap(), vec![0.5, 2.0]);
    }

    #[test]
    fn grid_specs() {
        assert_eq!(parse_grid_dims("3x3").unwrap(), vec![3, 3]);
        assert_eq!(parse_grid_dims("4x5x6").unwrap(), vec![4, 5, 6]);
        assert!(parse_grid_dims("3").is_err());
        assert!(parse_grid_dims("3xa").is_err());
    }

    #[test]
    fn short_field_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.txt");
        write_field(&path, &[0.0; 8], FieldFormat::Ascii).unwrap();
        let spec = DatasetSpec {
            domain: Domain::Grid(vec![3, 3]),
            field: path,
            format: FieldFormat::Ascii,
            offsets: None,
        };
        assert!(matches!(
            load(&spec),
            Err(IoError::LengthMismatch {
                expected: 9,
                found: 8,
                ..
            })
        ));
    }
}
