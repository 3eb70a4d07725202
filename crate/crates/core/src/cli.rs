//! Command line front end. `run` parses arguments, runs one pipeline and
//! returns the process exit code.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::gradient::{
    build_gradient, extract_separatrix_geometry, find_cycle, morse_segmentation, one_separatrices,
    pl_compliant_gradient, ComplianceError, DiscreteGradient,
};
use crate::io::{self, DatasetSpec, Domain, FieldFormat, IoError};
use crate::scalar::{count_by_index, extract_critical_points, FieldError, OrderField};
use crate::simplify::{
    select_by_persistence, simplify_field, SimplificationRequest, SimplifyError,
};
use crate::topology::{component_count, first_betti_number, is_simply_connected};
use crate::trees::{
    build_diagram, build_merge_tree, contour_tree, persistence_curve, ContourNodeType, PairClass,
    PersistenceDiagram, TreeError, TreeKind,
};
use crate::triangulation::{Mesh, SimplexRef, Triangulation, TriangulationError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<TriangulationError> for CliError {
    fn from(e: TriangulationError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<FieldError> for CliError {
    fn from(e: FieldError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<TreeError> for CliError {
    fn from(e: TreeError) -> Self {
        match e {
            TreeError::Triangulation(_) | TreeError::NotSimplyConnected => {
                CliError::Data(e.to_string())
            }
            _ => CliError::Internal(e.to_string()),
        }
    }
}

impl From<ComplianceError> for CliError {
    fn from(e: ComplianceError) -> Self {
        match e {
            ComplianceError::Triangulation(_) => CliError::Data(e.to_string()),
            _ => CliError::Internal(e.to_string()),
        }
    }
}

impl From<SimplifyError> for CliError {
    fn from(e: SimplifyError) -> Self {
        match e {
            SimplifyError::NoConvergence(_) => CliError::Internal(e.to_string()),
            SimplifyError::NotAnExtremum(_) | SimplifyError::MissingExtremum => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Data(e.to_string()),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "unitopo",
    version,
    about = "Topological analysis of PL scalar fields on 2D/3D triangulations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Ascii,
    F32,
    F64,
}

impl From<Format> for FieldFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Ascii => FieldFormat::Ascii,
            Format::F32 => FieldFormat::F32,
            Format::F64 => FieldFormat::F64,
        }
    }
}

#[derive(Debug, Args)]
struct Dataset {
    /// Triangle or tetrahedral mesh in OFF format.
    #[arg(long, conflicts_with = "grid", required_unless_present = "grid")]
    mesh: Option<PathBuf>,
    /// Implicit grid, WxH or WxHxD vertices, x fastest.
    #[arg(long)]
    grid: Option<String>,
    /// Scalar field, one value per vertex.
    #[arg(long, alias = "field")]
    values: PathBuf,
    /// Integer offsets breaking ties, one per line; default vertex ids.
    #[arg(long)]
    offsets: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "ascii")]
    format: Format,
    /// Worker threads; default all cores.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Domain and field summary.
    Info {
        #[command(flatten)]
        data: Dataset,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// PL critical points as CSV.
    CriticalPoints {
        #[command(flatten)]
        data: Dataset,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Persistence pairs as CSV.
    PersistenceDiagram {
        #[command(flatten)]
        data: Dataset,
        /// Add saddle-saddle pairs (3D only).
        #[arg(long)]
        saddle_pairs: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Number of pairs above each persistence threshold as CSV.
    PersistenceCurve {
        #[command(flatten)]
        data: Dataset,
        /// Add saddle-saddle pairs (3D only).
        #[arg(long)]
        saddle_pairs: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Writes PREFIX.nodes.csv, PREFIX.arcs.csv and PREFIX.segmentation.txt.
    ContourTree {
        #[command(flatten)]
        data: Dataset,
        #[arg(short, long, value_name = "PREFIX")]
        output: PathBuf,
    },
    /// Writes PREFIX.critical.csv, PREFIX.separatrices.obj,
    /// PREFIX.descending.txt and PREFIX.ascending.txt.
    MorseSmale {
        #[command(flatten)]
        data: Dataset,
        #[arg(short, long, value_name = "PREFIX")]
        output: PathBuf,
    },
    /// Removes extrema and writes the edited values to PATH and the
    /// offsets to PATH.offsets.
    Simplify {
        #[command(flatten)]
        data: Dataset,
        /// Keep extremum pairs with at least this persistence.
        #[arg(long, conflicts_with = "keep", required_unless_present = "keep")]
        threshold: Option<f64>,
        /// Comma-separated extrema to keep.
        #[arg(long, value_delimiter = ',')]
        keep: Option<Vec<usize>>,
        #[arg(short, long, value_name = "PATH")]
        output: PathBuf,
    },
    /// Runs the invariant checks and reports each one.
    Check {
        #[command(flatten)]
        data: Dataset,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

impl Command {
    fn dataset(&self) -> &Dataset {
        match self {
            Command::Info { data, .. }
            | Command::CriticalPoints { data, .. }
            | Command::PersistenceDiagram { data, .. }
            | Command::PersistenceCurve { data, .. }
            | Command::ContourTree { data, .. }
            | Command::MorseSmale { data, .. }
            | Command::Simplify { data, .. }
            | Command::Check { data, .. } => data,
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code. Diagnostics go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(command: Command) -> Result<i32> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = command.dataset().threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Internal(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(command))
}

fn load(data: &Dataset) -> Result<(Mesh, OrderField)> {
    let domain = match (&data.mesh, &data.grid) {
        (Some(path), None) => Domain::Off(path.clone()),
        (None, Some(dims)) => Domain::Grid(io::parse_grid_dims(dims)?),
        _ => {
            return Err(CliError::Usage(
                "give exactly one of --mesh and --grid".into(),
            ))
        }
    };
    let spec = DatasetSpec {
        domain,
        field: data.values.clone(),
        format: data.format.into(),
        offsets: data.offsets.clone(),
    };
    let (mesh, field) = io::load(&spec)?;
    log::info!(
        "loaded {}D domain with {} vertices",
        mesh.dimension(),
        mesh.vertex_count()
    );
    Ok((mesh, field))
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(path) => write_file(path, text),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Data(format!("stdout: {e}"))),
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Info { data, output } => {
            let (mesh, field) = load(&data)?;
            emit(output.as_deref(), &info(&mesh, &field)?)?;
        }
        Command::CriticalPoints { data, output } => {
            let (mesh, field) = load(&data)?;
            emit(output.as_deref(), &critical_points_csv(&mesh, &field)?)?;
        }
        Command::PersistenceDiagram {
            data,
            saddle_pairs,
            output,
        } => {
            let (mesh, field) = load(&data)?;
            let d = diagram(&mesh, &field, saddle_pairs)?;
            emit(output.as_deref(), &diagram_csv(&d))?;
        }
        Command::PersistenceCurve {
            data,
            saddle_pairs,
            output,
        } => {
            let (mesh, field) = load(&data)?;
            let d = diagram(&mesh, &field, saddle_pairs)?;
            let mut out = String::from("threshold,count\n");
            for (th, n) in persistence_curve(&d) {
                writeln!(out, "{th},{n}").expect("string write");
            }
            emit(output.as_deref(), &out)?;
        }
        Command::ContourTree { data, output } => {
            let (mesh, field) = load(&data)?;
            contour_tree_files(&mesh, &field, &output)?;
        }
        Command::MorseSmale { data, output } => {
            let (mesh, field) = load(&data)?;
            morse_smale_files(&mesh, &field, &output)?;
        }
        Command::Simplify {
            data,
            threshold,
            keep,
            output,
        } => {
            let (mesh, field) = load(&data)?;
            let req = match (threshold, keep) {
                (Some(tau), None) => {
                    let d = diagram(&mesh, &field, mesh.dimension() == 3)?;
                    select_by_persistence(&d, tau)?
                }
                (None, Some(list)) => SimplificationRequest::new(list),
                _ => {
                    return Err(CliError::Usage(
                        "give exactly one of --threshold and --keep".into(),
                    ))
                }
            };
            let simplified = simplify_field(&mesh, &field, &req)?;
            log::info!("kept {} extrema", req.preserved.len());
            io::write_field(&output, simplified.values(), data.format.into())?;
            io::write_offsets(&with_suffix(&output, ".offsets"), simplified.offsets())?;
        }
        Command::Check { data, output } => {
            let (mesh, field) = load(&data)?;
            let results = check(&mesh, &field)?;
            let mut out = String::new();
            for (name, outcome) in &results {
                match outcome {
                    Ok(()) => writeln!(out, "PASS {name}"),
                    Err(why) => writeln!(out, "FAIL {name}: {why}"),
                }
                .expect("string write");
            }
            emit(output.as_deref(), &out)?;
            if results.iter().any(|(_, r)| r.is_err()) {
                return Ok(EXIT_INTERNAL);
            }
        }
    }
    Ok(EXIT_OK)
}

fn info(mesh: &Mesh, field: &OrderField) -> Result<String> {
    let d = mesh.dimension();
    let mut out = String::new();
    let kind = match mesh {
        Mesh::Explicit(_) => "explicit",
        Mesh::Implicit(_) => "implicit",
    };
    let line =
        |out: &mut String, k: &str, v: String| writeln!(out, "{k}: {v}").expect("string write");
    line(&mut out, "triangulation", kind.to_string());
    line(&mut out, "dimension", d.to_string());
    for dim in 0..=d {
        line(
            &mut out,
            &format!("simplices[{dim}]"),
            mesh.simplex_count(dim)?.to_string(),
        );
    }
    line(
        &mut out,
        "euler characteristic",
        mesh.euler_characteristic()?.to_string(),
    );
    line(&mut out, "closed", mesh.is_closed()?.to_string());
    line(&mut out, "components", component_count(mesh)?.to_string());
    line(
        &mut out,
        "first betti number",
        first_betti_number(mesh)?.to_string(),
    );
    let sorted = field.sorted_vertices();
    if let (Some(&lo), Some(&hi)) = (sorted.first(), sorted.last()) {
        line(
            &mut out,
            "minimum",
            format!("{} at vertex {lo}", field.value(lo)),
        );
        line(
            &mut out,
            "maximum",
            format!("{} at vertex {hi}", field.value(hi)),
        );
    }
    let counts = count_by_index(&extract_critical_points(mesh, field)?, d);
    let counts: Vec<String> = counts.iter().map(usize::to_string).collect();
    line(&mut out, "critical points by index", counts.join(","));
    Ok(out)
}

fn critical_points_csv(mesh: &Mesh, field: &OrderField) -> Result<String> {
    let mut out = String::from("vertexId,x,y,z,index,multiplicity,value,isBoundary\n");
    for p in extract_critical_points(mesh, field)? {
        let [x, y, z] = mesh.vertex_position(p.vertex);
        writeln!(
            out,
            "{},{x},{y},{z},{},{},{},{}",
            p.vertex,
            p.index,
            p.multiplicity,
            p.value,
            u8::from(p.boundary)
        )
        .expect("string write");
    }
    Ok(out)
}

fn diagram(mesh: &Mesh, field: &OrderField, saddle_pairs: bool) -> Result<PersistenceDiagram> {
    if saddle_pairs && mesh.dimension() != 3 {
        return Err(CliError::Usage(
            "saddle-saddle pairs need a 3D domain".into(),
        ));
    }
    let gradient = if saddle_pairs {
        Some(build_gradient(mesh, field)?)
    } else {
        None
    };
    let d = build_diagram(mesh, field, gradient.as_ref())?;
    if !d.unpaired_two_saddles.is_empty() {
        log::warn!("{} 2-saddles left unpaired", d.unpaired_two_saddles.len());
    }
    Ok(d)
}

fn diagram_csv(d: &PersistenceDiagram) -> String {
    let mut out =
        String::from("birthVertex,deathVertex,birthValue,deathValue,persistence,pairClass\n");
    for p in &d.pairs {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            p.birth_vertex,
            p.death_vertex,
            p.birth_value,
            p.death_value,
            p.persistence(),
            p.class.label(d.dimension)
        )
        .expect("string write");
    }
    out
}

fn contour_tree_files(mesh: &Mesh, field: &OrderField, prefix: &Path) -> Result<()> {
    let ct = contour_tree(mesh, field)?;
    let mut nodes = String::from("nodeId,vertexId,type,value\n");
    for (i, n) in ct.nodes.iter().enumerate() {
        let kind = match n.node_type {
            ContourNodeType::Minimum => "minimum",
            ContourNodeType::Maximum => "maximum",
            ContourNodeType::Saddle => "saddle",
        };
        writeln!(nodes, "{i},{},{kind},{}", n.vertex, field.value(n.vertex)).expect("string write");
    }
    let mut arcs = String::from("arcId,lowerNode,upperNode,lowerVertex,upperVertex\n");
    for (i, &(a, b)) in ct.arcs.iter().enumerate() {
        writeln!(
            arcs,
            "{i},{a},{b},{},{}",
            ct.nodes[a].vertex, ct.nodes[b].vertex
        )
        .expect("string write");
    }
    let seg: String = ct.vertex_arc.iter().map(|a| format!("{a}\n")).collect();
    write_file(&with_suffix(prefix, ".nodes.csv"), &nodes)?;
    write_file(&with_suffix(prefix, ".arcs.csv"), &arcs)?;
    write_file(&with_suffix(prefix, ".segmentation.txt"), &seg)
}

fn labels_text(labels: &[Option<usize>]) -> String {
    labels
        .iter()
        .map(|l| match l {
            Some(v) => format!("{v}\n"),
            None => "-1\n".to_string(),
        })
        .collect()
}

fn morse_smale_files(mesh: &Mesh, field: &OrderField, prefix: &Path) -> Result<()> {
    let pl = pl_compliant_gradient(mesh, field)?;
    let g = &pl.gradient;
    let mut critical = String::from("dimension,simplexId,vertexId,value,x,y,z\n");
    for (dim, ids) in g.critical_simplices().into_iter().enumerate() {
        for id in ids {
            let s = SimplexRef::new(dim, id);
            let v = field.max_vertex(&mesh.simplex_vertices(s)?);
            let [x, y, z] = mesh.barycenter(s)?;
            writeln!(critical, "{dim},{id},{v},{},{x},{y},{z}", field.value(v))
                .expect("string write");
        }
    }
    let paths = one_separatrices(mesh, g)?;
    let lines = extract_separatrix_geometry(mesh, &paths)?;
    let mut obj = String::new();
    let mut next = 1usize;
    for l in &lines {
        writeln!(
            obj,
            "g {} {}:{} {}:{}",
            l.kind.name(),
            l.start.dim,
            l.start.id,
            l.end.dim,
            l.end.id
        )
        .expect("string write");
        for [x, y, z] in &l.points {
            writeln!(obj, "v {x} {y} {z}").expect("string write");
        }
        let ids: Vec<String> = (next..next + l.points.len())
            .map(|i| i.to_string())
            .collect();
        writeln!(obj, "l {}", ids.join(" ")).expect("string write");
        next += l.points.len();
    }
    let seg = morse_segmentation(mesh, g)?;
    write_file(&with_suffix(prefix, ".critical.csv"), &critical)?;
    write_file(&with_suffix(prefix, ".separatrices.obj"), &obj)?;
    write_file(
        &with_suffix(prefix, ".descending.txt"),
        &labels_text(&seg.vertex_labels),
    )?;
    write_file(
        &with_suffix(prefix, ".ascending.txt"),
        &labels_text(&seg.cell_labels),
    )
}

type Outcome = std::result::Result<(), String>;

fn expect_eq<T: PartialEq + std::fmt::Debug>(got: T, want: T) -> Outcome {
    if got == want {
        Ok(())
    } else {
        Err(format!("got {got:?}, expected {want:?}"))
    }
}

/// Cross-module invariants on one dataset, in a fixed order.
pub fn check(mesh: &Mesh, field: &OrderField) -> Result<Vec<(&'static str, Outcome)>> {
    let d = mesh.dimension();
    let closed = mesh.is_closed()?;
    let chi = mesh.euler_characteristic()?;
    let pl = extract_critical_points(mesh, field)?;
    let mut results = Vec::new();

    let alternating: i64 = count_by_index(&pl, d)
        .iter()
        .enumerate()
        .map(|(i, &n)| if i % 2 == 0 { n as i64 } else { -(n as i64) })
        .sum();
    if closed {
        results.push(("pl euler relation", expect_eq(alternating, chi)));
    }

    let initial = build_gradient(mesh, field)?;
    results.push((
        "initial gradient euler relation",
        expect_eq(initial.morse_sum(), chi),
    ));
    results.push(("initial gradient acyclic", acyclic(mesh, &initial)?));

    match pl_compliant_gradient(mesh, field) {
        Ok(c) => {
            results.push((
                "compliant gradient euler relation",
                expect_eq(c.gradient.morse_sum(), chi),
            ));
            results.push(("compliant gradient acyclic", acyclic(mesh, &c.gradient)?));
            if closed {
                let counts = expect_eq(c.gradient.critical_counts(), count_by_index(&pl, d));
                results.push(("compliant critical counts", counts));
            }
        }
        Err(ComplianceError::Triangulation(e)) => return Err(e.into()),
        Err(e) => results.push(("pl compliance", Err(e.to_string()))),
    }

    let join = build_merge_tree(mesh, field, TreeKind::Join)?;
    let split = build_merge_tree(mesh, field, TreeKind::Split)?;
    let minima: BTreeSet<usize> = pl
        .iter()
        .filter(|p| p.index == 0)
        .map(|p| p.vertex)
        .collect();
    let maxima: BTreeSet<usize> = pl
        .iter()
        .filter(|p| p.index == d)
        .map(|p| p.vertex)
        .collect();
    results.push((
        "join tree leaves are minima",
        expect_eq(join.leaves().collect(), minima.clone()),
    ));
    results.push((
        "split tree leaves are maxima",
        expect_eq(split.leaves().collect(), maxima.clone()),
    ));

    let diagram = build_diagram(mesh, field, (d == 3).then_some(&initial))?;
    let components = component_count(mesh)?;
    let paired = |class| diagram.of_class(class).count();
    results.push((
        "every minimum but one per component is paired",
        expect_eq(
            paired(PairClass::MinSaddle),
            minima.len().saturating_sub(components),
        ),
    ));
    results.push((
        "every maximum but one per component is paired",
        expect_eq(
            paired(PairClass::SaddleMax),
            maxima.len().saturating_sub(components),
        ),
    ));
    let bad = diagram
        .pairs
        .iter()
        .filter(|p| field.rank(p.death_vertex) <= field.rank(p.birth_vertex))
        .count();
    results.push(("pairs die after birth", expect_eq(bad, 0)));

    if is_simply_connected(mesh)? {
        let ct = contour_tree(mesh, field)?;
        results.push((
            "contour tree is a tree",
            expect_eq(ct.arcs.len() + 1, ct.nodes.len()),
        ));
    }
    Ok(results)
}

fn acyclic(mesh: &Mesh, g: &DiscreteGradient) -> Result<Outcome> {
    Ok(match find_cycle(mesh, g)? {
        None => Ok(()),
        Some((dim, cycle)) => Err(format!(
            "closed V-path in layer {dim} through {} simplices",
            cycle.len()
        )),
    })
}
