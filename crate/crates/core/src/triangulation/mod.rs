//! Face / co-face / boundary queries over 2D and 3D triangulations.
//!
//! Two implementations share the [`Triangulation`] interface:
//!
//! * [`ExplicitTriangulation`] stores points and maximal cells and builds
//!   lookup tables on demand through [`Triangulation::precondition`]. Querying
//!   a relation whose table has not been built is an error, so the memory
//!   footprint always matches the queries a caller declared up front.
//! * [`ImplicitGrid`] emulates the same tables for a regular grid
//!   (Freudenthal / Kuhn subdivision) from analytic identifier maps and never
//!   allocates.
//!
//! All list-returning queries produce ascending identifiers.

mod explicit;
mod implicit;

pub use explicit::{ExplicitTriangulation, ManifoldViolation, Table};
pub use implicit::{EdgeClass, ImplicitGrid};

use arrayvec::ArrayVec;
use thiserror::Error;

/// Vertex ids of one simplex, ascending.
pub type SimplexVertices = ArrayVec<usize, 4>;

/// A simplex identified by its dimension and its index within that dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SimplexRef {
    pub dim: usize,
    pub id: usize,
}

impl SimplexRef {
    pub const fn new(dim: usize, id: usize) -> Self {
        Self { dim, id }
    }

    pub const fn vertex(id: usize) -> Self {
        Self { dim: 0, id }
    }
}

impl std::fmt::Display for SimplexRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}-simplex #{}", self.dim, self.id)
    }
}

/// Query kinds that must be declared before use on an explicit triangulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Precondition {
    VertexNeighbors,
    VertexEdges,
    VertexTriangles,
    /// d-dimensional co-faces of each vertex.
    VertexStars,
    /// (d-1)-simplices of each vertex link.
    VertexLinks,
    EdgeList,
    TriangleList,
    /// l-dimensional co-faces of each edge.
    EdgeCofaces(usize),
    TriangleCofaces,
    /// k-dimensional faces of each `dim`-simplex.
    SimplexFaces {
        dim: usize,
        k: usize,
    },
    /// Boundary flags of the simplices of the given dimension.
    Boundary(usize),
}

impl Precondition {
    /// Precondition that makes `simplex_vertices` answerable for `dim`.
    pub fn skeleton(dim: usize) -> Option<Self> {
        match dim {
            1 => Some(Self::EdgeList),
            2 => Some(Self::TriangleList),
            _ => None,
        }
    }

    /// Precondition needed by `cofaces(s, l)` with `s.dim == dim` in a
    /// triangulation of dimension `d`.
    pub fn cofaces(dim: usize, l: usize, d: usize) -> Self {
        match (dim, l) {
            (0, 1) => Self::VertexEdges,
            (0, l) if l == d => Self::VertexStars,
            (0, _) => Self::VertexTriangles,
            (1, l) => Self::EdgeCofaces(l),
            _ => Self::TriangleCofaces,
        }
    }

    /// Every query kind needed by the full-skeleton algorithms (gradient,
    /// separatrices, critical points, merge trees) on a `d`-dimensional mesh.
    pub fn all(d: usize) -> Vec<Self> {
        let mut kinds = vec![
            Self::VertexNeighbors,
            Self::VertexEdges,
            Self::VertexStars,
            Self::VertexLinks,
        ];
        kinds.push(Self::EdgeList);
        if d >= 2 {
            kinds.push(Self::TriangleList);
            kinds.push(Self::EdgeCofaces(2));
        }
        if d == 3 {
            kinds.push(Self::VertexTriangles);
            kinds.push(Self::EdgeCofaces(3));
            kinds.push(Self::TriangleCofaces);
        }
        for dim in 2..=d {
            for k in 1..dim {
                kinds.push(Self::SimplexFaces { dim, k });
            }
        }
        for dim in 0..=d {
            kinds.push(Self::Boundary(dim));
        }
        kinds
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TriangulationError {
    #[error("query requires precondition {0:?} to be performed first")]
    NotPreconditioned(Precondition),
    #[error("dimension {dim} out of range for a {max}-dimensional triangulation")]
    DimensionOutOfRange { dim: usize, max: usize },
    #[error("{0} does not exist")]
    SimplexOutOfRange(SimplexRef),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("empty cell list")]
    EmptyCells,
    #[error("cell {cell} has {found} vertices, expected {expected}")]
    MixedArity {
        cell: usize,
        found: usize,
        expected: usize,
    },
    #[error("cells with {0} vertices are not supported (expected 3 or 4)")]
    UnsupportedArity(usize),
    #[error("cell {cell} references vertex {vertex} but only {count} points exist")]
    VertexOutOfRange {
        cell: usize,
        vertex: usize,
        count: usize,
    },
    #[error("cell {0} repeats a vertex")]
    DegenerateCell(usize),
    #[error("cell {cell} duplicates cell {first}")]
    DuplicateCell { cell: usize, first: usize },
    #[error("grid dimensions {0:?} invalid: need 2 or 3 axes with at least 2 vertices each")]
    InvalidGridDims(Vec<usize>),
}

pub type Result<T> = std::result::Result<T, TriangulationError>;

/// Common query interface of explicit and implicit triangulations.
///
/// Results are only defined once the matching [`Precondition`] has been
/// performed (explicit mode); implicit grids answer everything directly.
pub trait Triangulation: Sync {
    /// 2 for surfaces, 3 for volumes.
    fn dimension(&self) -> usize;

    fn vertex_count(&self) -> usize;

    fn vertex_position(&self, v: usize) -> [f64; 3];

    fn simplex_count(&self, dim: usize) -> Result<usize>;

    /// Ascending vertex ids of `s`.
    fn simplex_vertices(&self, s: SimplexRef) -> Result<SimplexVertices>;

    /// Appends the ids of the `k`-faces of `s` (ascending) to `out`.
    fn faces_into(&self, s: SimplexRef, k: usize, out: &mut Vec<usize>) -> Result<()>;

    /// Appends the ids of the `l`-co-faces of `s` (ascending) to `out`.
    fn cofaces_into(&self, s: SimplexRef, l: usize, out: &mut Vec<usize>) -> Result<()>;

    fn is_boundary(&self, s: SimplexRef) -> Result<bool>;

    /// Appends the vertices sharing an edge with `v` (ascending) to `out`.
    fn vertex_neighbors_into(&self, v: usize, out: &mut Vec<usize>) -> Result<()>;

    /// Appends the (d-1)-simplices of the link of `v` (ascending) to `out`.
    fn vertex_link_into(&self, v: usize, out: &mut Vec<usize>) -> Result<()>;

    /// Builds the lookup tables required by `kind`. Idempotent; a no-op on
    /// implicit grids.
    fn precondition(&mut self, kind: Precondition);

    fn is_preconditioned(&self, kind: Precondition) -> bool;

    fn precondition_all(&mut self) {
        for kind in Precondition::all(self.dimension()) {
            self.precondition(kind);
        }
    }

    fn faces(&self, s: SimplexRef, k: usize) -> Result<Vec<SimplexRef>> {
        let mut ids = Vec::new();
        self.faces_into(s, k, &mut ids)?;
        Ok(ids.into_iter().map(|id| SimplexRef::new(k, id)).collect())
    }

    fn cofaces(&self, s: SimplexRef, l: usize) -> Result<Vec<SimplexRef>> {
        let mut ids = Vec::new();
        self.cofaces_into(s, l, &mut ids)?;
        Ok(ids.into_iter().map(|id| SimplexRef::new(l, id)).collect())
    }

    fn vertex_neighbors(&self, v: usize) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        self.vertex_neighbors_into(v, &mut out)?;
        Ok(out)
    }

    /// Barycenter of `s`.
    fn barycenter(&self, s: SimplexRef) -> Result<[f64; 3]> {
        let verts = self.simplex_vertices(s)?;
        let mut c = [0.0; 3];
        for &v in &verts {
            let p = self.vertex_position(v);
            for a in 0..3 {
                c[a] += p[a];
            }
        }
        let n = verts.len() as f64;
        Ok(c.map(|x| x / n))
    }

    /// Alternating sum of simplex counts.
    fn euler_characteristic(&self) -> Result<i64> {
        let mut chi = 0i64;
        for dim in 0..=self.dimension() {
            let n = self.simplex_count(dim)? as i64;
            chi += if dim % 2 == 0 { n } else { -n };
        }
        Ok(chi)
    }

    /// True when no (d-1)-simplex lies on the boundary.
    fn is_closed(&self) -> Result<bool> {
        let facet_dim = self.dimension() - 1;
        for id in 0..self.simplex_count(facet_dim)? {
            if self.is_boundary(SimplexRef::new(facet_dim, id))? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Either kind of triangulation, for callers that pick one at run time.
#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum Mesh {
    Explicit(ExplicitTriangulation),
    Implicit(ImplicitGrid),
}

macro_rules! dispatch {
    ($self:ident, $t:ident => $e:expr) => {
        match $self {
            Mesh::Explicit($t) => $e,
            Mesh::Implicit($t) => $e,
        }
    };
}

impl Triangulation for Mesh {
    fn dimension(&self) -> usize {
        dispatch!(self, t => t.dimension())
    }
    fn vertex_count(&self) -> usize {
        dispatch!(self, t => t.vertex_count())
    }
    fn vertex_position(&self, v: usize) -> [f64; 3] {
        dispatch!(self, t => t.vertex_position(v))
    }
    fn simplex_count(&self, dim: usize) -> Result<usize> {
        dispatch!(self, t => t.simplex_count(dim))
    }
    fn simplex_vertices(&self, s: SimplexRef) -> Result<SimplexVertices> {
        dispatch!(self, t => t.simplex_vertices(s))
    }
    fn faces_into(&self, s: SimplexRef, k: usize, out: &mut Vec<usize>) -> Result<()> {
        dispatch!(self, t => t.faces_into(s, k, out))
    }
    fn cofaces_into(&self, s: SimplexRef, l: usize, out: &mut Vec<usize>) -> Result<()> {
        dispatch!(self, t => t.cofaces_into(s, l, out))
    }
    fn is_boundary(&self, s: SimplexRef) -> Result<bool> {
        dispatch!(self, t => t.is_boundary(s))
    }
    fn vertex_neighbors_into(&self, v: usize, out: &mut Vec<usize>) -> Result<()> {
        dispatch!(self, t => t.vertex_neighbors_into(v, out))
    }
    fn vertex_link_into(&self, v: usize, out: &mut Vec<usize>) -> Result<()> {
        dispatch!(self, t => t.vertex_link_into(v, out))
    }
    fn precondition(&mut self, kind: Precondition) {
        dispatch!(self, t => t.precondition(kind))
    }
    fn is_preconditioned(&self, kind: Precondition) -> bool {
        dispatch!(self, t => t.is_preconditioned(kind))
    }
}

/// Calls `f` on every `size`-subset of `items` in lexicographic index order.
pub(crate) fn for_each_subset<F: FnMut(&[usize])>(items: &[usize], size: usize, mut f: F) {
    let n = items.len();
    if size > n {
        return;
    }
    let mut idx: ArrayVec<usize, 4> = (0..size).collect();
    let mut buf: ArrayVec<usize, 4> = ArrayVec::new();
    loop {
        buf.clear();
        buf.extend(idx.iter().map(|&i| items[i]));
        f(&buf);
        let mut pos = size;
        while pos > 0 && idx[pos - 1] == pos - 1 + n - size {
            pos -= 1;
        }
        if pos == 0 {
            return;
        }
        idx[pos - 1] += 1;
        for j in pos..size {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
