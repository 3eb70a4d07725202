use std::collections::BTreeSet;

use arrayvec::ArrayVec;

use super::{
    for_each_subset, ImplicitGrid, Precondition, Result, SimplexRef, SimplexVertices,
    Triangulation, TriangulationError,
};

/// Lookup tables an [`ExplicitTriangulation`] may hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Table {
    /// Sorted vertex tuples of the k-simplices, 0 < k < d.
    Skeleton(usize),
    /// `l`-co-faces of every `dim`-simplex.
    Cofaces {
        dim: usize,
        l: usize,
    },
    /// `k`-faces of every `dim`-simplex.
    Faces {
        dim: usize,
        k: usize,
    },
    Neighbors,
    Links,
    Boundary(usize),
}

/// Compressed row storage: row `i` is `items[offsets[i]..offsets[i + 1]]`.
#[derive(Debug, Clone, Default)]
struct Csr {
    offsets: Vec<usize>,
    items: Vec<usize>,
}

impl Csr {
    fn from_pairs(rows: usize, pairs: &[(usize, usize)]) -> Self {
        let mut offsets = vec![0usize; rows + 1];
        for &(r, _) in pairs {
            offsets[r + 1] += 1;
        }
        for r in 0..rows {
            offsets[r + 1] += offsets[r];
        }
        let mut cursor = offsets.clone();
        let mut items = vec![0usize; pairs.len()];
        for &(r, c) in pairs {
            items[cursor[r]] = c;
            cursor[r] += 1;
        }
        Self { offsets, items }
    }

    fn row(&self, r: usize) -> &[usize] {
        &self.items[self.offsets[r]..self.offsets[r + 1]]
    }

    fn rows(&self) -> usize {
        self.offsets.len() - 1
    }
}

/// A (d-1)-simplex with more than two d-dimensional co-faces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifoldViolation {
    pub facet: Vec<usize>,
    pub coface_count: usize,
}

/// Triangulation stored as points plus maximal cells, with lookup tables
/// built on demand by [`Triangulation::precondition`].
#[derive(Debug, Clone)]
pub struct ExplicitTriangulation {
    dim: usize,
    points: Vec<[f64; 3]>,
    /// Flattened sorted vertex tuples, stride `dim + 1`.
    cells: Vec<usize>,
    skeleton: [Option<Vec<usize>>; 4],
    cofaces: [[Option<Csr>; 4]; 4],
    faces: [[Option<Vec<usize>>; 4]; 4],
    neighbors: Option<Csr>,
    links: Option<Csr>,
    boundary: [Option<Vec<bool>>; 4],
    performed: BTreeSet<Precondition>,
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

impl ExplicitTriangulation {
    /// Builds the structure from points and cells of uniform arity 3
    /// (surfaces) or 4 (volumes). No lookup table is built.
    pub fn new<I, C>(points: Vec<[f64; 3]>, cells: I) -> Result<Self>
    where
        I: IntoIterator<Item = C>,
        C: AsRef<[usize]>,
    {
        let mut arity = None;
        let mut flat = Vec::new();
        let mut canonical: Vec<(ArrayVec<usize, 4>, usize)> = Vec::new();
        for (ci, cell) in cells.into_iter().enumerate() {
            let cell = cell.as_ref();
            let expected = *arity.get_or_insert(cell.len());
            if cell.len() != expected {
                return Err(TriangulationError::MixedArity {
                    cell: ci,
                    found: cell.len(),
                    expected,
                });
            }
            if !(3..=4).contains(&expected) {
                return Err(TriangulationError::UnsupportedArity(expected));
            }
            let mut sorted: ArrayVec<usize, 4> = cell.iter().copied().collect();
            sorted.sort_unstable();
            for &v in &sorted {
                if v >= points.len() {
                    return Err(TriangulationError::VertexOutOfRange {
                        cell: ci,
                        vertex: v,
                        count: points.len(),
                    });
                }
            }
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(TriangulationError::DegenerateCell(ci));
            }
            flat.extend_from_slice(&sorted);
            canonical.push((sorted, ci));
        }
        let arity = arity.ok_or(TriangulationError::EmptyCells)?;
        canonical.sort_unstable();
        for w in canonical.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(TriangulationError::DuplicateCell {
                    cell: w[1].1,
                    first: w[0].1,
                });
            }
        }
        Ok(Self {
            dim: arity - 1,
            points,
            cells: flat,
            skeleton: Default::default(),
            cofaces: Default::default(),
            faces: Default::default(),
            neighbors: None,
            links: None,
            boundary: Default::default(),
            performed: BTreeSet::new(),
        })
    }

    /// Re-ingests the cells emitted by an implicit grid.
    pub fn from_implicit(grid: &ImplicitGrid) -> Self {
        let points = (0..grid.vertex_count())
            .map(|v| grid.vertex_position(v))
            .collect();
        Self::new(points, grid.emit_cells()).expect("implicit grids emit valid cells")
    }

    pub fn points(&self) -> &[[f64; 3]] {
        &self.points
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len() / (self.dim + 1)
    }

    pub fn cell(&self, c: usize) -> &[usize] {
        let n = self.dim + 1;
        &self.cells[c * n..(c + 1) * n]
    }

    /// Tables currently held in memory.
    pub fn built_tables(&self) -> BTreeSet<Table> {
        let mut out = BTreeSet::new();
        for k in 0..4 {
            if self.skeleton[k].is_some() {
                out.insert(Table::Skeleton(k));
            }
            if self.boundary[k].is_some() {
                out.insert(Table::Boundary(k));
            }
            for l in 0..4 {
                if self.cofaces[k][l].is_some() {
                    out.insert(Table::Cofaces { dim: k, l });
                }
                if self.faces[k][l].is_some() {
                    out.insert(Table::Faces { dim: k, k: l });
                }
            }
        }
        if self.neighbors.is_some() {
            out.insert(Table::Neighbors);
        }
        if self.links.is_some() {
            out.insert(Table::Links);
        }
        out
    }

    /// Tables that `kind` builds (transitively).
    pub fn tables_for(&self, kind: Precondition) -> Vec<Table> {
        let d = self.dim;
        let skel = |k: usize, v: &mut Vec<Table>| {
            if k > 0 && k < d {
                v.push(Table::Skeleton(k));
            }
        };
        let mut v = Vec::new();
        match kind {
            Precondition::VertexNeighbors => {
                skel(1, &mut v);
                v.push(Table::Neighbors);
            }
            Precondition::VertexEdges => {
                skel(1, &mut v);
                v.push(Table::Cofaces { dim: 0, l: 1 });
            }
            Precondition::VertexTriangles => {
                skel(2, &mut v);
                v.push(Table::Cofaces { dim: 0, l: 2 });
            }
            Precondition::VertexStars => v.push(Table::Cofaces { dim: 0, l: d }),
            Precondition::VertexLinks => {
                skel(d - 1, &mut v);
                v.push(Table::Cofaces { dim: 0, l: d });
                v.push(Table::Links);
            }
            Precondition::EdgeList => skel(1, &mut v),
            Precondition::TriangleList => {
                if d >= 2 {
                    skel(2, &mut v)
                }
            }
            Precondition::EdgeCofaces(l) => {
                if (2..=d).contains(&l) {
                    skel(1, &mut v);
                    skel(l, &mut v);
                    v.push(Table::Cofaces { dim: 1, l });
                }
            }
            Precondition::TriangleCofaces => {
                if d == 3 {
                    skel(2, &mut v);
                    v.push(Table::Cofaces { dim: 2, l: 3 });
                }
            }
            Precondition::SimplexFaces { dim, k } => {
                if k < dim && dim <= d {
                    skel(dim, &mut v);
                    if k > 0 {
                        skel(k, &mut v);
                        v.push(Table::Faces { dim, k });
                    }
                }
            }
            Precondition::Boundary(dim) => {
                if dim <= d {
                    skel(d - 1, &mut v);
                    v.push(Table::Cofaces { dim: d - 1, l: d });
                    skel(dim, &mut v);
                    if dim > 0 && dim + 1 < d {
                        v.push(Table::Faces { dim: d - 1, k: dim });
                    }
                    if dim == d {
                        v.push(Table::Faces { dim: d, k: d - 1 });
                    }
                    v.push(Table::Boundary(dim));
                }
            }
        }
        v
    }

    /// Reports every (d-1)-simplex shared by more than two cells. Computed
    /// without touching the lookup tables.
    pub fn validate_pseudo_manifold(&self) -> Vec<ManifoldViolation> {
        let mut facets: Vec<ArrayVec<usize, 4>> = Vec::new();
        for c in 0..self.cell_count() {
            for_each_subset(self.cell(c), self.dim, |f| {
                facets.push(f.iter().copied().collect())
            });
        }
        facets.sort_unstable();
        let mut out = Vec::new();
        let mut i = 0;
        while i < facets.len() {
            let mut j = i + 1;
            while j < facets.len() && facets[j] == facets[i] {
                j += 1;
            }
            if j - i > 2 {
                out.push(ManifoldViolation {
                    facet: facets[i].to_vec(),
                    coface_count: j - i,
                });
            }
            i = j;
        }
        out
    }

    fn list(&self, dim: usize) -> Option<&[usize]> {
        if dim == self.dim {
            Some(&self.cells)
        } else {
            self.skeleton.get(dim)?.as_deref()
        }
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        if dim > self.dim {
            Err(TriangulationError::DimensionOutOfRange { dim, max: self.dim })
        } else {
            Ok(())
        }
    }

    fn count_if_known(&self, dim: usize) -> Option<usize> {
        match dim {
            0 => Some(self.points.len()),
            _ => self.list(dim).map(|l| l.len() / (dim + 1)),
        }
    }

    fn check_simplex(&self, s: SimplexRef) -> Result<()> {
        self.check_dim(s.dim)?;
        match self.count_if_known(s.dim) {
            Some(n) if s.id >= n => Err(TriangulationError::SimplexOutOfRange(s)),
            _ => Ok(()),
        }
    }

    /// Id of the k-simplex with the given sorted vertices, 0 < k < d.
    fn find(&self, k: usize, verts: &[usize]) -> Option<usize> {
        if k == 0 {
            return Some(verts[0]);
        }
        let list = self.skeleton[k].as_deref()?;
        let n = k + 1;
        let count = list.len() / n;
        let (mut lo, mut hi) = (0usize, count);
        while lo < hi {
            let mid = (lo + hi) / 2;
            match list[mid * n..(mid + 1) * n].cmp(verts) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    fn build_table(&mut self, table: Table) {
        if self.built_tables().contains(&table) {
            return;
        }
        let d = self.dim;
        match table {
            Table::Skeleton(k) => {
                let mut all: Vec<ArrayVec<usize, 4>> = Vec::new();
                for c in 0..self.cell_count() {
                    for_each_subset(self.cell(c), k + 1, |f| {
                        all.push(f.iter().copied().collect())
                    });
                }
                all.sort_unstable();
                all.dedup();
                self.skeleton[k] = Some(all.into_iter().flatten().collect());
            }
            Table::Cofaces { dim, l } => {
                let list = self.list(l).expect("co-face source list built first");
                let mut pairs = Vec::new();
                for (j, simplex) in list.chunks_exact(l + 1).enumerate() {
                    for_each_subset(simplex, dim + 1, |f| {
                        let id = self.find(dim, f).expect("face present in skeleton");
                        pairs.push((id, j));
                    });
                }
                let rows = self.count_if_known(dim).expect("skeleton built first");
                self.cofaces[dim][l] = Some(Csr::from_pairs(rows, &pairs));
            }
            Table::Faces { dim, k } => {
                let list = self.list(dim).expect("face source list built first");
                let stride = binomial(dim + 1, k + 1);
                let mut out = Vec::with_capacity(list.len() / (dim + 1) * stride);
                let mut ids: ArrayVec<usize, 6> = ArrayVec::new();
                for simplex in list.chunks_exact(dim + 1) {
                    ids.clear();
                    for_each_subset(simplex, k + 1, |f| {
                        ids.push(self.find(k, f).expect("face present in skeleton"));
                    });
                    ids.sort_unstable();
                    out.extend_from_slice(&ids);
                }
                self.faces[dim][k] = Some(out);
            }
            Table::Neighbors => {
                let edges = self.skeleton[1].as_deref().expect("edge list built first");
                let mut pairs = Vec::with_capacity(edges.len());
                for e in edges.chunks_exact(2) {
                    pairs.push((e[0], e[1]));
                }
                for e in edges.chunks_exact(2) {
                    pairs.push((e[1], e[0]));
                }
                // rows must be ascending: sort by (row, col)
                pairs.sort_unstable();
                self.neighbors = Some(Csr::from_pairs(self.points.len(), &pairs));
            }
            Table::Links => {
                let stars = self.cofaces[0][d]
                    .as_ref()
                    .expect("vertex stars built first");
                let mut pairs = Vec::new();
                let mut facet: ArrayVec<usize, 4> = ArrayVec::new();
                for v in 0..stars.rows() {
                    let start = pairs.len();
                    for &c in stars.row(v) {
                        facet.clear();
                        facet.extend(self.cell(c).iter().copied().filter(|&u| u != v));
                        let id = self.find(d - 1, &facet).expect("facet present");
                        pairs.push((v, id));
                    }
                    pairs[start..].sort_unstable();
                }
                self.links = Some(Csr::from_pairs(self.points.len(), &pairs));
            }
            Table::Boundary(dim) => {
                let facet_cofaces = self.cofaces[d - 1][d]
                    .as_ref()
                    .expect("facet co-faces built");
                let on_boundary: Vec<bool> = (0..facet_cofaces.rows())
                    .map(|f| facet_cofaces.row(f).len() == 1)
                    .collect();
                let count = self.count_if_known(dim).expect("skeleton built");
                let mut flags = vec![false; count];
                if dim + 1 == d {
                    flags = on_boundary;
                } else if dim == d {
                    let faces = self.faces[d][d - 1].as_deref().expect("cell facets built");
                    for (c, flag) in flags.iter_mut().enumerate() {
                        *flag = faces[c * (d + 1)..(c + 1) * (d + 1)]
                            .iter()
                            .any(|&f| on_boundary[f]);
                    }
                } else if dim == 0 {
                    let facets = self.list(d - 1).expect("facet list built");
                    for (f, verts) in facets.chunks_exact(d).enumerate() {
                        if on_boundary[f] {
                            for &v in verts {
                                flags[v] = true;
                            }
                        }
                    }
                } else {
                    let stride = binomial(d, dim + 1);
                    let faces = self.faces[d - 1][dim]
                        .as_deref()
                        .expect("facet faces built");
                    for (f, &b) in on_boundary.iter().enumerate() {
                        if b {
                            for &s in &faces[f * stride..(f + 1) * stride] {
                                flags[s] = true;
                            }
                        }
                    }
                }
                self.boundary[dim] = Some(flags);
            }
        }
    }

    fn not_ready(kind: Precondition) -> TriangulationError {
        TriangulationError::NotPreconditioned(kind)
    }
}

impl Triangulation for ExplicitTriangulation {
    fn dimension(&self) -> usize {
        self.dim
    }

    fn vertex_count(&self) -> usize {
        self.points.len()
    }

    fn vertex_position(&self, v: usize) -> [f64; 3] {
        self.points[v]
    }

    fn simplex_count(&self, dim: usize) -> Result<usize> {
        self.check_dim(dim)?;
        self.count_if_known(dim)
            .ok_or_else(|| Self::not_ready(Precondition::skeleton(dim).expect("inner dimension")))
    }

    fn simplex_vertices(&self, s: SimplexRef) -> Result<SimplexVertices> {
        self.check_simplex(s)?;
        if s.dim == 0 {
            let mut out = SimplexVertices::new();
            out.push(s.id);
            return Ok(out);
        }
        let list = self
            .list(s.dim)
            .ok_or_else(|| Self::not_ready(Precondition::skeleton(s.dim).expect("inner")))?;
        let n = s.dim + 1;
        Ok(list[s.id * n..(s.id + 1) * n].iter().copied().collect())
    }

    fn faces_into(&self, s: SimplexRef, k: usize, out: &mut Vec<usize>) -> Result<()> {
        self.check_simplex(s)?;
        if k >= s.dim {
            return Err(TriangulationError::InvalidQuery(format!(
                "{k}-faces of a {}-simplex",
                s.dim
            )));
        }
        if k == 0 {
            out.extend(self.simplex_vertices(s)?);
            return Ok(());
        }
        let table = self.faces[s.dim][k]
            .as_deref()
            .ok_or_else(|| Self::not_ready(Precondition::SimplexFaces { dim: s.dim, k }))?;
        let stride = binomial(s.dim + 1, k + 1);
        out.extend_from_slice(&table[s.id * stride..(s.id + 1) * stride]);
        Ok(())
    }

    fn cofaces_into(&self, s: SimplexRef, l: usize, out: &mut Vec<usize>) -> Result<()> {
        self.check_simplex(s)?;
        if l <= s.dim || l > self.dim {
            return Err(TriangulationError::InvalidQuery(format!(
                "{l}-co-faces of a {}-simplex in a {}-dimensional triangulation",
                s.dim, self.dim
            )));
        }
        let table = self.cofaces[s.dim][l]
            .as_ref()
            .ok_or_else(|| Self::not_ready(Precondition::cofaces(s.dim, l, self.dim)))?;
        out.extend_from_slice(table.row(s.id));
        Ok(())
    }

    fn is_boundary(&self, s: SimplexRef) -> Result<bool> {
        self.check_simplex(s)?;
        let flags = self.boundary[s.dim]
            .as_ref()
            .ok_or_else(|| Self::not_ready(Precondition::Boundary(s.dim)))?;
        Ok(flags[s.id])
    }

    fn vertex_neighbors_into(&self, v: usize, out: &mut Vec<usize>) -> Result<()> {
        self.check_simplex(SimplexRef::vertex(v))?;
        let table = self
            .neighbors
            .as_ref()
            .ok_or_else(|| Self::not_ready(Precondition::VertexNeighbors))?;
        out.extend_from_slice(table.row(v));
        Ok(())
    }

    fn vertex_link_into(&self, v: usize, out: &mut Vec<usize>) -> Result<()> {
        self.check_simplex(SimplexRef::vertex(v))?;
        let table = self
            .links
            .as_ref()
            .ok_or_else(|| Self::not_ready(Precondition::VertexLinks))?;
        out.extend_from_slice(table.row(v));
        Ok(())
    }

    fn precondition(&mut self, kind: Precondition) {
        if self.performed.contains(&kind) {
            return;
        }
        for table in self.tables_for(kind) {
            self.build_table(table);
        }
        self.performed.insert(kind);
    }

    fn is_preconditioned(&self, kind: Precondition) -> bool {
        self.performed.contains(&kind)
    }
}
