//! Piecewise-linear scalar fields with a symbolic-perturbation total order,
//! and classification of vertices into PL critical points.

use arrayvec::ArrayVec;
use rayon::prelude::*;
use thiserror::Error;

use crate::triangulation::{SimplexRef, Triangulation, TriangulationError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("{values} values but {offsets} offsets")]
    LengthMismatch { values: usize, offsets: usize },
    #[error("value at vertex {0} is not finite")]
    NonFinite(usize),
    #[error("vertices {first} and {second} share offset {offset}")]
    DuplicateOffset {
        first: usize,
        second: usize,
        offset: i64,
    },
}

/// Order key of a simplex: the ranks of its vertices, highest first.
/// Lexicographic comparison of two keys of equal length compares the
/// simplices by their maximum vertices.
pub type SimplexKey = ArrayVec<u32, 4>;

/// Scalar values plus injective integer offsets. Vertex `u` precedes `v`
/// when `f(u) < f(v)`, or when the values tie and `O(u) < O(v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderField {
    values: Vec<f64>,
    offsets: Vec<i64>,
    ranks: Vec<u32>,
    order: Vec<usize>,
}

impl OrderField {
    pub fn new(values: Vec<f64>, offsets: Vec<i64>) -> Result<Self, FieldError> {
        if values.len() != offsets.len() {
            return Err(FieldError::LengthMismatch {
                values: values.len(),
                offsets: offsets.len(),
            });
        }
        if let Some(v) = values.iter().position(|x| !x.is_finite()) {
            return Err(FieldError::NonFinite(v));
        }
        let mut by_offset: Vec<usize> = (0..offsets.len()).collect();
        by_offset.sort_unstable_by_key(|&v| (offsets[v], v));
        for w in by_offset.windows(2) {
            if offsets[w[0]] == offsets[w[1]] {
                return Err(FieldError::DuplicateOffset {
                    first: w[0],
                    second: w[1],
                    offset: offsets[w[0]],
                });
            }
        }
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_unstable_by(|&a, &b| {
            values[a]
                .total_cmp(&values[b])
                .then(offsets[a].cmp(&offsets[b]))
        });
        let mut ranks = vec![0u32; values.len()];
        for (r, &v) in order.iter().enumerate() {
            ranks[v] = r as u32;
        }
        Ok(Self {
            values,
            offsets,
            ranks,
            order,
        })
    }

    /// Offsets default to the vertex index.
    pub fn from_values(values: Vec<f64>) -> Result<Self, FieldError> {
        let offsets = (0..values.len() as i64).collect();
        Self::new(values, offsets)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn offsets(&self) -> &[i64] {
        &self.offsets
    }

    pub fn value(&self, v: usize) -> f64 {
        self.values[v]
    }

    pub fn offset(&self, v: usize) -> i64 {
        self.offsets[v]
    }

    /// Position of `v` in the total order.
    pub fn rank(&self, v: usize) -> u32 {
        self.ranks[v]
    }

    pub fn ranks(&self) -> &[u32] {
        &self.ranks
    }

    /// Vertices sorted ascending.
    pub fn sorted_vertices(&self) -> &[usize] {
        &self.order
    }

    pub fn vertex_less(&self, u: usize, v: usize) -> bool {
        self.ranks[u] < self.ranks[v]
    }

    /// The field `-f` with offsets `-O`, whose order is the reverse of this one.
    pub fn negated(&self) -> Self {
        let values = self.values.iter().map(|x| -x).collect();
        let offsets = self.offsets.iter().map(|o| -o).collect();
        Self::new(values, offsets).expect("negation keeps the field valid")
    }

    pub fn simplex_key(&self, verts: &[usize]) -> SimplexKey {
        let mut key: SimplexKey = verts.iter().map(|&v| self.ranks[v]).collect();
        key.sort_unstable_by(|a, b| b.cmp(a));
        key
    }

    /// Highest vertex of `verts` in the order.
    pub fn max_vertex(&self, verts: &[usize]) -> usize {
        *verts
            .iter()
            .max_by_key(|&&v| self.ranks[v])
            .expect("non-empty simplex")
    }

    /// Scalar value of a simplex: the value at its highest vertex.
    pub fn simplex_value(&self, verts: &[usize]) -> f64 {
        self.values[self.max_vertex(verts)]
    }
}

/// A PL critical vertex. `index` is 0 for minima, `d` for maxima, and 1 or
/// `d - 1` for saddles; `multiplicity` exceeds 1 only for degenerate saddles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlCriticalPoint {
    pub vertex: usize,
    pub index: usize,
    pub multiplicity: usize,
    pub value: f64,
    pub boundary: bool,
}

impl PlCriticalPoint {
    pub fn is_extremum(&self, dimension: usize) -> bool {
        self.index == 0 || self.index == dimension
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VertexClass {
    Regular,
    Critical(PlCriticalPoint),
    /// A 3D vertex whose lower and upper links are both disconnected: a
    /// 1-saddle and a 2-saddle at once.
    DoubleSaddle(PlCriticalPoint, PlCriticalPoint),
}

impl VertexClass {
    pub fn points(&self) -> impl Iterator<Item = PlCriticalPoint> {
        let (a, b) = match *self {
            Self::Regular => (None, None),
            Self::Critical(p) => (Some(p), None),
            Self::DoubleSaddle(p, q) => (Some(p), Some(q)),
        };
        a.into_iter().chain(b)
    }
}

/// Connected component counts of the lower and upper links of `v`.
pub fn link_components<T: Triangulation + ?Sized>(
    t: &T,
    field: &OrderField,
    v: usize,
) -> Result<(usize, usize), TriangulationError> {
    let d = t.dimension();
    let mut star = Vec::new();
    t.cofaces_into(SimplexRef::vertex(v), d, &mut star)?;
    let mut cells: Vec<ArrayVec<usize, 4>> = Vec::with_capacity(star.len());
    let mut link: Vec<usize> = Vec::new();
    for &c in &star {
        let verts = t.simplex_vertices(SimplexRef::new(d, c))?;
        let others: ArrayVec<usize, 4> = verts.into_iter().filter(|&u| u != v).collect();
        link.extend_from_slice(&others);
        cells.push(others);
    }
    link.sort_unstable();
    link.dedup();
    let local = |u: usize| link.binary_search(&u).expect("link vertex");
    let mut uf = crate::union_find::UnionFind::new(link.len());
    let below = |u: usize| field.vertex_less(u, v);
    for cell in &cells {
        for (i, &a) in cell.iter().enumerate() {
            for &b in &cell[i + 1..] {
                if below(a) == below(b) {
                    uf.union(local(a), local(b));
                }
            }
        }
    }
    let mut lower_roots = Vec::new();
    let mut upper_roots = Vec::new();
    for (i, &u) in link.iter().enumerate() {
        let root = uf.find(i);
        if below(u) {
            lower_roots.push(root);
        } else {
            upper_roots.push(root);
        }
    }
    lower_roots.sort_unstable();
    lower_roots.dedup();
    upper_roots.sort_unstable();
    upper_roots.dedup();
    Ok((lower_roots.len(), upper_roots.len()))
}

/// Classifies `v` by the number of connected components of its lower and
/// upper links. In 2D a vertex whose lower and upper links are both
/// disconnected is reported once, as a 1-saddle; in 3D it is both a 1-saddle
/// and a 2-saddle.
pub fn classify_vertex<T: Triangulation + ?Sized>(
    t: &T,
    field: &OrderField,
    v: usize,
) -> Result<VertexClass, TriangulationError> {
    let d = t.dimension();
    let (lower, upper) = link_components(t, field, v)?;
    let point = |index, multiplicity| -> Result<PlCriticalPoint, TriangulationError> {
        Ok(PlCriticalPoint {
            vertex: v,
            index,
            multiplicity,
            value: field.value(v),
            boundary: t.is_boundary(SimplexRef::vertex(v))?,
        })
    };
    Ok(match (lower, upper) {
        (0, 0) => VertexClass::Regular,
        (0, _) => VertexClass::Critical(point(0, 1)?),
        (_, 0) => VertexClass::Critical(point(d, 1)?),
        (l, u) if l >= 2 && u >= 2 && d == 3 => {
            VertexClass::DoubleSaddle(point(1, l - 1)?, point(2, u - 1)?)
        }
        (l, _) if l >= 2 => VertexClass::Critical(point(1, l - 1)?),
        (_, u) if u >= 2 => VertexClass::Critical(point(d - 1, u - 1)?),
        _ => VertexClass::Regular,
    })
}

/// All PL critical points, sorted by vertex id then index.
pub fn extract_critical_points<T: Triangulation + ?Sized>(
    t: &T,
    field: &OrderField,
) -> Result<Vec<PlCriticalPoint>, TriangulationError> {
    let classes: Vec<VertexClass> = (0..t.vertex_count())
        .into_par_iter()
        .map(|v| classify_vertex(t, field, v))
        .collect::<Result<_, _>>()?;
    Ok(classes.iter().flat_map(VertexClass::points).collect())
}

/// Per-index counts of critical points, saddles weighted by multiplicity.
pub fn count_by_index(points: &[PlCriticalPoint], dimension: usize) -> Vec<usize> {
    let mut counts = vec![0; dimension + 1];
    for p in points {
        counts[p.index] += p.multiplicity;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::octahedron;
    use crate::triangulation::{ExplicitTriangulation, ImplicitGrid, Precondition};

    fn f0() -> OrderField {
        OrderField::from_values(vec![0.0, 4.0, 2.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0]).unwrap()
    }

    #[test]
    fn order_ties_use_offsets() {
        let f = OrderField::new(vec![1.0, 2.0], vec![0, 1]).unwrap();
        assert!(f.vertex_less(0, 1));
        let f = OrderField::new(vec![1.0, 1.0], vec![3, 7]).unwrap();
        assert!(f.vertex_less(0, 1));
        assert!(!f.vertex_less(1, 0));
        assert!(!f.vertex_less(0, 0));
    }

    #[test]
    fn field_errors() {
        assert_eq!(
            OrderField::new(vec![1.0, 2.0], vec![0]),
            Err(FieldError::LengthMismatch {
                values: 2,
                offsets: 1
            })
        );
        assert_eq!(
            OrderField::new(vec![1.0, 2.0], vec![4, 4]),
            Err(FieldError::DuplicateOffset {
                first: 0,
                second: 1,
                offset: 4
            })
        );
        assert_eq!(
            OrderField::from_values(vec![f64::NAN]),
            Err(FieldError::NonFinite(0))
        );
    }

    #[test]
    fn f0_critical_points() {
        let g = ImplicitGrid::new(&[3, 3]).unwrap();
        let pts = extract_critical_points(&g, &f0()).unwrap();
        let summary: Vec<(usize, usize, usize, f64)> = pts
            .iter()
            .map(|p| (p.vertex, p.index, p.multiplicity, p.value))
            .collect();
        assert_eq!(
            summary,
            vec![
                (0, 0, 1, 0.0),
                (1, 1, 1, 4.0),
                (2, 0, 1, 2.0),
                (8, 2, 1, 10.0)
            ]
        );
        assert!(pts.iter().all(|p| p.boundary));
        assert_eq!(link_components(&g, &f0(), 1).unwrap(), (2, 1));
    }

    #[test]
    fn octahedron_height_field() {
        let mut t = octahedron();
        t.precondition(Precondition::VertexStars);
        t.precondition(Precondition::Boundary(0));
        let f = OrderField::from_values((0..6).map(|x| x as f64).collect()).unwrap();
        let pts = extract_critical_points(&t, &f).unwrap();
        assert_eq!(pts.len(), 2);
        assert_eq!((pts[0].vertex, pts[0].index), (0, 0));
        assert_eq!((pts[1].vertex, pts[1].index), (5, 2));
        for v in 1..5 {
            assert_eq!(classify_vertex(&t, &f, v).unwrap(), VertexClass::Regular);
        }
    }

    #[test]
    fn constant_field_on_single_triangle() {
        let mut t = ExplicitTriangulation::new(vec![[0.0; 3]; 3], [[0usize, 1, 2]]).unwrap();
        t.precondition_all();
        let f = OrderField::from_values(vec![1.0; 3]).unwrap();
        let pts = extract_critical_points(&t, &f).unwrap();
        assert_eq!(
            pts.iter().map(|p| (p.vertex, p.index)).collect::<Vec<_>>(),
            vec![(0, 0), (2, 2)]
        );
    }

    #[test]
    fn monotone_grid_field_has_regular_interior() {
        let g = ImplicitGrid::new(&[5, 4]).unwrap();
        let f = OrderField::from_values((0..20).map(|v| (v % 5) as f64).collect()).unwrap();
        for j in 1..3 {
            for i in 1..4 {
                let v = g.vertex_id(i, j, 0);
                assert_eq!(classify_vertex(&g, &f, v).unwrap(), VertexClass::Regular);
            }
        }
    }

    #[test]
    fn negation_reverses_order() {
        let f = f0();
        let n = f.negated();
        for u in 0..9 {
            for v in 0..9 {
                if u != v {
                    assert_eq!(f.vertex_less(u, v), n.vertex_less(v, u));
                }
            }
        }
    }
}
