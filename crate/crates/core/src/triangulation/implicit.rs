use arrayvec::ArrayVec;

use super::{
    for_each_subset, Precondition, Result, SimplexRef, SimplexVertices, Triangulation,
    TriangulationError,
};

/// Edge classes of the grid subdivision, named by the axes the edge
/// advances along. In 2D these are the horizontal (`AlongX`), vertical
/// (`AlongY`) and diagonal (`DiagonalXY`) edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeClass {
    AlongX,
    AlongY,
    AlongZ,
    DiagonalXY,
    DiagonalXZ,
    DiagonalYZ,
    Body,
}

impl EdgeClass {
    fn from_mask(mask: u8) -> Self {
        match mask {
            1 => Self::AlongX,
            2 => Self::AlongY,
            4 => Self::AlongZ,
            3 => Self::DiagonalXY,
            5 => Self::DiagonalXZ,
            6 => Self::DiagonalYZ,
            _ => Self::Body,
        }
    }
}

/// One family of simplices sharing the same shape inside a voxel.
///
/// A simplex of the Kuhn subdivision is a monotone vertex chain
/// `p, p + 1[S1], p + 1[S2], ...` with `S1 ⊊ S2 ⊊ ...` non-empty axis sets
/// (bit 0 = x, bit 1 = y, bit 2 = z). Each chain shape gets a contiguous
/// identifier block, indexed row-major by the anchor `p`.
#[derive(Debug, Clone)]
struct Class {
    chain: ArrayVec<u8, 3>,
    extent: [usize; 3],
    start: usize,
}

impl Class {
    fn size(&self) -> usize {
        self.extent.iter().product()
    }

    fn top(&self) -> u8 {
        self.chain.last().copied().unwrap_or(0)
    }
}

/// Triangulation of a regular grid computed on the fly: quads split along
/// the (i,j)-(i+1,j+1) diagonal, voxels split into the 6 tetrahedra sharing
/// the (i,j,k)-(i+1,j+1,k+1) diagonal.
#[derive(Debug, Clone)]
pub struct ImplicitGrid {
    dims: [usize; 3],
    d: usize,
    classes: [Vec<Class>; 4],
    counts: [usize; 4],
}

fn chains(full: u8, len: usize) -> Vec<ArrayVec<u8, 3>> {
    let mut out = Vec::new();
    let mut cur = ArrayVec::new();
    fn rec(
        full: u8,
        len: usize,
        prev: u8,
        cur: &mut ArrayVec<u8, 3>,
        out: &mut Vec<ArrayVec<u8, 3>>,
    ) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for m in 1..=full {
            if m & !full == 0 && m & prev == prev && m != prev {
                cur.push(m);
                rec(full, len, m, cur, out);
                cur.pop();
            }
        }
    }
    rec(full, len, 0, &mut cur, &mut out);
    // axis-aligned first, then face diagonals, then body diagonals
    out.sort_by_key(|c| {
        let top = c.last().copied().unwrap_or(0);
        (top.count_ones(), top, c.clone())
    });
    out
}

impl ImplicitGrid {
    /// `dims` holds the vertex count per axis: `[w, h]` or `[w, h, depth]`.
    pub fn new(dims: &[usize]) -> Result<Self> {
        if !(2..=3).contains(&dims.len()) || dims.iter().any(|&n| n < 2) {
            return Err(TriangulationError::InvalidGridDims(dims.to_vec()));
        }
        let d = dims.len();
        let mut full_dims = [1usize; 3];
        full_dims[..d].copy_from_slice(dims);
        let full: u8 = (1 << d) - 1;
        let mut classes: [Vec<Class>; 4] = Default::default();
        let mut counts = [0usize; 4];
        for k in 0..=d {
            let mut start = 0;
            for chain in chains(full, k) {
                let top = chain.last().copied().unwrap_or(0);
                let mut extent = full_dims;
                for (a, e) in extent.iter_mut().enumerate() {
                    if top & (1 << a) != 0 {
                        *e -= 1;
                    }
                }
                let class = Class {
                    chain,
                    extent,
                    start,
                };
                start += class.size();
                classes[k].push(class);
            }
            counts[k] = start;
        }
        Ok(Self {
            dims: full_dims,
            d,
            classes,
            counts,
        })
    }

    /// Vertex counts per axis (`dims()[2] == 1` in 2D).
    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn vertex_id(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.dims[0] * (j + self.dims[1] * k)
    }

    pub fn vertex_coords(&self, v: usize) -> [usize; 3] {
        let [w, h, _] = self.dims;
        [v % w, (v / w) % h, v / (w * h)]
    }

    fn decode(&self, s: SimplexRef) -> Result<(&Class, [usize; 3])> {
        if s.dim > self.d {
            return Err(TriangulationError::DimensionOutOfRange {
                dim: s.dim,
                max: self.d,
            });
        }
        if s.id >= self.counts[s.dim] {
            return Err(TriangulationError::SimplexOutOfRange(s));
        }
        let classes = &self.classes[s.dim];
        let idx = classes.partition_point(|c| c.start <= s.id) - 1;
        let class = &classes[idx];
        let local = s.id - class.start;
        let [ex, ey, _] = class.extent;
        Ok((class, [local % ex, (local / ex) % ey, local / (ex * ey)]))
    }

    fn chain_vertices(&self, class: &Class, anchor: [usize; 3]) -> SimplexVertices {
        let mut out = SimplexVertices::new();
        out.push(self.vertex_id(anchor[0], anchor[1], anchor[2]));
        for &m in &class.chain {
            let c = [
                anchor[0] + (m & 1) as usize,
                anchor[1] + ((m >> 1) & 1) as usize,
                anchor[2] + ((m >> 2) & 1) as usize,
            ];
            out.push(self.vertex_id(c[0], c[1], c[2]));
        }
        out
    }

    /// Identifier of the simplex spanned by `verts` (ascending), if it is one.
    pub fn encode(&self, verts: &[usize]) -> Option<usize> {
        let k = verts.len().checked_sub(1)?;
        if k > self.d {
            return None;
        }
        let anchor = self.vertex_coords(verts[0]);
        let mut chain: ArrayVec<u8, 3> = ArrayVec::new();
        let mut prev = 0u8;
        for &v in &verts[1..] {
            let c = self.vertex_coords(v);
            let mut mask = 0u8;
            for a in 0..3 {
                match c[a].checked_sub(anchor[a]) {
                    Some(0) => {}
                    Some(1) => mask |= 1 << a,
                    _ => return None,
                }
            }
            if mask & prev != prev || mask == prev {
                return None;
            }
            chain.push(mask);
            prev = mask;
        }
        let class = self.classes[k].iter().find(|c| c.chain == chain)?;
        let [ex, ey, _] = class.extent;
        if (0..3).any(|a| anchor[a] >= class.extent[a]) {
            return None;
        }
        Some(class.start + anchor[0] + ex * (anchor[1] + ey * anchor[2]))
    }

    /// Class and anchor (bottom-left(-front) vertex coordinates) of edge `e`.
    pub fn classify_edge_identifier(&self, e: usize) -> Result<(EdgeClass, [usize; 3])> {
        let (class, anchor) = self.decode(SimplexRef::new(1, e))?;
        Ok((EdgeClass::from_mask(class.top()), anchor))
    }

    /// Vertex tuples of every d-cell, in identifier order.
    pub fn emit_cells(&self) -> Vec<SimplexVertices> {
        (0..self.counts[self.d])
            .map(|c| {
                self.simplex_vertices(SimplexRef::new(self.d, c))
                    .expect("in range")
            })
            .collect()
    }

    fn on_common_face(&self, verts: &[usize]) -> bool {
        let coords: ArrayVec<[usize; 3], 4> =
            verts.iter().map(|&v| self.vertex_coords(v)).collect();
        (0..self.d).any(|a| {
            let last = self.dims[a] - 1;
            coords.iter().all(|c| c[a] == 0) || coords.iter().all(|c| c[a] == last)
        })
    }
}

impl Triangulation for ImplicitGrid {
    fn dimension(&self) -> usize {
        self.d
    }

    fn vertex_count(&self) -> usize {
        self.counts[0]
    }

    fn vertex_position(&self, v: usize) -> [f64; 3] {
        self.vertex_coords(v).map(|c| c as f64)
    }

    fn simplex_count(&self, dim: usize) -> Result<usize> {
        if dim > self.d {
            return Err(TriangulationError::DimensionOutOfRange { dim, max: self.d });
        }
        Ok(self.counts[dim])
    }

    fn simplex_vertices(&self, s: SimplexRef) -> Result<SimplexVertices> {
        let (class, anchor) = self.decode(s)?;
        Ok(self.chain_vertices(class, anchor))
    }

    fn faces_into(&self, s: SimplexRef, k: usize, out: &mut Vec<usize>) -> Result<()> {
        let verts = self.simplex_vertices(s)?;
        if k >= s.dim {
            return Err(TriangulationError::InvalidQuery(format!(
                "{k}-faces of a {}-simplex",
                s.dim
            )));
        }
        let start = out.len();
        for_each_subset(&verts, k + 1, |f| {
            out.push(
                self.encode(f)
                    .expect("faces of grid simplices are grid simplices"),
            )
        });
        out[start..].sort_unstable();
        Ok(())
    }

    fn cofaces_into(&self, s: SimplexRef, l: usize, out: &mut Vec<usize>) -> Result<()> {
        let (class, anchor) = self.decode(s)?;
        if l <= s.dim || l > self.d {
            return Err(TriangulationError::InvalidQuery(format!(
                "{l}-co-faces of a {}-simplex in a {}-dimensional triangulation",
                s.dim, self.d
            )));
        }
        let verts = self.chain_vertices(class, anchor);
        let top = self.vertex_coords(*verts.last().expect("non-empty"));
        // candidate anchors q satisfy top - 1 <= q <= anchor on every axis
        let lo: [usize; 3] = std::array::from_fn(|a| top[a].saturating_sub(1));
        let start = out.len();
        for k in lo[2]..=anchor[2] {
            for j in lo[1]..=anchor[1] {
                for i in lo[0]..=anchor[0] {
                    for cand in &self.classes[l] {
                        if i >= cand.extent[0] || j >= cand.extent[1] || k >= cand.extent[2] {
                            continue;
                        }
                        let cv = self.chain_vertices(cand, [i, j, k]);
                        if verts.iter().all(|v| cv.contains(v)) {
                            let [ex, ey, _] = cand.extent;
                            out.push(cand.start + i + ex * (j + ey * k));
                        }
                    }
                }
            }
        }
        out[start..].sort_unstable();
        Ok(())
    }

    fn is_boundary(&self, s: SimplexRef) -> Result<bool> {
        let verts = self.simplex_vertices(s)?;
        if s.dim < self.d {
            return Ok(self.on_common_face(&verts));
        }
        let mut any = false;
        for_each_subset(&verts, self.d, |f| any |= self.on_common_face(f));
        Ok(any)
    }

    fn vertex_neighbors_into(&self, v: usize, out: &mut Vec<usize>) -> Result<()> {
        let mut edges = Vec::new();
        self.cofaces_into(SimplexRef::vertex(v), 1, &mut edges)?;
        let start = out.len();
        for e in edges {
            let ev = self.simplex_vertices(SimplexRef::new(1, e))?;
            out.push(if ev[0] == v { ev[1] } else { ev[0] });
        }
        out[start..].sort_unstable();
        Ok(())
    }

    fn vertex_link_into(&self, v: usize, out: &mut Vec<usize>) -> Result<()> {
        let mut star = Vec::new();
        self.cofaces_into(SimplexRef::vertex(v), self.d, &mut star)?;
        let start = out.len();
        for c in star {
            let cv = self.simplex_vertices(SimplexRef::new(self.d, c))?;
            let facet: ArrayVec<usize, 4> = cv.iter().copied().filter(|&u| u != v).collect();
            out.push(self.encode(&facet).expect("link facet is a grid simplex"));
        }
        out[start..].sort_unstable();
        Ok(())
    }

    fn precondition(&mut self, _kind: Precondition) {}

    fn is_preconditioned(&self, _kind: Precondition) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_3x3_counts_and_euler() {
        let g = ImplicitGrid::new(&[3, 3]).unwrap();
        assert_eq!(g.simplex_count(0).unwrap(), 9);
        assert_eq!(g.simplex_count(1).unwrap(), 16);
        assert_eq!(g.simplex_count(2).unwrap(), 8);
        assert_eq!(g.euler_characteristic().unwrap(), 1);
    }

    #[test]
    fn grid_2x2x2_counts_and_euler() {
        let g = ImplicitGrid::new(&[2, 2, 2]).unwrap();
        assert_eq!(g.simplex_count(0).unwrap(), 8);
        assert_eq!(g.simplex_count(3).unwrap(), 6);
        assert_eq!(g.euler_characteristic().unwrap(), 1);
    }

    #[test]
    fn edge_classification_thresholds() {
        let g = ImplicitGrid::new(&[3, 3]).unwrap();
        assert_eq!(
            g.classify_edge_identifier(0).unwrap(),
            (EdgeClass::AlongX, [0, 0, 0])
        );
        assert_eq!(
            g.classify_edge_identifier(6).unwrap(),
            (EdgeClass::AlongY, [0, 0, 0])
        );
        assert_eq!(
            g.classify_edge_identifier(12).unwrap(),
            (EdgeClass::DiagonalXY, [0, 0, 0])
        );
        assert_eq!(
            g.classify_edge_identifier(5).unwrap(),
            (EdgeClass::AlongX, [1, 2, 0])
        );
        assert!(g.classify_edge_identifier(16).is_err());

        let g3 = ImplicitGrid::new(&[3, 3, 3]).unwrap();
        let mut seen = Vec::new();
        for e in 0..g3.simplex_count(1).unwrap() {
            let (c, _) = g3.classify_edge_identifier(e).unwrap();
            if seen.last() != Some(&c) {
                seen.push(c);
            }
        }
        assert_eq!(
            seen,
            vec![
                EdgeClass::AlongX,
                EdgeClass::AlongY,
                EdgeClass::AlongZ,
                EdgeClass::DiagonalXY,
                EdgeClass::DiagonalXZ,
                EdgeClass::DiagonalYZ,
                EdgeClass::Body
            ]
        );
    }

    #[test]
    fn horizontal_edge_faces() {
        let g = ImplicitGrid::new(&[3, 3]).unwrap();
        // horizontal edge anchored at (1, 0)
        assert_eq!(
            g.faces(SimplexRef::new(1, 1), 0).unwrap(),
            vec![SimplexRef::vertex(1), SimplexRef::vertex(2)]
        );
    }

    #[test]
    fn center_vertex_star_and_boundary() {
        let g = ImplicitGrid::new(&[3, 3]).unwrap();
        assert_eq!(g.cofaces(SimplexRef::vertex(4), 2).unwrap().len(), 6);
        assert!(g.is_boundary(SimplexRef::vertex(0)).unwrap());
        assert!(!g.is_boundary(SimplexRef::vertex(4)).unwrap());
    }

    #[test]
    fn encode_decode_round_trip() {
        for dims in [&[4usize, 3][..], &[3, 4, 2][..]] {
            let g = ImplicitGrid::new(dims).unwrap();
            for dim in 0..=g.dimension() {
                for id in 0..g.simplex_count(dim).unwrap() {
                    let v = g.simplex_vertices(SimplexRef::new(dim, id)).unwrap();
                    assert_eq!(g.encode(&v), Some(id));
                }
            }
        }
    }

    #[test]
    fn six_tets_per_voxel() {
        let g = ImplicitGrid::new(&[3, 4, 5]).unwrap();
        assert_eq!(g.simplex_count(3).unwrap(), 6 * 2 * 3 * 4);
        let g = ImplicitGrid::new(&[5, 7]).unwrap();
        assert_eq!(g.simplex_count(2).unwrap(), 2 * 4 * 6);
    }

    #[test]
    fn rejects_bad_dims() {
        assert!(ImplicitGrid::new(&[1, 3]).is_err());
        assert!(ImplicitGrid::new(&[3]).is_err());
        assert!(ImplicitGrid::new(&[2, 2, 2, 2]).is_err());
    }
}
