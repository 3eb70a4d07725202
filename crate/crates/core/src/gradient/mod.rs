//! Discrete gradients built from a PL scalar field, their V-paths, and the
//! cancellations that make them agree with the PL critical points.

mod compliance;
mod connectors;
mod matching;
mod segmentation;
mod separatrix;
mod vpath;

pub use compliance::{
    cancel_pair, enforce_pl_compliance, Cancellation, ComplianceError, ComplianceReport,
};
pub use connectors::{descending_wall, saddle_connectors_3d};
pub use matching::{match_pl, MatchingXi};
pub use segmentation::{morse_segmentation, SegmentationLabels};
pub use separatrix::{extract_separatrix_geometry, one_separatrices, Polyline, SeparatrixKind};
pub use vpath::{trace_vpaths, Direction, VPath};

pub(crate) use vpath::{explore, Exploration};

use rayon::prelude::*;

use crate::scalar::{OrderField, SimplexKey};
use crate::triangulation::{Result, SimplexRef, Triangulation};

const NONE: usize = usize::MAX;

/// Pairing of simplices with co-faces one dimension up. A simplex that is
/// in no pair is critical.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscreteGradient {
    dimension: usize,
    /// `up[i][s]`: the (i+1)-simplex paired with i-simplex `s`.
    up: Vec<Vec<usize>>,
    /// `down[i][s]`: the (i-1)-simplex paired with i-simplex `s`.
    down: Vec<Vec<usize>>,
}

impl DiscreteGradient {
    /// The empty field: every simplex critical.
    pub fn unpaired<T: Triangulation + ?Sized>(t: &T) -> Result<Self> {
        let d = t.dimension();
        let counts: Vec<usize> = (0..=d).map(|i| t.simplex_count(i)).collect::<Result<_>>()?;
        Ok(Self {
            dimension: d,
            up: counts.iter().map(|&n| vec![NONE; n]).collect(),
            down: counts.iter().map(|&n| vec![NONE; n]).collect(),
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn simplex_count(&self, dim: usize) -> usize {
        self.up[dim].len()
    }

    pub fn pair_up(&self, s: SimplexRef) -> Option<usize> {
        Some(self.up[s.dim][s.id]).filter(|&x| x != NONE)
    }

    pub fn pair_down(&self, s: SimplexRef) -> Option<usize> {
        Some(self.down[s.dim][s.id]).filter(|&x| x != NONE)
    }

    pub fn is_critical(&self, s: SimplexRef) -> bool {
        self.up[s.dim][s.id] == NONE && self.down[s.dim][s.id] == NONE
    }

    /// Pairs i-simplex `lower` with (i+1)-simplex `upper`.
    pub(crate) fn pair(&mut self, dim: usize, lower: usize, upper: usize) {
        debug_assert!(self.is_critical(SimplexRef::new(dim, lower)));
        debug_assert!(self.is_critical(SimplexRef::new(dim + 1, upper)));
        self.up[dim][lower] = upper;
        self.down[dim + 1][upper] = lower;
    }

    /// Removes whichever pair `s` belongs to.
    pub(crate) fn unpair(&mut self, s: SimplexRef) {
        if let Some(u) = self.pair_up(s) {
            self.down[s.dim + 1][u] = NONE;
            self.up[s.dim][s.id] = NONE;
        }
        if let Some(l) = self.pair_down(s) {
            self.up[s.dim - 1][l] = NONE;
            self.down[s.dim][s.id] = NONE;
        }
    }

    pub fn pair_count(&self) -> usize {
        self.up.iter().flatten().filter(|&&x| x != NONE).count()
    }

    /// Critical simplex ids per dimension, ascending.
    pub fn critical_simplices(&self) -> Vec<Vec<usize>> {
        (0..=self.dimension)
            .map(|dim| {
                (0..self.simplex_count(dim))
                    .filter(|&id| self.is_critical(SimplexRef::new(dim, id)))
                    .collect()
            })
            .collect()
    }

    pub fn critical_counts(&self) -> Vec<usize> {
        self.critical_simplices().iter().map(Vec::len).collect()
    }

    /// Alternating sum of critical counts; equals the Euler characteristic.
    pub fn morse_sum(&self) -> i64 {
        self.critical_counts()
            .iter()
            .enumerate()
            .map(|(i, &n)| if i % 2 == 0 { n as i64 } else { -(n as i64) })
            .sum()
    }
}

/// A critical simplex with its order key and boundary flag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriticalSimplex {
    pub simplex: SimplexRef,
    pub key: SimplexKey,
    pub boundary: bool,
}

/// Critical simplices of every dimension, sorted by dimension then id.
pub fn critical_simplices<T: Triangulation + ?Sized>(
    t: &T,
    field: &OrderField,
    g: &DiscreteGradient,
) -> Result<Vec<CriticalSimplex>> {
    let mut out = Vec::new();
    for (dim, ids) in g.critical_simplices().into_iter().enumerate() {
        for id in ids {
            let simplex = SimplexRef::new(dim, id);
            out.push(CriticalSimplex {
                simplex,
                key: field.simplex_key(&t.simplex_vertices(simplex)?),
                boundary: t.is_boundary(simplex)?,
            });
        }
    }
    Ok(out)
}

pub(crate) fn key_of<T: Triangulation + ?Sized>(
    t: &T,
    field: &OrderField,
    s: SimplexRef,
) -> Result<SimplexKey> {
    Ok(field.simplex_key(&t.simplex_vertices(s)?))
}

/// Initial gradient: dimension by dimension, every simplex not yet paired
/// from below is paired with the lowest co-face of which it is the highest
/// facet, when one exists.
pub fn build_gradient<T: Triangulation + ?Sized>(
    t: &T,
    field: &OrderField,
) -> Result<DiscreteGradient> {
    let mut g = DiscreteGradient::unpaired(t)?;
    for dim in 0..t.dimension() {
        let g_ref = &g;
        let choices: Vec<usize> = (0..g.simplex_count(dim))
            .into_par_iter()
            .map(|id| {
                let s = SimplexRef::new(dim, id);
                if g_ref.pair_down(s).is_some() {
                    return Ok(NONE);
                }
                best_coface(t, field, s)
            })
            .collect::<Result<_>>()?;
        for (id, upper) in choices.into_iter().enumerate() {
            if upper != NONE {
                g.pair(dim, id, upper);
            }
        }
    }
    Ok(g)
}

/// Gradient, matching and cancellation report of the full pipeline:
/// initial gradient, PL matching, then cancellation of the residue.
#[derive(Debug, Clone)]
pub struct PlGradient {
    pub gradient: DiscreteGradient,
    pub matching: MatchingXi,
    pub report: ComplianceReport,
}

pub fn pl_compliant_gradient<T: Triangulation + ?Sized>(
    t: &T,
    field: &OrderField,
) -> std::result::Result<PlGradient, ComplianceError> {
    let mut gradient = build_gradient(t, field)?;
    let pl = crate::scalar::extract_critical_points(t, field)?;
    let mut matching = match_pl(t, field, &gradient, &pl)?;
    let report = enforce_pl_compliance(t, field, &mut gradient, &mut matching)?;
    Ok(PlGradient {
        gradient,
        matching,
        report,
    })
}

fn best_coface<T: Triangulation + ?Sized>(
    t: &T,
    field: &OrderField,
    s: SimplexRef,
) -> Result<usize> {
    let verts = t.simplex_vertices(s)?;
    let lowest = verts
        .iter()
        .map(|&v| field.rank(v))
        .min()
        .expect("non-empty simplex");
    let mut cofaces = Vec::new();
    t.cofaces_into(s, s.dim + 1, &mut cofaces)?;
    let mut best: Option<(SimplexKey, usize)> = None;
    for c in cofaces {
        let cv = t.simplex_vertices(SimplexRef::new(s.dim + 1, c))?;
        let extra = cv
            .iter()
            .copied()
            .find(|v| !verts.contains(v))
            .expect("co-face adds a vertex");
        if field.rank(extra) > lowest {
            continue;
        }
        let key = field.simplex_key(&cv);
        if best.as_ref().is_none_or(|(k, _)| key < *k) {
            best = Some((key, c));
        }
    }
    Ok(best.map_or(NONE, |(_, c)| c))
}

/// Searches every layer for a closed V-path. Returns the layer's lower
/// dimension and the cycle's lower simplices when one exists.
pub fn find_cycle<T: Triangulation + ?Sized>(
    t: &T,
    g: &DiscreteGradient,
) -> Result<Option<(usize, Vec<usize>)>> {
    for dim in 0..t.dimension() {
        let n = g.simplex_count(dim);
        // 0 = unseen, 1 = on stack, 2 = done
        let mut state = vec![0u8; n];
        let mut faces = Vec::new();
        for start in 0..n {
            if state[start] != 0 {
                continue;
            }
            let mut stack: Vec<(usize, Vec<usize>, usize)> = Vec::new();
            let successors = |s: usize, faces: &mut Vec<usize>| -> Result<Vec<usize>> {
                let Some(upper) = g.pair_up(SimplexRef::new(dim, s)) else {
                    return Ok(Vec::new());
                };
                faces.clear();
                t.faces_into(SimplexRef::new(dim + 1, upper), dim, faces)?;
                Ok(faces.iter().copied().filter(|&f| f != s).collect())
            };
            state[start] = 1;
            stack.push((start, successors(start, &mut faces)?, 0));
            while let Some(top) = stack.last_mut() {
                if top.2 < top.1.len() {
                    let next = top.1[top.2];
                    top.2 += 1;
                    match state[next] {
                        0 => {
                            state[next] = 1;
                            let succ = successors(next, &mut faces)?;
                            stack.push((next, succ, 0));
                        }
                        1 => {
                            let pos = stack.iter().position(|e| e.0 == next).expect("on stack");
                            return Ok(Some((dim, stack[pos..].iter().map(|e| e.0).collect())));
                        }
                        _ => {}
                    }
                } else {
                    state[top.0] = 2;
                    stack.pop();
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{octahedron, subdivided_octahedron};
    use crate::triangulation::{ExplicitTriangulation, ImplicitGrid};

    fn find(t: &impl Triangulation, dim: usize, verts: &[usize]) -> usize {
        (0..t.simplex_count(dim).unwrap())
            .find(|&id| {
                t.simplex_vertices(SimplexRef::new(dim, id))
                    .unwrap()
                    .as_slice()
                    == verts
            })
            .unwrap()
    }

    #[test]
    fn single_triangle_pairs() {
        let mut t = ExplicitTriangulation::new(vec![[0.0; 3]; 3], [[0usize, 1, 2]]).unwrap();
        t.precondition_all();
        // a = 0 < b = 1 < c = 2
        let f = OrderField::from_values(vec![0.0, 1.0, 2.0]).unwrap();
        let g = build_gradient(&t, &f).unwrap();
        let ab = find(&t, 1, &[0, 1]);
        let ac = find(&t, 1, &[0, 2]);
        let bc = find(&t, 1, &[1, 2]);
        assert_eq!(g.pair_up(SimplexRef::vertex(1)), Some(ab));
        assert_eq!(g.pair_up(SimplexRef::vertex(2)), Some(ac));
        assert_eq!(g.pair_up(SimplexRef::new(1, bc)), Some(0));
        assert_eq!(g.critical_simplices(), vec![vec![0], vec![], vec![]]);
        assert_eq!(g.pair_count(), 3);
    }

    #[test]
    fn monotone_octahedron_has_two_critical_simplices() {
        let mut t = octahedron();
        t.precondition_all();
        let f = OrderField::from_values((0..6).map(f64::from).collect()).unwrap();
        let g = build_gradient(&t, &f).unwrap();
        let crit = g.critical_simplices();
        assert_eq!(crit[0], vec![0]);
        assert!(crit[1].is_empty());
        assert_eq!(crit[2].len(), 1);
        let tri = t.simplex_vertices(SimplexRef::new(2, crit[2][0])).unwrap();
        assert!(tri.contains(&5));
        assert_eq!(g.morse_sum(), 2);
        assert!(find_cycle(&t, &g).unwrap().is_none());
    }

    #[test]
    fn pairing_partitions_simplices() {
        let mut t = subdivided_octahedron(2);
        t.precondition_all();
        let values: Vec<f64> = (0..t.vertex_count())
            .map(|v| ((v * 37) % 23) as f64)
            .collect();
        let f = OrderField::from_values(values).unwrap();
        let g = build_gradient(&t, &f).unwrap();
        let total: usize = (0..=2).map(|d| t.simplex_count(d).unwrap()).sum();
        let critical: usize = g.critical_counts().iter().sum();
        assert_eq!(2 * g.pair_count() + critical, total);
        assert_eq!(g.morse_sum(), 2);
        assert!(find_cycle(&t, &g).unwrap().is_none());
    }

    #[test]
    fn grid_gradient_is_acyclic() {
        let t = ImplicitGrid::new(&[4, 3, 3]).unwrap();
        let values: Vec<f64> = (0..t.vertex_count())
            .map(|v| ((v * 29) % 17) as f64)
            .collect();
        let f = OrderField::from_values(values).unwrap();
        let g = build_gradient(&t, &f).unwrap();
        assert_eq!(g.morse_sum(), 1);
        assert!(find_cycle(&t, &g).unwrap().is_none());
    }

    #[test]
    fn cycle_detection_finds_planted_loop() {
        // Pairs forming the closed path v0 -> e01 -> v1 -> e12 -> v2 -> e20 -> v0.
        let mut t = ExplicitTriangulation::new(vec![[0.0; 3]; 3], [[0usize, 1, 2]]).unwrap();
        t.precondition_all();
        let mut g = DiscreteGradient::unpaired(&t).unwrap();
        g.pair(0, 0, find(&t, 1, &[0, 1]));
        g.pair(0, 1, find(&t, 1, &[1, 2]));
        g.pair(0, 2, find(&t, 1, &[0, 2]));
        let (dim, cycle) = find_cycle(&t, &g).unwrap().unwrap();
        assert_eq!(dim, 0);
        assert_eq!(cycle.len(), 3);
    }
}
