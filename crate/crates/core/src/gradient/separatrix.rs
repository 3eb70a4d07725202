use super::{saddle_connectors_3d, trace_vpaths, Direction, DiscreteGradient, VPath};
use crate::triangulation::{Result, SimplexRef, Triangulation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SeparatrixKind {
    MinSaddle,
    SaddleMax,
    SaddleSaddle,
}

impl SeparatrixKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::MinSaddle => "min-saddle",
            Self::SaddleMax => "saddle-max",
            Self::SaddleSaddle => "saddle-saddle",
        }
    }
}

/// A V-path embedded through the barycenters of its simplices.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub kind: SeparatrixKind,
    pub start: SimplexRef,
    pub end: SimplexRef,
    pub points: Vec<[f64; 3]>,
}

pub fn extract_separatrix_geometry<T: Triangulation + ?Sized>(
    t: &T,
    paths: &[VPath],
) -> Result<Vec<Polyline>> {
    let d = t.dimension();
    paths
        .iter()
        .map(|p| {
            let (a, b) = (p.start(), p.end());
            let kind = if a.dim == 0 || b.dim == 0 {
                SeparatrixKind::MinSaddle
            } else if a.dim == d || b.dim == d {
                SeparatrixKind::SaddleMax
            } else {
                SeparatrixKind::SaddleSaddle
            };
            let points = p
                .cells
                .iter()
                .map(|&c| t.barycenter(c))
                .collect::<Result<_>>()?;
            Ok(Polyline {
                kind,
                start: a,
                end: b,
                points,
            })
        })
        .collect()
}

/// Every 1-separatrix of the gradient: descending from critical edges to
/// minima, ascending from critical (d-1)-simplices to maxima, and in 3D the
/// saddle connectors. Paths start at the saddle (connectors at the edge).
pub fn one_separatrices<T: Triangulation + ?Sized>(
    t: &T,
    g: &DiscreteGradient,
) -> Result<Vec<VPath>> {
    let d = t.dimension();
    let crit = g.critical_simplices();
    let mut out = Vec::new();
    for &e in &crit[1] {
        out.extend(trace_vpaths(
            t,
            g,
            SimplexRef::new(1, e),
            Direction::Descending,
        )?);
    }
    for &s in &crit[d - 1] {
        out.extend(trace_vpaths(
            t,
            g,
            SimplexRef::new(d - 1, s),
            Direction::Ascending,
        )?);
    }
    if d == 3 {
        out.extend(saddle_connectors_3d(t, g)?);
    }
    Ok(out)
}
