use super::{explore, Direction, DiscreteGradient, VPath};
use crate::triangulation::{Result, Triangulation, TriangulationError};

fn require_3d<T: Triangulation + ?Sized>(t: &T) -> Result<()> {
    if t.dimension() != 3 {
        return Err(TriangulationError::InvalidQuery(
            "saddle connectors need a 3-dimensional triangulation".into(),
        ));
    }
    Ok(())
}

/// Triangles of the descending wall of critical triangle `saddle`: those
/// reached by breadth of edge-triangle pairs below it, the saddle included.
pub fn descending_wall<T: Triangulation + ?Sized>(
    t: &T,
    g: &DiscreteGradient,
    saddle: usize,
) -> Result<Vec<usize>> {
    require_3d(t)?;
    Ok(explore(t, g, 1, Direction::Descending, saddle)?.nodes())
}

/// V-paths linking critical edges to critical triangles, found inside the
/// descending wall of each critical triangle. Each path starts at the edge
/// and ends at the triangle; triangles are visited in ascending id order.
pub fn saddle_connectors_3d<T: Triangulation + ?Sized>(
    t: &T,
    g: &DiscreteGradient,
) -> Result<Vec<VPath>> {
    require_3d(t)?;
    let mut out = Vec::new();
    for saddle in g.critical_simplices()[2].iter().copied() {
        for mut path in explore(t, g, 1, Direction::Descending, saddle)?.all_paths() {
            path.cells.reverse();
            out.push(path);
        }
    }
    Ok(out)
}
