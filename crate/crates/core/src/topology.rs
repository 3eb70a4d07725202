//! Global topological invariants of a triangulation over Z/2.

use crate::triangulation::{Result, SimplexRef, Triangulation};
use crate::union_find::UnionFind;

/// Number of connected components of the 1-skeleton.
pub fn component_count<T: Triangulation + ?Sized>(t: &T) -> Result<usize> {
    let n = t.vertex_count();
    let mut uf = UnionFind::new(n);
    for e in 0..t.simplex_count(1)? {
        let vs = t.simplex_vertices(SimplexRef::new(1, e))?;
        uf.union(vs[0], vs[1]);
    }
    let mut roots: Vec<usize> = (0..n).map(|v| uf.find(v)).collect();
    roots.sort_unstable();
    roots.dedup();
    Ok(roots.len())
}

/// Rank over Z/2 of the boundary map from triangles to edges.
fn boundary_rank_2<T: Triangulation + ?Sized>(t: &T) -> Result<usize> {
    let edge_count = t.simplex_count(1)?;
    // pivot[e] = reduced column whose lowest entry is edge e
    let mut pivot: Vec<Option<Vec<usize>>> = vec![None; edge_count];
    let mut rank = 0;
    let mut column = Vec::new();
    for tri in 0..t.simplex_count(2)? {
        column.clear();
        t.faces_into(SimplexRef::new(2, tri), 1, &mut column)?;
        column.sort_unstable();
        while let Some(&low) = column.last() {
            match &pivot[low] {
                Some(other) => column = symmetric_difference(&column, other),
                None => {
                    pivot[low] = Some(column.clone());
                    rank += 1;
                    break;
                }
            }
        }
    }
    Ok(rank)
}

fn symmetric_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// First Betti number over Z/2.
pub fn first_betti_number<T: Triangulation + ?Sized>(t: &T) -> Result<usize> {
    let v = t.vertex_count();
    let e = t.simplex_count(1)?;
    let rank_1 = v - component_count(t)?;
    Ok(e - rank_1 - boundary_rank_2(t)?)
}

/// Whether the domain is connected with no 1-cycles. Surfaces are decided
/// from the Euler characteristic, volumes by an exact rank computation.
pub fn is_simply_connected<T: Triangulation + ?Sized>(t: &T) -> Result<bool> {
    if component_count(t)? != 1 {
        return Ok(false);
    }
    if t.dimension() == 2 {
        let chi = t.euler_characteristic()?;
        return Ok(if t.is_closed()? { chi == 2 } else { chi == 1 });
    }
    Ok(first_betti_number(t)? == 0)
}
