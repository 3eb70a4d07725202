use super::DiscreteGradient;
use crate::triangulation::{Result, SimplexRef, Triangulation};

/// Morse complex labels: each vertex carries the critical vertex its
/// descending flow reaches, each d-cell the critical d-simplex its
/// ascending flow reaches. `None` marks flow leaving through the boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentationLabels {
    pub vertex_labels: Vec<Option<usize>>,
    pub cell_labels: Vec<Option<usize>>,
}

/// Follows the unique flow line of every simplex of dimension `dim`,
/// where `next` gives the following simplex of a non-critical one.
fn follow<F>(
    n: usize,
    is_critical: impl Fn(usize) -> bool,
    mut next: F,
) -> Result<Vec<Option<usize>>>
where
    F: FnMut(usize) -> Result<Option<usize>>,
{
    const UNKNOWN: Option<Option<usize>> = None;
    let mut label = vec![UNKNOWN; n];
    let mut chain = Vec::new();
    for start in 0..n {
        let mut s = start;
        let result = loop {
            if let Some(l) = label[s] {
                break l;
            }
            chain.push(s);
            if is_critical(s) {
                break Some(s);
            }
            match next(s)? {
                Some(x) => s = x,
                None => break None,
            }
        };
        for c in chain.drain(..) {
            label[c] = Some(result);
        }
    }
    Ok(label.into_iter().map(Option::flatten).collect())
}

pub fn morse_segmentation<T: Triangulation + ?Sized>(
    t: &T,
    g: &DiscreteGradient,
) -> Result<SegmentationLabels> {
    let d = t.dimension();
    let vertex_labels = follow(
        t.vertex_count(),
        |v| g.is_critical(SimplexRef::vertex(v)),
        |v| {
            let e = g
                .pair_up(SimplexRef::vertex(v))
                .expect("regular vertex is paired up");
            let ends = t.simplex_vertices(SimplexRef::new(1, e))?;
            Ok(Some(if ends[0] == v { ends[1] } else { ends[0] }))
        },
    )?;
    let mut cofaces = Vec::new();
    let cell_labels = follow(
        t.simplex_count(d)?,
        |c| g.is_critical(SimplexRef::new(d, c)),
        |c| {
            let facet = g
                .pair_down(SimplexRef::new(d, c))
                .expect("regular cell is paired down");
            cofaces.clear();
            t.cofaces_into(SimplexRef::new(d - 1, facet), d, &mut cofaces)?;
            Ok(cofaces.iter().copied().find(|&o| o != c))
        },
    )?;
    Ok(SegmentationLabels {
        vertex_labels,
        cell_labels,
    })
}
