use std::cmp::Ordering;
use std::collections::HashMap;

use super::merge::{build_merge_tree, TreeKind};
use super::TreeError;
use crate::gradient::{build_gradient, explore, key_of, Direction, DiscreteGradient};
use crate::scalar::{OrderField, SimplexKey};
use crate::triangulation::{SimplexRef, Triangulation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PairClass {
    MinSaddle,
    SaddleSaddle,
    SaddleMax,
    Essential,
}

impl PairClass {
    /// CSV label, by critical indices; `dimension` fixes the saddle-max one.
    pub fn label(self, dimension: usize) -> String {
        match self {
            PairClass::MinSaddle => "0-1".to_string(),
            PairClass::SaddleSaddle => "1-2".to_string(),
            PairClass::SaddleMax => format!("{}-{}", dimension - 1, dimension),
            PairClass::Essential => "essential".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PersistencePair {
    pub birth_vertex: usize,
    pub death_vertex: usize,
    pub birth_value: f64,
    pub death_value: f64,
    pub class: PairClass,
}

impl PersistencePair {
    pub fn persistence(&self) -> f64 {
        self.death_value - self.birth_value
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceDiagram {
    pub dimension: usize,
    /// Sorted by class, then birth value, then birth vertex.
    pub pairs: Vec<PersistencePair>,
    /// Set in 3D when no gradient was supplied, so saddle-saddle pairs are
    /// absent.
    pub missing_saddle_pairs: bool,
    /// Vertices of critical triangles whose 2-cycle never dies, one per
    /// void of a closed 3D domain.
    pub unpaired_two_saddles: Vec<usize>,
}

impl PersistenceDiagram {
    pub fn of_class(&self, class: PairClass) -> impl Iterator<Item = &PersistencePair> + '_ {
        self.pairs.iter().filter(move |p| p.class == class)
    }
}

fn make_pair(field: &OrderField, birth: usize, death: usize, class: PairClass) -> PersistencePair {
    PersistencePair {
        birth_vertex: birth,
        death_vertex: death,
        birth_value: field.value(birth),
        death_value: field.value(death),
        class,
    }
}

/// Join pairs, split pairs, the essential pair and, in 3D with a gradient,
/// saddle-saddle pairs. Those are read off a lower-star gradient; a
/// gradient with pairs across lower stars is replaced by the initial one.
pub fn build_diagram<T: Triangulation + ?Sized>(
    t: &T,
    field: &OrderField,
    g: Option<&DiscreteGradient>,
) -> Result<PersistenceDiagram, TreeError> {
    let d = t.dimension();
    let (join, split) = rayon::join(
        || build_merge_tree(t, field, TreeKind::Join),
        || build_merge_tree(t, field, TreeKind::Split),
    );
    let (join, split) = (join?, split?);
    let mut pairs = Vec::new();
    for &(min, saddle) in &join.pairs {
        pairs.push(make_pair(field, min, saddle, PairClass::MinSaddle));
    }
    for &(max, saddle) in &split.pairs {
        pairs.push(make_pair(field, saddle, max, PairClass::SaddleMax));
    }
    let sorted = field.sorted_vertices();
    if let (Some(&lo), Some(&hi)) = (sorted.first(), sorted.last()) {
        if lo != hi {
            pairs.push(make_pair(field, lo, hi, PairClass::Essential));
        }
    }
    let mut missing_saddle_pairs = false;
    let mut unpaired_two_saddles = Vec::new();
    if d == 3 {
        match g {
            Some(g) => {
                let rebuilt;
                let g = if is_lower_star(t, field, g)? {
                    g
                } else {
                    log::info!("gradient pairs cross lower stars; using the initial gradient for saddle-saddle pairs");
                    rebuilt = build_gradient(t, field)?;
                    &rebuilt
                };
                let (saddle_pairs, unpaired) = saddle_saddle_pairs(t, field, g)?;
                for (e, tri) in saddle_pairs {
                    pairs.push(make_pair(field, e, tri, PairClass::SaddleSaddle));
                }
                unpaired_two_saddles = unpaired;
            }
            None => {
                log::warn!("no gradient supplied: saddle-saddle pairs omitted");
                missing_saddle_pairs = true;
            }
        }
    }
    pairs.sort_by(|a, b| {
        a.class
            .cmp(&b.class)
            .then(a.birth_value.total_cmp(&b.birth_value))
            .then(a.birth_vertex.cmp(&b.birth_vertex))
    });
    Ok(PersistenceDiagram {
        dimension: d,
        pairs,
        missing_saddle_pairs,
        unpaired_two_saddles,
    })
}

/// Whether every pair of `g` lies in the lower star of a single vertex,
/// which makes its Morse complex filtered by the field. Cancellations made
/// for PL compliance break this.
fn is_lower_star<T: Triangulation + ?Sized>(
    t: &T,
    field: &OrderField,
    g: &DiscreteGradient,
) -> Result<bool, TreeError> {
    for dim in 0..t.dimension() {
        for id in 0..g.simplex_count(dim) {
            let s = SimplexRef::new(dim, id);
            if let Some(up) = g.pair_up(s) {
                let a = field.max_vertex(&t.simplex_vertices(s)?);
                let b = field.max_vertex(&t.simplex_vertices(SimplexRef::new(dim + 1, up))?);
                if a != b {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

fn symmetric_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Critical simplices of dimension `dim` with their keys, ascending.
fn keyed_critical<T: Triangulation + ?Sized>(
    t: &T,
    field: &OrderField,
    g: &DiscreteGradient,
    dim: usize,
) -> Result<Vec<(SimplexKey, usize)>, TreeError> {
    let mut out = Vec::new();
    for &id in &g.critical_simplices()[dim] {
        out.push((key_of(t, field, SimplexRef::new(dim, id))?, id));
    }
    out.sort();
    Ok(out)
}

/// Reduces the Morse boundary from critical `(lower + 1)`-simplices to
/// critical `lower`-simplices. Columns are visited in ascending order; each
/// holds the lower simplices reached by an odd number of V-paths, plus the
/// columns of earlier simplices that already claimed its highest entry.
/// Those additions are the algebraic effect of reversing the connector of
/// each earlier pairing, which keeps the caller's gradient untouched and
/// also handles connectors that are not unique. Returns each column's
/// pivot as a position in `lower_cells`.
fn reduce_layer<T: Triangulation + ?Sized>(
    t: &T,
    g: &DiscreteGradient,
    lower: usize,
    lower_cells: &[(SimplexKey, usize)],
    upper_cells: &[(SimplexKey, usize)],
) -> Result<Vec<Option<usize>>, TreeError> {
    let position: HashMap<usize, usize> = lower_cells
        .iter()
        .enumerate()
        .map(|(i, &(_, id))| (id, i))
        .collect();
    let mut columns: Vec<Vec<usize>> = Vec::with_capacity(upper_cells.len());
    let mut pivot_owner: HashMap<usize, usize> = HashMap::new();
    let mut pivots = Vec::with_capacity(upper_cells.len());
    for (col, &(_, id)) in upper_cells.iter().enumerate() {
        let ex = explore(t, g, lower, Direction::Descending, id)?;
        let mut column: Vec<usize> = ex
            .targets
            .iter()
            .filter(|&&(_, n)| n % 2 == 1)
            .map(|&(s, _)| position[&s])
            .collect();
        column.sort_unstable();
        while let Some(&low) = column.last() {
            match pivot_owner.get(&low) {
                Some(&earlier) => column = symmetric_difference(&column, &columns[earlier]),
                None => break,
            }
        }
        let pivot = column.last().copied();
        if let Some(low) = pivot {
            pivot_owner.insert(low, col);
        }
        pivots.push(pivot);
        columns.push(column);
    }
    Ok(pivots)
}

/// `(edge vertex, triangle vertex)` pairs and vertices of unpaired triangles.
type SaddleReduction = (Vec<(usize, usize)>, Vec<usize>);

/// Pairs critical triangles with critical edges by reducing the Morse
/// boundary. Returns the `(edge vertex, triangle vertex)` pairs with
/// nonzero persistence and the vertices of triangles that open a 2-cycle
/// no critical tetrahedron closes.
fn saddle_saddle_pairs<T: Triangulation + ?Sized>(
    t: &T,
    field: &OrderField,
    g: &DiscreteGradient,
) -> Result<SaddleReduction, TreeError> {
    let edges = keyed_critical(t, field, g, 1)?;
    let triangles = keyed_critical(t, field, g, 2)?;
    let tets = keyed_critical(t, field, g, 3)?;
    let vertex_of = |key: &SimplexKey| field.sorted_vertices()[key[0] as usize];

    let mut pairs = Vec::new();
    let edge_pivots = reduce_layer(t, g, 1, &edges, &triangles)?;
    for ((key, _), pivot) in triangles.iter().zip(&edge_pivots) {
        if let Some(low) = *pivot {
            let (birth, death) = (vertex_of(&edges[low].0), vertex_of(key));
            if birth != death {
                pairs.push((birth, death));
            }
        }
    }
    let mut killed = vec![false; triangles.len()];
    for low in reduce_layer(t, g, 2, &triangles, &tets)?
        .into_iter()
        .flatten()
    {
        killed[low] = true;
    }
    let unpaired = triangles
        .iter()
        .enumerate()
        .filter(|&(i, _)| edge_pivots[i].is_none() && !killed[i])
        .map(|(_, (key, _))| vertex_of(key))
        .collect();
    Ok((pairs, unpaired))
}

/// `(threshold, pairs with persistence >= threshold)` for 0 and every
/// distinct persistence.
pub fn persistence_curve(d: &PersistenceDiagram) -> Vec<(f64, usize)> {
    let mut pers: Vec<f64> = d.pairs.iter().map(PersistencePair::persistence).collect();
    pers.sort_by(f64::total_cmp);
    let mut thresholds = vec![0.0];
    for &p in &pers {
        if p > *thresholds.last().expect("nonempty") {
            thresholds.push(p);
        }
    }
    thresholds
        .into_iter()
        .map(|th| (th, pers.len() - pers.partition_point(|&p| p < th)))
        .collect()
}
