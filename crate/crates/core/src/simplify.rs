//! Removal of low-persistence extrema by editing the field itself.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use thiserror::Error;

use crate::scalar::{extract_critical_points, FieldError, OrderField};
use crate::trees::{PairClass, PersistenceDiagram};
use crate::triangulation::{Triangulation, TriangulationError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimplifyError {
    #[error(transparent)]
    Triangulation(#[from] TriangulationError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("the preserved set needs at least one minimum and one maximum")]
    MissingExtremum,
    #[error("vertex {0} is not an extremum of the input field")]
    NotAnExtremum(usize),
    #[error(
        "{0} saddle-saddle pairs have persistence below the threshold; removing them is homological \
         simplification, which is NP-hard in 3D and not supported"
    )]
    SaddlePairsBelowThreshold(usize),
    #[error("extrema still differ from the preserved set after {0} rounds")]
    NoConvergence(usize),
}

/// Extrema to keep; every other extremum is removed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplificationRequest {
    pub preserved: BTreeSet<usize>,
}

impl SimplificationRequest {
    pub fn new(preserved: impl IntoIterator<Item = usize>) -> Self {
        SimplificationRequest {
            preserved: preserved.into_iter().collect(),
        }
    }
}

/// Keeps both essential endpoints and the extrema of every extremum pair
/// with persistence at least `tau`.
pub fn select_by_persistence(
    d: &PersistenceDiagram,
    tau: f64,
) -> Result<SimplificationRequest, SimplifyError> {
    let below = d
        .of_class(PairClass::SaddleSaddle)
        .filter(|p| p.persistence() < tau)
        .count();
    if below > 0 {
        return Err(SimplifyError::SaddlePairsBelowThreshold(below));
    }
    let mut preserved = BTreeSet::new();
    for p in &d.pairs {
        match p.class {
            PairClass::Essential => {
                preserved.insert(p.birth_vertex);
                preserved.insert(p.death_vertex);
            }
            PairClass::MinSaddle if p.persistence() >= tau => {
                preserved.insert(p.birth_vertex);
            }
            PairClass::SaddleMax if p.persistence() >= tau => {
                preserved.insert(p.death_vertex);
            }
            _ => {}
        }
    }
    Ok(SimplificationRequest { preserved })
}

fn extrema<T: Triangulation + ?Sized>(
    t: &T,
    field: &OrderField,
) -> Result<(BTreeSet<usize>, BTreeSet<usize>), SimplifyError> {
    let d = t.dimension();
    let mut minima = BTreeSet::new();
    let mut maxima = BTreeSet::new();
    for p in extract_critical_points(t, field)? {
        if p.index == 0 {
            minima.insert(p.vertex);
        } else if p.index == d {
            maxima.insert(p.vertex);
        }
    }
    Ok((minima, maxima))
}

/// Grows the sub-level set from `seeds` in field order. Each vertex is
/// settled after a settled neighbour, so only seeds stay minima; a vertex
/// reached below the current level is raised to it. With `upward` false
/// the same is done on the negated field.
fn flood<T: Triangulation + ?Sized>(
    t: &T,
    field: &OrderField,
    seeds: &BTreeSet<usize>,
    upward: bool,
) -> Result<OrderField, SimplifyError> {
    let n = field.len();
    let key = |v: usize| -> i64 {
        let r = i64::from(field.rank(v));
        if upward {
            r
        } else {
            -r
        }
    };
    let mut settled = vec![false; n];
    let mut queued = vec![false; n];
    let mut heap = BinaryHeap::new();
    for &s in seeds {
        heap.push(Reverse((key(s), s)));
        queued[s] = true;
    }
    let mut sequence = Vec::with_capacity(n);
    let mut values = field.values().to_vec();
    let mut level: Option<f64> = None;
    let mut neighbors = Vec::new();
    while let Some(Reverse((_, v))) = heap.pop() {
        settled[v] = true;
        let value = field.value(v);
        let lifted = match level {
            Some(l) if upward && value < l => l,
            Some(l) if !upward && value > l => l,
            _ => value,
        };
        values[v] = lifted;
        level = Some(lifted);
        sequence.push(v);
        neighbors.clear();
        t.vertex_neighbors_into(v, &mut neighbors)?;
        for &u in &neighbors {
            if !queued[u] {
                queued[u] = true;
                heap.push(Reverse((key(u), u)));
            }
        }
    }
    // Components without a seed keep their relative order after the rest.
    let rest: Vec<usize> = if upward {
        field.sorted_vertices().to_vec()
    } else {
        field.sorted_vertices().iter().rev().copied().collect()
    };
    sequence.extend(rest.into_iter().filter(|&v| !settled[v]));
    let mut offsets = vec![0i64; n];
    for (i, &v) in sequence.iter().enumerate() {
        offsets[v] = if upward { i as i64 } else { (n - 1 - i) as i64 };
    }
    Ok(OrderField::new(values, offsets)?)
}

/// Edits the field so that its extrema are exactly the preserved ones, by
/// alternately flooding from the preserved minima and from the preserved
/// maxima until the classification settles.
pub fn simplify_field<T: Triangulation + ?Sized>(
    t: &T,
    field: &OrderField,
    req: &SimplificationRequest,
) -> Result<OrderField, SimplifyError> {
    let (minima, maxima) = extrema(t, field)?;
    let keep_min: BTreeSet<usize> = req.preserved.intersection(&minima).copied().collect();
    let keep_max: BTreeSet<usize> = req.preserved.intersection(&maxima).copied().collect();
    if let Some(&v) = req
        .preserved
        .iter()
        .find(|v| !minima.contains(v) && !maxima.contains(v))
    {
        return Err(SimplifyError::NotAnExtremum(v));
    }
    if keep_min.is_empty() || keep_max.is_empty() {
        return Err(SimplifyError::MissingExtremum);
    }
    let mut current = field.clone();
    let (mut mins, mut maxs) = (minima, maxima);
    let rounds = 2 * (mins.len() + maxs.len()) + 4;
    for round in 0..rounds {
        if mins == keep_min && maxs == keep_max {
            log::debug!("simplification settled after {round} rounds");
            return Ok(current);
        }
        if mins != keep_min {
            current = flood(t, &current, &keep_min, true)?;
            (mins, maxs) = extrema(t, &current)?;
        }
        if maxs != keep_max {
            current = flood(t, &current, &keep_max, false)?;
            (mins, maxs) = extrema(t, &current)?;
        }
    }
    if mins == keep_min && maxs == keep_max {
        return Ok(current);
    }
    Err(SimplifyError::NoConvergence(rounds))
}
