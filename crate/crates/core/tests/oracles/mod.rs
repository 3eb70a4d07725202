//! Independent reference computations shared by the integration tests and
//! the acceptance run. None of them go through the library's algorithms.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use unitopo::{ExplicitTriangulation, ImplicitGrid, OrderField, SimplexRef, Triangulation};

pub fn random_field(n: usize, rng: &mut ChaCha8Rng) -> OrderField {
    OrderField::from_values((0..n).map(|_| rng.gen::<f64>()).collect()).unwrap()
}

/// Sub-level components of the 1-skeleton, grown one vertex at a time in
/// value order; a merge kills every component but the one with the lowest
/// minimum. Values must be distinct.
pub fn union_find_oracle(t: &impl Triangulation, values: &[f64]) -> BTreeSet<(usize, usize)> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut label: Vec<Option<usize>> = vec![None; n];
    let mut pairs = BTreeSet::new();
    for &v in &order {
        let mut mins: Vec<usize> = t
            .vertex_neighbors(v)
            .unwrap()
            .into_iter()
            .filter_map(|u| label[u])
            .collect();
        mins.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        mins.dedup();
        let survivor = mins.first().copied().unwrap_or(v);
        for &m in mins.iter().skip(1) {
            pairs.insert((m, v));
        }
        for l in label.iter_mut().flatten() {
            if mins.contains(l) {
                *l = survivor;
            }
        }
        label[v] = Some(survivor);
    }
    pairs
}

/// Split pairs as `(saddle, maximum)`, from the oracle on the negation.
pub fn union_find_split_oracle(t: &impl Triangulation, values: &[f64]) -> BTreeSet<(usize, usize)> {
    let neg: Vec<f64> = values.iter().map(|x| -x).collect();
    union_find_oracle(t, &neg)
        .into_iter()
        .map(|(m, s)| (s, m))
        .collect()
}

/// Persistence of the lower-star filtration of the full simplicial complex,
/// by Z2 column reduction. Returns the (edge, triangle) pairs as vertex
/// pairs, without zero-persistence ones.
pub fn lower_star_saddle_pairs(t: &impl Triangulation, f: &OrderField) -> BTreeSet<(usize, usize)> {
    let mut cells: Vec<(Vec<u32>, SimplexRef)> = Vec::new();
    for dim in 0..=t.dimension() {
        for id in 0..t.simplex_count(dim).unwrap() {
            let s = SimplexRef::new(dim, id);
            let mut ranks: Vec<u32> = t
                .simplex_vertices(s)
                .unwrap()
                .iter()
                .map(|&v| f.rank(v))
                .collect();
            ranks.sort_unstable_by(|a, b| b.cmp(a));
            cells.push((ranks, s));
        }
    }
    // Highest vertex first, then dimension: a valid filtration order.
    cells.sort_by(|a, b| {
        a.0[0]
            .cmp(&b.0[0])
            .then(a.1.dim.cmp(&b.1.dim))
            .then(a.0.cmp(&b.0))
    });
    let index: HashMap<SimplexRef, usize> = cells
        .iter()
        .enumerate()
        .map(|(i, (_, s))| (*s, i))
        .collect();
    let mut pivots: HashMap<usize, usize> = HashMap::new();
    let mut columns: Vec<BTreeSet<usize>> = Vec::with_capacity(cells.len());
    let mut pairs = BTreeSet::new();
    for (j, (ranks, s)) in cells.iter().enumerate() {
        let mut col: BTreeSet<usize> = if s.dim == 0 {
            BTreeSet::new()
        } else {
            t.faces(*s, s.dim - 1)
                .unwrap()
                .into_iter()
                .map(|r| index[&r])
                .collect()
        };
        while let Some(&low) = col.iter().next_back() {
            match pivots.get(&low) {
                Some(&k) => col = col.symmetric_difference(&columns[k]).copied().collect(),
                None => break,
            }
        }
        if let Some(&low) = col.iter().next_back() {
            pivots.insert(low, j);
            let (birth, bs) = (&cells[low].0, cells[low].1);
            if bs.dim == 1 && birth[0] != ranks[0] {
                let v = |r: u32| f.sorted_vertices()[r as usize];
                pairs.insert((v(birth[0]), v(ranks[0])));
            }
        }
        columns.push(col);
    }
    pairs
}

fn cube_field(n: usize, rng: &mut ChaCha8Rng, f: impl Fn(f64, f64, f64) -> f64) -> OrderField {
    let mut values = Vec::new();
    for z in 0..n {
        for y in 0..n {
            for x in 0..n {
                values.push(f(x as f64, y as f64, z as f64) + 1e-3 * rng.gen::<f64>());
            }
        }
    }
    OrderField::from_values(values).unwrap()
}

/// A trough around a horizontal circle: sub-level sets form a ring before
/// the centre of the circle fills in.
pub fn ring_field(n: usize, rng: &mut ChaCha8Rng) -> OrderField {
    let c = (n as f64 - 1.0) / 2.0;
    let radius = c * 0.8;
    cube_field(n, rng, |x, y, z| {
        let r = ((x - c).powi(2) + (y - c).powi(2)).sqrt();
        (r - radius).powi(2) + (z - c).powi(2)
    })
}

/// Two interior Gaussian wells at random positions.
pub fn two_bump_field(n: usize, rng: &mut ChaCha8Rng) -> OrderField {
    let mut centre = || [0; 3].map(|_| rng.gen_range(1.0..n as f64 - 2.0));
    let (a, b) = (centre(), centre());
    let width = rng.gen_range(0.8..1.6);
    let well = move |p: [f64; 3], x: f64, y: f64, z: f64| {
        let d2 = (x - p[0]).powi(2) + (y - p[1]).powi(2) + (z - p[2]).powi(2);
        -(-d2 / (width * width)).exp()
    };
    cube_field(n, rng, move |x, y, z| {
        well(a, x, y, z) + 0.8 * well(b, x, y, z)
    })
}

type VertexSet = Vec<usize>;

fn vertex_sets(t: &impl Triangulation, dim: usize) -> Vec<VertexSet> {
    (0..t.simplex_count(dim).unwrap())
        .map(|id| {
            let mut v: Vec<usize> = t
                .simplex_vertices(SimplexRef::new(dim, id))
                .unwrap()
                .to_vec();
            v.sort_unstable();
            v
        })
        .collect()
}

/// Compares every count, face, co-face, boundary, neighbour and link query
/// of `grid` against the explicit triangulation of its emitted cells.
/// Simplices are matched by vertex set since the two number them
/// differently.
pub fn implicit_matches_explicit(grid: &ImplicitGrid) -> Result<(), String> {
    let mut ex = ExplicitTriangulation::from_implicit(grid);
    ex.precondition_all();
    let d = grid.dimension();
    if ex.dimension() != d || ex.vertex_count() != grid.vertex_count() {
        return Err("dimension or vertex count".into());
    }
    let mut imp_sets = Vec::new();
    let mut ex_sets = Vec::new();
    for dim in 0..=d {
        let (a, b) = (vertex_sets(grid, dim), vertex_sets(&ex, dim));
        let set_a: BTreeSet<&VertexSet> = a.iter().collect();
        let set_b: BTreeSet<&VertexSet> = b.iter().collect();
        if a.len() != b.len() || set_a != set_b || set_a.len() != a.len() {
            return Err(format!("{dim}-simplices differ"));
        }
        imp_sets.push(a);
        ex_sets.push(b);
    }
    let ex_id: Vec<HashMap<&VertexSet, usize>> = ex_sets
        .iter()
        .map(|sets| sets.iter().enumerate().map(|(i, s)| (s, i)).collect())
        .collect();
    let as_sets = |sets: &[VertexSet], ids: Vec<usize>| -> BTreeSet<VertexSet> {
        ids.into_iter().map(|i| sets[i].clone()).collect()
    };
    for dim in 0..=d {
        for (id, verts) in imp_sets[dim].iter().enumerate() {
            let si = SimplexRef::new(dim, id);
            let se = SimplexRef::new(dim, ex_id[dim][verts]);
            for other in 0..=d {
                let (mut a, mut b) = (Vec::new(), Vec::new());
                if other < dim {
                    grid.faces_into(si, other, &mut a).unwrap();
                    ex.faces_into(se, other, &mut b).unwrap();
                } else if other > dim {
                    grid.cofaces_into(si, other, &mut a).unwrap();
                    ex.cofaces_into(se, other, &mut b).unwrap();
                } else {
                    continue;
                }
                if a.len() != b.len() || as_sets(&imp_sets[other], a) != as_sets(&ex_sets[other], b)
                {
                    return Err(format!("{other}-neighbourhood of {verts:?}"));
                }
            }
            if dim < d && grid.is_boundary(si).unwrap() != ex.is_boundary(se).unwrap() {
                return Err(format!("boundary flag of {verts:?}"));
            }
        }
    }
    for v in 0..grid.vertex_count() {
        let mut a = grid.vertex_neighbors(v).unwrap();
        let mut b = ex.vertex_neighbors(v).unwrap();
        a.sort_unstable();
        b.sort_unstable();
        if a != b {
            return Err(format!("neighbours of vertex {v}"));
        }
        let (mut a, mut b) = (Vec::new(), Vec::new());
        grid.vertex_link_into(v, &mut a).unwrap();
        ex.vertex_link_into(v, &mut b).unwrap();
        if as_sets(&imp_sets[d - 1], a) != as_sets(&ex_sets[d - 1], b) {
            return Err(format!("link of vertex {v}"));
        }
    }
    Ok(())
}
