use std::collections::HashMap;

use super::DiscreteGradient;
use crate::scalar::OrderField;
use crate::triangulation::{Result, SimplexRef, Triangulation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    /// From a critical i-simplex through its co-faces, toward higher values.
    Ascending,
    /// From a critical i-simplex through its faces, toward lower values.
    Descending,
}

/// Alternating sequence of i- and (i+1)-simplices between two critical
/// simplices. Consecutive interior simplices are gradient pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VPath {
    pub cells: Vec<SimplexRef>,
}

impl VPath {
    pub fn start(&self) -> SimplexRef {
        self.cells[0]
    }

    pub fn end(&self) -> SimplexRef {
        *self.cells.last().expect("non-empty path")
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// |f(end) - f(start)|, each simplex valued at its highest vertex.
    pub fn weight<T: Triangulation + ?Sized>(&self, t: &T, field: &OrderField) -> Result<f64> {
        let a = field.simplex_value(&t.simplex_vertices(self.start())?);
        let b = field.simplex_value(&t.simplex_vertices(self.end())?);
        Ok((b - a).abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Step {
    /// The crossed simplex is paired; the walk continues at this node.
    Next(usize),
    /// The crossed simplex is critical and ends the path.
    Critical,
    Dead,
}

/// Every V-path leaving one critical simplex inside the layer of
/// dimensions (`lower`, `lower + 1`), organised as a DAG.
///
/// Nodes are `lower`-simplices when ascending and `(lower + 1)`-simplices
/// when descending; the simplex crossed between two nodes is the "via".
pub(crate) struct Exploration {
    pub lower: usize,
    pub direction: Direction,
    pub source: usize,
    /// Reached critical simplices with their number of distinct paths.
    pub targets: Vec<(usize, u64)>,
    /// Every simplex inspected, nodes and vias alike.
    pub visited: Vec<SimplexRef>,
    edges: HashMap<usize, Vec<(usize, Step)>>,
    parent: HashMap<usize, (usize, usize)>,
    target_parent: HashMap<usize, (usize, usize)>,
}

impl Exploration {
    fn node_dim(&self) -> usize {
        match self.direction {
            Direction::Ascending => self.lower,
            Direction::Descending => self.lower + 1,
        }
    }

    fn via_dim(&self) -> usize {
        match self.direction {
            Direction::Ascending => self.lower + 1,
            Direction::Descending => self.lower,
        }
    }

    /// Node simplices reached, ascending.
    pub fn nodes(&self) -> Vec<usize> {
        let mut n: Vec<usize> = self.edges.keys().copied().collect();
        n.sort_unstable();
        n
    }

    /// One V-path from the source to `target`.
    pub fn path_to(&self, target: usize) -> Option<VPath> {
        let &(mut node, via) = self.target_parent.get(&target)?;
        let (nd, vd) = (self.node_dim(), self.via_dim());
        let mut rev = vec![SimplexRef::new(vd, via), SimplexRef::new(nd, node)];
        while node != self.source {
            let (prev, via) = self.parent[&node];
            rev.push(SimplexRef::new(vd, via));
            rev.push(SimplexRef::new(nd, prev));
            node = prev;
        }
        rev.reverse();
        Some(VPath { cells: rev })
    }

    /// All V-paths from the source ending at a critical simplex.
    pub fn all_paths(&self) -> Vec<VPath> {
        let (nd, vd) = (self.node_dim(), self.via_dim());
        let mut out = Vec::new();
        let mut prefix = vec![SimplexRef::new(nd, self.source)];
        let mut stack: Vec<(usize, usize)> = vec![(self.source, 0)];
        while let Some(&mut (node, ref mut next)) = stack.last_mut() {
            let steps = &self.edges[&node];
            if *next == steps.len() {
                stack.pop();
                prefix.truncate(prefix.len().saturating_sub(2));
                continue;
            }
            let (via, step) = steps[*next];
            *next += 1;
            match step {
                Step::Critical => {
                    let mut cells = prefix.clone();
                    cells.push(SimplexRef::new(vd, via));
                    out.push(VPath { cells });
                }
                Step::Next(n) => {
                    prefix.push(SimplexRef::new(vd, via));
                    prefix.push(SimplexRef::new(nd, n));
                    stack.push((n, 0));
                }
                Step::Dead => {}
            }
        }
        out
    }
}

fn steps<T: Triangulation + ?Sized>(
    t: &T,
    g: &DiscreteGradient,
    lower: usize,
    direction: Direction,
    node: usize,
    buf: &mut Vec<usize>,
) -> Result<Vec<(usize, Step)>> {
    buf.clear();
    let mut out = Vec::new();
    match direction {
        Direction::Ascending => {
            let s = SimplexRef::new(lower, node);
            t.cofaces_into(s, lower + 1, buf)?;
            let own = g.pair_up(s);
            for &c in buf.iter() {
                if Some(c) == own {
                    continue;
                }
                let cs = SimplexRef::new(lower + 1, c);
                let step = if g.is_critical(cs) {
                    Step::Critical
                } else if let Some(next) = g.pair_down(cs) {
                    Step::Next(next)
                } else {
                    Step::Dead
                };
                out.push((c, step));
            }
        }
        Direction::Descending => {
            let s = SimplexRef::new(lower + 1, node);
            t.faces_into(s, lower, buf)?;
            let own = g.pair_down(s);
            for &f in buf.iter() {
                if Some(f) == own {
                    continue;
                }
                let fs = SimplexRef::new(lower, f);
                let step = if g.is_critical(fs) {
                    Step::Critical
                } else if let Some(next) = g.pair_up(fs) {
                    Step::Next(next)
                } else {
                    Step::Dead
                };
                out.push((f, step));
            }
        }
    }
    Ok(out)
}

/// Explores all V-paths from `source` in the layer (`lower`, `lower + 1`).
pub(crate) fn explore<T: Triangulation + ?Sized>(
    t: &T,
    g: &DiscreteGradient,
    lower: usize,
    direction: Direction,
    source: usize,
) -> Result<Exploration> {
    let mut buf = Vec::new();
    let mut edges: HashMap<usize, Vec<(usize, Step)>> = HashMap::new();
    // Iterative DFS producing a post-order of the reachable nodes.
    let mut post = Vec::new();
    let mut stack: Vec<(usize, usize)> = vec![(source, 0)];
    edges.insert(source, steps(t, g, lower, direction, source, &mut buf)?);
    while let Some(&mut (node, ref mut next)) = stack.last_mut() {
        let out = &edges[&node];
        if *next == out.len() {
            post.push(node);
            stack.pop();
            continue;
        }
        let step = out[*next].1;
        *next += 1;
        if let Step::Next(n) = step {
            if let std::collections::hash_map::Entry::Vacant(e) = edges.entry(n) {
                e.insert(steps(t, g, lower, direction, n, &mut buf)?);
                stack.push((n, 0));
            }
        }
    }
    let mut counts: HashMap<usize, u64> = HashMap::from([(source, 1)]);
    let mut target_counts: HashMap<usize, u64> = HashMap::new();
    let mut parent = HashMap::new();
    let mut target_parent = HashMap::new();
    for &node in post.iter().rev() {
        let c = counts.get(&node).copied().unwrap_or(0);
        for &(via, step) in &edges[&node] {
            match step {
                Step::Next(n) => {
                    let e = counts.entry(n).or_insert(0);
                    *e = e.saturating_add(c);
                    parent.entry(n).or_insert((node, via));
                }
                Step::Critical => {
                    let e = target_counts.entry(via).or_insert(0);
                    *e = e.saturating_add(c);
                    target_parent.entry(via).or_insert((node, via));
                }
                Step::Dead => {}
            }
        }
    }
    let mut targets: Vec<(usize, u64)> = target_counts.into_iter().collect();
    targets.sort_unstable();
    let (nd, vd) = match direction {
        Direction::Ascending => (lower, lower + 1),
        Direction::Descending => (lower + 1, lower),
    };
    let mut visited: Vec<SimplexRef> = Vec::new();
    for (&node, out) in &edges {
        visited.push(SimplexRef::new(nd, node));
        visited.extend(out.iter().map(|&(via, _)| SimplexRef::new(vd, via)));
    }
    visited.sort_unstable();
    visited.dedup();
    Ok(Exploration {
        lower,
        direction,
        source,
        targets,
        visited,
        edges,
        parent,
        target_parent,
    })
}

/// All maximal V-paths from `start` that end at a critical simplex.
/// Ascending paths use the layer above `start`, descending ones the layer
/// below it. Paths are returned in depth-first order of the co-face / face
/// lists.
pub fn trace_vpaths<T: Triangulation + ?Sized>(
    t: &T,
    g: &DiscreteGradient,
    start: SimplexRef,
    direction: Direction,
) -> Result<Vec<VPath>> {
    let lower = match direction {
        Direction::Ascending if start.dim < t.dimension() => start.dim,
        Direction::Descending if start.dim > 0 => start.dim - 1,
        _ => return Ok(Vec::new()),
    };
    Ok(explore(t, g, lower, direction, start.id)?.all_paths())
}
