use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use super::{explore, Direction, DiscreteGradient, Exploration, MatchingXi, VPath};
use crate::scalar::OrderField;
use crate::triangulation::{SimplexRef, Triangulation, TriangulationError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ComplianceError {
    #[error(transparent)]
    Triangulation(#[from] TriangulationError),
    #[error("path endpoints {0} and {1} are not both critical")]
    InvalidPath(SimplexRef, SimplexRef),
    #[error("{} unmatched critical simplices could not be cancelled on a closed domain", .0.len())]
    StuckResidue(Vec<SimplexRef>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cancellation {
    pub source: SimplexRef,
    pub target: SimplexRef,
    pub weight: f64,
    pub path_length: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ComplianceReport {
    pub cancellations: Vec<Cancellation>,
    /// Unmatched interior critical simplices still present at the end.
    pub residue: Vec<SimplexRef>,
}

/// Reverses the gradient along `path`, making both endpoints regular.
/// The caller is responsible for `path` being the only V-path between them.
pub fn cancel_pair(g: &mut DiscreteGradient, path: &VPath) -> Result<(), ComplianceError> {
    let (a, b) = (path.start(), path.end());
    if !path.len().is_multiple_of(2) || !g.is_critical(a) || !g.is_critical(b) {
        return Err(ComplianceError::InvalidPath(a, b));
    }
    for &c in &path.cells {
        g.unpair(c);
    }
    for chunk in path.cells.chunks(2) {
        let (lo, hi) = if chunk[0].dim < chunk[1].dim {
            (chunk[0], chunk[1])
        } else {
            (chunk[1], chunk[0])
        };
        g.pair(lo.dim, lo.id, hi.id);
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Weight(f64);

impl Eq for Weight {}

impl PartialOrd for Weight {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Weight {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Arcs of one cancellation graph, kept in sync with the gradient.
struct ArcGraph {
    lower: usize,
    direction: Direction,
    traces: HashMap<usize, Exploration>,
    /// Sources whose exploration inspected a given simplex.
    touched: HashMap<SimplexRef, Vec<usize>>,
    candidates: BTreeSet<(Weight, usize, usize)>,
    arcs: HashMap<usize, Vec<(Weight, usize, usize)>>,
}

impl ArcGraph {
    fn source_dim(&self) -> usize {
        match self.direction {
            Direction::Ascending => self.lower,
            Direction::Descending => self.lower + 1,
        }
    }

    fn target_dim(&self) -> usize {
        match self.direction {
            Direction::Ascending => self.lower + 1,
            Direction::Descending => self.lower,
        }
    }

    fn forget(&mut self, source: usize) {
        if let Some(old) = self.traces.remove(&source) {
            for c in &old.visited {
                if let Some(list) = self.touched.get_mut(c) {
                    list.retain(|&s| s != source);
                }
            }
        }
        for arc in self.arcs.remove(&source).unwrap_or_default() {
            self.candidates.remove(&arc);
        }
    }

    fn trace<T: Triangulation + ?Sized>(
        &mut self,
        t: &T,
        field: &OrderField,
        g: &DiscreteGradient,
        source: usize,
    ) -> Result<(), TriangulationError> {
        let (sd, td) = (self.source_dim(), self.target_dim());
        let ex = explore(t, g, self.lower, self.direction, source)?;
        let fs = field.simplex_value(&t.simplex_vertices(SimplexRef::new(sd, source))?);
        let mut arcs = Vec::new();
        for &(target, count) in &ex.targets {
            let ts = SimplexRef::new(td, target);
            if count == 1 {
                let ft = field.simplex_value(&t.simplex_vertices(ts)?);
                arcs.push((Weight((ft - fs).abs()), source, target));
            }
        }
        self.candidates.extend(arcs.iter().copied());
        self.arcs.insert(source, arcs);
        for &c in &ex.visited {
            self.touched.entry(c).or_default().push(source);
        }
        self.traces.insert(source, ex);
        Ok(())
    }
}

fn cancel_layer<T: Triangulation + ?Sized>(
    t: &T,
    field: &OrderField,
    g: &mut DiscreteGradient,
    xi: &mut MatchingXi,
    lower: usize,
    direction: Direction,
    report: &mut ComplianceReport,
) -> Result<(), ComplianceError> {
    let mut graph = ArcGraph {
        lower,
        direction,
        traces: HashMap::new(),
        touched: HashMap::new(),
        candidates: BTreeSet::new(),
        arcs: HashMap::new(),
    };
    let (sd, td) = (graph.source_dim(), graph.target_dim());
    if !xi.residue.iter().any(|s| s.dim == sd) || !xi.residue.iter().any(|s| s.dim == td) {
        return Ok(());
    }
    for source in g.critical_simplices()[sd].clone() {
        graph.trace(t, field, g, source)?;
    }
    while xi.residue.iter().any(|s| s.dim == sd) && xi.residue.iter().any(|s| s.dim == td) {
        let mut chosen = None;
        for &(Weight(weight), source, target) in &graph.candidates {
            let (s, tg) = (SimplexRef::new(sd, source), SimplexRef::new(td, target));
            if let (Some(a), Some(b)) = (removal(t, g, xi, s)?, removal(t, g, xi, tg)?) {
                chosen = Some((weight, s, tg, a, b));
                break;
            }
        }
        let Some((weight, s, tg, swap_s, swap_t)) = chosen else {
            break;
        };
        for (point, old, new) in swap_s.into_iter().chain(swap_t) {
            log::debug!("PL point {point} trades {old} for {new}");
            xi.swap(point, old, new);
        }
        let (source, target) = (s.id, tg.id);
        let path = graph.traces[&source]
            .path_to(target)
            .expect("candidate arc has a path");
        cancel_pair(g, &path)?;
        xi.remove_from_residue(s);
        xi.remove_from_residue(tg);
        log::trace!(
            "cancelled {s} with {tg} (weight {weight}, {} cells)",
            path.len()
        );
        report.cancellations.push(Cancellation {
            source: s,
            target: tg,
            weight,
            path_length: path.len(),
        });
        let mut affected: BTreeSet<usize> = BTreeSet::from([source]);
        for c in &path.cells {
            if let Some(list) = graph.touched.get(c) {
                affected.extend(list.iter().copied());
            }
        }
        for &a in &affected {
            graph.forget(a);
        }
        for a in affected {
            if g.is_critical(SimplexRef::new(sd, a)) {
                graph.trace(t, field, g, a)?;
            }
        }
    }
    Ok(())
}

/// Reassignments `(point, given up, taken)` that free a matched simplex,
/// applied in order.
type SwapChain = Vec<(usize, SimplexRef, SimplexRef)>;

/// How `s` can be made regular while every PL point keeps a match: empty
/// when `s` is unmatched, otherwise the shortest chain of reassignments
/// ending at an unmatched simplex (an augmenting path of the matching).
fn removal<T: Triangulation + ?Sized>(
    t: &T,
    g: &DiscreteGradient,
    xi: &MatchingXi,
    s: SimplexRef,
) -> Result<Option<SwapChain>, TriangulationError> {
    if xi.in_residue(s) {
        return Ok(Some(Vec::new()));
    }
    let Some(first) = xi.owner(s) else {
        return Ok(None);
    };
    // Breadth-first over simplices: each reached simplex records the point
    // that would take it and the simplex that point gives up.
    let mut came_from: HashMap<SimplexRef, (usize, SimplexRef)> = HashMap::new();
    let mut queue = std::collections::VecDeque::from([(first, s)]);
    let mut seen_points = BTreeSet::from([first]);
    let mut star = Vec::new();
    while let Some((point, giving)) = queue.pop_front() {
        star.clear();
        t.cofaces_into(SimplexRef::vertex(point), s.dim, &mut star)?;
        for &id in &star {
            let r = SimplexRef::new(s.dim, id);
            if r == s || came_from.contains_key(&r) || !g.is_critical(r) {
                continue;
            }
            if xi.in_residue(r) {
                let mut chain = vec![(point, giving, r)];
                let mut cur = giving;
                while cur != s {
                    let (p, prev) = came_from[&cur];
                    chain.push((p, prev, cur));
                    cur = prev;
                }
                // Built from the unmatched end, which is also the order of
                // application: each simplex is free when it is taken.
                return Ok(Some(chain));
            }
            if let Some(owner) = xi.owner(r) {
                came_from.insert(r, (point, giving));
                if seen_points.insert(owner) {
                    queue.push_back((owner, r));
                }
            }
        }
    }
    Ok(None)
}

/// Cancels unmatched critical simplices in pairs until every remaining
/// interior critical simplex is matched to a PL critical point: first
/// (d-1, d) pairs along ascending V-paths, then in 3D (1, 2) pairs along
/// descending V-paths from critical triangles. Arcs are taken by increasing
/// function difference and only when their V-path is unique.
///
/// An arc endpoint qualifies when it is unmatched, or when the matching can
/// be rearranged (along an augmenting path) so that it becomes unmatched
/// while every PL point keeps its critical simplices.
///
/// On a closed domain any residue left at the end is an error.
pub fn enforce_pl_compliance<T: Triangulation + ?Sized>(
    t: &T,
    field: &OrderField,
    g: &mut DiscreteGradient,
    xi: &mut MatchingXi,
) -> Result<ComplianceReport, ComplianceError> {
    let d = t.dimension();
    let mut report = ComplianceReport::default();
    cancel_layer(t, field, g, xi, d - 1, Direction::Ascending, &mut report)?;
    if d == 3 {
        cancel_layer(t, field, g, xi, 1, Direction::Descending, &mut report)?;
    }
    report.residue = xi.residue.clone();
    if !report.residue.is_empty() && t.is_closed()? {
        return Err(ComplianceError::StuckResidue(report.residue));
    }
    Ok(report)
}
