use std::collections::BTreeMap;

use super::{key_of, DiscreteGradient};
use crate::scalar::{OrderField, PlCriticalPoint};
use crate::triangulation::{Result, SimplexRef, Triangulation};

/// Assignment of critical simplices to the PL critical points whose star
/// they lie in.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MatchingXi {
    /// Matched simplices per PL critical point `(vertex, index)`, highest
    /// first.
    pub matched: BTreeMap<(usize, usize), Vec<SimplexRef>>,
    /// Interior critical simplices left unmatched.
    pub residue: Vec<SimplexRef>,
    /// Interior PL points that found fewer critical simplices than their
    /// multiplicity, with the number found.
    pub shortfalls: Vec<(usize, usize)>,
    owner: BTreeMap<SimplexRef, usize>,
}

// The owner of a simplex is a vertex; the point's index is the simplex's
// dimension, so `(owner, s.dim)` recovers the key of `matched`.

impl MatchingXi {
    pub fn owner(&self, s: SimplexRef) -> Option<usize> {
        self.owner.get(&s).copied()
    }

    pub fn in_residue(&self, s: SimplexRef) -> bool {
        self.residue.binary_search(&s).is_ok()
    }

    /// Hands PL point `p`'s simplex `old` back to the residue and gives `p`
    /// the residue simplex `new` instead.
    pub(crate) fn swap(&mut self, p: usize, old: SimplexRef, new: SimplexRef) {
        let list = self.matched.get_mut(&(p, old.dim)).expect("matched point");
        let slot = list.iter().position(|&s| s == old).expect("owned simplex");
        list[slot] = new;
        self.owner.remove(&old);
        self.owner.insert(new, p);
        self.remove_from_residue(new);
        let at = self.residue.binary_search(&old).unwrap_err();
        self.residue.insert(at, old);
    }

    pub(crate) fn remove_from_residue(&mut self, s: SimplexRef) {
        if let Ok(i) = self.residue.binary_search(&s) {
            self.residue.remove(i);
        }
    }
}

/// Matches every interior PL critical point of index `I` with the highest
/// critical `I`-simplices of its star (as many as its multiplicity). Points
/// are served from the highest vertex down; simplices on the boundary take
/// no part.
pub fn match_pl<T: Triangulation + ?Sized>(
    t: &T,
    field: &OrderField,
    g: &DiscreteGradient,
    pl: &[PlCriticalPoint],
) -> Result<MatchingXi> {
    let mut points: Vec<&PlCriticalPoint> = pl.iter().filter(|p| !p.boundary).collect();
    points.sort_by_key(|p| std::cmp::Reverse(field.rank(p.vertex)));
    let mut xi = MatchingXi::default();
    let mut star = Vec::new();
    for p in points {
        star.clear();
        if p.index == 0 {
            star.push(p.vertex);
        } else {
            t.cofaces_into(SimplexRef::vertex(p.vertex), p.index, &mut star)?;
        }
        let mut candidates = Vec::new();
        for &id in &star {
            let s = SimplexRef::new(p.index, id);
            if g.is_critical(s) && !xi.owner.contains_key(&s) && !t.is_boundary(s)? {
                candidates.push((key_of(t, field, s)?, s));
            }
        }
        candidates.sort_by(|a, b| b.0.cmp(&a.0));
        candidates.truncate(p.multiplicity);
        if candidates.len() < p.multiplicity {
            xi.shortfalls.push((p.vertex, candidates.len()));
        }
        let chosen: Vec<SimplexRef> = candidates.into_iter().map(|(_, s)| s).collect();
        for &s in &chosen {
            xi.owner.insert(s, p.vertex);
        }
        xi.matched.insert((p.vertex, p.index), chosen);
    }
    for (dim, ids) in g.critical_simplices().into_iter().enumerate() {
        for id in ids {
            let s = SimplexRef::new(dim, id);
            if !xi.owner.contains_key(&s) && !t.is_boundary(s)? {
                xi.residue.push(s);
            }
        }
    }
    xi.residue.sort_unstable();
    Ok(xi)
}
