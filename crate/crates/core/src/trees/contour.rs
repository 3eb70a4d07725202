use std::collections::VecDeque;

use super::merge::{build_merge_tree, MergeTree, TreeKind};
use super::TreeError;
use crate::scalar::OrderField;
use crate::topology::is_simply_connected;
use crate::triangulation::Triangulation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ContourNodeType {
    Minimum,
    Maximum,
    /// Join saddle, split saddle, or both.
    Saddle,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContourNode {
    pub vertex: usize,
    pub node_type: ContourNodeType,
}

/// Loop-free Reeb graph. Arcs are `(lower node, upper node)` indices into
/// `nodes`, which are sorted by vertex order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContourTree {
    pub nodes: Vec<ContourNode>,
    pub arcs: Vec<(usize, usize)>,
    /// Arc of every vertex. Regular vertices take the arc they lie on;
    /// nodes take their lowest-numbered downward arc, or for minima the
    /// upward one.
    pub vertex_arc: Vec<usize>,
}

impl ContourTree {
    pub fn node_of_vertex(&self, v: usize) -> Option<usize> {
        self.nodes.iter().position(|n| n.vertex == v)
    }

    pub fn degree(&self, node: usize) -> usize {
        self.arcs
            .iter()
            .filter(|&&(a, b)| a == node || b == node)
            .count()
    }

    /// Arcs as vertex pairs.
    pub fn vertex_arcs(&self) -> Vec<(usize, usize)> {
        self.arcs
            .iter()
            .map(|&(a, b)| (self.nodes[a].vertex, self.nodes[b].vertex))
            .collect()
    }
}

/// Tree over all vertices with mutable links, used while pruning leaves.
struct Working {
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
}

impl Working {
    fn new(tree: &MergeTree) -> Self {
        let n = tree.augmented_parent.len();
        let mut children = vec![Vec::new(); n];
        for (v, p) in tree.augmented_parent.iter().enumerate() {
            if let Some(p) = *p {
                children[p].push(v);
            }
        }
        Working {
            parent: tree.augmented_parent.clone(),
            children,
        }
    }

    /// Drops leaf `v`, reporting its parent.
    fn remove_leaf(&mut self, v: usize) -> Option<usize> {
        let p = self.parent[v].take();
        if let Some(p) = p {
            self.children[p].retain(|&c| c != v);
        }
        p
    }

    /// Splices `v` (one child at most) out, linking its child to its parent.
    fn splice(&mut self, v: usize) {
        let p = self.parent[v].take();
        let child = self.children[v].pop();
        if let Some(p) = p {
            self.children[p].retain(|&c| c != v);
            if let Some(c) = child {
                self.children[p].push(c);
            }
        }
        if let Some(c) = child {
            self.parent[c] = p;
        }
    }
}

/// Leaf-pruning combination of a join and a split tree over the same order
/// field. Fails when the trees do not describe a tree, which happens on
/// domains with loops.
pub fn combine_contour_tree(
    field: &OrderField,
    join: &MergeTree,
    split: &MergeTree,
) -> Result<ContourTree, TreeError> {
    if join.kind != TreeKind::Join || split.kind != TreeKind::Split {
        return Err(TreeError::WrongTreeKinds);
    }
    let n = join.augmented_parent.len();
    if split.augmented_parent.len() != n || field.len() != n {
        return Err(TreeError::SizeMismatch);
    }
    let mut jt = Working::new(join);
    let mut st = Working::new(split);
    // Augmented arcs, oriented upward.
    let mut full_arcs: Vec<(usize, usize)> = Vec::with_capacity(n.saturating_sub(1));
    let mut removed = vec![false; n];
    let lower_leaf = |jt: &Working, st: &Working, v: usize| {
        jt.children[v].is_empty() && st.children[v].len() == 1 && jt.parent[v].is_some()
    };
    let upper_leaf = |jt: &Working, st: &Working, v: usize| {
        st.children[v].is_empty() && jt.children[v].len() == 1 && st.parent[v].is_some()
    };
    let mut queue: VecDeque<usize> = field
        .sorted_vertices()
        .iter()
        .copied()
        .filter(|&v| lower_leaf(&jt, &st, v) || upper_leaf(&jt, &st, v))
        .collect();
    let mut remaining = n;
    while remaining > 1 {
        let Some(v) = queue.pop_front() else {
            break;
        };
        if removed[v] {
            continue;
        }
        let touched = if lower_leaf(&jt, &st, v) {
            // Its contour tree arc runs up the join tree.
            let up = jt.remove_leaf(v).expect("join parent");
            full_arcs.push((v, up));
            st.splice(v);
            up
        } else if upper_leaf(&jt, &st, v) {
            let down = st.remove_leaf(v).expect("split parent");
            full_arcs.push((down, v));
            jt.splice(v);
            down
        } else {
            continue;
        };
        removed[v] = true;
        remaining -= 1;
        if lower_leaf(&jt, &st, touched) || upper_leaf(&jt, &st, touched) {
            queue.push_back(touched);
        }
    }
    if n == 0 || remaining != 1 || full_arcs.len() + 1 != n {
        return Err(TreeError::NotATree);
    }
    Ok(contract(field, &full_arcs))
}

fn contract(field: &OrderField, full_arcs: &[(usize, usize)]) -> ContourTree {
    let n = field.len();
    let mut up = vec![Vec::new(); n];
    let mut down = vec![Vec::new(); n];
    for &(a, b) in full_arcs {
        up[a].push(b);
        down[b].push(a);
    }
    let is_node = |v: usize| !(up[v].len() == 1 && down[v].len() == 1);
    let mut nodes = Vec::new();
    let mut node_index = vec![usize::MAX; n];
    for &v in field.sorted_vertices() {
        if is_node(v) {
            let node_type = match (down[v].len(), up[v].len()) {
                (0, _) => ContourNodeType::Minimum,
                (_, 0) => ContourNodeType::Maximum,
                _ => ContourNodeType::Saddle,
            };
            node_index[v] = nodes.len();
            nodes.push(ContourNode {
                vertex: v,
                node_type,
            });
        }
    }
    let mut arcs = Vec::new();
    let mut vertex_arc = vec![usize::MAX; n];
    for &v in field.sorted_vertices() {
        if !is_node(v) {
            continue;
        }
        let mut starts = up[v].clone();
        starts.sort_by_key(|&u| field.rank(u));
        for mut u in starts {
            let arc = arcs.len();
            while !is_node(u) {
                vertex_arc[u] = arc;
                u = up[u][0];
            }
            arcs.push((node_index[v], node_index[u]));
        }
    }
    for (i, &(a, b)) in arcs.iter().enumerate() {
        let (va, vb) = (nodes[a].vertex, nodes[b].vertex);
        if vertex_arc[vb] == usize::MAX {
            vertex_arc[vb] = i;
        }
        if down[va].is_empty() && vertex_arc[va] == usize::MAX {
            vertex_arc[va] = i;
        }
    }
    ContourTree {
        nodes,
        arcs,
        vertex_arc,
    }
}

/// Checks that the domain is simply connected, then builds and combines
/// both merge trees.
pub fn contour_tree<T: Triangulation + ?Sized>(
    t: &T,
    field: &OrderField,
) -> Result<ContourTree, TreeError> {
    if !is_simply_connected(t)? {
        return Err(TreeError::NotSimplyConnected);
    }
    let (join, split) = rayon::join(
        || build_merge_tree(t, field, TreeKind::Join),
        || build_merge_tree(t, field, TreeKind::Split),
    );
    combine_contour_tree(field, &join?, &split?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{octahedron, periodic_grid};
    use crate::triangulation::ImplicitGrid;

    #[test]
    fn f0_contour_tree() {
        let g = ImplicitGrid::new(&[3, 3]).unwrap();
        let f =
            OrderField::from_values(vec![0.0, 4.0, 2.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0]).unwrap();
        let ct = contour_tree(&g, &f).unwrap();
        let values: Vec<f64> = ct.nodes.iter().map(|n| f.value(n.vertex)).collect();
        assert_eq!(values, vec![0.0, 2.0, 4.0, 10.0]);
        let mut arcs: Vec<(f64, f64)> = ct
            .vertex_arcs()
            .into_iter()
            .map(|(a, b)| (f.value(a), f.value(b)))
            .collect();
        arcs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(arcs, vec![(0.0, 4.0), (2.0, 4.0), (4.0, 10.0)]);
        assert!(ct.vertex_arc.iter().all(|&a| a < ct.arcs.len()));
    }

    #[test]
    fn monotone_field_is_one_arc() {
        let g = ImplicitGrid::new(&[4, 4]).unwrap();
        let f = OrderField::from_values((0..16).map(f64::from).collect()).unwrap();
        let ct = contour_tree(&g, &f).unwrap();
        assert_eq!(ct.vertex_arcs(), vec![(0, 15)]);
        assert!(ct.vertex_arc.iter().all(|&a| a == 0));
    }

    #[test]
    fn sphere_is_accepted_and_torus_refused() {
        let mut t = octahedron();
        t.precondition_all();
        let f = OrderField::from_values(vec![3.0, 1.0, 5.0, 0.5, 4.0, 2.0]).unwrap();
        let ct = contour_tree(&t, &f).unwrap();
        assert_eq!(ct.arcs.len() + 1, ct.nodes.len());

        let mut torus = periodic_grid(&[4, 4]);
        torus.precondition_all();
        let f = OrderField::from_values((0..16).map(f64::from).collect()).unwrap();
        assert!(matches!(
            contour_tree(&torus, &f),
            Err(TreeError::NotSimplyConnected)
        ));
    }
}
