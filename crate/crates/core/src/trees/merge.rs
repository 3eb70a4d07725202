use crate::scalar::OrderField;
use crate::triangulation::{Result, Triangulation};
use crate::union_find::UnionFind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TreeKind {
    /// Sub-level sets, swept upward from the minima.
    Join,
    /// Sur-level sets, swept downward from the maxima.
    Split,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeType {
    Leaf,
    Saddle,
    Root,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    pub vertex: usize,
    pub node_type: NodeType,
    /// Number of components merged minus one; 0 for leaves and plain roots.
    pub multiplicity: usize,
    /// Next node in sweep direction.
    pub parent: Option<usize>,
}

/// Join or split tree. Nodes appear in sweep order; `augmented_parent`
/// keeps the tree over every vertex, before regular vertices are
/// contracted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeTree {
    pub kind: TreeKind,
    pub nodes: Vec<TreeNode>,
    /// For every vertex, the next vertex of its component in the sweep.
    pub augmented_parent: Vec<Option<usize>>,
    /// Arc of each vertex, given by its lower node in sweep order.
    pub vertex_arc: Vec<usize>,
    /// Elder-rule pairs `(extremum, saddle)`, by saddle in sweep order.
    pub pairs: Vec<(usize, usize)>,
}

impl MergeTree {
    pub fn leaves(&self) -> impl Iterator<Item = usize> + '_ {
        self.nodes
            .iter()
            .filter(|n| n.node_type == NodeType::Leaf)
            .map(|n| n.vertex)
    }

    pub fn saddles(&self) -> impl Iterator<Item = &TreeNode> + '_ {
        self.nodes
            .iter()
            .filter(|n| n.node_type == NodeType::Saddle)
    }

    pub fn root(&self) -> Option<usize> {
        self.nodes
            .iter()
            .find(|n| n.parent.is_none())
            .map(|n| n.vertex)
    }

    /// Arcs as `(child vertex, parent vertex)`.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        self.nodes
            .iter()
            .filter_map(|n| n.parent.map(|p| (n.vertex, self.nodes[p].vertex)))
            .collect()
    }
}

/// Union-find sweep over the vertices in ascending (join) or descending
/// (split) order. A vertex joining `k >= 2` components becomes a saddle of
/// multiplicity `k - 1`; each of the `k - 1` youngest components dies there.
pub fn build_merge_tree<T: Triangulation + ?Sized>(
    t: &T,
    field: &OrderField,
    kind: TreeKind,
) -> Result<MergeTree> {
    let n = t.vertex_count();
    let order: Vec<usize> = match kind {
        TreeKind::Join => field.sorted_vertices().to_vec(),
        TreeKind::Split => field.sorted_vertices().iter().rev().copied().collect(),
    };
    let mut position = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        position[v] = i;
    }
    let mut uf = UnionFind::new(n);
    // Per union-find root: the oldest extremum, the last vertex swept, and
    // the last tree node of the component.
    let mut birth = vec![usize::MAX; n];
    let mut last_vertex = vec![usize::MAX; n];
    let mut last_node = vec![usize::MAX; n];
    let mut nodes: Vec<TreeNode> = Vec::new();
    let mut augmented_parent = vec![None; n];
    let mut vertex_arc = vec![usize::MAX; n];
    let mut pairs = Vec::new();
    let mut neighbors = Vec::new();
    let mut roots = Vec::new();
    for (step, &v) in order.iter().enumerate() {
        neighbors.clear();
        t.vertex_neighbors_into(v, &mut neighbors)?;
        roots.clear();
        for &u in &neighbors {
            if position[u] < step {
                roots.push(uf.find(u));
            }
        }
        roots.sort_unstable();
        roots.dedup();
        for &r in &roots {
            augmented_parent[last_vertex[r]] = Some(v);
        }
        let is_last = step + 1 == n;
        match roots.len() {
            0 => {
                nodes.push(TreeNode {
                    vertex: v,
                    node_type: NodeType::Leaf,
                    multiplicity: 0,
                    parent: None,
                });
                birth[v] = v;
                last_node[v] = nodes.len() - 1;
                last_vertex[v] = v;
                vertex_arc[v] = nodes.len() - 1;
            }
            1 if !is_last => {
                let r = roots[0];
                vertex_arc[v] = last_node[r];
                let root = uf.union(r, v);
                birth[root] = birth[r];
                last_node[root] = last_node[r];
                last_vertex[root] = v;
            }
            k => {
                let node = nodes.len();
                nodes.push(TreeNode {
                    vertex: v,
                    node_type: if k >= 2 {
                        NodeType::Saddle
                    } else {
                        NodeType::Root
                    },
                    multiplicity: k.saturating_sub(1),
                    parent: None,
                });
                for &r in &roots {
                    nodes[last_node[r]].parent = Some(node);
                }
                // The oldest component survives; the others die at `v`.
                let mut comps: Vec<usize> = roots.clone();
                comps.sort_by_key(|&r| position[birth[r]]);
                for &r in &comps[1..] {
                    pairs.push((birth[r], v));
                }
                let oldest = birth[comps[0]];
                let mut root = v;
                for &r in &roots {
                    root = uf.union(root, r);
                }
                birth[root] = oldest;
                last_node[root] = node;
                last_vertex[root] = v;
                vertex_arc[v] = node;
            }
        }
    }
    Ok(MergeTree {
        kind,
        nodes,
        augmented_parent,
        vertex_arc,
        pairs,
    })
}

/// Elder-rule pairs of a merge tree as `(extremum, saddle)`; the globally
/// extremal leaf stays unpaired.
pub fn persistence_pairs_extrema(tree: &MergeTree) -> &[(usize, usize)] {
    &tree.pairs
}
