//! Merge trees, the contour tree and persistence.

mod contour;
mod diagram;
mod merge;

use thiserror::Error;

use crate::triangulation::TriangulationError;

pub use contour::{combine_contour_tree, contour_tree, ContourNode, ContourNodeType, ContourTree};
pub use diagram::{
    build_diagram, persistence_curve, PairClass, PersistenceDiagram, PersistencePair,
};
pub use merge::{
    build_merge_tree, persistence_pairs_extrema, MergeTree, NodeType, TreeKind, TreeNode,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TreeError {
    #[error(transparent)]
    Triangulation(#[from] TriangulationError),
    #[error("contour trees need a simply connected domain (loops detected)")]
    NotSimplyConnected,
    #[error("expected a join tree and a split tree")]
    WrongTreeKinds,
    #[error("trees and field disagree on the vertex count")]
    SizeMismatch,
    #[error("join and split trees do not combine into a tree")]
    NotATree,
}
