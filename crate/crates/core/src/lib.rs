//! Topological abstractions of piecewise-linear scalar fields on 2D and 3D
//! triangulations: critical points, merge and contour trees, persistence
//! diagrams and curves, PL-compliant discrete gradients, Morse-Smale
//! separatrices and segmentations, and persistence-driven simplification.

pub mod cli;
pub mod fixtures;
pub mod gradient;
pub mod io;
pub mod scalar;
pub mod simplify;
pub mod topology;
pub mod trees;
pub mod triangulation;
pub mod union_find;

pub use scalar::{OrderField, PlCriticalPoint, VertexClass};
pub use triangulation::{
    ExplicitTriangulation, ImplicitGrid, Mesh, Precondition, SimplexRef, Triangulation,
};
