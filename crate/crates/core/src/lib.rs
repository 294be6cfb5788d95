//! Level-set cut-cell tetrahedralization with ambiguity detection and
//! phase-assignment rules for ambiguous tetrahedra.
//!
//! Pipeline: [`mesh::HexLattice`] → [`field::LevelSetField`] →
//! [`cutcell::decompose`] → [`rules::resolve`] → [`diagnostics::measure`].

// negated float comparisons below are deliberate: they reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cutcell;
pub mod diagnostics;
pub mod error;
pub mod export;
pub mod field;
pub mod geom;
pub mod mesh;
pub mod rules;

pub use cutcell::{decompose, Ambiguity, CutCellMesh, SignPattern, Tet, VertexKey};
pub use diagnostics::{measure, GeometryReport};
pub use error::{Error, Result};
pub use field::{FilterSpec, LevelSetField, Phase, Primitive, PrimitiveScene, Sense, Shape};
pub use mesh::{Axis, CellId, EdgeId, FaceId, HexLattice, NodeId};
pub use rules::{resolve, IterationState, ResolutionReport, Rule, RuleConfig};
