use thiserror::Error;

use crate::mesh::{CellId, IdKind};

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by the geometry kernel.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("{kind:?} id {index} out of range (count {count})")]
    IdOutOfRange { kind: IdKind, index: usize, count: usize },

    #[error("expected {expected} nodal values, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("nodal value at node {node} is not finite")]
    NonFiniteValue { node: usize },

    #[error("scene has no primitives")]
    EmptyScene,

    #[error("invalid primitive #{index}: {reason}")]
    InvalidPrimitive { index: usize, reason: String },

    #[error("invalid filter: {0}")]
    InvalidFilter(String),

    #[error("local coordinates {0:?} outside the unit cube")]
    CoordsOutOfRange([f64; 3]),

    #[error("sign pattern {0:#04x} is constant and has no intersected class")]
    ConstantPattern(u8),

    #[error("cell {cell} is not intersected")]
    NotIntersected { cell: CellId },

    #[error("face values {0:?} do not alternate in sign")]
    NotAlternatingFace([f64; 4]),

    #[error("degenerate decomposition in cell {cell} (pattern {pattern:#04x}): {reason}")]
    DegenerateDecomposition { cell: CellId, pattern: u8, reason: String },

    #[error("tetrahedron {0} has no phase assigned")]
    UnphasedTet(usize),

    #[error("invalid shell study: {0}")]
    InvalidShell(String),

    #[error("mesh parse error at line {line}: {reason}")]
    MeshParse { line: usize, reason: String },
}

impl Error {
    /// True for errors caused by numerics or degenerate geometry rather than bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::DegenerateDecomposition { .. } | Error::UnphasedTet(_) | Error::NonFiniteValue { .. })
    }
}
