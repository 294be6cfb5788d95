//! Structured hexahedral lattice with dense global ids.
//!
//! # Indexing
//!
//! All ids are lexicographic with `x` varying fastest and `z` slowest.
//! For a lattice of `nx × ny × nz` cells:
//!
//! * node `(i, j, k)`: `i + (nx+1)·(j + (ny+1)·k)`
//! * cell `(i, j, k)`: `i + nx·(j + ny·k)`
//! * edges are numbered x-edges first, then y-edges, then z-edges. Within a
//!   block the edge is keyed by its lower node `(i, j, k)` and numbered
//!   lexicographically over that block's index ranges.
//! * faces are numbered x-normal first, then y-normal, then z-normal, keyed
//!   by their lowest node in the same way.
//!
//! # Corner convention
//!
//! Local corner `c ∈ 0..8` of a cell sits at offset
//! `(c & 1, (c >> 1) & 1, (c >> 2) & 1)` from the cell's lowest node, so the
//! corners of a cell are in increasing global node order. [`LOCAL_EDGES`] and
//! [`LOCAL_FACES`] list the edges and faces in terms of local corners.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FaceId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellId(pub usize);

impl std::fmt::Display for CellId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdKind {
    Node,
    Edge,
    Face,
    Cell,
}

/// A kind-tagged id, for places where ids of different kinds mix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GlobalId {
    pub kind: IdKind,
    pub index: usize,
}

impl From<NodeId> for GlobalId {
    fn from(id: NodeId) -> Self {
        GlobalId { kind: IdKind::Node, index: id.0 }
    }
}
impl From<EdgeId> for GlobalId {
    fn from(id: EdgeId) -> Self {
        GlobalId { kind: IdKind::Edge, index: id.0 }
    }
}
impl From<FaceId> for GlobalId {
    fn from(id: FaceId) -> Self {
        GlobalId { kind: IdKind::Face, index: id.0 }
    }
}
impl From<CellId> for GlobalId {
    fn from(id: CellId) -> Self {
        GlobalId { kind: IdKind::Cell, index: id.0 }
    }
}

/// Axis of an edge or the normal of a face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X = 0,
    Y = 1,
    Z = 2,
}

/// The 12 cell edges as `(lower corner, upper corner)`; x-edges, y-edges, z-edges.
pub const LOCAL_EDGES: [(usize, usize); 12] =
    [(0, 1), (2, 3), (4, 5), (6, 7), (0, 2), (1, 3), (4, 6), (5, 7), (0, 4), (1, 5), (2, 6), (3, 7)];

/// The 6 cell faces as corner quadruples in cyclic order: -x, +x, -y, +y, -z, +z.
pub const LOCAL_FACES: [[usize; 4]; 6] =
    [[0, 2, 6, 4], [1, 3, 7, 5], [0, 1, 5, 4], [2, 3, 7, 6], [0, 1, 3, 2], [4, 5, 7, 6]];

pub fn corner_offset(corner: usize) -> [usize; 3] {
    [corner & 1, (corner >> 1) & 1, (corner >> 2) & 1]
}

/// Bitmask of the local faces (bit `f` for `LOCAL_FACES[f]`) that contain a corner.
pub fn corner_face_mask(corner: usize) -> u8 {
    let [a, b, c] = corner_offset(corner);
    (1 << a) | (1 << (2 + b)) | (1 << (4 + c))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HexLattice {
    dims: [usize; 3],
    origin: [f64; 3],
    spacing: f64,
}

impl HexLattice {
    pub fn new(dims: [usize; 3], origin: [f64; 3], spacing: f64) -> Result<Self> {
        if dims.contains(&0) {
            return Err(Error::InvalidLattice(format!("cell counts must be >= 1, got {dims:?}")));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::InvalidLattice(format!("spacing must be positive, got {spacing}")));
        }
        if origin.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidLattice("origin must be finite".into()));
        }
        Ok(HexLattice { dims, origin, spacing })
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn origin(&self) -> Point {
        Point::new(self.origin[0], self.origin[1], self.origin[2])
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(3)
    }

    pub fn volume(&self) -> f64 {
        self.cell_count() as f64 * self.cell_volume()
    }

    /// Axis-aligned bounds of the whole lattice.
    pub fn bounds(&self) -> (Point, Point) {
        let o = self.origin();
        let [nx, ny, nz] = self.dims;
        let h = self.spacing;
        (o, Point::new(o.x + nx as f64 * h, o.y + ny as f64 * h, o.z + nz as f64 * h))
    }

    pub fn node_count(&self) -> usize {
        let [nx, ny, nz] = self.dims;
        (nx + 1) * (ny + 1) * (nz + 1)
    }

    pub fn cell_count(&self) -> usize {
        let [nx, ny, nz] = self.dims;
        nx * ny * nz
    }

    fn edge_block_sizes(&self) -> [usize; 3] {
        let [nx, ny, nz] = self.dims;
        [nx * (ny + 1) * (nz + 1), (nx + 1) * ny * (nz + 1), (nx + 1) * (ny + 1) * nz]
    }

    fn face_block_sizes(&self) -> [usize; 3] {
        let [nx, ny, nz] = self.dims;
        [(nx + 1) * ny * nz, nx * (ny + 1) * nz, nx * ny * (nz + 1)]
    }

    pub fn edge_count(&self) -> usize {
        self.edge_block_sizes().iter().sum()
    }

    pub fn face_count(&self) -> usize {
        self.face_block_sizes().iter().sum()
    }

    fn check(&self, kind: IdKind, index: usize) -> Result<()> {
        let count = match kind {
            IdKind::Node => self.node_count(),
            IdKind::Edge => self.edge_count(),
            IdKind::Face => self.face_count(),
            IdKind::Cell => self.cell_count(),
        };
        if index < count {
            Ok(())
        } else {
            Err(Error::IdOutOfRange { kind, index, count })
        }
    }

    pub fn node_id(&self, [i, j, k]: [usize; 3]) -> NodeId {
        let [nx, ny, _] = self.dims;
        NodeId(i + (nx + 1) * (j + (ny + 1) * k))
    }

    pub fn node_index(&self, node: NodeId) -> [usize; 3] {
        let [nx, ny, _] = self.dims;
        let i = node.0 % (nx + 1);
        let rest = node.0 / (nx + 1);
        [i, rest % (ny + 1), rest / (ny + 1)]
    }

    pub fn cell_id(&self, [i, j, k]: [usize; 3]) -> CellId {
        let [nx, ny, _] = self.dims;
        CellId(i + nx * (j + ny * k))
    }

    pub fn cell_index(&self, cell: CellId) -> [usize; 3] {
        let [nx, ny, _] = self.dims;
        [cell.0 % nx, (cell.0 / nx) % ny, cell.0 / (nx * ny)]
    }

    /// Global id of the edge starting at node `lower` along `axis`.
    pub fn edge_id(&self, axis: Axis, [i, j, k]: [usize; 3]) -> EdgeId {
        let [nx, ny, _] = self.dims;
        let sizes = self.edge_block_sizes();
        let id = match axis {
            Axis::X => i + nx * (j + (ny + 1) * k),
            Axis::Y => sizes[0] + i + (nx + 1) * (j + ny * k),
            Axis::Z => sizes[0] + sizes[1] + i + (nx + 1) * (j + (ny + 1) * k),
        };
        EdgeId(id)
    }

    /// Axis and lower-node lattice index of an edge.
    pub fn edge_location(&self, edge: EdgeId) -> (Axis, [usize; 3]) {
        let [nx, ny, _] = self.dims;
        let sizes = self.edge_block_sizes();
        let mut e = edge.0;
        if e < sizes[0] {
            return (Axis::X, [e % nx, (e / nx) % (ny + 1), e / (nx * (ny + 1))]);
        }
        e -= sizes[0];
        if e < sizes[1] {
            return (Axis::Y, [e % (nx + 1), (e / (nx + 1)) % ny, e / ((nx + 1) * ny)]);
        }
        e -= sizes[1];
        (Axis::Z, [e % (nx + 1), (e / (nx + 1)) % (ny + 1), e / ((nx + 1) * (ny + 1))])
    }

    /// Endpoints of an edge, lower id first.
    pub fn edge_nodes(&self, edge: EdgeId) -> Result<(NodeId, NodeId)> {
        self.check(IdKind::Edge, edge.0)?;
        let (axis, lo) = self.edge_location(edge);
        let mut hi = lo;
        hi[axis as usize] += 1;
        Ok((self.node_id(lo), self.node_id(hi)))
    }

    pub fn face_id(&self, normal: Axis, [i, j, k]: [usize; 3]) -> FaceId {
        let [nx, ny, _] = self.dims;
        let sizes = self.face_block_sizes();
        let id = match normal {
            Axis::X => i + (nx + 1) * (j + ny * k),
            Axis::Y => sizes[0] + i + nx * (j + (ny + 1) * k),
            Axis::Z => sizes[0] + sizes[1] + i + nx * (j + ny * k),
        };
        FaceId(id)
    }

    /// Normal axis and lowest-node lattice index of a face.
    pub fn face_location(&self, face: FaceId) -> (Axis, [usize; 3]) {
        let [nx, ny, _] = self.dims;
        let sizes = self.face_block_sizes();
        let mut f = face.0;
        if f < sizes[0] {
            return (Axis::X, [f % (nx + 1), (f / (nx + 1)) % ny, f / ((nx + 1) * ny)]);
        }
        f -= sizes[0];
        if f < sizes[1] {
            return (Axis::Y, [f % nx, (f / nx) % (ny + 1), f / (nx * (ny + 1))]);
        }
        f -= sizes[1];
        (Axis::Z, [f % nx, (f / nx) % ny, f / (nx * ny)])
    }

    /// The 8 corner nodes of a cell in local corner order.
    pub fn cell_nodes(&self, cell: CellId) -> Result<[NodeId; 8]> {
        self.check(IdKind::Cell, cell.0)?;
        let [i, j, k] = self.cell_index(cell);
        Ok(std::array::from_fn(|c| {
            let [a, b, d] = corner_offset(c);
            self.node_id([i + a, j + b, k + d])
        }))
    }

    /// The 12 edges of a cell in [`LOCAL_EDGES`] order.
    pub fn cell_edges(&self, cell: CellId) -> Result<[EdgeId; 12]> {
        self.check(IdKind::Cell, cell.0)?;
        let [i, j, k] = self.cell_index(cell);
        Ok(std::array::from_fn(|e| {
            let (lo, _) = LOCAL_EDGES[e];
            let [a, b, d] = corner_offset(lo);
            let axis = match e / 4 {
                0 => Axis::X,
                1 => Axis::Y,
                _ => Axis::Z,
            };
            self.edge_id(axis, [i + a, j + b, k + d])
        }))
    }

    /// The 6 faces of a cell in [`LOCAL_FACES`] order.
    pub fn cell_faces(&self, cell: CellId) -> Result<[FaceId; 6]> {
        self.check(IdKind::Cell, cell.0)?;
        let [i, j, k] = self.cell_index(cell);
        Ok([
            self.face_id(Axis::X, [i, j, k]),
            self.face_id(Axis::X, [i + 1, j, k]),
            self.face_id(Axis::Y, [i, j, k]),
            self.face_id(Axis::Y, [i, j + 1, k]),
            self.face_id(Axis::Z, [i, j, k]),
            self.face_id(Axis::Z, [i, j, k + 1]),
        ])
    }

    /// Cells sharing a face: lower-side cell first. One entry for boundary faces.
    pub fn face_neighbors(&self, face: FaceId) -> Result<Vec<CellId>> {
        self.check(IdKind::Face, face.0)?;
        let (axis, idx) = self.face_location(face);
        let a = axis as usize;
        let mut out = Vec::with_capacity(2);
        if idx[a] > 0 {
            let mut lower = idx;
            lower[a] -= 1;
            out.push(self.cell_id(lower));
        }
        if idx[a] < self.dims[a] {
            out.push(self.cell_id(idx));
        }
        Ok(out)
    }

    /// The 4 nodes of a face in cyclic order.
    pub fn face_nodes(&self, face: FaceId) -> Result<[NodeId; 4]> {
        self.check(IdKind::Face, face.0)?;
        let (axis, [i, j, k]) = self.face_location(face);
        let quad = match axis {
            Axis::X => [[i, j, k], [i, j + 1, k], [i, j + 1, k + 1], [i, j, k + 1]],
            Axis::Y => [[i, j, k], [i + 1, j, k], [i + 1, j, k + 1], [i, j, k + 1]],
            Axis::Z => [[i, j, k], [i + 1, j, k], [i + 1, j + 1, k], [i, j + 1, k]],
        };
        Ok(quad.map(|n| self.node_id(n)))
    }

    pub fn node_position(&self, node: NodeId) -> Result<Point> {
        self.check(IdKind::Node, node.0)?;
        Ok(self.position_unchecked(node))
    }

    pub(crate) fn position_unchecked(&self, node: NodeId) -> Point {
        let [i, j, k] = self.node_index(node);
        let h = self.spacing;
        Point::new(self.origin[0] + i as f64 * h, self.origin[1] + j as f64 * h, self.origin[2] + k as f64 * h)
    }

    pub fn cells(&self) -> impl Iterator<Item = CellId> + '_ {
        (0..self.cell_count()).map(CellId)
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.node_count()).map(NodeId)
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.edge_count()).map(EdgeId)
    }

    pub fn faces(&self) -> impl Iterator<Item = FaceId> + '_ {
        (0..self.face_count()).map(FaceId)
    }
}
