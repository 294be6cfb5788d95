//! Interface-conforming tetrahedral decomposition of intersected cells.
//!
//! Each intersected cell is split with a placing triangulation of its edge
//! crossings (inserted first, by global edge id) followed by its corners (by
//! global node id). Because the crossings go in first, their convex hull is
//! a subcomplex of the result:
//!
//! * a tetrahedron with only crossing vertices lies inside that hull, and
//!   those are exactly the ambiguous tetrahedra;
//! * every segment between corners of opposite sign meets the hull, so no
//!   tetrahedron mixes solid and void corners;
//! * the triangulation of a lattice face depends only on the ids and
//!   positions of that face's points, so both cells sharing it agree.

mod adjacency;
pub mod npac;
mod placing;

use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use adjacency::{FaceKey, TetAdjacency};

use crate::error::{Error, Result};
use crate::field::{LevelSetField, Phase};
use crate::geom::{orient, signed_volume, triangle_area, Point};
use crate::mesh::{CellId, EdgeId, FaceId, HexLattice, NodeId};

/// Tetrahedron vertex provenance. Crossings order before corners, which is
/// also the insertion priority used by the decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexKey {
    Crossing(EdgeId),
    Corner(NodeId),
}

impl VertexKey {
    pub fn is_crossing(&self) -> bool {
        matches!(self, VertexKey::Crossing(_))
    }

    /// Bitmask of the owner cell's local faces containing this vertex.
    pub fn face_mask(&self, lattice: &HexLattice, cell: CellId) -> u8 {
        let base = lattice.cell_index(cell);
        let mut mask = 0u8;
        match *self {
            VertexKey::Corner(n) => {
                let idx = lattice.node_index(n);
                for a in 0..3 {
                    mask |= 1 << (2 * a + (idx[a] - base[a]));
                }
            }
            VertexKey::Crossing(e) => {
                let (axis, lo) = lattice.edge_location(e);
                for a in (0..3).filter(|&a| a != axis as usize) {
                    mask |= 1 << (2 * a + (lo[a] - base[a]));
                }
            }
        }
        mask
    }
}

/// 8-bit nodal sign pattern; bit `c` is set when corner `c` is solid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SignPattern(pub u8);

impl SignPattern {
    pub fn from_values(values: &[f64; 8]) -> Self {
        SignPattern(values.iter().enumerate().fold(0u8, |acc, (c, &v)| if v > 0.0 { acc | (1 << c) } else { acc }))
    }

    pub fn code(self) -> u8 {
        self.0
    }

    pub fn is_solid(self, corner: usize) -> bool {
        self.0 & (1 << corner) != 0
    }

    pub fn is_constant(self) -> bool {
        self.0 == 0 || self.0 == 0xFF
    }

    /// Number of cell edges whose endpoints differ in sign.
    pub fn crossing_count(self) -> usize {
        crate::mesh::LOCAL_EDGES.iter().filter(|&&(a, b)| self.is_solid(a) != self.is_solid(b)).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellClass {
    Uniform(Phase),
    Intersected(SignPattern),
}

pub fn classify_cell(field: &LevelSetField, cell: CellId) -> Result<CellClass> {
    let pattern = SignPattern::from_values(&field.cell_values(cell)?);
    Ok(match pattern.0 {
        0 => CellClass::Uniform(Phase::Void),
        0xFF => CellClass::Uniform(Phase::Solid),
        _ => CellClass::Intersected(pattern),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ambiguity {
    Unambiguous,
    #[serde(rename = "iat")]
    Internal,
    #[serde(rename = "bat")]
    Boundary,
}

impl Ambiguity {
    pub fn is_ambiguous(self) -> bool {
        self != Ambiguity::Unambiguous
    }

    /// Integer code used in exported meshes.
    pub fn code(self) -> i32 {
        match self {
            Ambiguity::Unambiguous => 0,
            Ambiguity::Internal => 1,
            Ambiguity::Boundary => 2,
        }
    }
}

/// Local vertex indices of the face opposite vertex `i`, oriented outward.
pub const TET_FACES: [[usize; 3]; 4] = [[1, 3, 2], [0, 2, 3], [0, 3, 1], [0, 1, 2]];

#[derive(Debug, Clone, PartialEq)]
pub struct Tet {
    pub vertices: [VertexKey; 4],
    pub points: [Point; 4],
    pub owner: CellId,
}

impl Tet {
    pub fn volume(&self) -> f64 {
        let [a, b, c, d] = &self.points;
        signed_volume(a, b, c, d)
    }

    pub fn centroid(&self) -> Point {
        let sum = self.points.iter().fold(nalgebra::Vector3::zeros(), |acc, p| acc + p.coords);
        Point::from(sum / 4.0)
    }

    pub fn is_all_crossings(&self) -> bool {
        self.vertices.iter().all(VertexKey::is_crossing)
    }

    pub fn corners(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.vertices.iter().filter_map(|v| match v {
            VertexKey::Corner(n) => Some(*n),
            VertexKey::Crossing(_) => None,
        })
    }

    pub fn face_key(&self, face: usize) -> FaceKey {
        FaceKey::new(TET_FACES[face].map(|i| self.vertices[i]))
    }

    pub fn face_area(&self, face: usize) -> f64 {
        let [a, b, c] = TET_FACES[face].map(|i| &self.points[i]);
        triangle_area(a, b, c)
    }

    pub fn face_points(&self, face: usize) -> [Point; 3] {
        TET_FACES[face].map(|i| self.points[i])
    }

    /// The owner cell's local face (0..6) that contains tet face `face`, if any.
    pub fn face_on_cell_boundary(&self, face: usize, lattice: &HexLattice) -> Option<usize> {
        let mask = TET_FACES[face].iter().fold(0x3Fu8, |m, &i| m & self.vertices[i].face_mask(lattice, self.owner));
        (mask != 0).then(|| mask.trailing_zeros() as usize)
    }
}

/// Decomposes one intersected cell.
///
/// Verifies volume partition and the absence of mixed-sign tetrahedra, and
/// reports a [`Error::DegenerateDecomposition`] otherwise.
pub fn tetrahedralize(field: &LevelSetField, cell: CellId) -> Result<Vec<Tet>> {
    let lattice = field.lattice();
    let pattern = match classify_cell(field, cell)? {
        CellClass::Intersected(p) => p,
        CellClass::Uniform(_) => return Err(Error::NotIntersected { cell }),
    };
    let degenerate = |reason: String| Error::DegenerateDecomposition { cell, pattern: pattern.0, reason };

    let mut edges = lattice.cell_edges(cell)?.to_vec();
    edges.sort();
    let mut keys = Vec::with_capacity(20);
    let mut points = Vec::with_capacity(20);
    for e in edges {
        if let Some(x) = field.edge_crossing(e)? {
            keys.push(VertexKey::Crossing(e));
            points.push(x.point);
        }
    }
    for n in lattice.cell_nodes(cell)? {
        keys.push(VertexKey::Corner(n));
        points.push(lattice.position_unchecked(n));
    }

    let simplices = placing::placing_triangulation(&points).map_err(|e| degenerate(e.to_string()))?;
    let tets: Vec<Tet> = simplices
        .into_iter()
        .map(|s| Tet { vertices: s.map(|i| keys[i]), points: s.map(|i| points[i]), owner: cell })
        .collect();

    let expected = lattice.cell_volume();
    let mut total = 0.0;
    for (i, t) in tets.iter().enumerate() {
        let [a, b, c, d] = &t.points;
        if orient(a, b, c, d) <= 0 {
            return Err(degenerate(format!("tetrahedron {i} is not positively oriented")));
        }
        total += t.volume();
        let mut phases = t.corners().map(|n| field.phase(n));
        if let Some(first) = phases.next() {
            if phases.any(|p| p != first) {
                return Err(degenerate(format!("tetrahedron {i} mixes solid and void corners")));
            }
        }
    }
    if ((total - expected) / expected).abs() > 1e-9 {
        return Err(degenerate(format!("tetrahedra cover {total:e} of cell volume {expected:e}")));
    }
    Ok(tets)
}

/// Ambiguity tag per tetrahedron.
pub fn tag_ambiguity(tets: &[Tet], lattice: &HexLattice) -> Vec<Ambiguity> {
    tets.iter()
        .map(|t| {
            if !t.is_all_crossings() {
                Ambiguity::Unambiguous
            } else if (0..4).any(|f| t.face_on_cell_boundary(f, lattice).is_some()) {
                Ambiguity::Boundary
            } else {
                Ambiguity::Internal
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum CellInfo {
    Uniform(Phase),
    Intersected { pattern: SignPattern, tets: Range<usize> },
}

/// All tetrahedra of a decomposed field, ordered by owner cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CutCellMesh {
    pub lattice: HexLattice,
    pub cells: Vec<CellInfo>,
    pub tets: Vec<Tet>,
    pub ambiguity: Vec<Ambiguity>,
    /// Unambiguous tetrahedra carry their corner phase from the start;
    /// ambiguous ones are `None` until a rule assigns them.
    pub phases: Vec<Option<Phase>>,
}

impl CutCellMesh {
    pub fn cell_tets(&self, cell: CellId) -> Range<usize> {
        match &self.cells[cell.0] {
            CellInfo::Intersected { tets, .. } => tets.clone(),
            CellInfo::Uniform(_) => 0..0,
        }
    }

    pub fn ambiguous_tets(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.tets.len()).filter(|&i| self.ambiguity[i].is_ambiguous())
    }

    pub fn count(&self, kind: Ambiguity) -> usize {
        self.ambiguity.iter().filter(|&&a| a == kind).count()
    }

    pub fn is_fully_phased(&self) -> bool {
        self.phases.iter().all(Option::is_some)
    }

    /// Lattice face carrying a face of a boundary-ambiguous tetrahedron,
    /// with the tet's local face index.
    pub fn bat_face(&self, tet: usize) -> Option<(FaceId, usize)> {
        let t = &self.tets[tet];
        (0..4).find_map(|f| {
            t.face_on_cell_boundary(f, &self.lattice).map(|local| {
                let faces = self.lattice.cell_faces(t.owner).expect("owner cell is valid");
                (faces[local], f)
            })
        })
    }

    /// Clears the phases of all ambiguous tetrahedra.
    pub fn reset_ambiguous_phases(&mut self) {
        for i in 0..self.tets.len() {
            if self.ambiguity[i].is_ambiguous() {
                self.phases[i] = None;
            }
        }
    }
}

/// Interior lattice faces whose triangulations, as induced from the two
/// incident intersected cells, differ.
pub fn face_matching_mismatches(mesh: &CutCellMesh) -> Vec<FaceId> {
    use std::collections::{BTreeMap, BTreeSet};
    let mut per_face: BTreeMap<FaceId, BTreeMap<CellId, BTreeSet<FaceKey>>> = BTreeMap::new();
    for t in &mesh.tets {
        let faces = mesh.lattice.cell_faces(t.owner).expect("owner cell is valid");
        for f in 0..4 {
            if let Some(local) = t.face_on_cell_boundary(f, &mesh.lattice) {
                per_face.entry(faces[local]).or_default().entry(t.owner).or_default().insert(t.face_key(f));
            }
        }
    }
    let intersected = |c: CellId| matches!(mesh.cells[c.0], CellInfo::Intersected { .. });
    let mut bad = Vec::new();
    for face in mesh.lattice.faces() {
        let cells = mesh.lattice.face_neighbors(face).expect("face is valid");
        if cells.len() != 2 || !intersected(cells[0]) || !intersected(cells[1]) {
            continue;
        }
        let sides = per_face.get(&face);
        let side = |c: CellId| sides.and_then(|m| m.get(&c));
        if side(cells[0]) != side(cells[1]) {
            bad.push(face);
        }
    }
    bad
}

/// Decomposes every intersected cell of a field.
///
/// Runs as a parallel map over cells on the current rayon pool; the output
/// does not depend on the number of workers.
pub fn decompose(field: &LevelSetField) -> Result<CutCellMesh> {
    let lattice = *field.lattice();
    let per_cell: Vec<(CellClass, Vec<Tet>)> = (0..lattice.cell_count())
        .into_par_iter()
        .map(|c| {
            let cell = CellId(c);
            let class = classify_cell(field, cell)?;
            let tets = match class {
                CellClass::Intersected(_) => tetrahedralize(field, cell)?,
                CellClass::Uniform(_) => Vec::new(),
            };
            Ok((class, tets))
        })
        .collect::<Result<_>>()?;

    let mut cells = Vec::with_capacity(per_cell.len());
    let mut tets = Vec::new();
    for (class, cell_tets) in per_cell {
        match class {
            CellClass::Uniform(p) => cells.push(CellInfo::Uniform(p)),
            CellClass::Intersected(pattern) => {
                let start = tets.len();
                tets.extend(cell_tets);
                cells.push(CellInfo::Intersected { pattern, tets: start..tets.len() });
            }
        }
    }
    let ambiguity = tag_ambiguity(&tets, &lattice);
    let phases = tets
        .iter()
        .zip(&ambiguity)
        .map(|(t, a)| if a.is_ambiguous() { None } else { t.corners().next().map(|n| field.phase(n)) })
        .collect();
    Ok(CutCellMesh { lattice, cells, tets, ambiguity, phases })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::HexLattice;

    fn unit_field(values: [f64; 8]) -> LevelSetField {
        LevelSetField::from_values(HexLattice::new([1, 1, 1], [0.0; 3], 1.0).unwrap(), values.to_vec()).unwrap()
    }

    fn pattern_field(code: u8) -> LevelSetField {
        unit_field(std::array::from_fn(|c| if code & (1 << c) != 0 { 1.0 } else { -1.0 }))
    }

    #[test]
    fn classification() {
        assert_eq!(classify_cell(&unit_field([1.0; 8]), CellId(0)).unwrap(), CellClass::Uniform(Phase::Solid));
        assert_eq!(classify_cell(&unit_field([-1.0; 8]), CellId(0)).unwrap(), CellClass::Uniform(Phase::Void));
        let mut v = [1.0; 8];
        v[5] = -2.0;
        match classify_cell(&unit_field(v), CellId(0)).unwrap() {
            CellClass::Intersected(p) => assert_eq!(p.crossing_count(), 3),
            other => panic!("{other:?}"),
        }
        // face-diagonal pair of negatives on the -z face
        let mut v = [1.0; 8];
        v[0] = -1.0;
        v[3] = -1.0;
        assert!(matches!(classify_cell(&unit_field(v), CellId(0)).unwrap(), CellClass::Intersected(_)));
    }

    #[test]
    fn uniform_cell_is_rejected() {
        assert!(matches!(tetrahedralize(&unit_field([1.0; 8]), CellId(0)), Err(Error::NotIntersected { .. })));
    }

    #[test]
    fn planar_cut_has_no_ambiguity_and_volume_fraction_t() {
        // φ linear in z, crossing at t = 0.25 on every vertical edge.
        let f = unit_field([1.0, 1.0, 1.0, 1.0, -3.0, -3.0, -3.0, -3.0]);
        let tets = tetrahedralize(&f, CellId(0)).unwrap();
        let tags = tag_ambiguity(&tets, f.lattice());
        assert!(tags.iter().all(|a| *a == Ambiguity::Unambiguous));
        let solid: f64 = tets.iter().filter(|t| t.corners().all(|n| f.phase(n) == Phase::Solid)).map(Tet::volume).sum();
        assert!((solid - 0.25).abs() < 1e-12);
    }

    #[test]
    fn single_void_corner() {
        let mut v = [1.0; 8];
        v[0] = -1.0;
        let f = unit_field(v);
        let tets = tetrahedralize(&f, CellId(0)).unwrap();
        assert!(tets.iter().any(|t| t.vertices.contains(&VertexKey::Corner(NodeId(0)))));
        assert!(tag_ambiguity(&tets, f.lattice()).iter().all(|a| !a.is_ambiguous()));
        let void: f64 =
            tets.iter().filter(|t| t.vertices.contains(&VertexKey::Corner(NodeId(0)))).map(Tet::volume).sum();
        assert!((void - 1.0 / 48.0).abs() < 1e-12);
    }

    #[test]
    fn body_diagonal_pair_gives_internal_ambiguities_only() {
        // corners 0 and 7 void
        let f = pattern_field(!0x81);
        let tets = tetrahedralize(&f, CellId(0)).unwrap();
        let tags = tag_ambiguity(&tets, f.lattice());
        assert!(tags.contains(&Ambiguity::Internal));
        assert!(!tags.contains(&Ambiguity::Boundary));
        for (t, a) in tets.iter().zip(&tags) {
            assert_eq!(a.is_ambiguous(), t.is_all_crossings());
        }
    }

    #[test]
    fn face_diagonal_pair_gives_boundary_ambiguities() {
        // corners 0 and 3 void: the -z face alternates in sign
        let f = pattern_field(!0x09);
        let tets = tetrahedralize(&f, CellId(0)).unwrap();
        let tags = tag_ambiguity(&tets, f.lattice());
        assert!(tags.contains(&Ambiguity::Boundary));
    }

    #[test]
    fn decomposition_is_invariant_under_scaling() {
        let f = unit_field([0.3, -1.2, 2.0, -0.7, -0.4, 1.1, -2.5, 0.9]);
        let a = decompose(&f).unwrap();
        let b = decompose(&f.scaled(3.7).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
