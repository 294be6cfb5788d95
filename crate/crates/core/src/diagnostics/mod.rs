//! Volumes, interface area, connectivity and consistency of a resolved mesh.

mod shell;

use std::collections::BTreeMap;

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

pub use shell::{shell_study, write_shell_csv, ShellPreset, ShellRow, ShellStudy, SHELL_CSV_HEADER};

use crate::cutcell::{Ambiguity, CellInfo, CutCellMesh, FaceKey, TetAdjacency, VertexKey};
use crate::error::{Error, Result};
use crate::field::Phase;
use crate::geom::CompensatedSum;
use crate::mesh::{CellId, HexLattice};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryReport {
    pub v_solid: f64,
    pub v_void: f64,
    /// Volume of all ambiguous tetrahedra.
    pub v_at: f64,
    /// Volume of ambiguous tetrahedra assigned solid.
    pub v_at_solid: f64,
    /// `v_at / v_solid`; absent when there is no solid.
    pub ratio_at: Option<f64>,
    /// `v_at_solid / v_solid`; absent when there is no solid.
    pub ratio_at_solid: Option<f64>,
    pub interface_area: f64,
    pub solid_components: usize,
    pub void_components: usize,
    pub watertight: bool,
    pub n_iat: usize,
    pub n_bat: usize,
}

fn phase_of(mesh: &CutCellMesh, t: usize) -> Result<Phase> {
    mesh.phases[t].ok_or(Error::UnphasedTet(t))
}

/// Which of the six domain boundary planes (-x, +x, -y, +y, -z, +z) contain a vertex.
fn domain_plane_mask(key: VertexKey, lattice: &HexLattice) -> u8 {
    let dims = lattice.dims();
    let mut mask = 0u8;
    let mut mark = |a: usize, i: usize| {
        if i == 0 {
            mask |= 1 << (2 * a);
        }
        if i == dims[a] {
            mask |= 1 << (2 * a + 1);
        }
    };
    match key {
        VertexKey::Corner(n) => {
            let idx = lattice.node_index(n);
            (0..3).for_each(|a| mark(a, idx[a]));
        }
        VertexKey::Crossing(e) => {
            let (axis, lo) = lattice.edge_location(e);
            (0..3).filter(|&a| a != axis as usize).for_each(|a| mark(a, lo[a]));
        }
    }
    mask
}

/// What lies across a tet face that has no tetrahedron on its other side.
enum Across {
    DomainBoundary,
    Uniform(CellId, Phase),
    /// The face is interior to its cell or borders an intersected cell: a hole.
    Missing,
}

fn across_unmatched(mesh: &CutCellMesh, t: usize, f: usize) -> Across {
    let tet = &mesh.tets[t];
    let Some(local) = tet.face_on_cell_boundary(f, &mesh.lattice) else { return Across::Missing };
    let face = mesh.lattice.cell_faces(tet.owner).expect("owner cell is valid")[local];
    let other = mesh.lattice.face_neighbors(face).expect("face is valid").into_iter().find(|&c| c != tet.owner);
    match other {
        None => Across::DomainBoundary,
        Some(c) => match mesh.cells[c.0] {
            CellInfo::Uniform(p) => Across::Uniform(c, p),
            CellInfo::Intersected { .. } => Across::Missing,
        },
    }
}

pub fn measure(mesh: &CutCellMesh) -> Result<GeometryReport> {
    let adjacency = TetAdjacency::build(&mesh.tets);
    let mut solid = CompensatedSum::default();
    let mut void = CompensatedSum::default();
    let mut at = CompensatedSum::default();
    let mut at_solid = CompensatedSum::default();
    let mut area = CompensatedSum::default();
    for (t, tet) in mesh.tets.iter().enumerate() {
        let phase = phase_of(mesh, t)?;
        let v = tet.volume();
        match phase {
            Phase::Solid => solid.add(v),
            Phase::Void => void.add(v),
        }
        if mesh.ambiguity[t].is_ambiguous() {
            at.add(v);
            if phase == Phase::Solid {
                at_solid.add(v);
            }
        }
        for f in 0..4 {
            let other = match adjacency.neighbors[t][f] {
                Some(n) if n > t => Some(phase_of(mesh, n)?),
                Some(_) => None,
                None => match across_unmatched(mesh, t, f) {
                    Across::Uniform(_, p) => Some(p),
                    _ => None,
                },
            };
            if other.is_some_and(|p| p != phase) {
                area.add(tet.face_area(f));
            }
        }
    }
    let cell_volume = mesh.lattice.cell_volume();
    for info in &mesh.cells {
        match info {
            CellInfo::Uniform(Phase::Solid) => solid.add(cell_volume),
            CellInfo::Uniform(Phase::Void) => void.add(cell_volume),
            CellInfo::Intersected { .. } => {}
        }
    }
    let (v_solid, v_at, v_at_solid) = (solid.value(), at.value(), at_solid.value());
    let ratio = |x: f64| (v_solid > 0.0).then(|| x / v_solid);
    let components = components_with(mesh, &adjacency)?;
    Ok(GeometryReport {
        v_solid,
        v_void: void.value(),
        v_at,
        v_at_solid,
        ratio_at: ratio(v_at),
        ratio_at_solid: ratio(v_at_solid),
        interface_area: area.value(),
        solid_components: components.solid,
        void_components: components.void,
        watertight: watertight_with(mesh, &adjacency)?.watertight,
        n_iat: mesh.count(Ambiguity::Internal),
        n_bat: mesh.count(Ambiguity::Boundary),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentCounts {
    pub solid: usize,
    pub void: usize,
}

impl ComponentCounts {
    pub fn get(&self, phase: Phase) -> usize {
        match phase {
            Phase::Solid => self.solid,
            Phase::Void => self.void,
        }
    }
}

/// Face-connected components per phase over tetrahedra and uniform cells.
pub fn component_counts(mesh: &CutCellMesh) -> Result<ComponentCounts> {
    components_with(mesh, &TetAdjacency::build(&mesh.tets))
}

pub fn component_count(mesh: &CutCellMesh, phase: Phase) -> Result<usize> {
    Ok(component_counts(mesh)?.get(phase))
}

fn components_with(mesh: &CutCellMesh, adjacency: &TetAdjacency) -> Result<ComponentCounts> {
    let nt = mesh.tets.len();
    let lattice = &mesh.lattice;
    let mut uf = UnionFind::<usize>::new(nt + mesh.cells.len());
    for t in 0..nt {
        let p = phase_of(mesh, t)?;
        for f in 0..4 {
            match adjacency.neighbors[t][f] {
                Some(n) if n > t && phase_of(mesh, n)? == p => {
                    uf.union(t, n);
                }
                Some(_) => {}
                None => {
                    if let Across::Uniform(c, q) = across_unmatched(mesh, t, f) {
                        if q == p {
                            uf.union(t, nt + c.0);
                        }
                    }
                }
            }
        }
    }
    for face in lattice.faces() {
        let cells = lattice.face_neighbors(face)?;
        if let [a, b] = cells[..] {
            if let (CellInfo::Uniform(pa), CellInfo::Uniform(pb)) = (&mesh.cells[a.0], &mesh.cells[b.0]) {
                if pa == pb {
                    uf.union(nt + a.0, nt + b.0);
                }
            }
        }
    }
    let mut roots: BTreeMap<usize, Phase> = BTreeMap::new();
    for t in 0..nt {
        roots.insert(uf.find(t), phase_of(mesh, t)?);
    }
    for (c, info) in mesh.cells.iter().enumerate() {
        if let CellInfo::Uniform(p) = info {
            roots.insert(uf.find(nt + c), *p);
        }
    }
    let solid = roots.values().filter(|p| **p == Phase::Solid).count();
    Ok(ComponentCounts { solid, void: roots.len() - solid })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FacetProblem {
    /// Claimed by more than two tetrahedra.
    Overfull,
    /// No matching triangle on the other side.
    Unmatched,
    /// Solid and void meet on a shared lattice face.
    PhaseMismatchOnLatticeFace,
    /// A separating triangle with a lattice-node vertex.
    SeparatesAtNode,
    /// An interface edge with an odd number of interface triangles.
    OpenInterfaceEdge,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OffendingFacet {
    pub problem: FacetProblem,
    /// Two vertices for an open edge, three for a triangle.
    pub vertices: Vec<VertexKey>,
    pub tets: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WatertightReport {
    pub watertight: bool,
    pub offending: Vec<OffendingFacet>,
}

/// Checks that the solid/void boundary is a closed, consistent surface.
pub fn watertight_check(mesh: &CutCellMesh) -> Result<WatertightReport> {
    watertight_with(mesh, &TetAdjacency::build(&mesh.tets))
}

fn watertight_with(mesh: &CutCellMesh, adjacency: &TetAdjacency) -> Result<WatertightReport> {
    let mut offending = Vec::new();
    for (key, tets) in &adjacency.overfull {
        offending.push(OffendingFacet {
            problem: FacetProblem::Overfull,
            vertices: key.0.to_vec(),
            tets: tets.clone(),
        });
    }
    let mut edge_use: BTreeMap<(VertexKey, VertexKey), usize> = BTreeMap::new();
    let mut separating = |key: FaceKey, tets: Vec<usize>, offending: &mut Vec<OffendingFacet>| {
        if !key.is_all_crossings() {
            offending.push(OffendingFacet { problem: FacetProblem::SeparatesAtNode, vertices: key.0.to_vec(), tets });
        }
        let [a, b, c] = key.0;
        for e in [(a, b), (a, c), (b, c)] {
            *edge_use.entry(e).or_default() += 1;
        }
    };
    for t in 0..mesh.tets.len() {
        let p = phase_of(mesh, t)?;
        let tet = &mesh.tets[t];
        for f in 0..4 {
            let key = tet.face_key(f);
            match adjacency.neighbors[t][f] {
                Some(n) if n > t => {
                    if phase_of(mesh, n)? != p {
                        if tet.face_on_cell_boundary(f, &mesh.lattice).is_some() {
                            offending.push(OffendingFacet {
                                problem: FacetProblem::PhaseMismatchOnLatticeFace,
                                vertices: key.0.to_vec(),
                                tets: vec![t, n],
                            });
                        }
                        separating(key, vec![t, n], &mut offending);
                    }
                }
                Some(_) => {}
                None => match across_unmatched(mesh, t, f) {
                    Across::DomainBoundary => {}
                    Across::Uniform(_, q) => {
                        if q != p {
                            offending.push(OffendingFacet {
                                problem: FacetProblem::PhaseMismatchOnLatticeFace,
                                vertices: key.0.to_vec(),
                                tets: vec![t],
                            });
                        }
                    }
                    Across::Missing => {
                        if !adjacency.overfull.iter().any(|(k, _)| *k == key) {
                            offending.push(OffendingFacet {
                                problem: FacetProblem::Unmatched,
                                vertices: key.0.to_vec(),
                                tets: vec![t],
                            });
                        }
                    }
                },
            }
        }
    }
    for ((a, b), count) in edge_use {
        let on_domain_boundary = domain_plane_mask(a, &mesh.lattice) & domain_plane_mask(b, &mesh.lattice) != 0;
        if count % 2 == 1 && !on_domain_boundary {
            offending.push(OffendingFacet {
                problem: FacetProblem::OpenInterfaceEdge,
                vertices: vec![a, b],
                tets: vec![],
            });
        }
    }
    Ok(WatertightReport { watertight: offending.is_empty(), offending })
}

#[cfg(test)]
mod tests;
