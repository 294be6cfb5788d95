use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ResolutionFlag;
use crate::cutcell::{Ambiguity, CellInfo, CutCellMesh, TetAdjacency};
use crate::error::Result;
use crate::field::{LevelSetField, Phase};
use crate::geom::Point;
use crate::mesh::{CellId, HexLattice};

/// Elemental phases carried between design iterations for L2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationState {
    /// Current design iteration, starting at 1.
    pub iteration: u32,
    /// Stored elemental phase per cell.
    pub phases: Vec<Option<Phase>>,
}

impl IterationState {
    pub fn new(lattice: &HexLattice) -> Self {
        IterationState { iteration: 1, phases: vec![None; lattice.cell_count()] }
    }
}

fn internal_tets(mesh: &CutCellMesh, cell: usize) -> impl Iterator<Item = usize> + '_ {
    mesh.cell_tets(CellId(cell)).filter(|&t| mesh.ambiguity[t] == Ambiguity::Internal)
}

fn assign_per_cell(mesh: &mut CutCellMesh, decisions: Vec<Option<Phase>>) {
    for (cell, decision) in decisions.into_iter().enumerate() {
        if let Some(p) = decision {
            for t in mesh.cell_tets(CellId(cell)) {
                if mesh.ambiguity[t] == Ambiguity::Internal {
                    mesh.phases[t] = Some(p);
                }
            }
        }
    }
}

pub(super) fn resolve_l1(mesh: &mut CutCellMesh, phase: Phase) {
    for t in 0..mesh.tets.len() {
        if mesh.ambiguity[t] == Ambiguity::Internal {
            mesh.phases[t] = Some(phase);
        }
    }
}

pub(super) fn resolve_l2(mesh: &mut CutCellMesh, state: &mut IterationState, flags: &mut Vec<ResolutionFlag>) {
    if state.phases.len() != mesh.cells.len() {
        state.phases.resize(mesh.cells.len(), None);
    }
    let mut decisions = vec![None; mesh.cells.len()];
    for (c, info) in mesh.cells.iter().enumerate() {
        match info {
            CellInfo::Uniform(p) => state.phases[c] = Some(*p),
            CellInfo::Intersected { .. } => {
                if state.iteration <= 1 {
                    state.phases[c] = Some(Phase::Solid);
                } else if state.phases[c].is_none() {
                    flags.push(ResolutionFlag::MissingState { cell: CellId(c) });
                    state.phases[c] = Some(Phase::Solid);
                }
                decisions[c] = state.phases[c];
            }
        }
    }
    state.iteration += 1;
    assign_per_cell(mesh, decisions);
}

pub(super) fn resolve_l3(mesh: &mut CutCellMesh, field: &LevelSetField) -> Result<()> {
    let decisions = (0..mesh.cells.len())
        .into_par_iter()
        .map(|c| {
            let iats: Vec<usize> = internal_tets(mesh, c).collect();
            if iats.is_empty() {
                return Ok(None);
            }
            let sum = iats.iter().fold(nalgebra::Vector3::zeros(), |acc, &t| acc + mesh.tets[t].centroid().coords);
            let point = Point::from(sum / iats.len() as f64);
            let phi = field.interpolate_at(CellId(c), &point)?;
            Ok(Some(if phi >= 0.0 { Phase::Solid } else { Phase::Void }))
        })
        .collect::<Result<Vec<_>>>()?;
    assign_per_cell(mesh, decisions);
    Ok(())
}

/// Shared areas `(solid, void)` between a cell's internal-ambiguous tets and
/// its unambiguous tets. Each face is counted once.
pub fn l4_areas(mesh: &CutCellMesh, cell: CellId) -> (f64, f64) {
    let range = mesh.cell_tets(cell);
    let local = TetAdjacency::build(&mesh.tets[range.clone()]);
    let (mut solid, mut void) = (0.0, 0.0);
    for t in range.clone() {
        if mesh.ambiguity[t] != Ambiguity::Internal {
            continue;
        }
        for f in 0..4 {
            let Some(n) = local.neighbors[t - range.start][f] else { continue };
            let n = n + range.start;
            if mesh.ambiguity[n] != Ambiguity::Unambiguous {
                continue;
            }
            let area = mesh.tets[t].face_area(f);
            match mesh.phases[n].expect("unambiguous tets carry a phase") {
                Phase::Solid => solid += area,
                Phase::Void => void += area,
            }
        }
    }
    (solid, void)
}

/// Branch on strictly larger solid area; max picks that phase, min the other.
pub(super) fn area_decision(solid: f64, void: f64, max: bool) -> Phase {
    let larger = if solid > void { Phase::Solid } else { Phase::Void };
    if max {
        larger
    } else {
        larger.opposite()
    }
}

pub(super) fn resolve_l4(mesh: &mut CutCellMesh, max: bool, flags: &mut Vec<ResolutionFlag>) {
    let results: Vec<Option<(f64, f64)>> = (0..mesh.cells.len())
        .into_par_iter()
        .map(|c| (internal_tets(mesh, c).next().is_some()).then(|| l4_areas(mesh, CellId(c))))
        .collect();
    let mut decisions = vec![None; results.len()];
    for (c, r) in results.into_iter().enumerate() {
        let Some((solid, void)) = r else { continue };
        decisions[c] = Some(if solid == 0.0 && void == 0.0 {
            flags.push(ResolutionFlag::ZeroArea { cell: Some(CellId(c)), cluster: None });
            Phase::Solid
        } else {
            if solid == void {
                flags.push(ResolutionFlag::AreaTie { cell: Some(CellId(c)), cluster: None, area: solid });
            }
            area_decision(solid, void, max)
        });
    }
    assign_per_cell(mesh, decisions);
}
