use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::local::area_decision;
use super::ResolutionFlag;
use crate::cutcell::{CutCellMesh, TetAdjacency};
use crate::field::Phase;

/// Face-connected set of ambiguous tetrahedra, possibly spanning cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtCluster {
    /// Position in the canonical order (by smallest member tet id).
    pub id: usize,
    /// Member tet ids, ascending.
    pub tets: Vec<usize>,
    pub area_solid: f64,
    pub area_void: f64,
}

pub(super) fn resolve_g1(mesh: &mut CutCellMesh, phase: Phase) {
    for t in 0..mesh.tets.len() {
        if mesh.ambiguity[t].is_ambiguous() {
            mesh.phases[t] = Some(phase);
        }
    }
}

/// Clusters of ambiguous tets under shared-face adjacency, with the areas of
/// their faces shared with unambiguous tets split by that tet's phase.
pub fn build_clusters(mesh: &CutCellMesh, adjacency: &TetAdjacency) -> Vec<AtCluster> {
    let n = mesh.tets.len();
    let ambiguous = |t: usize| mesh.ambiguity[t].is_ambiguous();
    let mut visited = vec![false; n];
    let mut clusters = Vec::new();
    let mut queue = VecDeque::new();
    for seed in 0..n {
        if visited[seed] || !ambiguous(seed) {
            continue;
        }
        visited[seed] = true;
        queue.push_back(seed);
        let mut members = Vec::new();
        let (mut solid, mut void) = (0.0, 0.0);
        while let Some(t) = queue.pop_front() {
            members.push(t);
            for f in 0..4 {
                let Some(m) = adjacency.neighbors[t][f] else { continue };
                if ambiguous(m) {
                    if !visited[m] {
                        visited[m] = true;
                        queue.push_back(m);
                    }
                } else {
                    let area = mesh.tets[t].face_area(f);
                    match mesh.phases[m].expect("unambiguous tets carry a phase") {
                        Phase::Solid => solid += area,
                        Phase::Void => void += area,
                    }
                }
            }
        }
        members.sort_unstable();
        clusters.push(AtCluster { id: clusters.len(), tets: members, area_solid: solid, area_void: void });
    }
    clusters
}

pub(super) fn resolve_g2(mesh: &mut CutCellMesh, clusters: &[AtCluster], max: bool, flags: &mut Vec<ResolutionFlag>) {
    for c in clusters {
        let phase = if c.area_solid == 0.0 && c.area_void == 0.0 {
            flags.push(ResolutionFlag::ZeroArea { cell: None, cluster: Some(c.id) });
            Phase::Solid
        } else {
            if c.area_solid == c.area_void {
                flags.push(ResolutionFlag::AreaTie { cell: None, cluster: Some(c.id), area: c.area_solid });
            }
            area_decision(c.area_solid, c.area_void, max)
        };
        for &t in &c.tets {
            mesh.phases[t] = Some(phase);
        }
    }
}
