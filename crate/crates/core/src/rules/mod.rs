//! Phase assignment for ambiguous tetrahedra.
//!
//! Local rules settle boundary-ambiguous tets with the asymptotic decider on
//! their lattice face and internal ones per cell. Global rules treat every
//! ambiguous tet alike, either all at once or per face-connected cluster.

mod decider;
mod global;
mod local;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use decider::{asymptotic_decider, face_values, is_alternating, DeciderOutcome, DeciderVariant};
pub use global::{build_clusters, AtCluster};
pub use local::{l4_areas, IterationState};

use crate::cutcell::{Ambiguity, CutCellMesh, TetAdjacency};
use crate::error::Result;
use crate::field::{LevelSetField, Phase};
use crate::mesh::{CellId, FaceId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rule {
    #[serde(rename = "L1_solid")]
    L1Solid,
    #[serde(rename = "L1_void")]
    L1Void,
    L2,
    L3,
    #[serde(rename = "L4_max")]
    L4Max,
    #[serde(rename = "L4_min")]
    L4Min,
    #[serde(rename = "G1_solid")]
    G1Solid,
    #[serde(rename = "G1_void")]
    G1Void,
    #[serde(rename = "G2_max")]
    G2Max,
    #[serde(rename = "G2_min")]
    G2Min,
}

impl Rule {
    pub const ALL: [Rule; 10] = [
        Rule::L1Solid,
        Rule::L1Void,
        Rule::L2,
        Rule::L3,
        Rule::L4Max,
        Rule::L4Min,
        Rule::G1Solid,
        Rule::G1Void,
        Rule::G2Max,
        Rule::G2Min,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::L1Solid => "L1_solid",
            Rule::L1Void => "L1_void",
            Rule::L2 => "L2",
            Rule::L3 => "L3",
            Rule::L4Max => "L4_max",
            Rule::L4Min => "L4_min",
            Rule::G1Solid => "G1_solid",
            Rule::G1Void => "G1_void",
            Rule::G2Max => "G2_max",
            Rule::G2Min => "G2_min",
        }
    }

    pub fn is_local(self) -> bool {
        !matches!(self, Rule::G1Solid | Rule::G1Void | Rule::G2Max | Rule::G2Min)
    }
}

impl std::fmt::Display for Rule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Rule {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Rule::ALL.into_iter().find(|r| r.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Rule::ALL.iter().map(|r| r.name()).collect();
            format!("unknown rule '{s}' (expected one of {})", names.join(", "))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleConfig {
    pub rule: Rule,
    #[serde(default)]
    pub decider: DeciderVariant,
}

impl RuleConfig {
    pub fn new(rule: Rule) -> Self {
        RuleConfig { rule, decider: DeciderVariant::default() }
    }
}

/// A tie or degenerate case met while resolving.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ResolutionFlag {
    /// Saddle value exactly zero; resolved solid.
    DeciderTie { face: FaceId },
    /// Vanishing denominator in the four-value-sum decider; resolved solid.
    ZeroDenominator { face: FaceId },
    /// Equal, nonzero shared areas; the strict comparison took the else branch.
    AreaTie { cell: Option<CellId>, cluster: Option<usize>, area: f64 },
    /// No face shared with an unambiguous tet; resolved solid.
    ZeroArea { cell: Option<CellId>, cluster: Option<usize> },
    /// No stored elemental phase for an intersected cell; resolved solid.
    MissingState { cell: CellId },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DeciderStats {
    pub faces: usize,
    pub solid: usize,
    pub void: usize,
    pub ties: usize,
    pub zero_denominators: usize,
    /// Faces on which the two decider variants disagree.
    pub variant_divergence: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolutionReport {
    pub rule: Rule,
    pub decider_variant: DeciderVariant,
    pub tets: usize,
    pub iat: usize,
    pub bat: usize,
    pub decider: DeciderStats,
    pub clusters: Option<usize>,
    pub iteration: Option<u32>,
    pub tie_count: usize,
    pub flags: Vec<ResolutionFlag>,
}

/// Assigns a phase to every ambiguous tetrahedron of `mesh`.
///
/// Previous ambiguous phases are discarded first, so resolving again with
/// the same inputs gives the same result. `state` is only used by L2; when
/// absent a cold-start state is used.
pub fn resolve(
    mesh: &mut CutCellMesh,
    field: &LevelSetField,
    config: &RuleConfig,
    state: Option<&mut IterationState>,
) -> Result<ResolutionReport> {
    mesh.reset_ambiguous_phases();
    let mut report = ResolutionReport {
        rule: config.rule,
        decider_variant: config.decider,
        tets: mesh.tets.len(),
        iat: mesh.count(Ambiguity::Internal),
        bat: mesh.count(Ambiguity::Boundary),
        decider: DeciderStats::default(),
        clusters: None,
        iteration: None,
        tie_count: 0,
        flags: Vec::new(),
    };

    if config.rule.is_local() {
        resolve_bats(mesh, field, config.decider, &mut report)?;
        match config.rule {
            Rule::L1Solid => local::resolve_l1(mesh, Phase::Solid),
            Rule::L1Void => local::resolve_l1(mesh, Phase::Void),
            Rule::L2 => {
                let mut cold;
                let state = match state {
                    Some(s) => s,
                    None => {
                        cold = IterationState::new(&mesh.lattice);
                        &mut cold
                    }
                };
                report.iteration = Some(state.iteration);
                local::resolve_l2(mesh, state, &mut report.flags);
            }
            Rule::L3 => local::resolve_l3(mesh, field)?,
            Rule::L4Max => local::resolve_l4(mesh, true, &mut report.flags),
            Rule::L4Min => local::resolve_l4(mesh, false, &mut report.flags),
            _ => unreachable!("global rule"),
        }
    } else {
        match config.rule {
            Rule::G1Solid => global::resolve_g1(mesh, Phase::Solid),
            Rule::G1Void => global::resolve_g1(mesh, Phase::Void),
            Rule::G2Max | Rule::G2Min => {
                let adjacency = TetAdjacency::build(&mesh.tets);
                let clusters = build_clusters(mesh, &adjacency);
                report.clusters = Some(clusters.len());
                global::resolve_g2(mesh, &clusters, config.rule == Rule::G2Max, &mut report.flags);
            }
            _ => unreachable!("local rule"),
        }
    }
    report.tie_count = report.flags.len();
    debug_assert!(mesh.is_fully_phased());
    Ok(report)
}

/// Decides every boundary-ambiguous tet from its lattice face, once per face.
fn resolve_bats(
    mesh: &mut CutCellMesh,
    field: &LevelSetField,
    variant: DeciderVariant,
    report: &mut ResolutionReport,
) -> Result<()> {
    let mut bat_faces: BTreeMap<FaceId, Vec<usize>> = BTreeMap::new();
    for t in 0..mesh.tets.len() {
        if mesh.ambiguity[t] == Ambiguity::Boundary {
            let (face, _) = mesh.bat_face(t).expect("boundary-ambiguous tet lies on a lattice face");
            bat_faces.entry(face).or_default().push(t);
        }
    }
    let faces: Vec<FaceId> = bat_faces.keys().copied().collect();
    let outcomes: Vec<(DeciderOutcome, DeciderOutcome)> = faces
        .par_iter()
        .map(|&f| {
            let values = face_values(field, f)?;
            let chosen = asymptotic_decider(values, variant)?;
            let other = asymptotic_decider(
                values,
                match variant {
                    DeciderVariant::ClassicalSaddle => DeciderVariant::PaperSum,
                    DeciderVariant::PaperSum => DeciderVariant::ClassicalSaddle,
                },
            )?;
            Ok((chosen, other))
        })
        .collect::<Result<_>>()?;

    let stats = &mut report.decider;
    for (face, (chosen, other)) in faces.iter().zip(outcomes) {
        stats.faces += 1;
        match chosen.phase {
            Phase::Solid => stats.solid += 1,
            Phase::Void => stats.void += 1,
        }
        if chosen.phase != other.phase {
            stats.variant_divergence += 1;
        }
        if chosen.saddle_value.is_none() {
            stats.zero_denominators += 1;
            report.flags.push(ResolutionFlag::ZeroDenominator { face: *face });
        } else if chosen.is_tie() {
            stats.ties += 1;
            report.flags.push(ResolutionFlag::DeciderTie { face: *face });
        }
        for &t in &bat_faces[face] {
            mesh.phases[t] = Some(chosen.phase);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests;
