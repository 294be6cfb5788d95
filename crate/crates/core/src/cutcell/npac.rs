//! Sign-pattern classes under cube symmetry groups.
//!
//! Class ids are assigned in increasing order of each orbit's smallest
//! code, starting at 1. The representative of a class is that smallest code.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::SignPattern;
use crate::error::{Error, Result};
use crate::mesh::corner_offset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetryGroup {
    /// Proper rotations of the cube.
    Rot24,
    /// Rotations and reflections.
    RotRefl48,
    /// Rotations combined with solid/void exchange.
    Rot24Complement,
    /// Full octahedral group combined with solid/void exchange.
    RotRefl48Complement,
}

impl SymmetryGroup {
    pub const ALL: [SymmetryGroup; 4] = [
        SymmetryGroup::Rot24,
        SymmetryGroup::RotRefl48,
        SymmetryGroup::Rot24Complement,
        SymmetryGroup::RotRefl48Complement,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SymmetryGroup::Rot24 => "rot24",
            SymmetryGroup::RotRefl48 => "rot_refl48",
            SymmetryGroup::Rot24Complement => "rot24_complement",
            SymmetryGroup::RotRefl48Complement => "rot_refl48_complement",
        }
    }

    pub fn order(self) -> usize {
        match self {
            SymmetryGroup::Rot24 => 24,
            SymmetryGroup::RotRefl48 | SymmetryGroup::Rot24Complement => 48,
            SymmetryGroup::RotRefl48Complement => 96,
        }
    }

    fn includes_reflections(self) -> bool {
        matches!(self, SymmetryGroup::RotRefl48 | SymmetryGroup::RotRefl48Complement)
    }

    fn includes_complement(self) -> bool {
        matches!(self, SymmetryGroup::Rot24Complement | SymmetryGroup::RotRefl48Complement)
    }
}

impl std::str::FromStr for SymmetryGroup {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        SymmetryGroup::ALL.into_iter().find(|g| g.name() == s).ok_or_else(|| format!("unknown symmetry group '{s}'"))
    }
}

/// A cube symmetry acting on corner indices, optionally followed by a sign flip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SymmetryOp {
    /// `corners[c]` is the image of corner `c`.
    pub corners: [u8; 8],
    pub complement: bool,
}

impl SymmetryOp {
    pub const IDENTITY: SymmetryOp = SymmetryOp { corners: [0, 1, 2, 3, 4, 5, 6, 7], complement: false };

    pub fn apply(&self, pattern: SignPattern) -> SignPattern {
        let mut out = 0u8;
        for c in 0..8 {
            if pattern.is_solid(c) {
                out |= 1 << self.corners[c];
            }
        }
        SignPattern(if self.complement { !out } else { out })
    }
}

/// All 48 signed axis permutations with their determinant sign.
fn octahedral_ops() -> Vec<(SymmetryOp, bool)> {
    const PERMS: [([usize; 3], bool); 6] = [
        ([0, 1, 2], true),
        ([1, 2, 0], true),
        ([2, 0, 1], true),
        ([0, 2, 1], false),
        ([2, 1, 0], false),
        ([1, 0, 2], false),
    ];
    let mut ops = Vec::with_capacity(48);
    for (perm, even) in PERMS {
        for flips in 0..8u32 {
            let proper = even == (flips.count_ones() % 2 == 0);
            let corners = std::array::from_fn(|c| {
                let o = corner_offset(c);
                (0..3).fold(0u8, |acc, a| acc | ((((o[perm[a]] as u32) ^ ((flips >> a) & 1)) as u8) << a))
            });
            ops.push((SymmetryOp { corners, complement: false }, proper));
        }
    }
    ops
}

pub fn group_ops(group: SymmetryGroup) -> Vec<SymmetryOp> {
    let base: Vec<SymmetryOp> = octahedral_ops()
        .into_iter()
        .filter(|(_, proper)| *proper || group.includes_reflections())
        .map(|(op, _)| op)
        .collect();
    let mut ops = base.clone();
    if group.includes_complement() {
        ops.extend(base.iter().map(|op| SymmetryOp { complement: true, ..*op }));
    }
    ops
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NpacClass {
    pub class_id: usize,
    pub representative: SignPattern,
    /// Maps the input pattern onto the representative.
    pub transform: SymmetryOp,
}

/// Orbit partition of the 254 intersected patterns under one group.
#[derive(Debug, Clone)]
pub struct NpacTable {
    pub group: SymmetryGroup,
    pub representatives: Vec<SignPattern>,
    pub orbit_sizes: Vec<usize>,
    class_of: [usize; 256],
    ops: Vec<SymmetryOp>,
}

impl NpacTable {
    pub fn build(group: SymmetryGroup) -> Self {
        let ops = group_ops(group);
        let mut class_of = [0usize; 256];
        let mut representatives = Vec::new();
        let mut orbit_sizes = Vec::new();
        for code in 1..=254u8 {
            if class_of[code as usize] != 0 {
                continue;
            }
            let id = representatives.len() + 1;
            representatives.push(SignPattern(code));
            let mut size = 0;
            for op in &ops {
                let img = op.apply(SignPattern(code)).0 as usize;
                if class_of[img] == 0 {
                    class_of[img] = id;
                    size += 1;
                }
            }
            orbit_sizes.push(size);
        }
        NpacTable { group, representatives, orbit_sizes, class_of, ops }
    }

    pub fn class_count(&self) -> usize {
        self.representatives.len()
    }

    pub fn classify(&self, pattern: SignPattern) -> Result<NpacClass> {
        if pattern.is_constant() {
            return Err(Error::ConstantPattern(pattern.0));
        }
        let class_id = self.class_of[pattern.0 as usize];
        let representative = self.representatives[class_id - 1];
        let transform =
            *self.ops.iter().find(|op| op.apply(pattern) == representative).expect("representative lies in the orbit");
        Ok(NpacClass { class_id, representative, transform })
    }
}

/// Cached table for a group.
pub fn npac_table(group: SymmetryGroup) -> &'static NpacTable {
    static TABLES: [OnceLock<NpacTable>; 4] = [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];
    let slot = SymmetryGroup::ALL.iter().position(|g| *g == group).expect("listed group");
    TABLES[slot].get_or_init(|| NpacTable::build(group))
}

pub fn canonicalize_npac(pattern: SignPattern, group: SymmetryGroup) -> Result<NpacClass> {
    npac_table(group).classify(pattern)
}

/// Number of classes for every candidate group.
pub fn orbit_counts() -> Vec<(SymmetryGroup, usize)> {
    SymmetryGroup::ALL.iter().map(|&g| (g, npac_table(g).class_count())).collect()
}

/// One row of the class atlas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtlasEntry {
    pub class_id: usize,
    pub representative: u8,
    pub orbit_size: usize,
    pub crossings: usize,
    pub tets: usize,
    pub ats: usize,
    pub iats: usize,
    pub bats: usize,
}

/// Decomposes each class representative on a unit cell with values ±1.
pub fn npac_atlas(group: SymmetryGroup) -> Result<Vec<AtlasEntry>> {
    use super::{tag_ambiguity, tetrahedralize, Ambiguity};
    use crate::field::LevelSetField;
    use crate::mesh::{CellId, HexLattice};

    let lattice = HexLattice::new([1, 1, 1], [0.0; 3], 1.0)?;
    let table = npac_table(group);
    table
        .representatives
        .iter()
        .zip(&table.orbit_sizes)
        .enumerate()
        .map(|(i, (rep, &orbit_size))| {
            let values = (0..8).map(|c| if rep.is_solid(c) { 1.0 } else { -1.0 }).collect();
            let field = LevelSetField::from_values(lattice, values)?;
            let tets = tetrahedralize(&field, CellId(0))?;
            let tags = tag_ambiguity(&tets, &lattice);
            let count = |k: Ambiguity| tags.iter().filter(|&&a| a == k).count();
            Ok(AtlasEntry {
                class_id: i + 1,
                representative: rep.0,
                orbit_size,
                crossings: rep.crossing_count(),
                tets: tets.len(),
                ats: count(Ambiguity::Internal) + count(Ambiguity::Boundary),
                iats: count(Ambiguity::Internal),
                bats: count(Ambiguity::Boundary),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_orders() {
        for g in SymmetryGroup::ALL {
            let ops = group_ops(g);
            assert_eq!(ops.len(), g.order());
            let mut uniq = ops.clone();
            uniq.sort_by_key(|o| (o.corners, o.complement));
            uniq.dedup();
            assert_eq!(uniq.len(), ops.len());
        }
    }

    #[test]
    fn ops_preserve_cube_edges() {
        use crate::mesh::LOCAL_EDGES;
        let is_edge = |a: u8, b: u8| {
            LOCAL_EDGES.iter().any(|&(x, y)| (x, y) == (a as usize, b as usize) || (y, x) == (a as usize, b as usize))
        };
        for op in group_ops(SymmetryGroup::RotRefl48) {
            for &(a, b) in &LOCAL_EDGES {
                assert!(is_edge(op.corners[a], op.corners[b]));
            }
        }
    }

    #[test]
    fn single_corner_patterns_share_a_class() {
        for g in SymmetryGroup::ALL {
            let ids: Vec<usize> =
                (0..8).map(|c| canonicalize_npac(SignPattern(!(1u8 << c)), g).unwrap().class_id).collect();
            assert!(ids.iter().all(|&i| i == ids[0]));
        }
    }

    #[test]
    fn orbits_cover_every_intersected_pattern() {
        for g in SymmetryGroup::ALL {
            let t = npac_table(g);
            assert_eq!(t.orbit_sizes.iter().sum::<usize>(), 254);
        }
    }

    #[test]
    fn transform_maps_to_representative() {
        for g in SymmetryGroup::ALL {
            for code in 1..=254u8 {
                let c = canonicalize_npac(SignPattern(code), g).unwrap();
                assert_eq!(c.transform.apply(SignPattern(code)), c.representative);
            }
        }
    }

    #[test]
    fn atlas_single_corner_class_has_no_ambiguity() {
        let atlas = npac_atlas(SymmetryGroup::Rot24Complement).unwrap();
        assert_eq!(atlas.len(), 14);
        assert_eq!(atlas[0].representative, 1);
        assert_eq!(atlas[0].crossings, 3);
        assert_eq!(atlas[0].ats, 0);
        assert_eq!(atlas.iter().map(|e| e.orbit_size).sum::<usize>(), 254);
        assert!(atlas.iter().all(|e| e.crossings >= 4 || e.ats == 0));
    }

    #[test]
    fn constant_patterns_have_no_class() {
        assert!(canonicalize_npac(SignPattern(0), SymmetryGroup::Rot24).is_err());
        assert!(canonicalize_npac(SignPattern(255), SymmetryGroup::Rot24).is_err());
    }
}
