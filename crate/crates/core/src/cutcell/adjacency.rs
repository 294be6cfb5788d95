use serde::{Deserialize, Serialize};

use super::{Tet, VertexKey};

/// Triangle identity by sorted vertex keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FaceKey(pub [VertexKey; 3]);

impl FaceKey {
    pub fn new(mut keys: [VertexKey; 3]) -> Self {
        keys.sort();
        FaceKey(keys)
    }

    pub fn is_all_crossings(&self) -> bool {
        self.0.iter().all(VertexKey::is_crossing)
    }
}

/// Face-to-face neighbours across all tetrahedra of a mesh.
#[derive(Debug, Clone, Default)]
pub struct TetAdjacency {
    /// `neighbors[t][f]` is the tet across face `f` of tet `t`.
    pub neighbors: Vec<[Option<usize>; 4]>,
    /// Faces claimed by more than two tetrahedra; empty for a conforming mesh.
    pub overfull: Vec<(FaceKey, Vec<usize>)>,
}

impl TetAdjacency {
    pub fn build(tets: &[Tet]) -> Self {
        let mut entries: Vec<(FaceKey, usize, usize)> = Vec::with_capacity(tets.len() * 4);
        for (t, tet) in tets.iter().enumerate() {
            for f in 0..4 {
                entries.push((tet.face_key(f), t, f));
            }
        }
        entries.sort_unstable();
        let mut neighbors = vec![[None; 4]; tets.len()];
        let mut overfull = Vec::new();
        for group in entries.chunk_by(|a, b| a.0 == b.0) {
            match group {
                [_] => {}
                [(_, ta, fa), (_, tb, fb)] => {
                    neighbors[*ta][*fa] = Some(*tb);
                    neighbors[*tb][*fb] = Some(*ta);
                }
                _ => overfull.push((group[0].0, group.iter().map(|e| e.1).collect())),
            }
        }
        TetAdjacency { neighbors, overfull }
    }
}
