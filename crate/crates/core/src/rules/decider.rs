use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{LevelSetField, Phase};
use crate::mesh::FaceId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum DeciderVariant {
    /// (AC − BD) / (A + C − B − D), the bilinear saddle value.
    #[default]
    #[serde(rename = "classical", alias = "classical_saddle")]
    ClassicalSaddle,
    /// (AC − BD) / (A + B + C + D).
    #[serde(rename = "paper", alias = "paper_sum")]
    PaperSum,
}

impl DeciderVariant {
    pub fn name(self) -> &'static str {
        match self {
            DeciderVariant::ClassicalSaddle => "classical",
            DeciderVariant::PaperSum => "paper",
        }
    }
}

impl std::str::FromStr for DeciderVariant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "classical" | "classical_saddle" => Ok(DeciderVariant::ClassicalSaddle),
            "paper" | "paper_sum" => Ok(DeciderVariant::PaperSum),
            _ => Err(format!("unknown decider variant '{s}' (expected classical or paper)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeciderOutcome {
    pub phase: Phase,
    /// `None` when the denominator vanishes.
    pub saddle_value: Option<f64>,
}

impl DeciderOutcome {
    pub fn is_tie(&self) -> bool {
        self.saddle_value == Some(0.0)
    }
}

/// Values in cyclic order around the face, so A and C are diagonal.
pub fn is_alternating([a, b, c, d]: [f64; 4]) -> bool {
    let s = |v: f64| v > 0.0;
    s(a) == s(c) && s(b) == s(d) && s(a) != s(b)
}

pub fn asymptotic_decider(values: [f64; 4], variant: DeciderVariant) -> Result<DeciderOutcome> {
    if !is_alternating(values) {
        return Err(Error::NotAlternatingFace(values));
    }
    let [a, b, c, d] = values;
    let num = a * c - b * d;
    let den = match variant {
        DeciderVariant::ClassicalSaddle => a + c - b - d,
        DeciderVariant::PaperSum => a + b + c + d,
    };
    if den == 0.0 {
        return Ok(DeciderOutcome { phase: Phase::Solid, saddle_value: None });
    }
    let sp = num / den;
    Ok(DeciderOutcome { phase: if sp >= 0.0 { Phase::Solid } else { Phase::Void }, saddle_value: Some(sp) })
}

/// Nodal values of a lattice face, cyclic, starting at its lowest node id.
pub fn face_values(field: &LevelSetField, face: FaceId) -> Result<[f64; 4]> {
    let nodes = field.lattice().face_nodes(face)?;
    let start = (0..4).min_by_key(|&i| nodes[i]).expect("four nodes");
    Ok(std::array::from_fn(|k| field.value(nodes[(start + k) % 4])))
}
