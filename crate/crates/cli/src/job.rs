//! Job files.
//!
//! A job is a JSON object:
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "lattice": { "dims": [8, 8, 8], "origin": [0, 0, 0], "spacing": 0.125 },
//!   "field": { "preset": { "kind": "random", "seed": 7 } },
//!   "filter": { "radius": 0.2 },
//!   "rule": "L3",
//!   "decider": "classical",
//!   "output": { "mesh": "out.vtk", "report": "out.json" }
//! }
//! ```
//!
//! Exactly one of `field` and `iterations` is given. `iterations` is a list
//! of field sources resolved in order with a shared iteration state, which
//! is how L2 is driven. A field source is one of
//!
//! - `{"nodal": [..]}`: one value per lattice node, x fastest;
//! - `{"scene": {"primitives": [..]}}`: spheres and cuboids composed left to
//!   right, a solid primitive by `max(φ, g)`, a void one by `min(φ, -g)`;
//! - `{"preset": {"kind": ..}}`: `plane`, `shell`, `checker` or `random`.
//!
//! Unknown fields anywhere are rejected.

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use tetcut_core::field::{apply_filter, sample_scene};
use tetcut_core::{FilterSpec, HexLattice, LevelSetField, PrimitiveScene, Rule, RuleConfig};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    pub dims: [usize; 3],
    #[serde(default)]
    pub origin: [f64; 3],
    pub spacing: f64,
}

impl LatticeSpec {
    pub fn build(&self) -> Result<HexLattice, CliError> {
        Ok(HexLattice::new(self.dims, self.origin, self.spacing)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSource {
    Nodal(Vec<f64>),
    Scene(PrimitiveScene),
    Preset(Preset),
}

/// Generated fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Preset {
    /// `φ = offset - n·x`, solid on the side the normal points away from.
    Plane { normal: [f64; 3], offset: f64 },
    /// Solid ball of `outer_radius` with a void core of `inner_radius`.
    Shell { center: [f64; 3], inner_radius: f64, outer_radius: f64 },
    /// Nodal values `±magnitude` alternating in every direction.
    Checker {
        #[serde(default = "unit")]
        magnitude: f64,
    },
    /// Independent nodal values with random sign and magnitude in `[low, high)`.
    /// Without a seed the `--seed` flag is used.
    Random {
        #[serde(default)]
        seed: Option<u64>,
        #[serde(default = "default_low")]
        low: f64,
        #[serde(default = "default_high")]
        high: f64,
    },
}

fn unit() -> f64 {
    1.0
}

fn default_low() -> f64 {
    0.1
}

fn default_high() -> f64 {
    10.0
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputTargets {
    #[serde(default)]
    pub mesh: Option<PathBuf>,
    #[serde(default)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub schema_version: u32,
    pub lattice: LatticeSpec,
    #[serde(default)]
    pub field: Option<FieldSource>,
    #[serde(default)]
    pub iterations: Option<Vec<FieldSource>>,
    /// Applied to the nodal values of every field source.
    #[serde(default)]
    pub filter: Option<FilterSpec>,
    #[serde(default)]
    pub rule: Option<Rule>,
    #[serde(default)]
    pub decider: Option<tetcut_core::rules::DeciderVariant>,
    #[serde(default)]
    pub output: OutputTargets,
}

impl JobSpec {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let job: JobSpec = serde_json::from_str(text).map_err(|e| CliError::Validation(format!("job file: {e}")))?;
        job.validate()?;
        Ok(job)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::Validation(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        match (&self.field, &self.iterations) {
            (Some(_), None) => {}
            (None, Some(list)) if !list.is_empty() => {}
            (None, Some(_)) => return Err(CliError::Validation("iterations list is empty".into())),
            _ => return Err(CliError::Validation("give exactly one of `field` and `iterations`".into())),
        }
        self.lattice.build()?;
        if let Some(f) = &self.filter {
            f.validate()?;
        }
        Ok(())
    }

    /// Field sources in resolution order.
    pub fn sources(&self) -> Vec<&FieldSource> {
        match (&self.field, &self.iterations) {
            (Some(f), _) => vec![f],
            (None, Some(list)) => list.iter().collect(),
            (None, None) => vec![],
        }
    }

    /// Rule and decider from the job, overridden by command-line flags.
    pub fn rule_config(
        &self,
        rule: Option<Rule>,
        decider: Option<tetcut_core::rules::DeciderVariant>,
    ) -> Result<RuleConfig, CliError> {
        let rule =
            rule.or(self.rule).ok_or_else(|| CliError::Validation("no rule given in the job or with --rule".into()))?;
        Ok(RuleConfig { rule, decider: decider.or(self.decider).unwrap_or_default() })
    }

    pub fn fields(&self, seed: u64) -> Result<Vec<LevelSetField>, CliError> {
        let lattice = self.lattice.build()?;
        self.sources().into_iter().map(|s| build_field(s, &lattice, self.filter.as_ref(), seed)).collect()
    }
}

fn preset_values(preset: &Preset, lattice: &HexLattice, seed: u64) -> Result<Vec<f64>, CliError> {
    let positions = || lattice.nodes().map(|n| lattice.node_position(n).expect("node of this lattice"));
    Ok(match *preset {
        Preset::Plane { normal, offset } => {
            if normal.iter().all(|&v| v == 0.0) || normal.iter().any(|v| !v.is_finite()) {
                return Err(CliError::Validation(format!("plane normal {normal:?} must be finite and nonzero")));
            }
            positions().map(|p| offset - (normal[0] * p[0] + normal[1] * p[1] + normal[2] * p[2])).collect()
        }
        Preset::Shell { center, inner_radius, outer_radius } => {
            if !(inner_radius > 0.0 && outer_radius > inner_radius) {
                return Err(CliError::Validation(format!(
                    "shell needs 0 < inner_radius < outer_radius, got {inner_radius} and {outer_radius}"
                )));
            }
            let scene = shell_scene(center, inner_radius, outer_radius);
            sample_scene(&scene, lattice)?.values().to_vec()
        }
        Preset::Checker { magnitude } => {
            if !(magnitude.is_finite() && magnitude > 0.0) {
                return Err(CliError::Validation(format!("checker magnitude must be positive, got {magnitude}")));
            }
            lattice
                .nodes()
                .map(|n| {
                    let [i, j, k] = lattice.node_index(n);
                    if (i + j + k) % 2 == 0 {
                        magnitude
                    } else {
                        -magnitude
                    }
                })
                .collect()
        }
        Preset::Random { seed: own, low, high } => {
            if !(low > 0.0 && high > low && high.is_finite()) {
                return Err(CliError::Validation(format!("random preset needs 0 < low < high, got [{low}, {high})")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(own.unwrap_or(seed));
            (0..lattice.node_count())
                .map(|_| {
                    let m = rng.gen_range(low..high);
                    if rng.gen_bool(0.5) {
                        m
                    } else {
                        -m
                    }
                })
                .collect()
        }
    })
}

pub fn shell_scene(center: [f64; 3], inner_radius: f64, outer_radius: f64) -> PrimitiveScene {
    use tetcut_core::{Primitive, Sense, Shape};
    PrimitiveScene {
        primitives: vec![
            Primitive { shape: Shape::Sphere { center, radius: outer_radius }, sense: Sense::Solid },
            Primitive { shape: Shape::Sphere { center, radius: inner_radius }, sense: Sense::Void },
        ],
    }
}

pub fn build_field(
    source: &FieldSource,
    lattice: &HexLattice,
    filter: Option<&FilterSpec>,
    seed: u64,
) -> Result<LevelSetField, CliError> {
    let raw = match source {
        FieldSource::Nodal(values) => values.clone(),
        FieldSource::Scene(scene) => sample_scene(scene, lattice)?.values().to_vec(),
        FieldSource::Preset(p) => preset_values(p, lattice, seed)?,
    };
    Ok(match filter {
        Some(spec) => apply_filter(&raw, lattice, spec)?,
        None => LevelSetField::from_values(*lattice, raw)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#""schema_version": 1, "lattice": {"dims": [2, 2, 2], "spacing": 0.5}"#;

    #[test]
    fn rejects_unknown_fields() {
        let text = format!(r#"{{ {BASE}, "field": {{"preset": {{"kind": "checker"}}}}, "colour": 1 }}"#);
        assert!(matches!(JobSpec::parse(&text), Err(CliError::Validation(_))));
        let text = format!(r#"{{ {BASE}, "field": {{"preset": {{"kind": "checker", "size": 2}}}} }}"#);
        assert!(JobSpec::parse(&text).is_err());
    }

    #[test]
    fn needs_exactly_one_source() {
        assert!(JobSpec::parse(&format!("{{ {BASE} }}")).is_err());
        let both = format!(
            r#"{{ {BASE}, "field": {{"preset": {{"kind": "checker"}}}}, "iterations": [{{"preset": {{"kind": "checker"}}}}] }}"#
        );
        assert!(JobSpec::parse(&both).is_err());
        assert!(JobSpec::parse(&format!(r#"{{ {BASE}, "iterations": [] }}"#)).is_err());
    }

    #[test]
    fn wrong_schema_version() {
        let text = r#"{"schema_version": 2, "lattice": {"dims": [1, 1, 1], "spacing": 1}, "field": {"nodal": [1,1,1,1,1,1,1,1]}}"#;
        assert!(JobSpec::parse(text).is_err());
    }

    #[test]
    fn checker_alternates() {
        let lattice = HexLattice::new([2, 2, 2], [0.0; 3], 1.0).unwrap();
        let f = build_field(&FieldSource::Preset(Preset::Checker { magnitude: 2.0 }), &lattice, None, 0).unwrap();
        assert_eq!(f.values()[0], 2.0);
        assert_eq!(f.values()[1], -2.0);
        assert_eq!(f.values()[4], 2.0);
    }

    #[test]
    fn random_preset_follows_seed() {
        let lattice = HexLattice::new([3, 3, 3], [0.0; 3], 1.0).unwrap();
        let src = |seed| FieldSource::Preset(Preset::Random { seed, low: 0.1, high: 10.0 });
        let a = build_field(&src(None), &lattice, None, 5).unwrap();
        let b = build_field(&src(Some(5)), &lattice, None, 99).unwrap();
        let c = build_field(&src(None), &lattice, None, 6).unwrap();
        assert_eq!(a.values(), b.values());
        assert_ne!(a.values(), c.values());
    }

    #[test]
    fn flags_override_job_rule() {
        let text =
            format!(r#"{{ {BASE}, "field": {{"preset": {{"kind": "checker"}}}}, "rule": "L3", "decider": "paper" }}"#);
        let job = JobSpec::parse(&text).unwrap();
        let cfg = job.rule_config(None, None).unwrap();
        assert_eq!(cfg.rule, Rule::L3);
        assert_eq!(cfg.decider.name(), "paper");
        assert_eq!(job.rule_config(Some(Rule::G2Min), None).unwrap().rule, Rule::G2Min);
    }
}
