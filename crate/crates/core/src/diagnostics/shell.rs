use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{measure, GeometryReport};
use crate::cutcell::decompose;
use crate::error::{Error, Result};
use crate::field::{sample_scene, Primitive, PrimitiveScene, Sense, Shape};
use crate::mesh::HexLattice;
use crate::rules::{resolve, RuleConfig};

pub const SHELL_CSV_HEADER: [&str; 15] = [
    "outer_radius",
    "thickness",
    "thickness_over_h",
    "V_solid",
    "V_void",
    "V_AT",
    "V_AT_solid",
    "ratio_AT",
    "ratio_AT_solid",
    "interface_area",
    "solid_components",
    "void_components",
    "watertight",
    "n_iat",
    "n_bat",
];

/// Lattice placement for the shell sweep. Both use 10×10×10 cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShellPreset {
    /// One octant: spacing 0.15 over [0, 1.5]³, sphere centred at the origin.
    #[default]
    Octant,
    /// Whole sphere: spacing 0.3 over [0, 3]³, centred at (1.5, 1.5, 1.5).
    Full,
}

impl ShellPreset {
    pub fn lattice(self) -> HexLattice {
        let spacing = match self {
            ShellPreset::Octant => 0.15,
            ShellPreset::Full => 0.3,
        };
        HexLattice::new([10, 10, 10], [0.0; 3], spacing).expect("preset lattice is valid")
    }

    pub fn center(self) -> [f64; 3] {
        match self {
            ShellPreset::Octant => [0.0; 3],
            ShellPreset::Full => [1.5; 3],
        }
    }

    /// Largest admissible outer radius, keeping the outer surface off the domain boundary.
    pub fn max_outer_radius(self) -> f64 {
        1.5
    }

    pub fn default_inner_radius(self) -> f64 {
        match self {
            ShellPreset::Octant => 0.9,
            ShellPreset::Full => 0.6,
        }
    }

    /// From half a spacing (thin) to beyond two spacings (thick). Thinner
    /// shells fall between lattice nodes and are not resolved by the sampling.
    pub fn default_outer_radii(self) -> Vec<f64> {
        let h = self.lattice().spacing();
        let per_h: &[f64] = match self {
            ShellPreset::Octant => &[0.5, 0.75, 1.0, 1.5, 2.0, 2.5, 3.0],
            ShellPreset::Full => &[0.5, 0.75, 1.0, 1.5, 2.0, 2.5],
        };
        per_h.iter().map(|k| self.default_inner_radius() + k * h).collect()
    }
}

impl std::str::FromStr for ShellPreset {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "octant" => Ok(ShellPreset::Octant),
            "full" => Ok(ShellPreset::Full),
            _ => Err(format!("unknown shell preset '{s}' (expected octant or full)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellStudy {
    pub preset: ShellPreset,
    pub inner_radius: f64,
    pub outer_radii: Vec<f64>,
    pub rule: RuleConfig,
}

impl ShellStudy {
    pub fn with_defaults(preset: ShellPreset, rule: RuleConfig) -> Self {
        ShellStudy {
            preset,
            inner_radius: preset.default_inner_radius(),
            outer_radii: preset.default_outer_radii(),
            rule,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.inner_radius > 0.0) {
            return Err(Error::InvalidShell(format!("inner radius {} must be positive", self.inner_radius)));
        }
        if self.outer_radii.is_empty() {
            return Err(Error::InvalidShell("no outer radii given".into()));
        }
        for &r in &self.outer_radii {
            if !(r > self.inner_radius) {
                return Err(Error::InvalidShell(format!(
                    "outer radius {r} does not exceed inner radius {}",
                    self.inner_radius
                )));
            }
            if r >= self.preset.max_outer_radius() {
                return Err(Error::InvalidShell(format!(
                    "outer radius {r} reaches the domain boundary (limit {})",
                    self.preset.max_outer_radius()
                )));
            }
        }
        Ok(())
    }

    /// The shell field for one outer radius: a solid ball with a void core.
    pub fn scene(&self, outer_radius: f64) -> PrimitiveScene {
        let center = self.preset.center();
        PrimitiveScene {
            primitives: vec![
                Primitive { shape: Shape::Sphere { center, radius: outer_radius }, sense: Sense::Solid },
                Primitive { shape: Shape::Sphere { center, radius: self.inner_radius }, sense: Sense::Void },
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellRow {
    pub outer_radius: f64,
    pub thickness: f64,
    pub thickness_over_h: f64,
    pub report: GeometryReport,
}

impl ShellRow {
    pub fn csv_record(&self) -> Vec<String> {
        let r = &self.report;
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        vec![
            self.outer_radius.to_string(),
            self.thickness.to_string(),
            self.thickness_over_h.to_string(),
            r.v_solid.to_string(),
            r.v_void.to_string(),
            r.v_at.to_string(),
            r.v_at_solid.to_string(),
            opt(r.ratio_at),
            opt(r.ratio_at_solid),
            r.interface_area.to_string(),
            r.solid_components.to_string(),
            r.void_components.to_string(),
            r.watertight.to_string(),
            r.n_iat.to_string(),
            r.n_bat.to_string(),
        ]
    }
}

/// One report per outer radius, in the given order.
pub fn shell_study(study: &ShellStudy) -> Result<Vec<ShellRow>> {
    study.validate()?;
    let lattice = study.preset.lattice();
    study
        .outer_radii
        .iter()
        .map(|&r| {
            let field = sample_scene(&study.scene(r), &lattice)?;
            let mut mesh = decompose(&field)?;
            resolve(&mut mesh, &field, &study.rule, None)?;
            let thickness = r - study.inner_radius;
            Ok(ShellRow {
                outer_radius: r,
                thickness,
                thickness_over_h: thickness / lattice.spacing(),
                report: measure(&mesh)?,
            })
        })
        .collect()
}

pub fn write_shell_csv<W: Write>(rows: &[ShellRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SHELL_CSV_HEADER)?;
    for row in rows {
        w.write_record(row.csv_record())?;
    }
    w.flush()?;
    Ok(())
}
