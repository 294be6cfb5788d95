//! Nodal level set fields.
//!
//! `φ > 0` is solid and `φ < 0` is void. Values with `|φ| < 1e-12·h` are
//! snapped to `+1e-12·h` on ingestion so every node has a strict sign, with
//! ties going to solid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Point;
use crate::mesh::{CellId, EdgeId, HexLattice, NodeId};

/// Relative snap tolerance; multiplied by the lattice spacing.
pub const ZERO_SNAP_RELATIVE: f64 = 1e-12;

/// Crossing parameters live on a dyadic grid of this many steps per edge.
///
/// Rounding `t` onto a fixed grid makes every crossing position invariant
/// under positive rescaling of the field (up to a ~1e-8 chance per edge of
/// landing on a rounding boundary), and the clamp to `[1/STEPS, 1 - 1/STEPS]`
/// keeps crossings strictly inside their edge.
pub const CROSSING_STEPS: f64 = (1u64 << 24) as f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Void,
    Solid,
}

impl Phase {
    pub fn of_value(phi: f64) -> Phase {
        if phi > 0.0 {
            Phase::Solid
        } else {
            Phase::Void
        }
    }

    pub fn opposite(self) -> Phase {
        match self {
            Phase::Solid => Phase::Void,
            Phase::Void => Phase::Solid,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelSetField {
    lattice: HexLattice,
    values: Vec<f64>,
}

impl LevelSetField {
    /// Builds a field from one value per node, applying the zero-snap.
    pub fn from_values(lattice: HexLattice, mut values: Vec<f64>) -> Result<Self> {
        let expected = lattice.node_count();
        if values.len() != expected {
            return Err(Error::LengthMismatch { expected, actual: values.len() });
        }
        if let Some(node) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue { node });
        }
        let eps = ZERO_SNAP_RELATIVE * lattice.spacing();
        for v in &mut values {
            if v.abs() < eps {
                *v = eps;
            }
        }
        Ok(LevelSetField { lattice, values })
    }

    /// Samples an arbitrary function at every node.
    pub fn from_fn(lattice: HexLattice, f: impl Fn(&Point) -> f64) -> Result<Self> {
        let values = lattice.nodes().map(|n| f(&lattice.position_unchecked(n))).collect();
        Self::from_values(lattice, values)
    }

    pub fn lattice(&self) -> &HexLattice {
        &self.lattice
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, node: NodeId) -> f64 {
        self.values[node.0]
    }

    pub fn phase(&self, node: NodeId) -> Phase {
        Phase::of_value(self.values[node.0])
    }

    /// `c·φ` for `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        assert!(c > 0.0, "scale factor must be positive");
        Self::from_values(self.lattice, self.values.iter().map(|v| v * c).collect())
    }

    pub fn cell_values(&self, cell: CellId) -> Result<[f64; 8]> {
        let nodes = self.lattice.cell_nodes(cell)?;
        Ok(nodes.map(|n| self.values[n.0]))
    }

    /// Tri-linear interpolation inside a cell at local coordinates in `[0,1]³`.
    pub fn interpolate_trilinear(&self, cell: CellId, local: [f64; 3]) -> Result<f64> {
        if local.iter().any(|u| !(0.0..=1.0).contains(u)) {
            return Err(Error::CoordsOutOfRange(local));
        }
        Ok(trilinear(&self.cell_values(cell)?, local))
    }

    /// Tri-linear interpolation at a physical point of a cell. Coordinates a
    /// few ulps outside the cell are clamped onto it.
    pub fn interpolate_at(&self, cell: CellId, point: &Point) -> Result<f64> {
        let [i, j, k] = self.lattice.cell_index(cell);
        let o = self.lattice.origin();
        let h = self.lattice.spacing();
        let base = [o.x + i as f64 * h, o.y + j as f64 * h, o.z + k as f64 * h];
        let mut local = [0.0; 3];
        for a in 0..3 {
            let u = (point[a] - base[a]) / h;
            if !(-1e-9..=1.0 + 1e-9).contains(&u) {
                return Err(Error::CoordsOutOfRange([
                    (point[0] - base[0]) / h,
                    (point[1] - base[1]) / h,
                    (point[2] - base[2]) / h,
                ]));
            }
            local[a] = u.clamp(0.0, 1.0);
        }
        self.interpolate_trilinear(cell, local)
    }

    /// Zero crossing of the linear interpolant along an edge, if its endpoint signs differ.
    ///
    /// `t` is measured from the lower-id endpoint: `t = φ0 / (φ0 - φ1)`,
    /// rounded onto the [`CROSSING_STEPS`] grid.
    pub fn edge_crossing(&self, edge: EdgeId) -> Result<Option<EdgeCrossing>> {
        let (n0, n1) = self.lattice.edge_nodes(edge)?;
        let (p0, p1) = (self.values[n0.0], self.values[n1.0]);
        if (p0 > 0.0) == (p1 > 0.0) {
            return Ok(None);
        }
        let t = crossing_parameter(p0, p1);
        let (axis, _) = self.lattice.edge_location(edge);
        let mut point = self.lattice.position_unchecked(n0);
        point[axis as usize] += t * self.lattice.spacing();
        Ok(Some(EdgeCrossing { edge, t, point }))
    }
}

fn crossing_parameter(p0: f64, p1: f64) -> f64 {
    let raw = p0 / (p0 - p1);
    let step = 1.0 / CROSSING_STEPS;
    ((raw * CROSSING_STEPS).round() / CROSSING_STEPS).clamp(step, 1.0 - step)
}

pub(crate) fn trilinear(values: &[f64; 8], [u, v, w]: [f64; 3]) -> f64 {
    let mut acc = 0.0;
    for (c, phi) in values.iter().enumerate() {
        let wu = if c & 1 == 1 { u } else { 1.0 - u };
        let wv = if c & 2 == 2 { v } else { 1.0 - v };
        let ww = if c & 4 == 4 { w } else { 1.0 - w };
        acc += wu * wv * ww * phi;
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeCrossing {
    pub edge: EdgeId,
    pub t: f64,
    pub point: Point,
}

// ---------------------------------------------------------------------------
// Primitive scenes

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Shape {
    Sphere { center: [f64; 3], radius: f64 },
    Cuboid { min: [f64; 3], max: [f64; 3] },
}

impl Shape {
    /// Signed distance-like value, positive inside.
    pub fn inside_value(&self, p: &Point) -> f64 {
        match self {
            Shape::Sphere { center, radius } => {
                let c = Point::new(center[0], center[1], center[2]);
                radius - (p - c).norm()
            }
            Shape::Cuboid { min, max } => {
                let mut outside = 0.0f64;
                let mut inside = f64::NEG_INFINITY;
                for a in 0..3 {
                    let center = 0.5 * (min[a] + max[a]);
                    let half = 0.5 * (max[a] - min[a]);
                    let q = (p[a] - center).abs() - half;
                    outside += q.max(0.0).powi(2);
                    inside = inside.max(q);
                }
                -(outside.sqrt() + inside.min(0.0))
            }
        }
    }

    fn validate(&self) -> std::result::Result<(), String> {
        match self {
            Shape::Sphere { center, radius } => {
                if center.iter().any(|v| !v.is_finite()) {
                    return Err("sphere center must be finite".into());
                }
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(format!("sphere radius must be positive, got {radius}"));
                }
            }
            Shape::Cuboid { min, max } => {
                if min.iter().chain(max).any(|v| !v.is_finite()) {
                    return Err("cuboid corners must be finite".into());
                }
                if (0..3).any(|a| min[a] >= max[a]) {
                    return Err(format!("cuboid min {min:?} must be below max {max:?} on every axis"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    Solid,
    Void,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Primitive {
    pub shape: Shape,
    pub sense: Sense,
}

/// Primitives composed left to right.
///
/// Starting from an empty (all void) domain, a solid primitive takes
/// `φ = max(φ, g)` and a void primitive takes `φ = min(φ, -g)`, where `g` is
/// the primitive's inside value. At least one solid primitive is required.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrimitiveScene {
    pub primitives: Vec<Primitive>,
}

impl PrimitiveScene {
    pub fn validate(&self) -> Result<()> {
        if self.primitives.is_empty() {
            return Err(Error::EmptyScene);
        }
        for (index, p) in self.primitives.iter().enumerate() {
            p.shape.validate().map_err(|reason| Error::InvalidPrimitive { index, reason })?;
        }
        if !self.primitives.iter().any(|p| p.sense == Sense::Solid) {
            return Err(Error::InvalidPrimitive {
                index: 0,
                reason: "scene needs at least one solid primitive".into(),
            });
        }
        Ok(())
    }

    pub fn evaluate(&self, p: &Point) -> f64 {
        self.primitives.iter().fold(f64::NEG_INFINITY, |phi, prim| {
            let g = prim.shape.inside_value(p);
            match prim.sense {
                Sense::Solid => phi.max(g),
                Sense::Void => phi.min(-g),
            }
        })
    }
}

pub fn sample_scene(scene: &PrimitiveScene, lattice: &HexLattice) -> Result<LevelSetField> {
    scene.validate()?;
    LevelSetField::from_fn(*lattice, |p| scene.evaluate(p))
}

// ---------------------------------------------------------------------------
// Linear distance filter

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterSpec {
    pub radius: f64,
    #[serde(default)]
    pub bounds: Option<[f64; 2]>,
}

impl FilterSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(Error::InvalidFilter(format!("radius must be positive, got {}", self.radius)));
        }
        if let Some([lo, hi]) = self.bounds {
            if !(lo < hi) {
                return Err(Error::InvalidFilter(format!("bounds must satisfy low < high, got [{lo}, {hi}]")));
            }
        }
        Ok(())
    }
}

/// `w_ij = max(0, r - |X_i - X_j|)`.
pub fn filter_weight(radius: f64, distance: f64) -> f64 {
    (radius - distance).max(0.0)
}

/// Weighted average of `values` over an arbitrary point cloud, brute force.
pub fn filter_point_values(points: &[Point], values: &[f64], radius: f64) -> Vec<f64> {
    points
        .iter()
        .map(|xi| {
            let mut num = 0.0;
            let mut den = 0.0;
            for (xj, sj) in points.iter().zip(values) {
                let w = filter_weight(radius, (xi - xj).norm());
                num += w * sj;
                den += w;
            }
            num / den
        })
        .collect()
}

/// Filters raw nodal design values into a level set field.
pub fn apply_filter(raw: &[f64], lattice: &HexLattice, spec: &FilterSpec) -> Result<LevelSetField> {
    spec.validate()?;
    if raw.len() != lattice.node_count() {
        return Err(Error::LengthMismatch { expected: lattice.node_count(), actual: raw.len() });
    }
    let h = lattice.spacing();
    let reach = (spec.radius / h).floor() as isize;
    let [nx, ny, nz] = lattice.dims();
    let upper = [nx as isize, ny as isize, nz as isize];
    let mut offsets = Vec::new();
    for dk in -reach..=reach {
        for dj in -reach..=reach {
            for di in -reach..=reach {
                let d = h * ((di * di + dj * dj + dk * dk) as f64).sqrt();
                let w = filter_weight(spec.radius, d);
                if w > 0.0 {
                    offsets.push(([di, dj, dk], w));
                }
            }
        }
    }
    let mut out = Vec::with_capacity(raw.len());
    for node in lattice.nodes() {
        let idx = lattice.node_index(node);
        let mut num = 0.0;
        let mut den = 0.0;
        for &(off, w) in &offsets {
            let mut n = [0usize; 3];
            let mut inside = true;
            for a in 0..3 {
                let v = idx[a] as isize + off[a];
                if v < 0 || v > upper[a] {
                    inside = false;
                    break;
                }
                n[a] = v as usize;
            }
            if inside {
                num += w * raw[lattice.node_id(n).0];
                den += w;
            }
        }
        let mut phi = num / den;
        if let Some([lo, hi]) = spec.bounds {
            phi = phi.clamp(lo, hi);
        }
        out.push(phi);
    }
    LevelSetField::from_values(*lattice, out)
}
