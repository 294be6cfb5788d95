//! Legacy ASCII unstructured-grid files.
//!
//! Points are the distinct tetrahedron vertices and uniform-cell corners in
//! [`VertexKey`] order. Cells are the tetrahedra (VTK type 10) in mesh order
//! followed by uniform cells as hexahedra (VTK type 12) in cell-id order.
//! Cell data arrays: `phase` (0 void, 1 solid), `ambiguity` (0 unambiguous,
//! 1 internal, 2 boundary) and `owner_cell`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::cutcell::{CellInfo, CutCellMesh, VertexKey};
use crate::error::{Error, Result};
use crate::field::Phase;
use crate::geom::{signed_volume, CompensatedSum, Point};
use crate::mesh::CellId;

pub const VTK_TETRA: u8 = 10;
pub const VTK_HEXAHEDRON: u8 = 12;

/// VTK hexahedron vertex order in terms of local cell corners.
const HEX_ORDER: [usize; 8] = [0, 1, 3, 2, 4, 5, 7, 6];

fn phase_code(p: Phase) -> i32 {
    match p {
        Phase::Void => 0,
        Phase::Solid => 1,
    }
}

/// Serializes a fully phased mesh.
pub fn write_vtk(mesh: &CutCellMesh) -> Result<String> {
    let lattice = &mesh.lattice;
    let mut points: BTreeMap<VertexKey, Point> = BTreeMap::new();
    for t in &mesh.tets {
        for (k, p) in t.vertices.iter().zip(&t.points) {
            points.insert(*k, *p);
        }
    }
    let uniform: Vec<(CellId, Phase)> = mesh
        .cells
        .iter()
        .enumerate()
        .filter_map(|(c, info)| match info {
            CellInfo::Uniform(p) => Some((CellId(c), *p)),
            CellInfo::Intersected { .. } => None,
        })
        .collect();
    for &(c, _) in &uniform {
        for n in lattice.cell_nodes(c)? {
            points.entry(VertexKey::Corner(n)).or_insert_with(|| lattice.position_unchecked(n));
        }
    }
    let index: BTreeMap<VertexKey, usize> = points.keys().enumerate().map(|(i, k)| (*k, i)).collect();

    let mut out = String::new();
    out.push_str("# vtk DataFile Version 3.0\ntetcut cut-cell mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n");
    let _ = writeln!(out, "POINTS {} double", points.len());
    for p in points.values() {
        let _ = writeln!(out, "{:.16e} {:.16e} {:.16e}", p.x, p.y, p.z);
    }
    let n_cells = mesh.tets.len() + uniform.len();
    let _ = writeln!(out, "CELLS {} {}", n_cells, mesh.tets.len() * 5 + uniform.len() * 9);
    for t in &mesh.tets {
        let [a, b, c, d] = t.vertices.map(|k| index[&k]);
        let _ = writeln!(out, "4 {a} {b} {c} {d}");
    }
    for &(c, _) in &uniform {
        let nodes = lattice.cell_nodes(c)?;
        out.push('8');
        for k in HEX_ORDER {
            let _ = write!(out, " {}", index[&VertexKey::Corner(nodes[k])]);
        }
        out.push('\n');
    }
    let _ = writeln!(out, "CELL_TYPES {n_cells}");
    for _ in &mesh.tets {
        let _ = writeln!(out, "{VTK_TETRA}");
    }
    for _ in &uniform {
        let _ = writeln!(out, "{VTK_HEXAHEDRON}");
    }

    let _ = writeln!(out, "CELL_DATA {n_cells}");
    out.push_str("SCALARS phase int 1\nLOOKUP_TABLE default\n");
    for (t, p) in mesh.phases.iter().enumerate() {
        let _ = writeln!(out, "{}", phase_code(p.ok_or(Error::UnphasedTet(t))?));
    }
    for &(_, p) in &uniform {
        let _ = writeln!(out, "{}", phase_code(p));
    }
    out.push_str("SCALARS ambiguity int 1\nLOOKUP_TABLE default\n");
    for a in &mesh.ambiguity {
        let _ = writeln!(out, "{}", a.code());
    }
    for _ in &uniform {
        out.push_str("0\n");
    }
    out.push_str("SCALARS owner_cell int 1\nLOOKUP_TABLE default\n");
    for t in &mesh.tets {
        let _ = writeln!(out, "{}", t.owner.0);
    }
    for &(c, _) in &uniform {
        let _ = writeln!(out, "{}", c.0);
    }
    Ok(out)
}

/// Contents of a file produced by [`write_vtk`].
#[derive(Debug, Clone, PartialEq)]
pub struct VtkMesh {
    pub points: Vec<Point>,
    pub cells: Vec<Vec<usize>>,
    pub cell_types: Vec<u8>,
    pub phase: Vec<i32>,
    pub ambiguity: Vec<i32>,
    pub owner_cell: Vec<i32>,
}

/// Volumes recomputed from an exported file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VtkVolumes {
    pub v_solid: f64,
    pub v_void: f64,
    pub v_at: f64,
    pub v_at_solid: f64,
}

/// Splits a VTK hexahedron into six tetrahedra around its 0–6 diagonal.
const HEX_TETS: [[usize; 4]; 6] = [[0, 1, 2, 6], [0, 2, 3, 6], [0, 3, 7, 6], [0, 7, 4, 6], [0, 4, 5, 6], [0, 5, 1, 6]];

impl VtkMesh {
    pub fn cell_volume(&self, c: usize) -> f64 {
        let v = &self.cells[c];
        let p = |i: usize| &self.points[v[i]];
        match self.cell_types[c] {
            VTK_TETRA => signed_volume(p(0), p(1), p(2), p(3)),
            _ => HEX_TETS.iter().map(|t| signed_volume(p(t[0]), p(t[1]), p(t[2]), p(t[3])).abs()).sum(),
        }
    }

    pub fn volumes(&self) -> VtkVolumes {
        let [mut solid, mut void, mut at, mut at_solid] = [CompensatedSum::default(); 4];
        for c in 0..self.cells.len() {
            let vol = self.cell_volume(c);
            let is_solid = self.phase[c] == 1;
            if is_solid {
                solid.add(vol)
            } else {
                void.add(vol)
            }
            if self.ambiguity[c] != 0 {
                at.add(vol);
                if is_solid {
                    at_solid.add(vol);
                }
            }
        }
        VtkVolumes { v_solid: solid.value(), v_void: void.value(), v_at: at.value(), v_at_solid: at_solid.value() }
    }
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<&'a str> {
        loop {
            let (i, l) = self
                .inner
                .next()
                .ok_or(Error::MeshParse { line: self.line + 1, reason: "unexpected end of file".into() })?;
            self.line = i + 1;
            let l = l.trim();
            if !l.is_empty() {
                return Ok(l);
            }
        }
    }

    fn err(&self, reason: impl Into<String>) -> Error {
        Error::MeshParse { line: self.line, reason: reason.into() }
    }

    fn header(&mut self, keyword: &str) -> Result<Vec<&'a str>> {
        let l = self.next()?;
        let parts: Vec<&str> = l.split_whitespace().collect();
        if parts.first() != Some(&keyword) {
            return Err(self.err(format!("expected {keyword}, found '{l}'")));
        }
        Ok(parts)
    }

    fn count(&self, parts: &[&str], i: usize) -> Result<usize> {
        parts.get(i).and_then(|s| s.parse().ok()).ok_or_else(|| self.err("bad count"))
    }

    fn numbers<T: std::str::FromStr>(&mut self) -> Result<Vec<T>> {
        let l = self.next()?;
        l.split_whitespace().map(|s| s.parse().map_err(|_| self.err(format!("bad number '{s}'")))).collect()
    }

    fn int_array(&mut self, name: &str, n: usize) -> Result<Vec<i32>> {
        let parts = self.header("SCALARS")?;
        if parts.get(1) != Some(&name) {
            return Err(self.err(format!("expected array {name}")));
        }
        self.header("LOOKUP_TABLE")?;
        (0..n)
            .map(|_| {
                let v = self.numbers::<i32>()?;
                v.first().copied().ok_or_else(|| self.err("empty value"))
            })
            .collect()
    }
}

pub fn read_vtk(text: &str) -> Result<VtkMesh> {
    let mut lines = Lines { inner: text.lines().enumerate(), line: 0 };
    let first = lines.next()?;
    if !first.starts_with("# vtk DataFile") {
        return Err(lines.err("missing vtk header"));
    }
    lines.next()?;
    if lines.next()? != "ASCII" {
        return Err(lines.err("only ASCII files are supported"));
    }
    lines.header("DATASET")?;
    let parts = lines.header("POINTS")?;
    let n_points = lines.count(&parts, 1)?;
    let mut points = Vec::with_capacity(n_points);
    for _ in 0..n_points {
        let v = lines.numbers::<f64>()?;
        if v.len() != 3 {
            return Err(lines.err("point needs three coordinates"));
        }
        points.push(Point::new(v[0], v[1], v[2]));
    }
    let parts = lines.header("CELLS")?;
    let n_cells = lines.count(&parts, 1)?;
    let mut cells = Vec::with_capacity(n_cells);
    for _ in 0..n_cells {
        let v = lines.numbers::<usize>()?;
        if v.is_empty() || v.len() != v[0] + 1 || v[1..].iter().any(|&i| i >= n_points) {
            return Err(lines.err("malformed cell"));
        }
        cells.push(v[1..].to_vec());
    }
    lines.header("CELL_TYPES")?;
    let mut cell_types = Vec::with_capacity(n_cells);
    for cell in &cells {
        let t = lines.numbers::<u8>()?;
        let expected = match t.first() {
            Some(&VTK_TETRA) => 4,
            Some(&VTK_HEXAHEDRON) => 8,
            _ => return Err(lines.err("unsupported cell type")),
        };
        if cell.len() != expected {
            return Err(lines.err("cell size does not match its type"));
        }
        cell_types.push(t[0]);
    }
    lines.header("CELL_DATA")?;
    let phase = lines.int_array("phase", n_cells)?;
    let ambiguity = lines.int_array("ambiguity", n_cells)?;
    let owner_cell = lines.int_array("owner_cell", n_cells)?;
    Ok(VtkMesh { points, cells, cell_types, phase, ambiguity, owner_cell })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cutcell::decompose;
    use crate::diagnostics::measure;
    use crate::field::LevelSetField;
    use crate::mesh::HexLattice;
    use crate::rules::{resolve, Rule, RuleConfig};

    fn sample() -> CutCellMesh {
        let l = HexLattice::new([3, 2, 2], [0.5, -1.0, 0.0], 0.3).unwrap();
        let f = LevelSetField::from_fn(l, |p| {
            0.35 - ((p.x - 0.9).powi(2) + (p.y + 0.7).powi(2) + (p.z - 0.3).powi(2)).sqrt()
        })
        .unwrap();
        let mut mesh = decompose(&f).unwrap();
        resolve(&mut mesh, &f, &RuleConfig::new(Rule::G1Solid), None).unwrap();
        mesh
    }

    #[test]
    fn round_trip_reproduces_volumes() {
        let mesh = sample();
        let text = write_vtk(&mesh).unwrap();
        let back = read_vtk(&text).unwrap();
        let r = measure(&mesh).unwrap();
        let v = back.volumes();
        for (a, b) in [(r.v_solid, v.v_solid), (r.v_void, v.v_void), (r.v_at, v.v_at), (r.v_at_solid, v.v_at_solid)] {
            assert!((a - b).abs() <= 1e-9 * a.abs().max(1e-300), "{a} vs {b}");
        }
        assert_eq!(
            back.cells.len(),
            mesh.tets.len() + mesh.cells.iter().filter(|c| matches!(c, CellInfo::Uniform(_))).count()
        );
        assert_eq!(write_vtk(&mesh).unwrap(), text);
    }

    #[test]
    fn coordinates_survive_text() {
        let mesh = sample();
        let back = read_vtk(&write_vtk(&mesh).unwrap()).unwrap();
        for t in &mesh.tets {
            for p in &t.points {
                assert!(back.points.contains(p));
            }
        }
    }

    #[test]
    fn unphased_mesh_is_rejected() {
        let l = HexLattice::new([2, 2, 2], [0.0; 3], 1.0).unwrap();
        let f = LevelSetField::from_values(l, (0..27).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect()).unwrap();
        let mesh = decompose(&f).unwrap();
        assert!(matches!(write_vtk(&mesh), Err(Error::UnphasedTet(_))));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad = "# vtk DataFile Version 3.0\nx\nASCII\nDATASET UNSTRUCTURED_GRID\nPOINTS 1 double\n1 2\n";
        assert!(matches!(read_vtk(bad), Err(Error::MeshParse { line: 6, .. })));
    }
}
