use serde::Serialize;

use tetcut_core::cutcell::npac::{npac_atlas, orbit_counts, AtlasEntry, SymmetryGroup};
use tetcut_core::cutcell::{face_matching_mismatches, CellInfo};
use tetcut_core::diagnostics::{shell_study, write_shell_csv, ShellRow, ShellStudy};
use tetcut_core::export::write_vtk;
use tetcut_core::{
    decompose, measure, resolve, CutCellMesh, GeometryReport, HexLattice, IterationState, LevelSetField, Phase,
    ResolutionReport, Rule, RuleConfig,
};

use crate::error::CliError;
use crate::job::{JobSpec, SCHEMA_VERSION};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSummary {
    pub uniform_solid: usize,
    pub uniform_void: usize,
    pub intersected: usize,
    pub tets: usize,
}

impl CellSummary {
    fn of(mesh: &CutCellMesh) -> Self {
        let count = |f: fn(&CellInfo) -> bool| mesh.cells.iter().filter(|c| f(c)).count();
        CellSummary {
            uniform_solid: count(|c| matches!(c, CellInfo::Uniform(Phase::Solid))),
            uniform_void: count(|c| matches!(c, CellInfo::Uniform(Phase::Void))),
            intersected: count(|c| matches!(c, CellInfo::Intersected { .. })),
            tets: mesh.tets.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Step {
    pub cells: CellSummary,
    pub resolution: ResolutionReport,
    pub geometry: GeometryReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutReport {
    pub schema_version: u32,
    pub config: RuleConfig,
    /// One entry per resolved field; a single-field job has one.
    pub steps: Vec<Step>,
}

/// Resolves every field of the job in order and returns the last mesh.
pub fn run_fields(fields: &[LevelSetField], config: &RuleConfig) -> Result<(CutCellMesh, Vec<Step>), CliError> {
    let lattice: HexLattice = *fields.first().ok_or_else(|| CliError::Validation("job has no field".into()))?.lattice();
    let mut state = IterationState::new(&lattice);
    let mut steps = Vec::with_capacity(fields.len());
    let mut last = None;
    for field in fields {
        let mut mesh = decompose(field)?;
        let resolution = resolve(&mut mesh, field, config, Some(&mut state))?;
        steps.push(Step { cells: CellSummary::of(&mesh), resolution, geometry: measure(&mesh)? });
        last = Some(mesh);
    }
    Ok((last.expect("at least one field"), steps))
}

pub struct CutOutput {
    pub mesh: String,
    pub report: CutReport,
}

pub fn cmd_cut(job: &JobSpec, config: RuleConfig, seed: u64) -> Result<CutOutput, CliError> {
    let fields = job.fields(seed)?;
    let (mesh, steps) = run_fields(&fields, &config)?;
    Ok(CutOutput { mesh: write_vtk(&mesh)?, report: CutReport { schema_version: SCHEMA_VERSION, config, steps } })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupCount {
    pub group: SymmetryGroup,
    pub classes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Atlas {
    pub group: SymmetryGroup,
    pub classes: Vec<AtlasEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NpacReport {
    pub intersected_patterns: usize,
    pub counts: Vec<GroupCount>,
    pub atlases: Vec<Atlas>,
}

pub const NPAC_CSV_HEADER: [&str; 9] =
    ["group", "class_id", "representative", "orbit_size", "crossings", "tets", "ats", "iats", "bats"];

pub fn cmd_npac(groups: &[SymmetryGroup]) -> Result<NpacReport, CliError> {
    let counts = orbit_counts().into_iter().map(|(group, classes)| GroupCount { group, classes }).collect();
    let atlases = groups
        .iter()
        .map(|&group| Ok(Atlas { group, classes: npac_atlas(group)? }))
        .collect::<Result<_, CliError>>()?;
    Ok(NpacReport { intersected_patterns: 254, counts, atlases })
}

pub fn npac_csv(report: &NpacReport) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(NPAC_CSV_HEADER).map_err(io)?;
    for atlas in &report.atlases {
        for e in &atlas.classes {
            w.write_record([
                atlas.group.name().to_string(),
                e.class_id.to_string(),
                e.representative.to_string(),
                e.orbit_size.to_string(),
                e.crossings.to_string(),
                e.tets.to_string(),
                e.ats.to_string(),
                e.iats.to_string(),
                e.bats.to_string(),
            ])
            .map_err(io)?;
        }
    }
    into_string(w)
}

fn into_string(w: csv::Writer<Vec<u8>>) -> Result<String, CliError> {
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
}

pub fn cmd_shell(study: &ShellStudy) -> Result<Vec<ShellRow>, CliError> {
    Ok(shell_study(study)?)
}

pub fn shell_csv(rows: &[ShellRow]) -> Result<String, CliError> {
    let mut buf = Vec::new();
    write_shell_csv(rows, &mut buf).map_err(|e| CliError::Io(e.to_string()))?;
    String::from_utf8(buf).map_err(|e| CliError::Io(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RuleResult {
    pub rule: Rule,
    pub resolution: ResolutionReport,
    pub geometry: GeometryReport,
}

/// `b - a` for the quantities that rules can change.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RuleDiff {
    pub a: Rule,
    pub b: Rule,
    pub v_solid: f64,
    pub v_at_solid: f64,
    pub interface_area: f64,
    pub solid_components: i64,
    pub void_components: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub schema_version: u32,
    pub results: Vec<RuleResult>,
    pub diffs: Vec<RuleDiff>,
}

pub fn cmd_compare(
    job: &JobSpec,
    rules: &[Rule],
    decider: Option<tetcut_core::rules::DeciderVariant>,
    seed: u64,
) -> Result<CompareReport, CliError> {
    if rules.len() < 2 {
        return Err(CliError::Validation(format!("compare needs at least two rules, got {}", rules.len())));
    }
    let fields = job.fields(seed)?;
    let results = rules
        .iter()
        .map(|&rule| {
            let config = job.rule_config(Some(rule), decider)?;
            let (_, mut steps) = run_fields(&fields, &config)?;
            let last = steps.pop().expect("at least one step");
            Ok(RuleResult { rule, resolution: last.resolution, geometry: last.geometry })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut diffs = Vec::new();
    for (i, a) in results.iter().enumerate() {
        for b in &results[i + 1..] {
            let (ga, gb) = (&a.geometry, &b.geometry);
            diffs.push(RuleDiff {
                a: a.rule,
                b: b.rule,
                v_solid: gb.v_solid - ga.v_solid,
                v_at_solid: gb.v_at_solid - ga.v_at_solid,
                interface_area: gb.interface_area - ga.interface_area,
                solid_components: gb.solid_components as i64 - ga.solid_components as i64,
                void_components: gb.void_components as i64 - ga.void_components as i64,
            });
        }
    }
    Ok(CompareReport { schema_version: SCHEMA_VERSION, results, diffs })
}

pub const COMPARE_CSV_HEADER: [&str; 12] = [
    "rule",
    "V_solid",
    "V_void",
    "V_AT",
    "V_AT_solid",
    "interface_area",
    "solid_components",
    "void_components",
    "watertight",
    "n_iat",
    "n_bat",
    "ties",
];

pub fn compare_csv(report: &CompareReport) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(COMPARE_CSV_HEADER).map_err(io)?;
    for r in &report.results {
        let g = &r.geometry;
        w.write_record([
            r.rule.name().to_string(),
            g.v_solid.to_string(),
            g.v_void.to_string(),
            g.v_at.to_string(),
            g.v_at_solid.to_string(),
            g.interface_area.to_string(),
            g.solid_components.to_string(),
            g.void_components.to_string(),
            g.watertight.to_string(),
            g.n_iat.to_string(),
            g.n_bat.to_string(),
            r.resolution.tie_count.to_string(),
        ])
        .map_err(io)?;
    }
    into_string(w)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidateReport {
    pub seed: u64,
    pub fields: usize,
    pub size: usize,
    pub checks: usize,
    pub failures: Vec<String>,
}

/// Randomized self-check: every rule on random fields must give a complete,
/// watertight, volume-partitioning mesh with matching face triangulations
/// and assigned AT volume inside the G1 envelope.
pub fn cmd_validate(seed: u64, fields: usize, size: usize) -> Result<ValidateReport, CliError> {
    use crate::job::{build_field, FieldSource, Preset};
    if size == 0 || fields == 0 {
        return Err(CliError::Validation("validate needs at least one field of at least one cell".into()));
    }
    let lattice = HexLattice::new([size; 3], [0.0; 3], 1.0 / size as f64)?;
    let mut checks = 0;
    let mut failures = Vec::new();
    for i in 0..fields {
        let field_seed = seed.wrapping_add(i as u64);
        let source = FieldSource::Preset(Preset::Random { seed: Some(field_seed), low: 0.1, high: 10.0 });
        let field = build_field(&source, &lattice, None, field_seed)?;
        let base = decompose(&field)?;
        checks += 1;
        if !face_matching_mismatches(&base).is_empty() {
            failures.push(format!("seed {field_seed}: lattice face triangulations differ"));
        }
        let v_at: f64 = base.ambiguous_tets().map(|t| base.tets[t].volume()).sum();
        for rule in Rule::ALL {
            let mut mesh = base.clone();
            resolve(&mut mesh, &field, &RuleConfig::new(rule), None)?;
            let g = measure(&mesh)?;
            checks += 1;
            let total = lattice.volume();
            if ((g.v_solid + g.v_void) - total).abs() > 1e-9 * total {
                failures.push(format!("seed {field_seed} {rule}: volumes sum to {}", g.v_solid + g.v_void));
            }
            if !g.watertight {
                failures.push(format!("seed {field_seed} {rule}: not watertight"));
            }
            if g.v_at_solid < 0.0 || g.v_at_solid > v_at * (1.0 + 1e-12) {
                failures.push(format!("seed {field_seed} {rule}: V_AT_solid {} outside [0, {v_at}]", g.v_at_solid));
            }
        }
    }
    Ok(ValidateReport { seed, fields, size, checks, failures })
}
