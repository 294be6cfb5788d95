use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::cutcell::decompose;
use crate::field::{sample_scene, LevelSetField, Primitive, PrimitiveScene, Sense, Shape};
use crate::rules::{resolve, Rule, RuleConfig};

fn random_field(dims: [usize; 3], seed: u64) -> LevelSetField {
    let l = HexLattice::new(dims, [0.0; 3], 0.5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vals =
        (0..l.node_count()).map(|_| rng.gen_range(0.1..10.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 }).collect();
    LevelSetField::from_values(l, vals).unwrap()
}

fn resolved(field: &LevelSetField, rule: Rule) -> CutCellMesh {
    let mut mesh = decompose(field).unwrap();
    resolve(&mut mesh, field, &RuleConfig::new(rule), None).unwrap();
    mesh
}

/// Alternating signs on the lattice nodes, as in a 3D checkerboard.
fn checker_field(n: usize) -> LevelSetField {
    let l = HexLattice::new([n, n, n], [0.0; 3], 1.0).unwrap();
    let vals = l.nodes().map(|v| if l.node_index(v).iter().sum::<usize>() % 2 == 0 { 1.0 } else { -1.0 }).collect();
    LevelSetField::from_values(l, vals).unwrap()
}

#[test]
fn fully_solid_unit_cell() {
    let f = LevelSetField::from_values(HexLattice::new([1, 1, 1], [0.0; 3], 1.0).unwrap(), vec![1.0; 8]).unwrap();
    let r = measure(&resolved(&f, Rule::L1Solid)).unwrap();
    assert_eq!(r.v_solid, 1.0);
    assert_eq!(r.v_void, 0.0);
    assert_eq!(r.interface_area, 0.0);
    assert_eq!((r.solid_components, r.void_components), (1, 0));
    assert!(r.watertight);
}

#[test]
fn planar_half_cut() {
    let f = LevelSetField::from_values(
        HexLattice::new([1, 1, 1], [0.0; 3], 1.0).unwrap(),
        vec![1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0],
    )
    .unwrap();
    let r = measure(&resolved(&f, Rule::G1Void)).unwrap();
    assert!((r.v_solid - 0.5).abs() < 1e-15);
    assert!((r.interface_area - 1.0).abs() < 1e-14);
    assert_eq!(r.v_at, 0.0);
    assert!(r.watertight);
}

fn shell_field(inner: f64, outer: f64) -> LevelSetField {
    let study = ShellStudy {
        inner_radius: inner,
        outer_radii: vec![outer],
        ..ShellStudy::with_defaults(ShellPreset::Octant, RuleConfig::new(Rule::G1Void))
    };
    sample_scene(&study.scene(outer), &ShellPreset::Octant.lattice()).unwrap()
}

#[test]
fn shell_ratios_under_g1() {
    let f = shell_field(0.9, 0.98);
    let s = measure(&resolved(&f, Rule::G1Solid)).unwrap();
    let v = measure(&resolved(&f, Rule::G1Void)).unwrap();
    assert!(v.v_at > 0.0);
    assert_eq!(s.v_at, v.v_at);
    assert_eq!(v.v_at_solid, 0.0);
    assert_eq!(s.v_at_solid, s.v_at);
    assert!((s.v_solid - v.v_solid - v.v_at).abs() <= 1e-9 * s.v_solid);
}

#[test]
fn two_spheres_are_two_components() {
    let l = HexLattice::new([12, 6, 6], [0.0; 3], 0.25).unwrap();
    let ball = |c: [f64; 3]| Primitive { shape: Shape::Sphere { center: c, radius: 0.5 }, sense: Sense::Solid };
    let scene = PrimitiveScene { primitives: vec![ball([0.75, 0.75, 0.75]), ball([2.25, 0.75, 0.75])] };
    let f = sample_scene(&scene, &l).unwrap();
    for rule in Rule::ALL {
        let mesh = resolved(&f, rule);
        assert_eq!(component_count(&mesh, Phase::Solid).unwrap(), 2, "{rule}");
        assert_eq!(component_count(&mesh, Phase::Void).unwrap(), 1, "{rule}");
    }
}

#[test]
fn uniform_domain_is_one_component_and_watertight() {
    let f = LevelSetField::from_values(HexLattice::new([3, 2, 2], [0.0; 3], 1.0).unwrap(), vec![2.0; 36]).unwrap();
    let mesh = resolved(&f, Rule::G2Max);
    assert_eq!(component_counts(&mesh).unwrap(), ComponentCounts { solid: 1, void: 0 });
    assert!(watertight_check(&mesh).unwrap().watertight);
}

#[test]
fn checker_components_depend_on_the_global_phase() {
    let f = checker_field(3);
    let s = component_counts(&resolved(&f, Rule::G1Solid)).unwrap();
    let v = component_counts(&resolved(&f, Rule::G1Void)).unwrap();
    assert_ne!(s, v);
    assert_eq!(s.solid, 1);
    assert_eq!(v.void, 1);
}

#[test]
fn random_fields_stay_watertight() {
    for seed in 0..4 {
        let f = random_field([4, 4, 4], seed);
        for rule in Rule::ALL {
            let mesh = resolved(&f, rule);
            let w = watertight_check(&mesh).unwrap();
            assert!(w.watertight, "{rule} seed {seed}: {:?}", &w.offending[..w.offending.len().min(3)]);
            let r = measure(&mesh).unwrap();
            assert!((r.v_solid + r.v_void - mesh.lattice.volume()).abs() <= 1e-9 * mesh.lattice.volume());
        }
    }
}

#[test]
fn corrupted_bat_is_reported() {
    let f = random_field([4, 4, 4], 1);
    let mut mesh = resolved(&f, Rule::L3);
    let bat = (0..mesh.tets.len()).find(|&t| {
        mesh.ambiguity[t] == Ambiguity::Boundary && {
            let (face, _) = mesh.bat_face(t).unwrap();
            mesh.lattice.face_neighbors(face).unwrap().len() == 2
        }
    });
    let bat = bat.expect("field has an interior boundary-ambiguous tet");
    let flipped = mesh.phases[bat].unwrap().opposite();
    mesh.phases[bat] = Some(flipped);
    let w = watertight_check(&mesh).unwrap();
    assert!(!w.watertight);
    assert!(w.offending.iter().any(|o| o.problem == FacetProblem::PhaseMismatchOnLatticeFace && o.tets.contains(&bat)));
}

#[test]
fn unphased_tet_is_an_error() {
    let f = random_field([2, 2, 2], 4);
    let mesh = decompose(&f).unwrap();
    assert!(mesh.phases.iter().any(Option::is_none));
    assert!(matches!(measure(&mesh), Err(Error::UnphasedTet(_))));
}

#[test]
fn shell_validation() {
    let rule = RuleConfig::new(Rule::G1Void);
    let mut s = ShellStudy::with_defaults(ShellPreset::Octant, rule);
    assert!(s.validate().is_ok());
    s.outer_radii.push(2.0);
    assert!(matches!(shell_study(&s), Err(Error::InvalidShell(_))));
    s.outer_radii = vec![0.5];
    assert!(s.validate().is_err());
}
