use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::cutcell::{decompose, CellInfo};
use crate::field::LevelSetField;
use crate::mesh::HexLattice;

fn random_field(dims: [usize; 3], seed: u64) -> LevelSetField {
    let l = HexLattice::new(dims, [0.0; 3], 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vals = (0..l.node_count())
        .map(|_| {
            let m: f64 = rng.gen_range(0.1..10.0);
            if rng.gen_bool(0.5) {
                m
            } else {
                -m
            }
        })
        .collect();
    LevelSetField::from_values(l, vals).unwrap()
}

fn unit_field(values: [f64; 8]) -> LevelSetField {
    LevelSetField::from_values(HexLattice::new([1, 1, 1], [0.0; 3], 1.0).unwrap(), values.to_vec()).unwrap()
}

fn solid_volume(mesh: &CutCellMesh) -> f64 {
    mesh.tets.iter().zip(&mesh.phases).filter(|(_, p)| **p == Some(Phase::Solid)).map(|(t, _)| t.volume()).sum()
}

fn resolved(field: &LevelSetField, rule: Rule) -> (CutCellMesh, ResolutionReport) {
    let mut mesh = decompose(field).unwrap();
    let report = resolve(&mut mesh, field, &RuleConfig::new(rule), None).unwrap();
    (mesh, report)
}

#[test]
fn decider_examples() {
    let c = DeciderVariant::ClassicalSaddle;
    let r = asymptotic_decider([2.0, -1.0, 3.0, -1.0], c).unwrap();
    assert_eq!(r.saddle_value, Some(5.0 / 7.0));
    assert_eq!(r.phase, Phase::Solid);
    let r = asymptotic_decider([1.0, -2.0, 1.0, -2.0], c).unwrap();
    assert_eq!(r.saddle_value, Some(-0.5));
    assert_eq!(r.phase, Phase::Void);
    let r = asymptotic_decider([0.7, -0.7, 0.7, -0.7], c).unwrap();
    assert!(r.is_tie());
    assert_eq!(r.phase, Phase::Solid);
}

#[test]
fn decider_rejects_non_alternating_faces() {
    assert!(asymptotic_decider([1.0, 1.0, -1.0, -1.0], DeciderVariant::ClassicalSaddle).is_err());
}

#[test]
fn sum_decider_zero_denominator_resolves_solid() {
    let r = asymptotic_decider([1.0, -2.0, 3.0, -2.0], DeciderVariant::PaperSum).unwrap();
    assert_eq!(r.saddle_value, None);
    assert_eq!(r.phase, Phase::Solid);
}

#[test]
fn rule_names_round_trip() {
    for r in Rule::ALL {
        assert_eq!(r.name().parse::<Rule>().unwrap(), r);
        assert_eq!(serde_json::to_string(&r).unwrap(), format!("\"{}\"", r.name()));
    }
    assert!("L5".parse::<Rule>().is_err());
}

#[test]
fn l1_void_without_iats_is_a_no_op() {
    let f = unit_field([1.0, 1.0, 1.0, 1.0, -3.0, -3.0, -3.0, -3.0]);
    let before = decompose(&f).unwrap();
    let (after, report) = resolved(&f, Rule::L1Void);
    assert_eq!(report.iat, 0);
    assert_eq!(before.phases, after.phases);
}

#[test]
fn l1_void_removes_exactly_the_iat_volume() {
    let f = random_field([4, 4, 4], 3);
    let (solid, _) = resolved(&f, Rule::L1Solid);
    let (void, _) = resolved(&f, Rule::L1Void);
    let iat: f64 = solid
        .tets
        .iter()
        .zip(&solid.ambiguity)
        .filter(|(_, a)| **a == Ambiguity::Internal)
        .map(|(t, _)| t.volume())
        .sum();
    assert!(iat > 0.0);
    assert!((solid_volume(&solid) - solid_volume(&void) - iat).abs() < 1e-12);
}

fn body_diagonal_field(void_magnitude: f64) -> LevelSetField {
    let mut v = [1.0; 8];
    v[0] = -void_magnitude;
    v[7] = -void_magnitude;
    unit_field(v)
}

#[test]
fn l2_cold_start_and_transition() {
    let f = body_diagonal_field(1.0);
    let mut state = IterationState::new(f.lattice());
    let mut mesh = decompose(&f).unwrap();
    assert!(mesh.count(Ambiguity::Internal) > 0);
    resolve(&mut mesh, &f, &RuleConfig::new(Rule::L2), Some(&mut state)).unwrap();
    assert!(mesh.ambiguous_tets().all(|t| mesh.phases[t] == Some(Phase::Solid)));
    assert_eq!(state.iteration, 2);

    let uniform = unit_field([-1.0; 8]);
    let mut m = decompose(&uniform).unwrap();
    resolve(&mut m, &uniform, &RuleConfig::new(Rule::L2), Some(&mut state)).unwrap();
    assert_eq!(state.phases[0], Some(Phase::Void));

    let mut mesh = decompose(&f).unwrap();
    resolve(&mut mesh, &f, &RuleConfig::new(Rule::L2), Some(&mut state)).unwrap();
    assert!(mesh.ambiguous_tets().all(|t| mesh.phases[t] == Some(Phase::Void)));
}

#[test]
fn l2_missing_state_is_flagged() {
    let f = body_diagonal_field(1.0);
    let mut state = IterationState { iteration: 4, phases: vec![None] };
    let mut mesh = decompose(&f).unwrap();
    let report = resolve(&mut mesh, &f, &RuleConfig::new(Rule::L2), Some(&mut state)).unwrap();
    assert!(report.flags.contains(&ResolutionFlag::MissingState { cell: CellId(0) }));
    assert!(mesh.ambiguous_tets().all(|t| mesh.phases[t] == Some(Phase::Solid)));
}

#[test]
fn l3_near_corner_voids_give_solid() {
    let f = body_diagonal_field(0.1);
    let (mesh, _) = resolved(&f, Rule::L3);
    assert!(mesh.count(Ambiguity::Internal) > 0);
    assert!(mesh.ambiguous_tets().all(|t| mesh.phases[t] == Some(Phase::Solid)));
    // and the mirror image flips the decision
    let g = LevelSetField::from_values(*f.lattice(), f.values().iter().map(|v| -v).collect()).unwrap();
    let (mesh, _) = resolved(&g, Rule::L3);
    assert!(mesh.ambiguous_tets().all(|t| mesh.phases[t] == Some(Phase::Void)));
}

#[test]
fn area_branches() {
    assert_eq!(local::area_decision(2.0, 1.0, true), Phase::Solid);
    assert_eq!(local::area_decision(2.0, 1.0, false), Phase::Void);
    assert_eq!(local::area_decision(1.0, 1.0, true), Phase::Void);
    assert_eq!(local::area_decision(1.0, 1.0, false), Phase::Solid);
    assert_eq!(local::area_decision(0.6, 0.2, true), Phase::Solid);
}

#[test]
fn l4_follows_recomputed_areas() {
    let f = random_field([4, 4, 4], 11);
    for (rule, max) in [(Rule::L4Max, true), (Rule::L4Min, false)] {
        let (mesh, _) = resolved(&f, rule);
        for c in 0..mesh.cells.len() {
            let iats: Vec<usize> =
                mesh.cell_tets(CellId(c)).filter(|&t| mesh.ambiguity[t] == Ambiguity::Internal).collect();
            if iats.is_empty() {
                continue;
            }
            let (s, v) = l4_areas(&mesh, CellId(c));
            let expect = if s == 0.0 && v == 0.0 { Phase::Solid } else { local::area_decision(s, v, max) };
            assert!(iats.iter().all(|&t| mesh.phases[t] == Some(expect)));
        }
    }
}

#[test]
fn g1_bookkeeping() {
    let f = random_field([4, 4, 4], 5);
    let (s, _) = resolved(&f, Rule::G1Solid);
    let (v, _) = resolved(&f, Rule::G1Void);
    let at: f64 = s.ambiguous_tets().map(|t| s.tets[t].volume()).sum();
    assert!((solid_volume(&s) - solid_volume(&v) - at).abs() < 1e-12);
}

#[test]
fn clusters_partition_ambiguous_tets() {
    let f = random_field([4, 4, 4], 8);
    let mesh = decompose(&f).unwrap();
    let adj = TetAdjacency::build(&mesh.tets);
    let clusters = build_clusters(&mesh, &adj);
    let mut seen: Vec<usize> = clusters.iter().flat_map(|c| c.tets.iter().copied()).collect();
    seen.sort_unstable();
    let expected: Vec<usize> = mesh.ambiguous_tets().collect();
    assert_eq!(seen, expected);
    for w in clusters.windows(2) {
        assert!(w[0].tets[0] < w[1].tets[0]);
    }
}

#[test]
fn bat_clusters_span_two_cells() {
    // the shared x-face alternates in sign; the outer corners follow it
    let l = HexLattice::new([2, 1, 1], [0.0; 3], 1.0).unwrap();
    let f = LevelSetField::from_fn(l, |p| if (p.y + p.z) as i64 % 2 == 0 { 1.0 } else { -1.5 }).unwrap();
    let mesh = decompose(&f).unwrap();
    let adj = TetAdjacency::build(&mesh.tets);
    let clusters = build_clusters(&mesh, &adj);
    assert!(mesh.count(Ambiguity::Boundary) > 0);
    assert!(clusters.iter().any(|c| {
        let owners: std::collections::BTreeSet<_> = c.tets.iter().map(|&t| mesh.tets[t].owner).collect();
        owners.len() == 2
    }));
}

#[test]
fn resolution_completes_and_preserves_unambiguous_phases() {
    let f = random_field([3, 3, 3], 21);
    let base = decompose(&f).unwrap();
    for rule in Rule::ALL {
        let (mesh, _) = resolved(&f, rule);
        assert!(mesh.is_fully_phased(), "{rule}");
        for t in 0..mesh.tets.len() {
            if !mesh.ambiguity[t].is_ambiguous() {
                assert_eq!(mesh.phases[t], base.phases[t]);
            }
        }
        let mut again = mesh.clone();
        resolve(&mut again, &f, &RuleConfig::new(rule), None).unwrap();
        assert_eq!(again.phases, mesh.phases, "{rule} is not idempotent");
    }
}

#[test]
fn local_rules_match_bats_across_faces() {
    let f = random_field([4, 4, 4], 2);
    for rule in Rule::ALL.into_iter().filter(|r| r.is_local()) {
        let (mesh, _) = resolved(&f, rule);
        let mut by_face: BTreeMap<FaceId, Vec<Phase>> = BTreeMap::new();
        for t in 0..mesh.tets.len() {
            if mesh.ambiguity[t] == Ambiguity::Boundary {
                by_face.entry(mesh.bat_face(t).unwrap().0).or_default().push(mesh.phases[t].unwrap());
            }
        }
        assert!(!by_face.is_empty());
        for phases in by_face.values() {
            assert!(phases.iter().all(|p| *p == phases[0]));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn decisions_are_scaling_invariant(seed in any::<u64>(), scale in 0.01f64..100.0) {
        let f = random_field([3, 3, 3], seed);
        let g = f.scaled(scale).unwrap();
        for rule in Rule::ALL {
            let (a, _) = resolved(&f, rule);
            let (b, _) = resolved(&g, rule);
            prop_assert_eq!(a.phases, b.phases);
        }
    }

    #[test]
    fn local_decisions_ignore_distant_values(seed in any::<u64>(), bump in -5.0f64..5.0) {
        let f = random_field([4, 1, 1], seed);
        // node (4,0,0) is not a corner of cell 0 or 1
        let mut vals = f.values().to_vec();
        let far = f.lattice().node_id([4, 0, 0]).0;
        vals[far] = if vals[far] > 0.0 { vals[far] + bump.abs() } else { vals[far] - bump.abs() };
        let g = LevelSetField::from_values(*f.lattice(), vals).unwrap();
        for rule in Rule::ALL.into_iter().filter(|r| r.is_local()) {
            let (a, _) = resolved(&f, rule);
            let (b, _) = resolved(&g, rule);
            for c in 0..2 {
                if let CellInfo::Intersected { tets, .. } = &a.cells[c] {
                    prop_assert_eq!(&a.phases[tets.clone()], &b.phases[tets.clone()]);
                }
            }
        }
    }

    #[test]
    fn classical_decider_is_symmetric(a in 0.01f64..10.0, b in 0.01f64..10.0, c in 0.01f64..10.0, d in 0.01f64..10.0) {
        let v = [a, -b, c, -d];
        let base = asymptotic_decider(v, DeciderVariant::ClassicalSaddle).unwrap().phase;
        for k in 0..4 {
            let rot = std::array::from_fn(|i| v[(i + k) % 4]);
            prop_assert_eq!(asymptotic_decider(rot, DeciderVariant::ClassicalSaddle).unwrap().phase, base);
            let refl = [rot[0], rot[3], rot[2], rot[1]];
            prop_assert_eq!(asymptotic_decider(refl, DeciderVariant::ClassicalSaddle).unwrap().phase, base);
        }
    }
}
