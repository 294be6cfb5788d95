//! Workload builders shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tetcut_core::field::sample_scene;
use tetcut_core::{HexLattice, LevelSetField, Primitive, PrimitiveScene, Sense, Shape};

/// Unit cube split into `n³` cells with independent random nodal signs.
pub fn random_field(n: usize, seed: u64) -> LevelSetField {
    let lattice = HexLattice::new([n; 3], [0.0; 3], 1.0 / n as f64).expect("n > 0");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..lattice.node_count())
        .map(|_| {
            let m: f64 = rng.gen_range(0.1..10.0);
            if rng.gen_bool(0.5) {
                m
            } else {
                -m
            }
        })
        .collect();
    LevelSetField::from_values(lattice, values).expect("finite values")
}

/// Hollow sphere in the unit cube on an `n³` lattice. Smooth, few ambiguities.
pub fn shell_field(n: usize) -> LevelSetField {
    let lattice = HexLattice::new([n; 3], [0.0; 3], 1.0 / n as f64).expect("n > 0");
    let center = [0.5; 3];
    let scene = PrimitiveScene {
        primitives: vec![
            Primitive { shape: Shape::Sphere { center, radius: 0.42 }, sense: Sense::Solid },
            Primitive { shape: Shape::Sphere { center, radius: 0.3 }, sense: Sense::Void },
        ],
    };
    sample_scene(&scene, &lattice).expect("valid scene")
}
