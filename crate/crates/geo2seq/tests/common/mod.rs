//! Shared helpers for the integration and acceptance suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use geo2seq_core::molgraph::Molecule3D;
use geo2seq_core::Vec3;

pub const FIXTURE: &str = concat!(
    env!("CARGO_MANIFEST_DIR"),
    "/tests/fixtures/qm9_like_1k.xyz"
);

pub fn load_fixture() -> Vec<Molecule3D> {
    let text = std::fs::read_to_string(FIXTURE).expect("fixture file present");
    geo2seq_core::molgraph::parse_xyz(&text).expect("fixture parses")
}

/// A molecule with uniformly random elements (H, C, N, O, F) and coordinates
/// in a ±5 Å box. General-position geometry: bonds may or may not arise.
pub fn random_molecule(rng: &mut ChaCha8Rng, min_atoms: usize, max_atoms: usize) -> Molecule3D {
    let n = rng.gen_range(min_atoms..=max_atoms);
    let elements = [1u8, 6, 7, 8, 9];
    let atoms: Vec<u8> = (0..n)
        .map(|_| elements[rng.gen_range(0..elements.len())])
        .collect();
    let coords: Vec<Vec3> = (0..n)
        .map(|_| {
            Vec3::new(
                rng.gen_range(-5.0..5.0),
                rng.gen_range(-5.0..5.0),
                rng.gen_range(-5.0..5.0),
            )
        })
        .collect();
    Molecule3D::new(atoms, coords).expect("random molecule is valid")
}

/// Uniform-ish random rotation matrix from a normalized quaternion.
pub fn random_rotation(rng: &mut ChaCha8Rng) -> [[f64; 3]; 3] {
    let q: [f64; 4] = loop {
        let q = [
            rng.gen_range(-1.0..1.0f64),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-3 && n <= 1.0 {
            break [q[0] / n, q[1] / n, q[2] / n, q[3] / n];
        }
    };
    let (w, x, y, z) = (q[0], q[1], q[2], q[3]);
    [
        [
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
        ],
        [
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
        ],
        [
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        ],
    ]
}

pub fn apply_rigid(m: &Molecule3D, rot: &[[f64; 3]; 3], shift: Vec3) -> Molecule3D {
    let coords: Vec<Vec3> = m
        .coords()
        .iter()
        .map(|&v| {
            Vec3::new(
                rot[0][0] * v.x + rot[0][1] * v.y + rot[0][2] * v.z,
                rot[1][0] * v.x + rot[1][1] * v.y + rot[1][2] * v.z,
                rot[2][0] * v.x + rot[2][1] * v.y + rot[2][2] * v.z,
            ) + shift
        })
        .collect();
    Molecule3D::new(m.atoms().to_vec(), coords).expect("rigid image is valid")
}

/// Applies a random atom relabeling; returns the permuted molecule.
pub fn random_atom_permutation(rng: &mut ChaCha8Rng, m: &Molecule3D) -> Molecule3D {
    use rand::seq::SliceRandom;
    let mut perm: Vec<usize> = (0..m.len()).collect();
    perm.shuffle(rng);
    m.permuted(&perm)
}
