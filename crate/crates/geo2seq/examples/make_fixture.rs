//! Regenerates the checked-in QM9-style fixture
//! (`tests/fixtures/qm9_like_1k.xyz`): small H/C/N/O/F molecules grown as
//! random valence-respecting trees with table bond lengths, hydrogen-capped,
//! randomly oriented, and tagged with a size-correlated `alpha` property plus
//! a `mu` value on the comment line.
//!
//! Usage: cargo run --example make_fixture [-- <count> <output>]

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use geo2seq_core::molgraph::BondTable;
use geo2seq_core::Vec3;

const SEED: u64 = 0x6d6f6c33; // fixture format v1; bump to reroll
const DEFAULT_COUNT: usize = 1200;

fn heavy_valence(z: u8) -> u32 {
    match z {
        6 => 4,
        7 => 3,
        8 => 2,
        9 => 1,
        _ => unreachable!("heavy fixture elements are C/N/O/F"),
    }
}

fn random_unit(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v * (1.0 / n);
        }
    }
}

/// Uniform-ish random rotation from a normalized quaternion.
fn random_rotation(rng: &mut ChaCha8Rng) -> [[f64; 3]; 3] {
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

fn rotate(m: &[[f64; 3]; 3], v: Vec3) -> Vec3 {
    Vec3::new(
        m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
        m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
        m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
    )
}

struct Builder<'a> {
    table: &'a BondTable,
    atoms: Vec<u8>,
    coords: Vec<Vec3>,
    remaining: Vec<u32>,
    /// Unit directions of the bonds already attached to each atom.
    bond_dirs: Vec<Vec<Vec3>>,
}

impl<'a> Builder<'a> {
    fn new(table: &'a BondTable, first: u8) -> Self {
        Builder {
            table,
            atoms: vec![first],
            coords: vec![Vec3::ZERO],
            remaining: vec![heavy_valence(first)],
            bond_dirs: vec![Vec::new()],
        }
    }

    /// Attaches `elem` to `parent` with the given order at the reference bond
    /// length (±0.02 Å), picking the candidate direction that stays farthest
    /// from the parent's existing bonds while clearing every other atom.
    fn attach(&mut self, rng: &mut ChaCha8Rng, parent: usize, elem: u8, order: u8) -> bool {
        let length = self
            .table
            .reference_length(self.atoms[parent], elem, order)
            .expect("fixture pairs are tabulated")
            + rng.gen_range(-0.02..0.02);
        let min_sep = if elem == 1 { 1.35 } else { 2.05 };
        let mut best: Option<(f64, Vec3)> = None;
        for _ in 0..60 {
            let dir = random_unit(rng);
            let spread = self.bond_dirs[parent]
                .iter()
                .map(|d| d.dot(dir).clamp(-1.0, 1.0).acos())
                .fold(PI, f64::min);
            if spread < PI / 2.2 {
                continue;
            }
            let p = self.coords[parent] + dir * length;
            let clear = self
                .coords
                .iter()
                .enumerate()
                .all(|(i, &q)| i == parent || p.distance(q) >= min_sep);
            if clear && best.is_none_or(|(s, _)| spread > s) {
                best = Some((spread, dir));
            }
        }
        let Some((_, dir)) = best else { return false };
        let p = self.coords[parent] + dir * length;
        self.atoms.push(elem);
        self.coords.push(p);
        self.remaining
            .push(heavy_valence(elem).saturating_sub(order as u32));
        self.bond_dirs.push(vec![-dir]);
        self.remaining[parent] -= order as u32;
        self.bond_dirs[parent].push(dir);
        true
    }

    fn cap_hydrogens(&mut self, rng: &mut ChaCha8Rng) -> bool {
        for atom in 0..self.atoms.len() {
            while self.remaining[atom] > 0 {
                let length = self.table.reference_length(self.atoms[atom], 1, 1).unwrap()
                    + rng.gen_range(-0.015..0.015);
                let mut placed = false;
                for _ in 0..60 {
                    let dir = random_unit(rng);
                    let spread = self.bond_dirs[atom]
                        .iter()
                        .map(|d| d.dot(dir).clamp(-1.0, 1.0).acos())
                        .fold(PI, f64::min);
                    if spread < PI / 2.4 {
                        continue;
                    }
                    let p = self.coords[atom] + dir * length;
                    let clear = self
                        .coords
                        .iter()
                        .enumerate()
                        .all(|(i, &q)| i == atom || p.distance(q) >= 1.35);
                    if clear {
                        self.atoms.push(1);
                        self.coords.push(p);
                        self.bond_dirs[atom].push(dir);
                        self.bond_dirs.push(vec![-dir]);
                        self.remaining[atom] -= 1;
                        self.remaining.push(0);
                        placed = true;
                        break;
                    }
                }
                if !placed {
                    return false;
                }
            }
        }
        true
    }
}

fn sample_element(rng: &mut ChaCha8Rng) -> u8 {
    match rng.gen_range(0..100) {
        0..=59 => 6,
        60..=75 => 7,
        76..=91 => 8,
        _ => 9,
    }
}

fn try_molecule(rng: &mut ChaCha8Rng, table: &BondTable) -> Option<(Vec<u8>, Vec<Vec3>)> {
    let heavy = rng.gen_range(3..=9);
    let first = *[6u8, 6, 6, 7, 8].get(rng.gen_range(0..5)).unwrap();
    let mut b = Builder::new(table, first);
    for _ in 1..heavy {
        let parents: Vec<usize> = (0..b.atoms.len())
            .filter(|&i| b.remaining[i] >= 1)
            .collect();
        let parent = *parents.get(rng.gen_range(0..parents.len().max(1)))?;
        let elem = sample_element(rng);
        let double_ok = b.remaining[parent] >= 2
            && heavy_valence(elem) >= 2
            && matches!(
                (b.atoms[parent], elem),
                (6, 6) | (6, 7) | (6, 8) | (7, 7) | (7, 8)
            );
        let order = if double_ok && rng.gen_bool(0.18) {
            2
        } else {
            1
        };
        if !b.attach(rng, parent, elem, order) {
            return None;
        }
    }
    if !b.cap_hydrogens(rng) {
        return None;
    }
    Some((b.atoms, b.coords))
}

fn main() {
    let mut args = std::env::args().skip(1);
    let count: usize = args
        .next()
        .map(|s| s.parse().expect("count"))
        .unwrap_or(DEFAULT_COUNT);
    let output = args.next().unwrap_or_else(|| {
        format!(
            "{}/tests/fixtures/qm9_like_1k.xyz",
            env!("CARGO_MANIFEST_DIR")
        )
    });

    let table = BondTable::default_table();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut out = String::new();
    let mut made = 0usize;
    while made < count {
        let Some((atoms, coords)) = try_molecule(&mut rng, &table) else {
            continue;
        };
        // Random pose so file coordinates are in general position.
        let rot = random_rotation(&mut rng);
        let shift = Vec3::new(
            rng.gen_range(-5.0..5.0),
            rng.gen_range(-5.0..5.0),
            rng.gen_range(-5.0..5.0),
        );
        let coords: Vec<Vec3> = coords.iter().map(|&c| rotate(&rot, c) + shift).collect();
        let n_heavy = atoms.iter().filter(|&&z| z > 1).count() as f64;
        let n_h = atoms.len() as f64 - n_heavy;
        let noise: f64 = (0..4).map(|_| rng.gen_range(-0.5..0.5)).sum();
        let alpha = 9.5 * n_heavy + 3.1 * n_h + noise;
        let mu = rng.gen_range(0.0..4.0f64);
        out.push_str(&format!("{}\nalpha={alpha:.4} mu={mu:.4}\n", atoms.len()));
        for (&z, c) in atoms.iter().zip(&coords) {
            let sym = geo2seq_core::element::symbol(z).unwrap();
            out.push_str(&format!("{sym} {:.6} {:.6} {:.6}\n", c.x, c.y, c.z));
        }
        made += 1;
    }
    std::fs::write(&output, out).expect("write fixture");
    eprintln!("wrote {made} molecules to {output}");
}
