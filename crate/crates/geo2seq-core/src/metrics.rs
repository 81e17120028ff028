//! Evaluation metrics for generated molecule sets: atom/molecule stability,
//! validity, completeness, uniqueness, novelty, and geometry-distribution
//! MMD.
//!
//! Everything here consumes inferred bond graphs and interatomic distances
//! only, so all metrics are SE(3)- and permutation-invariant by construction.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::canon::canonical_order;
use crate::math;
use crate::molgraph::{connected_components, infer_bonds, ChemTables, ColoredGraph, Molecule3D};
use crate::vec3::Vec3;

/// Features kept per class when estimating MMD; larger extractions are
/// subsampled by stride so results stay deterministic.
pub const MMD_FEATURE_CAP: usize = 100_000;
/// Features entering the quadratic kernel sums (the estimator is O(n²)).
pub const MMD_KERNEL_CAP: usize = 2_048;
/// Pooled points used for the median-heuristic bandwidth.
pub const MMD_BANDWIDTH_CAP: usize = 2_048;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MetricsReport {
    pub atom_stability: f64,
    pub mol_stability: f64,
    pub valid: f64,
    pub valid_unique: f64,
    pub valid_unique_novel: f64,
    pub complete: f64,
    pub bond_length_mmd: f64,
    pub bond_angle_mmd: f64,
    pub dihedral_mmd: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricsError {
    #[error("empty molecule set")]
    EmptySet,
    #[error("no geometric features: {0} set has no bonds")]
    NoGeometricFeatures(&'static str),
}

fn stable_flags(g: &ColoredGraph, mol: &Molecule3D, tables: &ChemTables) -> Vec<bool> {
    g.total_orders()
        .iter()
        .zip(mol.atoms())
        .map(|(&total, &z)| tables.valencies.is_stable(z, total))
        .collect()
}

/// Fraction of atoms, over all molecules, whose total inferred bond order
/// matches an allowed valency.
pub fn atom_stability(mols: &[Molecule3D], tables: &ChemTables) -> Result<f64, MetricsError> {
    if mols.is_empty() {
        return Err(MetricsError::EmptySet);
    }
    let mut stable = 0usize;
    let mut total = 0usize;
    for mol in mols {
        let g = infer_bonds(mol, &tables.bonds);
        let flags = stable_flags(&g, mol, tables);
        stable += flags.iter().filter(|&&s| s).count();
        total += flags.len();
    }
    Ok(stable as f64 / total as f64)
}

/// Fraction of molecules whose atoms are all stable.
pub fn mol_stability(mols: &[Molecule3D], tables: &ChemTables) -> Result<f64, MetricsError> {
    if mols.is_empty() {
        return Err(MetricsError::EmptySet);
    }
    let stable = mols
        .iter()
        .filter(|mol| {
            let g = infer_bonds(mol, &tables.bonds);
            stable_flags(&g, mol, tables).iter().all(|&s| s)
        })
        .count();
    Ok(stable as f64 / mols.len() as f64)
}

/// Valence-cap sanitization on the largest connected component: every atom's
/// total bond order must not exceed its largest allowed valency.
fn is_valid(g: &ColoredGraph, mol: &Molecule3D, tables: &ChemTables) -> bool {
    let components = connected_components(g);
    let largest = components
        .iter()
        .max_by_key(|c| c.len())
        .expect("molecules have at least one vertex");
    let totals = g.total_orders();
    largest.iter().all(|&v| {
        tables
            .valencies
            .max_allowed(mol.atoms()[v])
            .is_some_and(|cap| totals[v] <= cap)
    })
}

/// `(valid, valid_unique, valid_unique_novel)` fractions over the whole set.
/// Uniqueness deduplicates on the canonical certificate of the inferred bond
/// graph; novelty is certificate absence from `train_certificates`.
pub fn validity_uniqueness_novelty(
    mols: &[Molecule3D],
    train_certificates: &BTreeSet<Vec<u8>>,
    tables: &ChemTables,
) -> (f64, f64, f64) {
    if mols.is_empty() {
        return (0.0, 0.0, 0.0);
    }
    let n = mols.len() as f64;
    let mut valid = 0usize;
    let mut unique = 0usize;
    let mut novel = 0usize;
    let mut seen: BTreeSet<Vec<u8>> = BTreeSet::new();
    for mol in mols {
        let g = infer_bonds(mol, &tables.bonds);
        if !is_valid(&g, mol, tables) {
            continue;
        }
        valid += 1;
        let cert = canonical_order(&g).certificate;
        if !seen.insert(cert.clone()) {
            continue;
        }
        unique += 1;
        if !train_certificates.contains(&cert) {
            novel += 1;
        }
    }
    (valid as f64 / n, unique as f64 / n, novel as f64 / n)
}

/// Canonical certificates of a molecule set's inferred bond graphs, e.g. for
/// use as the training-set reference in novelty computation.
pub fn certificates(mols: &[Molecule3D], tables: &ChemTables) -> BTreeSet<Vec<u8>> {
    mols.iter()
        .map(|m| canonical_order(&infer_bonds(m, &tables.bonds)).certificate)
        .collect()
}

/// Fraction of molecules whose inferred bond graph is a single connected
/// component.
pub fn completeness(mols: &[Molecule3D], tables: &ChemTables) -> Result<f64, MetricsError> {
    if mols.is_empty() {
        return Err(MetricsError::EmptySet);
    }
    let complete = mols
        .iter()
        .filter(|m| connected_components(&infer_bonds(m, &tables.bonds)).len() == 1)
        .count();
    Ok(complete as f64 / mols.len() as f64)
}

/// Geometric feature streams of one molecule set.
#[derive(Debug, Default, Clone)]
pub struct GeometryFeatures {
    pub bond_lengths: Vec<f64>,
    pub bond_angles: Vec<f64>,
    pub dihedrals: Vec<f64>,
}

/// Extracts bond lengths (Å), bonded-triplet angles, and bonded-quadruplet
/// dihedral magnitudes (radians), each stream capped at
/// [`MMD_FEATURE_CAP`] by stride subsampling.
pub fn geometry_features(mols: &[Molecule3D], tables: &ChemTables) -> GeometryFeatures {
    let mut f = GeometryFeatures::default();
    for mol in mols {
        let g = infer_bonds(mol, &tables.bonds);
        let coords = mol.coords();
        let adj = g.adjacency();
        for &(u, v, _) in g.edges() {
            f.bond_lengths.push(coords[u].distance(coords[v]));
        }
        for (center, nbrs) in adj.iter().enumerate() {
            for (ai, &(a, _)) in nbrs.iter().enumerate() {
                for &(b, _) in &nbrs[ai + 1..] {
                    if let Some(angle) = angle_at(coords[center], coords[a], coords[b]) {
                        f.bond_angles.push(angle);
                    }
                }
            }
        }
        for &(b, c, _) in g.edges() {
            for &(a, _) in &adj[b] {
                if a == c {
                    continue;
                }
                for &(d, _) in &adj[c] {
                    if d == b || d == a {
                        continue;
                    }
                    if let Some(angle) = dihedral(coords[a], coords[b], coords[c], coords[d]) {
                        f.dihedrals.push(angle);
                    }
                }
            }
        }
    }
    f.bond_lengths = stride_cap(f.bond_lengths, MMD_FEATURE_CAP);
    f.bond_angles = stride_cap(f.bond_angles, MMD_FEATURE_CAP);
    f.dihedrals = stride_cap(f.dihedrals, MMD_FEATURE_CAP);
    f
}

fn angle_at(center: Vec3, a: Vec3, b: Vec3) -> Option<f64> {
    let u = (a - center).normalized()?;
    let v = (b - center).normalized()?;
    Some(math::acos(u.dot(v).clamp(-1.0, 1.0)))
}

/// Magnitude of the torsion angle along a–b–c–d, in [0, π]. `None` for
/// degenerate (collinear) segments.
fn dihedral(a: Vec3, b: Vec3, c: Vec3, d: Vec3) -> Option<f64> {
    let b1 = b - a;
    let b2 = c - b;
    let b3 = d - c;
    let n1 = b1.cross(b2);
    let n2 = b2.cross(b3);
    if n1.norm() < 1e-9 || n2.norm() < 1e-9 {
        return None;
    }
    let axis = b2.normalized()?;
    let x = n1.dot(n2);
    let y = n1.cross(n2).dot(axis);
    Some(math::abs(math::atan2(y, x)))
}

/// Deterministic stride subsample down to at most `cap` items.
fn stride_cap(values: Vec<f64>, cap: usize) -> Vec<f64> {
    if values.len() <= cap {
        return values;
    }
    let stride = values.len().div_ceil(cap);
    values.into_iter().step_by(stride).collect()
}

/// Gaussian kernel k(a, b) = exp(−(a−b)² / 2h²).
fn gaussian(a: f64, b: f64, bandwidth: f64) -> f64 {
    let d = a - b;
    math::exp(-(d * d) / (2.0 * bandwidth * bandwidth))
}

/// Unbiased MMD² estimate between two 1D samples under a Gaussian kernel.
/// Can be slightly negative; callers clamp. Falls back to the biased V-
/// statistic when a side has a single point.
pub fn mmd_sq(xs: &[f64], ys: &[f64], bandwidth: f64) -> f64 {
    assert!(
        !xs.is_empty() && !ys.is_empty(),
        "mmd_sq needs nonempty samples"
    );
    assert!(bandwidth > 0.0, "bandwidth must be positive");
    let m = xs.len() as f64;
    let n = ys.len() as f64;
    let self_term = |vals: &[f64]| -> f64 {
        let k = vals.len() as f64;
        if vals.len() == 1 {
            return gaussian(vals[0], vals[0], bandwidth);
        }
        let mut sum = 0.0;
        for (i, &a) in vals.iter().enumerate() {
            for &b in &vals[i + 1..] {
                sum += gaussian(a, b, bandwidth);
            }
        }
        2.0 * sum / (k * (k - 1.0))
    };
    let mut cross = 0.0;
    for &a in xs {
        for &b in ys {
            cross += gaussian(a, b, bandwidth);
        }
    }
    self_term(xs) + self_term(ys) - 2.0 * cross / (m * n)
}

/// MMD (clamped at zero, square-rooted).
pub fn mmd(xs: &[f64], ys: &[f64], bandwidth: f64) -> f64 {
    math::sqrt(mmd_sq(xs, ys, bandwidth).max(0.0))
}

/// Median-heuristic bandwidth over the pooled sample: the median pairwise
/// absolute difference, with 1.0 as the degenerate-sample fallback.
pub fn median_bandwidth(xs: &[f64], ys: &[f64]) -> f64 {
    let pooled: Vec<f64> = stride_cap(xs.iter().chain(ys).copied().collect(), MMD_BANDWIDTH_CAP);
    let mut diffs = Vec::with_capacity(pooled.len() * (pooled.len() - 1) / 2);
    for (i, &a) in pooled.iter().enumerate() {
        for &b in &pooled[i + 1..] {
            diffs.push(math::abs(a - b));
        }
    }
    if diffs.is_empty() {
        return 1.0;
    }
    diffs.sort_by(f64::total_cmp);
    let median = diffs[diffs.len() / 2];
    if median > 0.0 {
        median
    } else {
        1.0
    }
}

fn feature_mmd(xs: &[f64], ys: &[f64]) -> f64 {
    // A feature class empty on either side carries no distributional
    // evidence; report 0 rather than erroring (the bond class is guarded
    // separately).
    if xs.is_empty() || ys.is_empty() {
        return 0.0;
    }
    let xs = stride_cap(xs.to_vec(), MMD_KERNEL_CAP);
    let ys = stride_cap(ys.to_vec(), MMD_KERNEL_CAP);
    let bandwidth = median_bandwidth(&xs, &ys);
    mmd(&xs, &ys, bandwidth)
}

/// MMD distances of the bond length, bond angle, and dihedral angle
/// distributions between a generated and a reference molecule set.
pub fn geometry_mmd(
    generated: &[Molecule3D],
    reference: &[Molecule3D],
    tables: &ChemTables,
) -> Result<(f64, f64, f64), MetricsError> {
    if generated.is_empty() || reference.is_empty() {
        return Err(MetricsError::EmptySet);
    }
    let gf = geometry_features(generated, tables);
    let rf = geometry_features(reference, tables);
    if gf.bond_lengths.is_empty() {
        return Err(MetricsError::NoGeometricFeatures("generated"));
    }
    if rf.bond_lengths.is_empty() {
        return Err(MetricsError::NoGeometricFeatures("reference"));
    }
    Ok((
        feature_mmd(&gf.bond_lengths, &rf.bond_lengths),
        feature_mmd(&gf.bond_angles, &rf.bond_angles),
        feature_mmd(&gf.dihedrals, &rf.dihedrals),
    ))
}

/// Full metrics report for a generated set against a reference set and a
/// training certificate set.
pub fn evaluate(
    generated: &[Molecule3D],
    reference: &[Molecule3D],
    train_certificates: &BTreeSet<Vec<u8>>,
    tables: &ChemTables,
) -> Result<MetricsReport, MetricsError> {
    let (valid, valid_unique, valid_unique_novel) =
        validity_uniqueness_novelty(generated, train_certificates, tables);
    let (bond_length_mmd, bond_angle_mmd, dihedral_mmd) =
        geometry_mmd(generated, reference, tables)?;
    Ok(MetricsReport {
        atom_stability: atom_stability(generated, tables)?,
        mol_stability: mol_stability(generated, tables)?,
        valid,
        valid_unique,
        valid_unique_novel,
        complete: completeness(generated, tables)?,
        bond_length_mmd,
        bond_angle_mmd,
        dihedral_mmd,
    })
}
