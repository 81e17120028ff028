//! Equivariant global frame construction and the spherical forward/inverse
//! coordinate maps.
//!
//! The frame is built from the first three non-collinear atoms of an ordering;
//! spherical records taken in it are invariant under any rigid motion of the
//! molecule while the frame itself co-rotates.

use alloc::vec::Vec;

use crate::math;
use crate::vec3::Vec3;

/// Cross-product norm below which a candidate third atom counts as collinear
/// with the x axis.
pub const COLLINEAR_EPS: f64 = 1e-8;

/// |v·y| below this fraction of d snaps to exactly zero before the azimuth
/// atan2. The frame-defining atoms lie exactly in the x–z plane, so without
/// the snap their azimuth would sit on the ±π branch cut and flip sign with
/// the rounding noise of a rigid motion.
pub const AZIMUTH_SNAP_EPS: f64 = 1e-12;

/// Right-handed orthonormal basis anchored at the first ordered atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameBasis {
    pub origin: Vec3,
    pub x: Vec3,
    pub y: Vec3,
    pub z: Vec3,
}

impl FrameBasis {
    /// Identity axes at an origin; the fallback for single atoms and other
    /// degeneracies.
    pub fn identity(origin: Vec3) -> Self {
        FrameBasis {
            origin,
            x: Vec3::X,
            y: Vec3::Y,
            z: Vec3::Z,
        }
    }

    /// Components of a world point in this frame.
    pub fn to_local(&self, p: Vec3) -> Vec3 {
        let v = p - self.origin;
        Vec3::new(v.dot(self.x), v.dot(self.y), v.dot(self.z))
    }

    /// World point for frame components.
    pub fn to_world(&self, local: Vec3) -> Vec3 {
        self.origin + self.x * local.x + self.y * local.y + self.z * local.z
    }
}

/// Per-atom spherical record: radial distance (Å), polar angle θ ∈ [0, π],
/// azimuth φ ∈ (−π, π]. A zero distance forces θ = φ = 0, and θ at a pole
/// forces φ = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalRecord {
    pub d: f64,
    pub theta: f64,
    pub phi: f64,
}

/// Builds the global frame from an ordered list of atom positions
/// (`ordered[i]` is the position of the atom labeled `i`).
///
/// x points from the first atom to the second; the first later atom that is
/// not collinear with x fixes y through a cross product; z completes the
/// right-handed basis. Degenerate inputs (single atom, coincident leading
/// atoms, fully collinear molecules) fall back to fixed conventions so a
/// valid frame always exists.
pub fn build_frame(ordered: &[Vec3]) -> FrameBasis {
    assert!(!ordered.is_empty(), "frame needs at least one atom");
    let origin = ordered[0];
    // First atom offering a usable x direction; normally the second.
    let x = ordered[1..].iter().find_map(|&p| (p - origin).normalized());
    let x = match x {
        Some(x) => x,
        None => return FrameBasis::identity(origin),
    };
    for &p in &ordered[1..] {
        let v = p - origin;
        let cross = v.cross(x);
        if cross.norm() > COLLINEAR_EPS {
            let y = cross.normalized().expect("norm checked above");
            let z = x.cross(y);
            return FrameBasis { origin, x, y, z };
        }
    }
    // All atoms collinear: y is the first standard basis vector not parallel
    // to x, Gram–Schmidt orthogonalized.
    let y = [Vec3::X, Vec3::Y, Vec3::Z]
        .into_iter()
        .find_map(|e| (e - x * e.dot(x)).normalized())
        .expect("some basis vector is non-parallel to any unit x");
    let z = x.cross(y);
    FrameBasis { origin, x, y, z }
}

/// Spherical records of ordered atom positions under a frame.
pub fn to_spherical(ordered: &[Vec3], frame: &FrameBasis) -> Vec<SphericalRecord> {
    ordered.iter().map(|&p| spherical_of(p, frame)).collect()
}

fn spherical_of(p: Vec3, frame: &FrameBasis) -> SphericalRecord {
    let v = p - frame.origin;
    let d = v.norm();
    if d == 0.0 {
        return SphericalRecord {
            d: 0.0,
            theta: 0.0,
            phi: 0.0,
        };
    }
    let cos_theta = (v.dot(frame.z) / d).clamp(-1.0, 1.0);
    let theta = math::acos(cos_theta);
    let px = v.dot(frame.x);
    let mut py = v.dot(frame.y);
    if math::abs(py) <= AZIMUTH_SNAP_EPS * d {
        // In-plane atoms get +0, so the branch cut resolves to +π for every
        // pose of the molecule (IEEE atan2(+0, x<0) = +π).
        py = 0.0;
    }
    // atan2(0, 0) is implementation-defined, and the azimuth is meaningless
    // at the poles; both cases pin phi to 0.
    let at_pole = theta == 0.0 || theta == core::f64::consts::PI;
    let mut phi = if at_pole || (px == 0.0 && py == 0.0) {
        0.0
    } else {
        math::atan2(py, px)
    };
    if phi == -core::f64::consts::PI {
        phi = core::f64::consts::PI;
    }
    SphericalRecord { d, theta, phi }
}

/// Inverse spherical map: records to Cartesian coordinates in the frame's own
/// coordinate system (the first record of an encoded molecule lands on the
/// origin).
pub fn from_spherical(records: &[SphericalRecord]) -> Vec<Vec3> {
    records
        .iter()
        .map(|r| {
            Vec3::new(
                r.d * math::sin(r.theta) * math::cos(r.phi),
                r.d * math::sin(r.theta) * math::sin(r.phi),
                r.d * math::cos(r.theta),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use core::f64::consts::{FRAC_PI_2, PI};

    const TOL: f64 = 1e-9;

    fn assert_vec_close(a: Vec3, b: Vec3, tol: f64) {
        assert!((a - b).norm() < tol, "{a:?} vs {b:?}");
    }

    #[test]
    fn frame_matches_hand_evaluation() {
        let coords = [Vec3::ZERO, Vec3::X, Vec3::Y];
        let f = build_frame(&coords);
        assert_vec_close(f.x, Vec3::X, TOL);
        assert_vec_close(f.y, Vec3::new(0.0, 0.0, -1.0), TOL);
        assert_vec_close(f.z, Vec3::Y, TOL);
    }

    #[test]
    fn frame_axes_orthonormal_right_handed() {
        let coords = [
            Vec3::new(0.3, -1.2, 0.7),
            Vec3::new(1.4, 0.2, -0.3),
            Vec3::new(-0.8, 0.9, 2.0),
            Vec3::new(2.0, 2.0, 2.0),
        ];
        let f = build_frame(&coords);
        assert!((f.x.norm() - 1.0).abs() < TOL);
        assert!((f.y.norm() - 1.0).abs() < TOL);
        assert!((f.z.norm() - 1.0).abs() < TOL);
        assert!(f.x.dot(f.y).abs() < TOL);
        assert!(f.x.dot(f.z).abs() < TOL);
        assert!(f.y.dot(f.z).abs() < TOL);
        assert_vec_close(f.x.cross(f.y), f.z, TOL);
    }

    #[test]
    fn single_atom_identity_frame() {
        let f = build_frame(&[Vec3::new(5.0, -2.0, 1.0)]);
        assert_eq!(f.x, Vec3::X);
        assert_eq!(f.y, Vec3::Y);
        assert_eq!(f.z, Vec3::Z);
    }

    #[test]
    fn collinear_molecule_fallback() {
        let coords = [
            Vec3::ZERO,
            Vec3::new(0.0, 0.0, 1.0),
            Vec3::new(0.0, 0.0, 2.5),
        ];
        let f = build_frame(&coords);
        assert_vec_close(f.x, Vec3::Z, TOL);
        // First basis vector not parallel to z, orthogonalized: e1 stays e1.
        assert_vec_close(f.y, Vec3::X, TOL);
        assert_vec_close(f.z, Vec3::Z.cross(Vec3::X), TOL);
    }

    #[test]
    fn coincident_atoms_fallback() {
        let f = build_frame(&[Vec3::ZERO, Vec3::ZERO]);
        assert_eq!(f.x, Vec3::X);
    }

    #[test]
    fn origin_atom_is_zero_record() {
        let coords = [Vec3::new(1.0, 2.0, 3.0), Vec3::new(2.0, 2.0, 3.0)];
        let f = build_frame(&coords);
        let recs = to_spherical(&coords, &f);
        assert_eq!(
            recs[0],
            SphericalRecord {
                d: 0.0,
                theta: 0.0,
                phi: 0.0
            }
        );
    }

    #[test]
    fn second_atom_on_x_axis() {
        let coords = [
            Vec3::ZERO,
            Vec3::new(1.09, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
        ];
        let f = build_frame(&coords);
        let recs = to_spherical(&coords, &f);
        assert!((recs[1].d - 1.09).abs() < TOL);
        assert!((recs[1].theta - FRAC_PI_2).abs() < TOL);
        assert!(recs[1].phi.abs() < TOL);
    }

    #[test]
    fn from_spherical_axis_cases() {
        let on_x = from_spherical(&[SphericalRecord {
            d: 1.0,
            theta: FRAC_PI_2,
            phi: 0.0,
        }]);
        assert_vec_close(on_x[0], Vec3::X, 1e-15);
        let on_z = from_spherical(&[SphericalRecord {
            d: 1.0,
            theta: 0.0,
            phi: 0.0,
        }]);
        assert_vec_close(on_z[0], Vec3::Z, 1e-15);
    }

    #[test]
    fn pole_forces_phi_zero() {
        // This frame comes out with exact unit axes, so a point along z hits
        // the pole exactly.
        let coords = [Vec3::ZERO, Vec3::X, Vec3::Y];
        let f = build_frame(&coords);
        let north = to_spherical(&[f.origin + f.z * 2.0], &f)[0];
        assert_eq!(north.theta, 0.0);
        assert_eq!(north.phi, 0.0);
        let south = to_spherical(&[f.origin - f.z * 2.0], &f)[0];
        assert_eq!(south.theta, PI);
        assert_eq!(south.phi, 0.0);
    }

    #[test]
    fn branch_cut_resolves_to_plus_pi() {
        // The y-defining atom sits exactly in the x–z plane; with a negative
        // x component its azimuth is the branch cut and must come out +π for
        // any pose of the molecule.
        let base = [
            Vec3::ZERO,
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(-2.0, 0.7, 0.0),
        ];
        let f = build_frame(&base);
        let rec = to_spherical(&base, &f)[2];
        assert_eq!(rec.phi, PI);

        // A crude rotation about an oblique axis, applied in f64.
        let (s, c) = (0.6f64, 0.8f64);
        let rot = |v: Vec3| {
            Vec3::new(c * v.x - s * v.z, v.y, s * v.x + c * v.z) + Vec3::new(0.3, -0.7, 1.1)
        };
        let moved: Vec<Vec3> = base.iter().map(|&v| rot(v)).collect();
        let fm = build_frame(&moved);
        let recm = to_spherical(&moved, &fm)[2];
        assert_eq!(recm.phi, PI);
        assert!((recm.theta - rec.theta).abs() < 1e-12);
    }

    #[test]
    fn theta_phi_ranges() {
        let coords: Vec<Vec3> = vec![
            Vec3::ZERO,
            Vec3::new(1.0, 0.2, -0.3),
            Vec3::new(-0.5, 1.1, 0.8),
            Vec3::new(-1.0, -1.0, -1.0),
            Vec3::new(0.1, -2.0, 1.4),
        ];
        let f = build_frame(&coords);
        for rec in to_spherical(&coords, &f) {
            assert!(rec.d >= 0.0);
            assert!((0.0..=PI).contains(&rec.theta));
            assert!(rec.phi > -PI && rec.phi <= PI);
        }
    }

    #[test]
    fn roundtrip_with_frame_alignment() {
        // Reconstruct, rebuild the frame on the reconstruction, and map back
        // into the original frame; positions must match.
        let coords: Vec<Vec3> = vec![
            Vec3::new(0.2, 0.1, -0.4),
            Vec3::new(1.3, 0.0, 0.2),
            Vec3::new(-0.7, 1.9, 0.3),
            Vec3::new(0.9, -1.1, 1.7),
            Vec3::new(-1.2, -0.8, -1.5),
        ];
        let f = build_frame(&coords);
        let recs = to_spherical(&coords, &f);
        let rec_coords = from_spherical(&recs);
        let f_rec = build_frame(&rec_coords);
        for (orig, r) in coords.iter().zip(&rec_coords) {
            let aligned = f.to_world(f_rec.to_local(*r));
            assert_vec_close(*orig, aligned, TOL);
        }
        // Congruence: all pairwise distances preserved.
        for i in 0..coords.len() {
            for j in i + 1..coords.len() {
                let a = coords[i].distance(coords[j]);
                let b = rec_coords[i].distance(rec_coords[j]);
                assert!((a - b).abs() < 1e-8);
            }
        }
    }
}
