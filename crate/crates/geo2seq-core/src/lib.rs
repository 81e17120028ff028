//! Lossless (up to a provable rounding bound) conversion between 3D molecular
//! geometries and SE(3)-invariant, canonically ordered token sequences.
//!
//! The pipeline is: perceive bonds from interatomic distances ([`molgraph`]),
//! order atoms with a canonical labeling of the colored bond graph ([`canon`]),
//! express coordinates in an equivariant global frame as spherical records
//! ([`geom`]), and discretize them into a finite token vocabulary ([`codec`]).
//! [`metrics`] scores generated molecule sets (stability, validity,
//! uniqueness, geometry MMD) and [`lmgen`] provides a counting-model
//! autoregressive baseline so the full encode → train → sample → decode →
//! evaluate loop runs without any ML framework.
//!
//! The crate is `no_std`-compatible (requires `alloc`; enable the `libm`
//! feature when building without `std`).

#![cfg_attr(not(feature = "std"), no_std)]

#[cfg(not(any(feature = "std", feature = "libm")))]
compile_error!("geo2seq-core requires either the `std` or the `libm` feature");

extern crate alloc;

mod math;
mod vec3;

pub mod canon;
pub mod codec;
pub mod element;
pub mod geom;
pub mod lmgen;
pub mod metrics;
pub mod molgraph;

pub use vec3::Vec3;
