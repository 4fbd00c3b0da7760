//! Scattering energy of domains in Riemannian surfaces.
//!
//! The crate computes the boundary double integral
//! `E(Ω) = ½ ∬ |ν_x − R ν_y|² ds_x ds_y`, where `R` reflects a tangent vector
//! at `y` across the axis orthogonal to the minimizing geodesic towards `x` and
//! parallel-translates it to `x`, together with every quantity needed to check
//! the isoperimetric identities and inequalities built on it:
//!
//! * [`geometry`]: metrics on planar charts, geodesic shooting and two-point
//!   boundary value problems, parallel transport, Jacobi fields and the
//!   reflection map.
//! * [`domain`]: boundary curves, arclength parametrization, normals, geodesic
//!   curvature, interior quadrature and convexity tests.
//! * [`energy`]: the scattering energy and the deficit identities.
//! * [`chords`]: boundary-based chord coordinates, Santaló's formula and the
//!   symmetry diagnostics.
//! * [`sobolev`]: the sharp Sobolev inequality and its cross-term chain.
//! * [`highdim`]: the weighted energies `E_p` in the constant-curvature model
//!   spaces of any dimension.
//!
//! The crate is `no_std` (with `alloc`); the default `std` feature enables
//! rayon-backed parallel pair loops. Reductions are always index ordered, so
//! results do not depend on the thread count.

#![cfg_attr(not(feature = "std"), no_std)]
// `!(x > 0.0)` style guards also reject NaN, which is the point
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod chords;
pub mod domain;
pub mod energy;
mod error;
pub mod geometry;
pub mod highdim;
mod math;
pub(crate) mod ode;
mod par;
pub mod quadrature;
pub mod sobolev;
mod vec2;

pub use error::{Error, Result};
pub use vec2::Vec2;
