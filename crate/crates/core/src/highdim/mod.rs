//! Weighted scattering energies `ℰ_p(Ω) = ½ ∬ f^p |ν_x − 𝖱ν_y|²`, with
//! `f = sn_K(r)`, for domains in the constant-curvature model spaces of any
//! dimension, and the identities expressing them through pair integrals.

mod checks;
mod domain;
mod identities;
mod model;

pub use checks::{divergence_fd, radial_power_divergence, reflection_divergence_hd};
pub use domain::{HDDomain, HDNode, HDShape, SphereRule};
pub use identities::{
    boundary_power_sum, energy_p_direct, highdim_identity, interior_pair_mc, HDIdentity, HDOptions,
    McEstimate,
};
pub use model::{Ambient, ModelSpace};
