//! Planar-chart surface geometry: metrics, geodesics, transport, Jacobi
//! fields and the reflection map.

mod checks;
mod comparison;
mod geodesic;
mod jacobi;
mod metric;
mod transport;

pub use checks::{flux_of_w, reflection_divergence};
pub use comparison::{comparison_fns, cs_k, sn_k, ComparisonFns};
pub use geodesic::{connect, shoot, GeodesicSample, GeodesicSolution, JacobiState};
pub(crate) use geodesic::{geodesic_field, initial_state, initial_step, step_control};
pub use jacobi::{jacobi_along, jacobi_forward, JacobiData};
pub use metric::{
    Christoffel, ConformalFactor, Metric, MetricKind, MetricTensor, Profile, Region, Tolerances,
};
pub use transport::{
    parallel_transport, reflect_along, reflect_by_transport, reflect_closed_form, reflect_transport,
};
