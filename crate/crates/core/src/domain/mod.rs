//! Boundary curves and the domains they bound.

mod curve;
mod interior;

pub use curve::{BoundaryCurve, BoundaryNode, CurveSpec, FourierCurve};
pub use interior::{geodesic_disk_chart_radius, ConvexityReport, Domain, InteriorNode};
