use alloc::string::String;

use crate::Vec2;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("point ({}, {}) lies outside the working region", .0.x, .0.y)]
    OutsideRegion(Vec2),

    #[error("step size underflow at arclength {t}")]
    StepUnderflow { t: f64 },

    #[error("geodesic boundary value problem did not converge: ({}, {}) -> ({}, {}), residual {residual:.3e}", .from.x, .from.y, .to.x, .to.y)]
    NonConvergence { from: Vec2, to: Vec2, residual: f64 },

    #[error("conjugate point before arclength {t} on the geodesic from ({}, {}) to ({}, {})", .from.x, .from.y, .to.x, .to.y)]
    ConjugatePoint { from: Vec2, to: Vec2, t: f64 },

    #[error("boundary curve self-intersects near parameters {0:.4} and {1:.4}")]
    SelfIntersection(f64, f64),

    #[error("boundary curve is degenerate: {0}")]
    DegenerateCurve(String),

    #[error("domain is not star-shaped with respect to its center at boundary arclength {0:.4}")]
    NotStarShaped(f64),

    #[error("domain is not convex: {0}")]
    NotConvex(String),

    #[error(
        "geodesic from boundary arclength {s:.4} at angle {theta:.4} does not exit the domain"
    )]
    ChordEscape { s: f64, theta: f64 },

    #[error("points at distance {0:.6} are antipodal or nearly so; the connecting geodesic is not unique")]
    Antipodal(f64),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
