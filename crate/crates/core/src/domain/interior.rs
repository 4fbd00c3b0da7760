use alloc::vec::Vec;
use core::f64::consts::PI;

use super::curve::{BoundaryCurve, BoundaryNode};
use crate::geometry::{connect, Metric};
use crate::math::wrap;
use crate::par::map_indexed;
use crate::quadrature::{pairwise_sum, GaussLegendre};
use crate::{Error, Result, Vec2};

const TAU: f64 = 2.0 * PI;
const ANGLE_TABLE: usize = 2048;

/// Quadrature node of an interior rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteriorNode {
    pub point: Vec2,
    pub weight: f64,
}

/// Outcome of the strict convexity test.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexityReport {
    pub convex: bool,
    pub min_curvature: f64,
    /// Arclength where the minimum curvature is attained.
    pub min_curvature_at: f64,
    /// Arclengths of a boundary pair whose chord leaves the domain.
    pub escaping_chord: Option<(f64, f64)>,
}

/// A simply connected domain, star-shaped about `center`, with a fan
/// quadrature rule: Gauss–Legendre along the rays from the center to the
/// boundary nodes, periodic trapezoid across them.
#[derive(Debug, Clone)]
pub struct Domain {
    pub boundary: BoundaryCurve,
    pub center: Vec2,
    pub area: f64,
    pub interior: Vec<InteriorNode>,
    /// Unwrapped polar angle of the boundary about the center on a uniform
    /// parameter grid; used to invert the radial function.
    angles: Vec<f64>,
}

impl Domain {
    /// Domain bounded by `boundary`, fanned from the chart centroid of the
    /// boundary nodes with `n_radial` points per ray.
    pub fn new(boundary: BoundaryCurve, n_radial: usize) -> Result<Domain> {
        let nodes = boundary.nodes();
        let center = nodes.iter().fold(Vec2::ZERO, |acc, n| acc + n.point) / nodes.len() as f64;
        Domain::with_center(boundary, center, n_radial)
    }

    pub fn with_center(boundary: BoundaryCurve, center: Vec2, n_radial: usize) -> Result<Domain> {
        if n_radial < 1 {
            return Err(Error::InvalidParameter(
                "fan rule needs at least one radial node".into(),
            ));
        }
        let angles = angle_table(&boundary, center)?;
        let mut d = Domain {
            boundary,
            center,
            area: 0.0,
            interior: Vec::new(),
            angles,
        };
        let n_b = d.boundary.nodes().len();
        d.interior = d.fan_rule(n_radial, n_b)?;
        d.area = pairwise_sum(&d.interior.iter().map(|n| n.weight).collect::<Vec<_>>());
        Ok(d)
    }

    pub fn metric(&self) -> &Metric {
        self.boundary.metric()
    }

    /// Fan rule with `n_radial` Gauss–Legendre points on each of `n_angular`
    /// rays ending at arclength-equispaced boundary points.
    pub fn fan_rule(&self, n_radial: usize, n_angular: usize) -> Result<Vec<InteriorNode>> {
        let m = self.metric();
        let gl = GaussLegendre::new(n_radial);
        let radial: Vec<(f64, f64)> = gl.on_interval(0.0, 1.0).collect();
        let ds = self.boundary.length() / n_angular as f64;
        let mut out = Vec::with_capacity(n_radial * n_angular);
        for k in 0..n_angular {
            let b: BoundaryNode = self.boundary.eval(ds * k as f64);
            let spoke = b.point - self.center;
            let jac = spoke.cross(b.tangent);
            if !(jac > 0.0) {
                return Err(Error::NotStarShaped(b.s));
            }
            for &(rho, w) in &radial {
                let p = self.center + spoke * rho;
                out.push(InteriorNode {
                    point: p,
                    weight: w * ds * rho * jac * m.sqrt_det(p),
                });
            }
        }
        Ok(out)
    }

    /// `∬_Ω f dA` with the default rule.
    pub fn integrate<F: Fn(Vec2) -> f64>(&self, f: F) -> f64 {
        let terms: Vec<f64> = self
            .interior
            .iter()
            .map(|n| n.weight * f(n.point))
            .collect();
        pairwise_sum(&terms)
    }

    /// Chart distance from the center to the boundary in direction `phi`.
    pub fn radial_function(&self, phi: f64) -> f64 {
        let u = self.param_in_direction(phi);
        (self.boundary.jet(u)[0] - self.center).norm()
    }

    /// Boundary parameter of the boundary point in the direction of `p` as
    /// seen from the center.
    pub fn boundary_param_toward(&self, p: Vec2) -> f64 {
        self.param_in_direction((p - self.center).angle())
    }

    fn param_in_direction(&self, phi: f64) -> f64 {
        let n = self.angles.len();
        let a0 = self.angles[0];
        let target = a0 + wrap(phi - a0, TAU);
        let h = TAU / n as f64;
        // bracket in the monotone table (closing the period with a0 + 2π)
        let j = self.angles.partition_point(|&a| a <= target).clamp(1, n) - 1;
        let (alo, ahi) = (
            self.angles[j],
            if j + 1 < n {
                self.angles[j + 1]
            } else {
                a0 + TAU
            },
        );
        let (mut lo, mut hi) = (h * j as f64, h * (j + 1) as f64);
        let mut u = lo + h * ((target - alo) / (ahi - alo)).clamp(0.0, 1.0);
        let dir = Vec2::from_angle(target);
        for _ in 0..60 {
            let [p, dp, _] = self.boundary.jet(u);
            let q = p - self.center;
            let delta = libm::atan2(dir.cross(q), dir.dot(q));
            if delta.abs() < 1e-15 {
                break;
            }
            if delta > 0.0 {
                hi = u;
            } else {
                lo = u;
            }
            let slope = q.cross(dp) / q.norm_sq();
            let next = u - delta / slope;
            u = if next > lo && next < hi {
                next
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo < 1e-16 {
                break;
            }
        }
        u
    }

    /// Signed chart gap `|p − c| − R(angle)`: negative inside, positive
    /// outside, zero on the boundary.
    pub fn boundary_gap(&self, p: Vec2) -> f64 {
        let q = p - self.center;
        let r = q.norm();
        if r == 0.0 {
            return -self.radial_function(0.0);
        }
        r - self.radial_function(q.angle())
    }

    pub fn contains(&self, p: Vec2) -> bool {
        self.boundary_gap(p) < 0.0
    }

    /// Strict convexity: positive geodesic curvature at every boundary node,
    /// and geodesic chords between `n_chord` boundary samples staying inside.
    pub fn is_strictly_convex(&self, n_chord: usize) -> ConvexityReport {
        let nodes = self.boundary.nodes();
        let (mut min_k, mut at) = (f64::INFINITY, 0.0);
        for n in nodes {
            if n.curvature < min_k {
                min_k = n.curvature;
                at = n.s;
            }
        }
        let m = self.metric();
        let samples: Vec<BoundaryNode> = (0..n_chord)
            .map(|k| {
                self.boundary
                    .eval(self.boundary.length() * k as f64 / n_chord as f64)
            })
            .collect();
        let pairs: Vec<(usize, usize)> = (0..n_chord)
            .flat_map(|i| (i + 1..n_chord).map(move |j| (i, j)))
            .collect();
        let scale = self.radial_function(0.0);
        let escapes = map_indexed(pairs.len(), |k| {
            let (i, j) = pairs[k];
            let (a, b) = (samples[i].point, samples[j].point);
            let inside = |p: Vec2| self.boundary_gap(p) < 1e-10 * scale;
            match connect(m, a, b) {
                Ok(g) if m.is_flat() => {
                    (1..16).all(|t| inside(a + (b - a) * (t as f64 / 16.0))) && g.length > 0.0
                }
                Ok(g) => g.samples[1..g.samples.len() - 1]
                    .iter()
                    .all(|s| inside(s.point)),
                Err(_) => false,
            }
        });
        let escaping_chord = escapes
            .iter()
            .position(|ok| !ok)
            .map(|k| (samples[pairs[k].0].s, samples[pairs[k].1].s));
        ConvexityReport {
            convex: min_k > 0.0 && escaping_chord.is_none(),
            min_curvature: min_k,
            min_curvature_at: at,
            escaping_chord,
        }
    }

    /// Largest distance between `n` arclength-equispaced boundary points.
    pub fn boundary_diameter(&self, n: usize) -> Result<f64> {
        let pts: Vec<Vec2> = (0..n)
            .map(|k| {
                self.boundary
                    .point(self.boundary.length() * k as f64 / n as f64)
            })
            .collect();
        let m = self.metric();
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        let lens = crate::par::try_map_indexed(pairs.len(), |k| {
            connect(m, pts[pairs[k].0], pts[pairs[k].1]).map(|g| g.length)
        })?;
        Ok(lens.into_iter().fold(0.0, f64::max))
    }
}

fn angle_table(boundary: &BoundaryCurve, center: Vec2) -> Result<Vec<f64>> {
    let n = ANGLE_TABLE;
    let mut out = Vec::with_capacity(n);
    let mut prev = 0.0;
    for i in 0..n {
        let u = TAU * i as f64 / n as f64;
        let [p, dp, _] = boundary.jet(u);
        let q = p - center;
        if !(q.cross(dp) > 0.0) {
            return Err(Error::NotStarShaped(boundary.arclength_at(u)));
        }
        let a = q.angle();
        let unwrapped = if i == 0 {
            a
        } else {
            prev + wrap(a - prev + PI, TAU) - PI
        };
        out.push(unwrapped);
        prev = unwrapped;
    }
    let turn = prev + wrap((out[0] + TAU) - prev + PI, TAU) - PI - out[0];
    if (turn - TAU).abs() > 1e-6 {
        return Err(Error::NotStarShaped(0.0));
    }
    Ok(out)
}

/// Chart radius of the geodesic disk of radius `r` about the chart origin,
/// for metrics whose chart is rotationally symmetric about it.
pub fn geodesic_disk_chart_radius(metric: &Metric, r: f64) -> Result<f64> {
    use crate::geometry::{ConformalFactor, MetricKind};
    let stereo = |k: f64| {
        if k > 0.0 {
            libm::tan(libm::sqrt(k) * r / 2.0) / libm::sqrt(k)
        } else if k < 0.0 {
            libm::tanh(libm::sqrt(-k) * r / 2.0) / libm::sqrt(-k)
        } else {
            r / 2.0
        }
    };
    match &metric.kind {
        MetricKind::ConstantCurvature { curvature, .. } => Ok(stereo(*curvature)),
        MetricKind::Conformal(ConformalFactor::Stereographic { curvature }) => {
            Ok(stereo(*curvature))
        }
        MetricKind::Conformal(ConformalFactor::Flat) => Ok(r),
        MetricKind::Revolution(_) => Ok(r),
        _ => Err(Error::InvalidParameter(
            "geodesic disks are only available in rotationally symmetric charts".into(),
        )),
    }
}
