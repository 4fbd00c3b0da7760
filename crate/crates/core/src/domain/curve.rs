use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::geometry::{connect, Metric};
use crate::math::wrap;
use crate::quadrature::GaussLegendre;
use crate::{Error, Result, Vec2};

const TAU: f64 = 2.0 * PI;
const PANEL_ORDER: usize = 16;
// odd, so symmetric curves do not put a vertex exactly on a crossing
const INTERSECTION_SAMPLES: usize = 509;

/// Closed chart curve `u ↦ Σ_k (a_k cos ku + b_k sin ku)` per coordinate,
/// `u ∈ [0, 2π)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FourierCurve {
    pub x_cos: Vec<f64>,
    pub x_sin: Vec<f64>,
    pub y_cos: Vec<f64>,
    pub y_sin: Vec<f64>,
}

impl FourierCurve {
    pub fn ellipse(center: Vec2, a: f64, b: f64) -> FourierCurve {
        FourierCurve {
            x_cos: vec![center.x, a],
            x_sin: vec![0.0, 0.0],
            y_cos: vec![center.y, 0.0],
            y_sin: vec![0.0, b],
        }
    }

    pub fn circle(center: Vec2, radius: f64) -> FourierCurve {
        FourierCurve::ellipse(center, radius, radius)
    }

    fn terms(&self) -> usize {
        self.x_cos
            .len()
            .max(self.x_sin.len())
            .max(self.y_cos.len())
            .max(self.y_sin.len())
    }

    fn jet(&self, u: f64) -> [Vec2; 3] {
        let mut out = [Vec2::ZERO; 3];
        let coef = |v: &Vec<f64>, k: usize| v.get(k).copied().unwrap_or(0.0);
        for k in 0..self.terms() {
            let kf = k as f64;
            let (s, c) = (libm::sin(kf * u), libm::cos(kf * u));
            let (ax, bx, ay, by) = (
                coef(&self.x_cos, k),
                coef(&self.x_sin, k),
                coef(&self.y_cos, k),
                coef(&self.y_sin, k),
            );
            out[0] += Vec2::new(ax * c + bx * s, ay * c + by * s);
            out[1] += Vec2::new(-ax * s + bx * c, -ay * s + by * c) * kf;
            out[2] -= Vec2::new(ax * c + bx * s, ay * c + by * s) * (kf * kf);
        }
        out
    }
}

/// Boundary input: Fourier coefficients or ordered samples joined by a
/// periodic cubic spline.
#[derive(Debug, Clone, PartialEq)]
pub enum CurveSpec {
    Fourier(FourierCurve),
    Samples(Vec<Vec2>),
}

#[derive(Debug, Clone)]
enum Shape {
    Fourier(FourierCurve),
    Spline {
        points: Vec<Vec2>,
        second: Vec<Vec2>,
    },
}

impl Shape {
    fn jet(&self, u: f64) -> [Vec2; 3] {
        match self {
            Shape::Fourier(f) => f.jet(u),
            Shape::Spline { points, second } => {
                let n = points.len();
                let h = TAU / n as f64;
                let w = wrap(u, TAU) / h;
                let i = (libm::floor(w) as usize).min(n - 1);
                let t = w - i as f64;
                let j = (i + 1) % n;
                let (f0, f1, m0, m1) = (points[i], points[j], second[i], second[j]);
                let s = 1.0 - t;
                let p =
                    f0 * s + f1 * t + (m0 * (s * s * s - s) + m1 * (t * t * t - t)) * (h * h / 6.0);
                let dp = (f1 - f0) / h
                    + (m0 * (1.0 - 3.0 * s * s) + m1 * (3.0 * t * t - 1.0)) * (h / 6.0);
                let ddp = m0 * s + m1 * t;
                [p, dp, ddp]
            }
        }
    }

    fn knots(&self) -> Option<usize> {
        match self {
            Shape::Spline { points, .. } => Some(points.len()),
            Shape::Fourier(_) => None,
        }
    }
}

/// Second derivatives of the periodic cubic spline through uniformly spaced
/// samples: `M_{i−1} + 4M_i + M_{i+1} = 6(f_{i+1} − 2f_i + f_{i−1})/h²`.
fn spline_second_derivatives(points: &[Vec2]) -> Vec<Vec2> {
    let n = points.len();
    let h = TAU / n as f64;
    let rhs: Vec<Vec2> = (0..n)
        .map(|i| {
            (points[(i + 1) % n] - points[i] * 2.0 + points[(i + n - 1) % n]) * (6.0 / (h * h))
        })
        .collect();
    let scale = rhs.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
    let mut m = vec![Vec2::ZERO; n];
    // diagonally dominant circulant system: Gauss–Seidel contracts by ≥ 2 per sweep
    for _ in 0..200 {
        let mut change: f64 = 0.0;
        for i in 0..n {
            let new = (rhs[i] - m[(i + n - 1) % n] - m[(i + 1) % n]) / 4.0;
            change = change.max((new - m[i]).norm());
            m[i] = new;
        }
        if change <= 1e-16 * scale {
            break;
        }
    }
    m
}

/// Point of a boundary curve at a given metric arclength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryNode {
    pub s: f64,
    pub u: f64,
    pub point: Vec2,
    /// Unit tangent in chart components (`dσ/ds`).
    pub tangent: Vec2,
    /// Outward unit normal.
    pub normal: Vec2,
    /// Geodesic curvature, positive where the boundary bends towards the
    /// interior.
    pub curvature: f64,
}

/// Closed, simple, counter-clockwise boundary curve with an arclength table
/// and `n` nodes equispaced in metric arclength.
#[derive(Debug, Clone)]
pub struct BoundaryCurve {
    metric: Metric,
    shape: Shape,
    reversed: bool,
    panel_u: Vec<f64>,
    panel_s: Vec<f64>,
    gl: GaussLegendre,
    length: f64,
    nodes: Vec<BoundaryNode>,
}

impl BoundaryCurve {
    pub fn new(metric: &Metric, spec: &CurveSpec, n_nodes: usize) -> Result<BoundaryCurve> {
        if n_nodes < 4 {
            return Err(Error::InvalidParameter(format!(
                "boundary needs at least 4 nodes, got {n_nodes}"
            )));
        }
        let shape = match spec {
            CurveSpec::Fourier(f) => {
                if f.terms() < 2 {
                    return Err(Error::DegenerateCurve(
                        "Fourier curve has no oscillating terms".into(),
                    ));
                }
                Shape::Fourier(f.clone())
            }
            CurveSpec::Samples(points) => {
                if points.len() < 64 {
                    return Err(Error::InvalidParameter(format!(
                        "sampled boundary needs at least 64 points, got {}",
                        points.len()
                    )));
                }
                if points.iter().any(|p| !p.is_finite()) {
                    return Err(Error::DegenerateCurve("non-finite sample".into()));
                }
                Shape::Spline {
                    points: points.clone(),
                    second: spline_second_derivatives(points),
                }
            }
        };
        let mut curve = BoundaryCurve {
            metric: metric.clone(),
            shape,
            reversed: false,
            panel_u: Vec::new(),
            panel_s: Vec::new(),
            gl: GaussLegendre::new(PANEL_ORDER),
            length: 0.0,
            nodes: Vec::new(),
        };
        let poly: Vec<Vec2> = (0..INTERSECTION_SAMPLES)
            .map(|i| {
                curve
                    .shape
                    .jet(TAU * i as f64 / INTERSECTION_SAMPLES as f64)[0]
            })
            .collect();
        for p in &poly {
            metric.check_point(*p)?;
        }
        check_simple(&poly)?;
        let signed_area: f64 = (0..poly.len())
            .map(|i| poly[i].cross(poly[(i + 1) % poly.len()]))
            .sum();
        if signed_area.abs() < 1e-14 {
            return Err(Error::DegenerateCurve("curve encloses no area".into()));
        }
        curve.reversed = signed_area < 0.0;
        curve.build_table()?;
        curve.nodes = (0..n_nodes)
            .map(|k| curve.eval(curve.length * k as f64 / n_nodes as f64))
            .collect();
        Ok(curve)
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Nodes equispaced in arclength, starting at `s = 0`.
    pub fn nodes(&self) -> &[BoundaryNode] {
        &self.nodes
    }

    /// Chart position and its first two derivatives in the (oriented) curve
    /// parameter.
    pub fn jet(&self, u: f64) -> [Vec2; 3] {
        if self.reversed {
            let [p, d, dd] = self.shape.jet(TAU - u);
            [p, -d, dd]
        } else {
            self.shape.jet(u)
        }
    }

    fn speed(&self, u: f64) -> f64 {
        let [p, d, _] = self.jet(u);
        self.metric.norm(p, d)
    }

    fn partial_length(&self, a: f64, b: f64) -> f64 {
        self.gl
            .on_interval(a, b)
            .map(|(u, w)| w * self.speed(u))
            .sum()
    }

    fn build_table(&mut self) -> Result<()> {
        let panels = match self.shape.knots() {
            Some(n) => n,
            None => match &self.shape {
                Shape::Fourier(f) => (8 * f.terms()).max(64),
                Shape::Spline { .. } => unreachable!(),
            },
        };
        self.panel_u = (0..=panels)
            .map(|i| TAU * i as f64 / panels as f64)
            .collect();
        self.panel_s = vec![0.0; panels + 1];
        let mut min_speed = f64::INFINITY;
        for i in 0..panels {
            let (a, b) = (self.panel_u[i], self.panel_u[i + 1]);
            for (u, _) in self.gl.on_interval(a, b) {
                min_speed = min_speed.min(self.speed(u));
            }
            self.panel_s[i + 1] = self.panel_s[i] + self.partial_length(a, b);
        }
        self.length = self.panel_s[panels];
        if !(self.length > 1e-12) || !(min_speed > 1e-10 * self.length) {
            return Err(Error::DegenerateCurve(format!(
                "length {:.3e}, minimum parameter speed {:.3e}",
                self.length, min_speed
            )));
        }
        Ok(())
    }

    /// Curve parameter at arclength `s` (taken modulo the length).
    pub fn param_at(&self, s: f64) -> f64 {
        let s = wrap(s, self.length);
        let j = self
            .panel_s
            .partition_point(|&x| x <= s)
            .clamp(1, self.panel_s.len() - 1)
            - 1;
        let (ua, ub) = (self.panel_u[j], self.panel_u[j + 1]);
        let (sa, sb) = (self.panel_s[j], self.panel_s[j + 1]);
        let mut u = ua + (ub - ua) * (s - sa) / (sb - sa);
        for _ in 0..30 {
            let f = sa + self.partial_length(ua, u) - s;
            let du = f / self.speed(u);
            u = (u - du).clamp(ua, ub);
            if du.abs() < 1e-15 {
                break;
            }
        }
        u
    }

    /// Arclength from `u = 0` to `u`.
    pub fn arclength_at(&self, u: f64) -> f64 {
        let u = wrap(u, TAU);
        let j = self
            .panel_u
            .partition_point(|&x| x <= u)
            .clamp(1, self.panel_u.len() - 1)
            - 1;
        self.panel_s[j] + self.partial_length(self.panel_u[j], u)
    }

    pub fn node_at_param(&self, u: f64) -> BoundaryNode {
        let m = &self.metric;
        let [p, d, dd] = self.jet(u);
        let sigma = m.norm(p, d);
        let tangent = d / sigma;
        let normal = -m.rotate(p, tangent);
        let accel = dd + m.christoffel(p).contract(d, d);
        let curvature = m.inner(p, accel, m.rotate(p, d)) / (sigma * sigma * sigma);
        BoundaryNode {
            s: self.arclength_at(u),
            u,
            point: p,
            tangent,
            normal,
            curvature,
        }
    }

    pub fn eval(&self, s: f64) -> BoundaryNode {
        let s_mod = wrap(s, self.length);
        let mut node = self.node_at_param(self.param_at(s_mod));
        node.s = s_mod;
        node
    }

    pub fn point(&self, s: f64) -> Vec2 {
        self.eval(s).point
    }

    pub fn outward_normal(&self, s: f64) -> Vec2 {
        self.eval(s).normal
    }

    pub fn geodesic_curvature(&self, s: f64) -> f64 {
        self.eval(s).curvature
    }

    /// Geodesic curvature from the chord-angle limit
    /// `κ ≈ (θ₁ + θ₂)/h`, with the geodesic chord spanning arclength `h`
    /// centered at `s` and `θ₁, θ₂` its angles with the boundary at the two
    /// ends.
    pub fn curvature_by_chords(&self, s: f64, h: f64) -> Result<f64> {
        let m = &self.metric;
        let a = self.eval(s - 0.5 * h);
        let b = self.eval(s + 0.5 * h);
        let chord = connect(m, a.point, b.point)?;
        let c0 = chord.start_tangent;
        let c1 = m.normalize(b.point, chord.end_tangent);
        let theta1 = libm::atan2(
            m.inner(a.point, c0, m.rotate(a.point, a.tangent)),
            m.inner(a.point, c0, a.tangent),
        );
        let theta2 = libm::atan2(
            m.inner(b.point, b.tangent, m.rotate(b.point, c1)),
            m.inner(b.point, b.tangent, c1),
        );
        Ok((theta1 + theta2) / h)
    }
}

fn segments_cross(p1: Vec2, p2: Vec2, q1: Vec2, q2: Vec2) -> bool {
    let d1 = (p2 - p1).cross(q1 - p1);
    let d2 = (p2 - p1).cross(q2 - p1);
    let d3 = (q2 - q1).cross(p1 - q1);
    let d4 = (q2 - q1).cross(p2 - q1);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

fn check_simple(poly: &[Vec2]) -> Result<()> {
    let n = poly.len();
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if segments_cross(a, b, poly[j], poly[(j + 1) % n]) {
                return Err(Error::SelfIntersection(
                    TAU * i as f64 / n as f64,
                    TAU * j as f64 / n as f64,
                ));
            }
        }
    }
    Ok(())
}
