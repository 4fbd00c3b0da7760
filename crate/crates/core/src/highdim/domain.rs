//! Balls and ellipsoids in the model spaces, with deterministic boundary and
//! interior rules and a uniform interior sampler.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use rand::Rng;

use super::model::{Ambient, ModelSpace};
use crate::quadrature::GaussLegendre;
use crate::{Error, Result};

/// Product rule on the unit sphere `S^{m−1} ⊂ ℝ^m` with the first axis as
/// pole: Gauss–Legendre in each polar angle (weight `sin^{k}θ`) and the
/// uniform rule in the last azimuth.
#[derive(Debug, Clone)]
pub struct SphereRule {
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    pub fn new(m: usize, polar: usize, azimuth: usize) -> SphereRule {
        match m {
            1 => SphereRule {
                points: vec![vec![1.0], vec![-1.0]],
                weights: vec![1.0, 1.0],
            },
            2 => {
                let w = TAU / azimuth as f64;
                let points = (0..azimuth)
                    .map(|k| {
                        let a = w * k as f64;
                        vec![libm::cos(a), libm::sin(a)]
                    })
                    .collect();
                SphereRule {
                    points,
                    weights: vec![w; azimuth],
                }
            }
            _ => {
                let inner = SphereRule::new(m - 1, polar, azimuth);
                let gl = GaussLegendre::new(polar);
                let mut points = Vec::new();
                let mut weights = Vec::new();
                for (theta, wt) in gl.on_interval(0.0, PI) {
                    let (c, s) = (libm::cos(theta), libm::sin(theta));
                    let jac = wt * libm::pow(s, (m - 2) as f64);
                    for (q, wq) in inner.points.iter().zip(&inner.weights) {
                        let mut p = Vec::with_capacity(m);
                        p.push(c);
                        p.extend(q.iter().map(|v| s * v));
                        points.push(p);
                        weights.push(jac * wq);
                    }
                }
                SphereRule { points, weights }
            }
        }
    }

    /// The same rule with its pole moved to the unit vector `pole`, by the
    /// Householder reflection exchanging `e₀` and `pole`.
    pub fn about(&self, pole: &[f64]) -> SphereRule {
        let mut v: Vec<f64> = pole.iter().map(|p| -p).collect();
        v[0] += 1.0;
        let vv: f64 = v.iter().map(|a| a * a).sum();
        if vv < 1e-24 {
            return self.clone();
        }
        let points = self
            .points
            .iter()
            .map(|q| {
                let c = 2.0 * q.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>() / vv;
                q.iter().zip(&v).map(|(a, b)| a - c * b).collect()
            })
            .collect();
        SphereRule {
            points,
            weights: self.weights.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum HDShape {
    /// Geodesic ball; the center is given by normal coordinates at the
    /// model origin.
    Ball { center: Vec<f64>, radius: f64 },
    /// Axis-aligned ellipsoid, Euclidean model only.
    Ellipsoid {
        center: Vec<f64>,
        semi_axes: Vec<f64>,
    },
}

/// Boundary node with outward unit normal and surface weight.
#[derive(Debug, Clone, PartialEq)]
pub struct HDNode {
    pub point: Ambient,
    pub normal: Ambient,
    pub weight: f64,
    /// Parameter on the unit sphere.
    pub omega: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct HDDomain {
    model: ModelSpace,
    shape: HDShape,
    center: Ambient,
    frame: Vec<Ambient>,
}

impl HDDomain {
    pub fn new(model: ModelSpace, shape: HDShape) -> Result<HDDomain> {
        let n = model.dim();
        let bad = |s: alloc::string::String| Err(Error::InvalidParameter(s));
        let center_coords = match &shape {
            HDShape::Ball { center, radius } => {
                if !(*radius > 0.0) {
                    return bad(format!("ball radius must be positive, got {radius}"));
                }
                if 2.0 * radius >= model.injectivity_radius() {
                    return bad(format!(
                        "ball radius {radius} reaches the antipodal distance"
                    ));
                }
                center
            }
            HDShape::Ellipsoid { center, semi_axes } => {
                if model.curvature() != 0.0 {
                    return bad("ellipsoids are only supported in the Euclidean model".into());
                }
                if semi_axes.len() != n || semi_axes.iter().any(|a| !(*a > 0.0)) {
                    return bad(format!("ellipsoid needs {n} positive semi-axes"));
                }
                center
            }
        };
        if center_coords.len() != n || center_coords.iter().any(|c| !c.is_finite()) {
            return bad(format!("center needs {n} finite coordinates"));
        }
        let o = model.origin();
        let center = model.exp(&o, &model.tangent_at_origin(center_coords));
        // standard frame at the origin carried to the center
        let frame = (0..n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                model.transport(&center, &o, &model.tangent_at_origin(&e))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(HDDomain {
            model,
            shape,
            center,
            frame,
        })
    }

    pub fn ball(model: ModelSpace, center: &[f64], radius: f64) -> Result<HDDomain> {
        HDDomain::new(
            model,
            HDShape::Ball {
                center: center.to_vec(),
                radius,
            },
        )
    }

    pub fn ellipsoid(model: ModelSpace, center: &[f64], semi_axes: &[f64]) -> Result<HDDomain> {
        HDDomain::new(
            model,
            HDShape::Ellipsoid {
                center: center.to_vec(),
                semi_axes: semi_axes.to_vec(),
            },
        )
    }

    pub fn model(&self) -> &ModelSpace {
        &self.model
    }

    pub fn shape(&self) -> &HDShape {
        &self.shape
    }

    /// Upper bound for the distance between two points of the domain.
    pub fn diameter(&self) -> f64 {
        match &self.shape {
            HDShape::Ball { radius, .. } => 2.0 * radius,
            HDShape::Ellipsoid { semi_axes, .. } => {
                2.0 * semi_axes.iter().cloned().fold(0.0, f64::max)
            }
        }
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        match &self.shape {
            HDShape::Ball { radius, .. } => self.model.distance(&self.center, p) < *radius,
            HDShape::Ellipsoid { semi_axes, .. } => {
                let s: f64 = p
                    .iter()
                    .zip(&self.center)
                    .zip(semi_axes)
                    .map(|((x, c), a)| {
                        let t = (x - c) / a;
                        t * t
                    })
                    .sum();
                s < 1.0
            }
        }
    }

    /// Boundary point, outward normal and surface density over the unit
    /// sphere parameter `ω`.
    pub fn boundary_at(&self, omega: &[f64]) -> (Ambient, Ambient, f64) {
        let n = self.model.dim();
        match &self.shape {
            HDShape::Ball { radius, .. } => {
                let u = ModelSpace::combine(&self.frame, omega);
                let (s, c) = (self.model.sn(*radius), self.model.cs(*radius));
                let k = self.model.curvature();
                let point = self
                    .center
                    .iter()
                    .zip(&u)
                    .map(|(x, v)| c * x + s * v)
                    .collect();
                // velocity of t ↦ exp(tu) at t = R
                let normal = self
                    .center
                    .iter()
                    .zip(&u)
                    .map(|(x, v)| -k * s * x + c * v)
                    .collect();
                (point, normal, libm::pow(s, (n - 1) as f64))
            }
            HDShape::Ellipsoid { semi_axes, .. } => {
                let point = self
                    .center
                    .iter()
                    .zip(omega.iter().zip(semi_axes))
                    .map(|(c, (w, a))| c + a * w)
                    .collect();
                let grad: Vec<f64> = omega.iter().zip(semi_axes).map(|(w, a)| w / a).collect();
                let g = libm::sqrt(grad.iter().map(|v| v * v).sum());
                let det: f64 = semi_axes.iter().product();
                (point, grad.iter().map(|v| v / g).collect(), det * g)
            }
        }
    }

    /// Interior point at radial fraction `s ∈ [0, 1]` along `ω`, and the
    /// volume density in `(s, ω)`.
    pub fn interior_at(&self, s: f64, omega: &[f64]) -> (Ambient, f64) {
        let n = self.model.dim();
        match &self.shape {
            HDShape::Ball { radius, .. } => {
                let t = s * radius;
                let u: Vec<f64> = ModelSpace::combine(&self.frame, omega)
                    .into_iter()
                    .map(|v| v * t)
                    .collect();
                (
                    self.model.exp(&self.center, &u),
                    radius * libm::pow(self.model.sn(t), (n - 1) as f64),
                )
            }
            HDShape::Ellipsoid { semi_axes, .. } => {
                let point = self
                    .center
                    .iter()
                    .zip(omega.iter().zip(semi_axes))
                    .map(|(c, (w, a))| c + a * s * w)
                    .collect();
                let det: f64 = semi_axes.iter().product();
                (point, det * libm::pow(s, (n - 1) as f64))
            }
        }
    }

    pub fn boundary_nodes(&self, rule: &SphereRule) -> Vec<HDNode> {
        rule.points
            .iter()
            .zip(&rule.weights)
            .map(|(w, q)| {
                let (point, normal, density) = self.boundary_at(w);
                HDNode {
                    point,
                    normal,
                    weight: q * density,
                    omega: w.clone(),
                }
            })
            .collect()
    }

    pub fn surface_area(&self, rule: &SphereRule) -> f64 {
        self.boundary_nodes(rule).iter().map(|b| b.weight).sum()
    }

    pub fn volume(&self, rule: &SphereRule, radial: usize) -> f64 {
        let gl = GaussLegendre::new(radial);
        let mut v = 0.0;
        for (w, q) in rule.points.iter().zip(&rule.weights) {
            for (s, ws) in gl.on_interval(0.0, 1.0) {
                v += q * ws * self.interior_at(s, w).1;
            }
        }
        v
    }

    /// A point uniformly distributed in the domain.
    pub fn sample_interior<R: Rng>(&self, rng: &mut R) -> Ambient {
        let n = self.model.dim();
        loop {
            let omega = uniform_direction(n, rng);
            let s = libm::pow(rng.gen::<f64>(), 1.0 / n as f64);
            match &self.shape {
                HDShape::Ellipsoid { .. } => return self.interior_at(s, &omega).0,
                HDShape::Ball { radius, .. } => {
                    // proposal ∝ tⁿ⁻¹; accept with (sn(t)/t)ⁿ⁻¹ relative to its maximum
                    let t = s * radius;
                    let ratio = |t: f64| if t == 0.0 { 1.0 } else { self.model.sn(t) / t };
                    let max = ratio(0.0).max(ratio(*radius));
                    let accept = libm::pow(ratio(t) / max, (n - 1) as f64);
                    if rng.gen::<f64>() < accept {
                        return self.interior_at(s, &omega).0;
                    }
                }
            }
        }
    }

    /// Uniform unit tangent vector at `x`.
    pub fn sample_direction<R: Rng>(&self, x: &[f64], rng: &mut R) -> Ambient {
        let c = uniform_direction(self.model.dim(), rng);
        if self.model.curvature() == 0.0 {
            return c;
        }
        ModelSpace::combine(&self.model.tangent_frame(x), &c)
    }

    /// Distance from `x` to the boundary along the geodesic with unit
    /// initial velocity `u` (domains here are convex).
    pub fn exit_distance(&self, x: &[f64], u: &[f64]) -> f64 {
        let (mut lo, mut hi) = (0.0, self.diameter() * (1.0 + 1e-9));
        let at = |t: f64| -> Ambient {
            self.model
                .exp(x, &u.iter().map(|v| v * t).collect::<Vec<_>>())
        };
        while hi - lo > 1e-14 * self.diameter() {
            let mid = 0.5 * (lo + hi);
            if self.contains(&at(mid)) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

fn uniform_direction<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = Vec::with_capacity(n + 1);
        while v.len() < n {
            // Box–Muller
            let (u1, u2): (f64, f64) = (rng.gen(), rng.gen());
            let r = libm::sqrt(-2.0 * libm::log(1.0 - u1));
            v.push(r * libm::cos(TAU * u2));
            v.push(r * libm::sin(TAU * u2));
        }
        v.truncate(n);
        let norm = libm::sqrt(v.iter().map(|a| a * a).sum());
        if norm > 1e-12 {
            return v.into_iter().map(|a| a / norm).collect();
        }
    }
}
