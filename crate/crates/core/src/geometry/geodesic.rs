use alloc::vec::Vec;

use super::metric::Metric;
use crate::ode::{Dopri, StepControl};
use crate::{Error, Result, Vec2};

const MAX_STEPS: usize = 100_000;
const RELAX_POINTS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicSample {
    pub t: f64,
    pub point: Vec2,
    pub tangent: Vec2,
    pub curvature: f64,
}

/// Jacobi solutions at the far end of a geodesic, started at its first point
/// with `a(0) = 0, a′(0) = 1` and `c(0) = 1, c′(0) = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiState {
    pub a: f64,
    pub da: f64,
    pub c: f64,
    pub dc: f64,
}

impl JacobiState {
    /// The same solutions for the reversed geodesic. Follows from the
    /// Wronskian `a c′ − a′ c = −1`.
    pub fn reversed(self) -> JacobiState {
        JacobiState {
            a: self.a,
            da: self.c,
            c: self.da,
            dc: self.dc,
        }
    }
}

/// A unit-speed geodesic segment.
#[derive(Debug, Clone)]
pub struct GeodesicSolution {
    pub samples: Vec<GeodesicSample>,
    pub length: f64,
    pub start: Vec2,
    pub end: Vec2,
    pub start_tangent: Vec2,
    pub end_tangent: Vec2,
    pub jacobi: JacobiState,
}

impl GeodesicSolution {
    pub fn reversed(&self) -> GeodesicSolution {
        let samples = self
            .samples
            .iter()
            .rev()
            .map(|s| GeodesicSample {
                t: self.length - s.t,
                point: s.point,
                tangent: -s.tangent,
                curvature: s.curvature,
            })
            .collect();
        GeodesicSolution {
            samples,
            length: self.length,
            start: self.end,
            end: self.start,
            start_tangent: -self.end_tangent,
            end_tangent: -self.start_tangent,
            jacobi: self.jacobi.reversed(),
        }
    }

    /// Min and max of the Gauss curvature over the samples.
    pub fn curvature_range(&self) -> (f64, f64) {
        self.samples
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
                (lo.min(s.curvature), hi.max(s.curvature))
            })
    }

    /// Metric length of the sample polyline, each chord measured at its
    /// chart midpoint.
    pub fn polyline_length(&self, metric: &Metric) -> f64 {
        self.samples
            .windows(2)
            .map(|w| {
                let d = w[1].point - w[0].point;
                metric.norm((w[0].point + w[1].point) * 0.5, d)
            })
            .sum()
    }
}

/// Right-hand side of the geodesic equation augmented with the two scalar
/// Jacobi equations `u″ + K u = 0`.
pub(crate) fn geodesic_field(metric: &Metric) -> impl FnMut(f64, &[f64; 8]) -> [f64; 8] + '_ {
    move |_t, s| {
        let (acc, k) = metric.geodesic_rhs(Vec2::new(s[0], s[1]), Vec2::new(s[2], s[3]));
        [s[2], s[3], acc.x, acc.y, s[5], -k * s[4], s[7], -k * s[6]]
    }
}

pub(crate) fn initial_state(p: Vec2, v: Vec2) -> [f64; 8] {
    [p.x, p.y, v.x, v.y, 0.0, 1.0, 1.0, 0.0]
}

pub(crate) fn step_control(metric: &Metric) -> StepControl {
    StepControl::new(metric.tol.ode)
}

pub(crate) fn initial_step(length: f64) -> f64 {
    length.clamp(1e-8, 0.05)
}

fn curvature_at(metric: &Metric, p: Vec2) -> f64 {
    metric.geodesic_rhs(p, Vec2::ZERO).1
}

fn straight(metric: &Metric, p: Vec2, v: Vec2, length: f64) -> GeodesicSolution {
    let end = p + v * length;
    let k = curvature_at(metric, p);
    GeodesicSolution {
        samples: alloc::vec![
            GeodesicSample {
                t: 0.0,
                point: p,
                tangent: v,
                curvature: k
            },
            GeodesicSample {
                t: length,
                point: end,
                tangent: v,
                curvature: k
            },
        ],
        length,
        start: p,
        end,
        start_tangent: v,
        end_tangent: v,
        jacobi: JacobiState {
            a: length,
            da: 1.0,
            c: 1.0,
            dc: 0.0,
        },
    }
}

/// Integrates the geodesic from `p` with unit initial velocity `v` over
/// `length`. With `conjugate_target` set, fails as soon as the Jacobi field
/// `a` drops below `conjugate_margin · t`.
fn integrate(
    metric: &Metric,
    p: Vec2,
    v: Vec2,
    length: f64,
    conjugate_target: Option<Vec2>,
) -> Result<GeodesicSolution> {
    if metric.is_flat() {
        let sol = straight(metric, p, v, length);
        metric.check_point(sol.end)?;
        return Ok(sol);
    }
    let mut f = geodesic_field(metric);
    let mut st = Dopri::new(
        &mut f,
        0.0,
        initial_state(p, v),
        initial_step(length),
        step_control(metric),
    );
    let mut samples = Vec::with_capacity(32);
    samples.push(GeodesicSample {
        t: 0.0,
        point: p,
        tangent: v,
        curvature: curvature_at(metric, p),
    });
    let mut steps = 0;
    while st.t < length {
        st.step(&mut f, length)?;
        steps += 1;
        let q = Vec2::new(st.y[0], st.y[1]);
        if !metric.contains(q) {
            return Err(Error::OutsideRegion(q));
        }
        if let Some(to) = conjugate_target {
            if st.y[4] <= metric.tol.conjugate_margin * st.t {
                return Err(Error::ConjugatePoint {
                    from: p,
                    to,
                    t: st.t,
                });
            }
        }
        samples.push(GeodesicSample {
            t: st.t,
            point: q,
            tangent: Vec2::new(st.y[2], st.y[3]),
            curvature: curvature_at(metric, q),
        });
        if steps > MAX_STEPS {
            return Err(Error::StepUnderflow { t: st.t });
        }
    }
    let y = st.y;
    let last = samples.last().unwrap();
    Ok(GeodesicSolution {
        length,
        start: p,
        end: last.point,
        start_tangent: v,
        end_tangent: last.tangent,
        jacobi: JacobiState {
            a: y[4],
            da: y[5],
            c: y[6],
            dc: y[7],
        },
        samples,
    })
}

/// Unit-speed geodesic of length `t` from `p` with initial unit tangent `v`.
pub fn shoot(metric: &Metric, p: Vec2, v: Vec2, t: f64) -> Result<GeodesicSolution> {
    metric.check_point(p)?;
    let speed = metric.norm(p, v);
    if (speed - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidParameter(alloc::format!(
            "initial tangent has norm {speed}, expected 1"
        )));
    }
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(alloc::format!(
            "negative length {t}"
        )));
    }
    integrate(metric, p, v, t, None)
}

/// Minimizing geodesic from `x` to `y`.
///
/// Shooting with damped Newton iterations on the initial angle and the
/// length, seeded by the chart straight line. The Jacobian is exact: varying
/// the length moves the endpoint along the tangent, varying the angle moves
/// it by `a(ℓ)` along the rotated tangent. When Newton stalls the seed is
/// replaced by a relaxed discrete geodesic and the iteration restarts.
pub fn connect(metric: &Metric, x: Vec2, y: Vec2) -> Result<GeodesicSolution> {
    metric.check_point(x)?;
    metric.check_point(y)?;
    if x == y {
        return Err(Error::InvalidParameter(
            "connect needs distinct endpoints".into(),
        ));
    }
    if metric.is_flat() {
        let d = y - x;
        let len = metric.norm(x, d);
        let mut sol = straight(metric, x, d / len, len);
        sol.end = y;
        sol.samples[1].point = y;
        return Ok(sol);
    }
    let (e1, e2) = metric.orthonormal_frame(x);
    let seed = frame_seed(metric, x, e1, e2, y - x, metric.norm((x + y) * 0.5, y - x));
    let first = newton(metric, x, y, e1, e2, seed);
    let err = match first {
        Ok(sol) => return Ok(sol),
        Err(e) => e,
    };
    if let Some(seed) = relaxed_seed(metric, x, y, e1, e2) {
        match newton(metric, x, y, e1, e2, seed) {
            Ok(sol) => return Ok(sol),
            Err(e @ Error::ConjugatePoint { .. }) => return Err(e),
            Err(_) => {}
        }
    }
    Err(err)
}

fn frame_seed(metric: &Metric, x: Vec2, e1: Vec2, e2: Vec2, dir: Vec2, length: f64) -> (f64, f64) {
    let alpha = libm::atan2(metric.inner(x, dir, e2), metric.inner(x, dir, e1));
    (alpha, length)
}

fn newton(
    metric: &Metric,
    x: Vec2,
    y: Vec2,
    e1: Vec2,
    e2: Vec2,
    (mut alpha, mut ell): (f64, f64),
) -> Result<GeodesicSolution> {
    let dir = |a: f64| e1 * libm::cos(a) + e2 * libm::sin(a);
    let mut sol = integrate(metric, x, dir(alpha), ell, Some(y))?;
    let mut res = (sol.end - y).norm();
    for _ in 0..metric.tol.max_newton {
        if res < metric.tol.bvp {
            return Ok(sol);
        }
        let t1 = sol.end_tangent;
        let n1 = metric.rotate(sol.end, t1) * sol.jacobi.a;
        let r = y - sol.end;
        let det = n1.cross(t1);
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let d_alpha = r.cross(t1) / det;
        let d_ell = n1.cross(r) / det;
        let mut lambda = 1.0;
        let mut accepted = None;
        let mut last_err = None;
        for _ in 0..12 {
            let (a, l) = (alpha + lambda * d_alpha, ell + lambda * d_ell);
            if l > 0.0 {
                match integrate(metric, x, dir(a), l, Some(y)) {
                    Ok(s) => {
                        let rn = (s.end - y).norm();
                        if rn < res {
                            accepted = Some((a, l, s, rn));
                            break;
                        }
                    }
                    Err(e) => last_err = Some(e),
                }
            }
            lambda *= 0.5;
        }
        match accepted {
            Some((a, l, s, rn)) => {
                alpha = a;
                ell = l;
                sol = s;
                res = rn;
            }
            None => {
                if let Some(e @ Error::ConjugatePoint { .. }) = last_err {
                    return Err(e);
                }
                break;
            }
        }
    }
    if res < metric.tol.bvp {
        return Ok(sol);
    }
    Err(Error::NonConvergence {
        from: x,
        to: y,
        residual: res,
    })
}

/// Seed from a discrete geodesic on a 32-point polyline, relaxed by
/// Gauss–Seidel sweeps on the discrete geodesic equation (the stationarity
/// condition of the discrete path energy).
fn relaxed_seed(metric: &Metric, x: Vec2, y: Vec2, e1: Vec2, e2: Vec2) -> Option<(f64, f64)> {
    let n = RELAX_POINTS;
    let h = 1.0 / (n - 1) as f64;
    let mut pts: Vec<Vec2> = (0..n).map(|i| x + (y - x) * (i as f64 * h)).collect();
    for _ in 0..20_000 {
        let mut change: f64 = 0.0;
        for i in 1..n - 1 {
            let v = (pts[i + 1] - pts[i - 1]) / (2.0 * h);
            let gamma = metric.christoffel(pts[i]).contract(v, v);
            let new = (pts[i + 1] + pts[i - 1]) * 0.5 + gamma * (0.5 * h * h);
            if !metric.contains(new) {
                return None;
            }
            change = change.max((new - pts[i]).norm());
            pts[i] = new;
        }
        if change < 1e-12 {
            break;
        }
    }
    let len: f64 = pts
        .windows(2)
        .map(|w| metric.norm((w[0] + w[1]) * 0.5, w[1] - w[0]))
        .sum();
    Some(frame_seed(metric, x, e1, e2, pts[1] - pts[0], len))
}
