use alloc::sync::Arc;
use core::fmt;

use crate::{Error, Result, Vec2};

/// Numerical tolerances shared by the geodesic solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative and absolute tolerance of the adaptive ODE integrator.
    pub ode: f64,
    /// Chart distance below which a shooting endpoint counts as converged.
    pub bvp: f64,
    /// Two-point distance below which near-diagonal expansions are used.
    pub diag_cutoff: f64,
    /// Newton iterations before falling back to path-energy minimization.
    pub max_newton: usize,
    /// A Jacobi field with `u(t) <= conjugate_margin * t` is treated as having
    /// reached a conjugate point.
    pub conjugate_margin: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            ode: 1e-9,
            bvp: 1e-10,
            diag_cutoff: 1e-3,
            max_newton: 30,
            conjugate_margin: 1e-2,
        }
    }
}

/// Chart region every computation is confined to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    Box { min: Vec2, max: Vec2 },
    Unbounded,
}

impl Region {
    pub fn square(half_width: f64) -> Region {
        Region::Box {
            min: Vec2::new(-half_width, -half_width),
            max: Vec2::new(half_width, half_width),
        }
    }

    pub fn contains(&self, p: Vec2) -> bool {
        match self {
            Region::Box { min, max } => {
                p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y
            }
            Region::Unbounded => p.is_finite(),
        }
    }
}

/// Log conformal factor `φ` of a metric `e^{2φ}(dx² + dy²)`.
#[derive(Clone)]
pub enum ConformalFactor {
    Flat,
    /// `φ = amplitude · exp(−|p|² / width²)`.
    Bump {
        amplitude: f64,
        width: f64,
    },
    /// `φ = log(2 / (1 + K|p|²))`, the constant-curvature model chart.
    Stereographic {
        curvature: f64,
    },
    /// Arbitrary factor; derivatives by fourth-order central differences.
    Custom(Arc<dyn Fn(Vec2) -> f64 + Send + Sync>),
}

impl fmt::Debug for ConformalFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConformalFactor::Flat => write!(f, "Flat"),
            ConformalFactor::Bump { amplitude, width } => f
                .debug_struct("Bump")
                .field("amplitude", amplitude)
                .field("width", width)
                .finish(),
            ConformalFactor::Stereographic { curvature } => f
                .debug_struct("Stereographic")
                .field("curvature", curvature)
                .finish(),
            ConformalFactor::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

const FD_STEP: f64 = 1e-4;

/// `φ`, `∂φ` and `Δφ` at a point.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PhiJet {
    pub phi: f64,
    pub grad: Vec2,
    pub laplacian: f64,
}

impl ConformalFactor {
    pub fn value(&self, p: Vec2) -> f64 {
        match self {
            ConformalFactor::Flat => 0.0,
            ConformalFactor::Bump { amplitude, width } => {
                amplitude * libm::exp(-p.norm_sq() / (width * width))
            }
            ConformalFactor::Stereographic { curvature } => {
                libm::log(2.0 / (1.0 + curvature * p.norm_sq()))
            }
            ConformalFactor::Custom(phi) => phi(p),
        }
    }

    pub(crate) fn jet(&self, p: Vec2) -> PhiJet {
        match self {
            ConformalFactor::Flat => PhiJet {
                phi: 0.0,
                grad: Vec2::ZERO,
                laplacian: 0.0,
            },
            ConformalFactor::Bump { amplitude, width } => {
                let w2 = width * width;
                let r2 = p.norm_sq();
                let phi = amplitude * libm::exp(-r2 / w2);
                PhiJet {
                    phi,
                    grad: p * (-2.0 * phi / w2),
                    laplacian: phi * (4.0 * r2 / (w2 * w2) - 4.0 / w2),
                }
            }
            ConformalFactor::Stereographic { curvature } => {
                let q = 1.0 + curvature * p.norm_sq();
                PhiJet {
                    phi: libm::log(2.0 / q),
                    grad: p * (-2.0 * curvature / q),
                    laplacian: -4.0 * curvature / (q * q),
                }
            }
            ConformalFactor::Custom(phi) => {
                let h = FD_STEP;
                let f0 = phi(p);
                let ex = Vec2::new(h, 0.0);
                let ey = Vec2::new(0.0, h);
                let (xp1, xm1, xp2, xm2) = (
                    phi(p + ex),
                    phi(p - ex),
                    phi(p + ex * 2.0),
                    phi(p - ex * 2.0),
                );
                let (yp1, ym1, yp2, ym2) = (
                    phi(p + ey),
                    phi(p - ey),
                    phi(p + ey * 2.0),
                    phi(p - ey * 2.0),
                );
                let dx = (-xp2 + 8.0 * xp1 - 8.0 * xm1 + xm2) / (12.0 * h);
                let dy = (-yp2 + 8.0 * yp1 - 8.0 * ym1 + ym2) / (12.0 * h);
                let dxx = (-xp2 + 16.0 * xp1 - 30.0 * f0 + 16.0 * xm1 - xm2) / (12.0 * h * h);
                let dyy = (-yp2 + 16.0 * yp1 - 30.0 * f0 + 16.0 * ym1 - ym2) / (12.0 * h * h);
                PhiJet {
                    phi: f0,
                    grad: Vec2::new(dx, dy),
                    laplacian: dxx + dyy,
                }
            }
        }
    }
}

/// Profile `f` of a rotationally symmetric metric `dr² + f(r)² dθ²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    /// `f = sin r` (the unit sphere around a pole).
    Sine,
    /// `f = sinh r` (the hyperbolic plane).
    Sinh,
    /// `f = r` (the Euclidean plane).
    Linear,
    /// `f = r + c r³`.
    Cubic { coefficient: f64 },
}

impl Profile {
    /// `(f, f′, f″)` at `r`.
    pub fn eval(&self, r: f64) -> (f64, f64, f64) {
        match *self {
            Profile::Sine => (libm::sin(r), libm::cos(r), -libm::sin(r)),
            Profile::Sinh => (libm::sinh(r), libm::cosh(r), libm::sinh(r)),
            Profile::Linear => (r, 1.0, 0.0),
            Profile::Cubic { coefficient: c } => {
                (r + c * r * r * r, 1.0 + 3.0 * c * r * r, 6.0 * c * r)
            }
        }
    }

    /// `f(r) / r`, continuous at the origin.
    fn ratio(&self, r: f64) -> f64 {
        if r < 1e-12 {
            return 1.0;
        }
        match *self {
            Profile::Cubic { coefficient: c } => 1.0 + c * r * r,
            Profile::Linear => 1.0,
            _ => self.eval(r).0 / r,
        }
    }
}

/// The geometry behind a [`Metric`].
#[derive(Debug, Clone)]
pub enum MetricKind {
    /// Constant curvature `K`. For `dim == 2` the planar chart is the
    /// stereographic/Poincaré chart `e^{2φ}`, `φ = log(2 / (1 + K|p|²))`;
    /// higher dimensions are handled by [`crate::highdim`].
    ConstantCurvature {
        curvature: f64,
        dim: usize,
    },
    Conformal(ConformalFactor),
    /// `dr² + f(r)² dθ²` in Cartesian chart coordinates `r(cos θ, sin θ)`.
    Revolution(Profile),
}

/// Symmetric 2×2 metric tensor at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricTensor {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl MetricTensor {
    pub fn inner(&self, u: Vec2, v: Vec2) -> f64 {
        self.xx * u.x * v.x + self.xy * (u.x * v.y + u.y * v.x) + self.yy * u.y * v.y
    }

    pub fn det(&self) -> f64 {
        self.xx * self.yy - self.xy * self.xy
    }

    pub fn inverse(&self) -> MetricTensor {
        let d = self.det();
        MetricTensor {
            xx: self.yy / d,
            xy: -self.xy / d,
            yy: self.xx / d,
        }
    }

    pub fn apply(&self, v: Vec2) -> Vec2 {
        Vec2::new(self.xx * v.x + self.xy * v.y, self.xy * v.x + self.yy * v.y)
    }
}

/// Christoffel symbols `Γ^k_ij`, indexed `[k][i][j]`.
#[derive(Debug, Clone, Copy)]
pub struct Christoffel(pub [[[f64; 2]; 2]; 2]);

impl Christoffel {
    /// `Γ^k_ij u^i w^j`.
    pub fn contract(&self, u: Vec2, w: Vec2) -> Vec2 {
        let g = &self.0;
        let c = |k: usize| {
            g[k][0][0] * u.x * w.x
                + g[k][0][1] * u.x * w.y
                + g[k][1][0] * u.y * w.x
                + g[k][1][1] * u.y * w.y
        };
        Vec2::new(c(0), c(1))
    }
}

/// A Riemannian metric on a planar chart, confined to a working region.
#[derive(Debug, Clone)]
pub struct Metric {
    pub kind: MetricKind,
    pub region: Region,
    pub tol: Tolerances,
}

impl Metric {
    pub fn new(kind: MetricKind) -> Metric {
        let region = default_region(&kind);
        Metric {
            kind,
            region,
            tol: Tolerances::default(),
        }
    }

    pub fn plane() -> Metric {
        Metric::new(MetricKind::Conformal(ConformalFactor::Flat))
    }

    pub fn constant_curvature(curvature: f64) -> Metric {
        Metric::new(MetricKind::ConstantCurvature { curvature, dim: 2 })
    }

    pub fn sphere() -> Metric {
        Metric::constant_curvature(1.0)
    }

    pub fn hyperbolic() -> Metric {
        Metric::constant_curvature(-1.0)
    }

    pub fn conformal(factor: ConformalFactor) -> Metric {
        Metric::new(MetricKind::Conformal(factor))
    }

    pub fn conformal_bump(amplitude: f64, width: f64) -> Metric {
        Metric::conformal(ConformalFactor::Bump { amplitude, width })
    }

    pub fn revolution(profile: Profile) -> Metric {
        Metric::new(MetricKind::Revolution(profile))
    }

    pub fn with_region(mut self, region: Region) -> Metric {
        self.region = region;
        self
    }

    pub fn with_tolerances(mut self, tol: Tolerances) -> Metric {
        self.tol = tol;
        self
    }

    /// True when geodesics are chart straight lines and have closed forms.
    pub fn is_flat(&self) -> bool {
        match &self.kind {
            MetricKind::ConstantCurvature { curvature, .. } => *curvature == 0.0,
            MetricKind::Conformal(ConformalFactor::Flat) => true,
            MetricKind::Conformal(ConformalFactor::Stereographic { curvature }) => {
                *curvature == 0.0
            }
            MetricKind::Revolution(Profile::Linear) => true,
            _ => false,
        }
    }

    /// Constant curvature value, when the metric is a model space.
    pub fn constant_curvature_value(&self) -> Option<f64> {
        match &self.kind {
            MetricKind::ConstantCurvature { curvature, .. } => Some(*curvature),
            MetricKind::Conformal(ConformalFactor::Flat) => Some(0.0),
            MetricKind::Conformal(ConformalFactor::Stereographic { curvature }) => Some(*curvature),
            MetricKind::Revolution(Profile::Sine) => Some(1.0),
            MetricKind::Revolution(Profile::Sinh) => Some(-1.0),
            MetricKind::Revolution(Profile::Linear) => Some(0.0),
            _ => None,
        }
    }

    fn phi_jet(&self, p: Vec2) -> Option<PhiJet> {
        match &self.kind {
            MetricKind::ConstantCurvature { curvature, .. } => Some(
                ConformalFactor::Stereographic {
                    curvature: *curvature,
                }
                .jet(p),
            ),
            MetricKind::Conformal(c) => Some(c.jet(p)),
            MetricKind::Revolution(_) => None,
        }
    }

    fn phi_value(&self, p: Vec2) -> f64 {
        match &self.kind {
            MetricKind::ConstantCurvature { curvature, .. } => ConformalFactor::Stereographic {
                curvature: *curvature,
            }
            .value(p),
            MetricKind::Conformal(c) => c.value(p),
            MetricKind::Revolution(_) => 0.0,
        }
    }

    /// Whether `p` lies in the working region and in the chart's domain.
    pub fn contains(&self, p: Vec2) -> bool {
        if !self.region.contains(p) {
            return false;
        }
        match &self.kind {
            MetricKind::ConstantCurvature { curvature, .. } if *curvature < 0.0 => {
                p.norm_sq() * (-curvature) < 1.0
            }
            MetricKind::Conformal(ConformalFactor::Stereographic { curvature })
                if *curvature < 0.0 =>
            {
                p.norm_sq() * (-curvature) < 1.0
            }
            MetricKind::Revolution(Profile::Sine) => p.norm() < core::f64::consts::PI,
            _ => true,
        }
    }

    pub fn check_point(&self, p: Vec2) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::OutsideRegion(p))
        }
    }

    pub fn tensor(&self, p: Vec2) -> MetricTensor {
        match &self.kind {
            MetricKind::Revolution(profile) => {
                let r = p.norm();
                if r < 1e-300 {
                    return MetricTensor {
                        xx: 1.0,
                        xy: 0.0,
                        yy: 1.0,
                    };
                }
                let ratio = profile.ratio(r);
                let h = ratio * ratio;
                let e = p / r;
                let q = 1.0 - h;
                MetricTensor {
                    xx: h + q * e.x * e.x,
                    xy: q * e.x * e.y,
                    yy: h + q * e.y * e.y,
                }
            }
            _ => {
                let lam = libm::exp(2.0 * self.phi_value(p));
                MetricTensor {
                    xx: lam,
                    xy: 0.0,
                    yy: lam,
                }
            }
        }
    }

    pub fn inner(&self, p: Vec2, u: Vec2, v: Vec2) -> f64 {
        self.tensor(p).inner(u, v)
    }

    pub fn norm(&self, p: Vec2, v: Vec2) -> f64 {
        libm::sqrt(self.inner(p, v, v).max(0.0))
    }

    pub fn normalize(&self, p: Vec2, v: Vec2) -> Vec2 {
        v / self.norm(p, v)
    }

    /// Area density `√det g` of the chart.
    pub fn sqrt_det(&self, p: Vec2) -> f64 {
        libm::sqrt(self.tensor(p).det())
    }

    /// Positive quarter turn `J` in the metric: `|Jv| = |v|`, `⟨v, Jv⟩ = 0`.
    pub fn rotate(&self, p: Vec2, v: Vec2) -> Vec2 {
        let g = self.tensor(p);
        let s = libm::sqrt(g.det());
        Vec2::new(-g.xy * v.x - g.yy * v.y, g.xx * v.x + g.xy * v.y) / s
    }

    /// Positively oriented orthonormal frame at `p`.
    pub fn orthonormal_frame(&self, p: Vec2) -> (Vec2, Vec2) {
        let e1 = self.normalize(p, Vec2::new(1.0, 0.0));
        (e1, self.rotate(p, e1))
    }

    /// Chart components of the metric gradient of a function with chart
    /// differential `df`.
    pub fn raise(&self, p: Vec2, df: Vec2) -> Vec2 {
        self.tensor(p).inverse().apply(df)
    }

    pub fn christoffel(&self, p: Vec2) -> Christoffel {
        match self.phi_jet(p) {
            Some(j) => {
                let (px, py) = (j.grad.x, j.grad.y);
                Christoffel([[[px, py], [py, -px]], [[-py, px], [px, py]]])
            }
            None => self.christoffel_from_tensor(p),
        }
    }

    fn christoffel_from_tensor(&self, p: Vec2) -> Christoffel {
        let h = FD_STEP;
        let deriv = |dir: Vec2| -> [f64; 3] {
            let a = self.tensor(p + dir * 2.0);
            let b = self.tensor(p + dir);
            let c = self.tensor(p - dir);
            let d = self.tensor(p - dir * 2.0);
            let f = |a: f64, b: f64, c: f64, d: f64| (-a + 8.0 * b - 8.0 * c + d) / (12.0 * h);
            [
                f(a.xx, b.xx, c.xx, d.xx),
                f(a.xy, b.xy, c.xy, d.xy),
                f(a.yy, b.yy, c.yy, d.yy),
            ]
        };
        // dg[l][i][j] = ∂_l g_ij
        let to_mat = |v: [f64; 3]| [[v[0], v[1]], [v[1], v[2]]];
        let dg = [
            to_mat(deriv(Vec2::new(h, 0.0))),
            to_mat(deriv(Vec2::new(0.0, h))),
        ];
        let ginv = self.tensor(p).inverse();
        let gi = [[ginv.xx, ginv.xy], [ginv.xy, ginv.yy]];
        let mut out = [[[0.0; 2]; 2]; 2];
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    let mut s = 0.0;
                    for l in 0..2 {
                        s += gi[k][l] * (dg[i][l][j] + dg[j][l][i] - dg[l][i][j]);
                    }
                    out[k][i][j] = 0.5 * s;
                }
            }
        }
        Christoffel(out)
    }

    /// Geodesic acceleration `−Γ(v, v)` and Gauss curvature at `p`.
    #[inline]
    pub(crate) fn geodesic_rhs(&self, p: Vec2, v: Vec2) -> (Vec2, f64) {
        match self.phi_jet(p) {
            Some(j) => {
                let (px, py) = (j.grad.x, j.grad.y);
                let acc = Vec2::new(
                    -(px * (v.x * v.x - v.y * v.y) + 2.0 * py * v.x * v.y),
                    -(py * (v.y * v.y - v.x * v.x) + 2.0 * px * v.x * v.y),
                );
                (acc, -libm::exp(-2.0 * j.phi) * j.laplacian)
            }
            None => {
                let acc = -self.christoffel(p).contract(v, v);
                (acc, self.curvature_unchecked(p))
            }
        }
    }

    fn curvature_unchecked(&self, p: Vec2) -> f64 {
        match &self.kind {
            MetricKind::ConstantCurvature { curvature, .. } => *curvature,
            MetricKind::Conformal(c) => {
                let j = c.jet(p);
                -libm::exp(-2.0 * j.phi) * j.laplacian
            }
            MetricKind::Revolution(profile) => {
                let r = p.norm().max(1e-6);
                let (f, _, f2) = profile.eval(r);
                -f2 / f
            }
        }
    }

    /// Gauss curvature `K(p)`.
    pub fn gauss_curvature(&self, p: Vec2) -> Result<f64> {
        self.check_point(p)?;
        Ok(self.curvature_unchecked(p))
    }

    /// Supremum of `K` over a `n × n` grid covering the working region.
    pub fn sup_curvature(&self, n: usize) -> f64 {
        if let Some(k) = self.constant_curvature_value() {
            return k;
        }
        let (min, max) = match self.region {
            Region::Box { min, max } => (min, max),
            Region::Unbounded => (Vec2::new(-5.0, -5.0), Vec2::new(5.0, 5.0)),
        };
        let mut sup = f64::NEG_INFINITY;
        let n = n.max(2);
        for i in 0..n {
            for j in 0..n {
                let p = Vec2::new(
                    min.x + (max.x - min.x) * i as f64 / (n - 1) as f64,
                    min.y + (max.y - min.y) * j as f64 / (n - 1) as f64,
                );
                if self.contains(p) {
                    sup = sup.max(self.curvature_unchecked(p));
                }
            }
        }
        sup
    }
}

fn default_region(kind: &MetricKind) -> Region {
    match kind {
        MetricKind::ConstantCurvature { curvature, .. } if *curvature < 0.0 => {
            Region::square(1.0 / libm::sqrt(-curvature))
        }
        MetricKind::Conformal(ConformalFactor::Stereographic { curvature }) if *curvature < 0.0 => {
            Region::square(1.0 / libm::sqrt(-curvature))
        }
        MetricKind::Conformal(ConformalFactor::Bump { width, .. }) => Region::square(3.0 * width),
        MetricKind::Revolution(Profile::Sine) => Region::square(3.0),
        _ => Region::square(10.0),
    }
}
