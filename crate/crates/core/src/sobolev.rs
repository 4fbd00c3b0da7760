//! Sharp Sobolev inequality `4π‖f‖₂² ≤ ‖∇f‖₁² + (sup K)‖f‖₁²` and the
//! reflection cross term `∬ ⟨∇_x f, 𝖱∇_y f⟩` that sits between its sides.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use crate::domain::InteriorNode;
use crate::energy::EnergyOptions;
use crate::geometry::{connect, reflect_along, reflect_closed_form, Metric};
use crate::par::try_map_indexed;
use crate::quadrature::{pairwise_sum, GaussLegendre};
use crate::{Error, Result, Vec2};

/// Default mollifier radius for test functions with gradient jumps.
pub const DEFAULT_MOLLIFIER: f64 = 1e-2;

const TABLE_SIZE: usize = 2048;

/// Builtin families of compactly supported test functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestFamily {
    /// `h·max(0, 1 − |p − c|/R)`.
    Cone {
        center: Vec2,
        radius: f64,
        height: f64,
    },
    /// `h·(e^{−|p−c|²/2σ²} − e^{−R²/2σ²})` inside radius `R`.
    Gaussian {
        center: Vec2,
        sigma: f64,
        radius: f64,
        height: f64,
    },
    /// `h·(1 − x²/a²)³ (1 − y²/b²)³` on the rectangle `|x| < a, |y| < b`
    /// about `c`. Twice differentiable, so it needs no mollification.
    TensorBump {
        center: Vec2,
        half_widths: Vec2,
        height: f64,
    },
}

impl TestFamily {
    fn center(&self) -> Vec2 {
        match *self {
            TestFamily::Cone { center, .. }
            | TestFamily::Gaussian { center, .. }
            | TestFamily::TensorBump { center, .. } => center,
        }
    }

    fn height(&self) -> f64 {
        match *self {
            TestFamily::Cone { height, .. }
            | TestFamily::Gaussian { height, .. }
            | TestFamily::TensorBump { height, .. } => height,
        }
    }

    /// Unit-height radial profile and its derivative.
    fn radial(&self, r: f64) -> (f64, f64) {
        match *self {
            TestFamily::Cone { radius, .. } => {
                if r < radius {
                    (1.0 - r / radius, -1.0 / radius)
                } else {
                    (0.0, 0.0)
                }
            }
            TestFamily::Gaussian { sigma, radius, .. } => {
                if r < radius {
                    let e = libm::exp(-r * r / (2.0 * sigma * sigma));
                    (
                        e - libm::exp(-radius * radius / (2.0 * sigma * sigma)),
                        -r / (sigma * sigma) * e,
                    )
                } else {
                    (0.0, 0.0)
                }
            }
            TestFamily::TensorBump { .. } => unreachable!("tensor bumps are not radial"),
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(format!("test function: {what}")));
        if !self.center().is_finite() || !self.height().is_finite() {
            return bad("center and height must be finite");
        }
        match *self {
            TestFamily::Cone { radius, .. } if !(radius > 0.0) => {
                bad("cone radius must be positive")
            }
            TestFamily::Gaussian { sigma, radius, .. } if !(sigma > 0.0 && radius > 0.0) => {
                bad("gaussian sigma and radius must be positive")
            }
            TestFamily::TensorBump { half_widths, .. }
                if !(half_widths.x > 0.0 && half_widths.y > 0.0) =>
            {
                bad("tensor bump half widths must be positive")
            }
            _ => Ok(()),
        }
    }
}

/// Radial profile sampled on a uniform grid with derivatives, evaluated by
/// cubic Hermite interpolation.
#[derive(Debug)]
struct RadialTable {
    step: f64,
    value: Vec<f64>,
    slope: Vec<f64>,
}

impl RadialTable {
    fn eval(&self, r: f64) -> (f64, f64) {
        let x = r / self.step;
        let i = x as usize;
        if i + 1 >= self.value.len() {
            return (0.0, 0.0);
        }
        let t = x - i as f64;
        let h = self.step;
        let (p0, p1) = (self.value[i], self.value[i + 1]);
        let (m0, m1) = (self.slope[i] * h, self.slope[i + 1] * h);
        let (t2, t3) = (t * t, t * t * t);
        let v = (2.0 * t3 - 3.0 * t2 + 1.0) * p0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * p1
            + (t3 - t2) * m1;
        let d = (6.0 * t2 - 6.0 * t) * p0
            + (3.0 * t2 - 4.0 * t + 1.0) * m0
            + (-6.0 * t2 + 6.0 * t) * p1
            + (3.0 * t2 - 2.0 * t) * m1;
        (v, d / h)
    }
}

/// Mollify a radial profile with the kernel `4/(πε²)(1 − |q|²/ε²)³`.
/// The gradient is the profile convolved with the kernel gradient, so only
/// the continuity of the profile is needed.
fn mollified_table(family: &TestFamily, support: f64, eps: f64) -> RadialTable {
    let radial = GaussLegendre::new(24);
    let angular = 64;
    let norm = 4.0 / (PI * eps * eps);
    let mut rule = Vec::with_capacity(24 * angular);
    for (s, ws) in radial.on_interval(0.0, 1.0) {
        let u = 1.0 - s * s;
        let kernel = norm * u * u * u;
        // d/d|q| of the kernel, divided by |q|
        let dkernel = -6.0 * norm * u * u / (eps * eps);
        for k in 0..angular {
            let a = TAU * (k as f64 + 0.5) / angular as f64;
            let q = Vec2::new(libm::cos(a), libm::sin(a)) * (s * eps);
            let w = ws * s * eps * eps * TAU / angular as f64;
            rule.push((q, w * kernel, w * dkernel));
        }
    }
    let step = support / TABLE_SIZE as f64;
    let mut value = Vec::with_capacity(TABLE_SIZE + 2);
    let mut slope = Vec::with_capacity(TABLE_SIZE + 2);
    for i in 0..=TABLE_SIZE + 1 {
        let p = Vec2::new(step * i as f64, 0.0);
        let (mut v, mut d) = (0.0, 0.0);
        for &(q, wk, wd) in &rule {
            let f = family.radial((p - q).norm()).0;
            v += wk * f;
            // ∂_x (f ∗ η)(p) = ∫ f(p − q) ∂_x η(q) dq
            d += wd * q.x * f;
        }
        value.push(v);
        slope.push(d);
    }
    RadialTable { step, value, slope }
}

/// A compactly supported test function on the chart.
#[derive(Debug, Clone)]
pub struct TestFunction {
    family: TestFamily,
    mollifier: Option<f64>,
    scale: f64,
    table: Option<Arc<RadialTable>>,
}

impl TestFunction {
    pub fn new(family: TestFamily, mollifier: Option<f64>) -> Result<TestFunction> {
        family.validate()?;
        let table = match (family, mollifier) {
            (TestFamily::TensorBump { .. }, _) => None,
            (_, Some(eps)) => {
                if !(eps > 0.0) {
                    return Err(Error::InvalidParameter(
                        "mollifier radius must be positive".into(),
                    ));
                }
                let r = match family {
                    TestFamily::Cone { radius, .. } | TestFamily::Gaussian { radius, .. } => radius,
                    TestFamily::TensorBump { .. } => unreachable!(),
                };
                Some(Arc::new(mollified_table(&family, r + eps, eps)))
            }
            (_, None) => None,
        };
        let mollifier = if matches!(family, TestFamily::TensorBump { .. }) {
            None
        } else {
            mollifier
        };
        Ok(TestFunction {
            family,
            mollifier,
            scale: 1.0,
            table,
        })
    }

    pub fn cone(center: Vec2, radius: f64, height: f64) -> Result<TestFunction> {
        TestFunction::new(
            TestFamily::Cone {
                center,
                radius,
                height,
            },
            Some(DEFAULT_MOLLIFIER),
        )
    }

    pub fn gaussian(center: Vec2, sigma: f64, radius: f64, height: f64) -> Result<TestFunction> {
        TestFunction::new(
            TestFamily::Gaussian {
                center,
                sigma,
                radius,
                height,
            },
            Some(DEFAULT_MOLLIFIER),
        )
    }

    pub fn tensor_bump(center: Vec2, half_widths: Vec2, height: f64) -> Result<TestFunction> {
        TestFunction::new(
            TestFamily::TensorBump {
                center,
                half_widths,
                height,
            },
            None,
        )
    }

    pub fn family(&self) -> &TestFamily {
        &self.family
    }

    /// `c·f`.
    pub fn scaled(&self, c: f64) -> TestFunction {
        TestFunction {
            scale: self.scale * c,
            ..self.clone()
        }
    }

    /// True when `f` is given by a closed formula rather than a mollified
    /// table.
    pub fn is_analytic(&self) -> bool {
        self.table.is_none()
    }

    fn amplitude(&self) -> f64 {
        self.scale * self.family.height()
    }

    /// Radius of the chart disk about the center containing the support.
    pub fn support_radius(&self) -> f64 {
        let eps = self.mollifier.unwrap_or(0.0);
        match self.family {
            TestFamily::Cone { radius, .. } | TestFamily::Gaussian { radius, .. } => radius + eps,
            TestFamily::TensorBump { half_widths, .. } => half_widths.norm(),
        }
    }

    /// Value and chart differential `(∂_x f, ∂_y f)`.
    pub fn jet(&self, p: Vec2) -> (f64, Vec2) {
        let h = self.amplitude();
        let d = p - self.family.center();
        if let TestFamily::TensorBump { half_widths: w, .. } = self.family {
            let (u, v) = (d.x / w.x, d.y / w.y);
            if u.abs() >= 1.0 || v.abs() >= 1.0 {
                return (0.0, Vec2::ZERO);
            }
            let (a, b) = (1.0 - u * u, 1.0 - v * v);
            let (a3, b3) = (a * a * a, b * b * b);
            let da = -6.0 * u / w.x * a * a;
            let db = -6.0 * v / w.y * b * b;
            return (h * a3 * b3, Vec2::new(h * da * b3, h * a3 * db));
        }
        let r = d.norm();
        let (f, df) = match &self.table {
            Some(t) => t.eval(r),
            None => self.family.radial(r),
        };
        let grad = if r > 0.0 { d * (df / r) } else { Vec2::ZERO };
        (h * f, grad * h)
    }

    pub fn value(&self, p: Vec2) -> f64 {
        self.jet(p).0
    }

    /// Points on the edge of the support, for the diameter hypothesis.
    pub fn support_outline(&self, n: usize) -> Vec<Vec2> {
        let c = self.family.center();
        match self.family {
            TestFamily::TensorBump { half_widths: w, .. } => (0..n)
                .map(|k| {
                    // walk the rectangle perimeter at uniform chart speed
                    let t = 4.0 * k as f64 / n as f64;
                    let (side, f) = (t as usize, t - libm::floor(t));
                    let q = match side {
                        0 => Vec2::new(-w.x + 2.0 * w.x * f, -w.y),
                        1 => Vec2::new(w.x, -w.y + 2.0 * w.y * f),
                        2 => Vec2::new(w.x - 2.0 * w.x * f, w.y),
                        _ => Vec2::new(-w.x, w.y - 2.0 * w.y * f),
                    };
                    c + q
                })
                .collect(),
            _ => {
                let r = self.support_radius();
                (0..n)
                    .map(|k| c + Vec2::from_angle(TAU * k as f64 / n as f64) * r)
                    .collect()
            }
        }
    }
}

/// Quadrature settings for the Sobolev checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevOptions {
    pub radial: usize,
    pub angular: usize,
    /// Support edge samples for the diameter hypothesis.
    pub outline_samples: usize,
    pub sup_k_grid: usize,
}

impl Default for SobolevOptions {
    fn default() -> Self {
        SobolevOptions {
            radial: 32,
            angular: 64,
            outline_samples: 48,
            sup_k_grid: EnergyOptions::default().sup_k_grid,
        }
    }
}

/// Gauss–Legendre rules of every order up to a maximum, for composite rules
/// whose panels get nodes in proportion to their length.
struct PanelRules {
    rules: Vec<GaussLegendre>,
}

impl PanelRules {
    const MIN_NODES: usize = 6;

    fn new(max: usize) -> PanelRules {
        PanelRules {
            rules: (1..=max.max(Self::MIN_NODES))
                .map(GaussLegendre::new)
                .collect(),
        }
    }

    /// Nodes and weights on `[breaks[0], breaks[last]]`, about `total` nodes
    /// in all.
    fn composite(&self, breaks: &[f64], total: usize, out: &mut Vec<(f64, f64)>) {
        let span = breaks[breaks.len() - 1] - breaks[0];
        for w in breaks.windows(2) {
            let share = libm::round(total as f64 * (w[1] - w[0]) / span) as usize;
            let n = share.clamp(Self::MIN_NODES, self.rules.len());
            out.extend(self.rules[n - 1].on_interval(w[0], w[1]));
        }
    }
}

impl TestFunction {
    /// Radii about the center where the gradient changes abruptly: the
    /// mollified tip and edge bands, or the bare kinks.
    fn kink_radii(&self) -> Vec<f64> {
        let eps = self.mollifier.unwrap_or(0.0);
        match self.family {
            TestFamily::TensorBump { .. } => Vec::new(),
            TestFamily::Cone { radius, .. } if eps > 0.0 => alloc::vec![eps, radius - eps],
            TestFamily::Gaussian { radius, .. } if eps > 0.0 => alloc::vec![radius - eps],
            TestFamily::Cone { radius, .. } | TestFamily::Gaussian { radius, .. } => {
                alloc::vec![radius]
            }
        }
    }

    /// Panel breaks along the ray `x + tω`, `0 ≤ t ≤` exit of the support
    /// disk, at the crossings of the kink circles.
    fn ray_breaks(&self, x: Vec2, dir: Vec2) -> Vec<f64> {
        let d = x - self.family.center();
        let b = d.dot(dir);
        let crossing = |r: f64| -> [Option<f64>; 2] {
            let disc = b * b - d.norm_sq() + r * r;
            if disc < 0.0 {
                return [None, None];
            }
            let q = libm::sqrt(disc);
            [Some(-b - q), Some(-b + q)]
        };
        let exit = crossing(self.support_radius())[1].unwrap_or(0.0).max(0.0);
        let mut breaks = alloc::vec![0.0, exit];
        for r in self.kink_radii() {
            for t in crossing(r).into_iter().flatten() {
                if t > 1e-12 && t < exit - 1e-12 {
                    breaks.push(t);
                }
            }
        }
        breaks.sort_by(|a, b| a.total_cmp(b));
        breaks
    }
}

/// Polar integration nodes over the chart disk containing the support of
/// `f`, with radial panels split at the kinks of radial profiles.
pub fn support_rule(
    metric: &Metric,
    f: &TestFunction,
    opts: &SobolevOptions,
) -> Result<Vec<InteriorNode>> {
    if opts.radial == 0 || opts.angular == 0 {
        return Err(Error::InvalidParameter(
            "support rule needs radial and angular nodes".into(),
        ));
    }
    let c = f.family.center();
    let panels = PanelRules::new(opts.radial);
    let mut breaks = alloc::vec![0.0];
    breaks.extend(
        f.kink_radii()
            .into_iter()
            .filter(|&r| r > 0.0 && r < f.support_radius()),
    );
    breaks.push(f.support_radius());
    let mut radial = Vec::new();
    panels.composite(&breaks, opts.radial, &mut radial);
    let dphi = TAU / opts.angular as f64;
    let mut out = Vec::with_capacity(radial.len() * opts.angular);
    for k in 0..opts.angular {
        let dir = Vec2::from_angle(dphi * (k as f64 + 0.5));
        for &(t, w) in &radial {
            let p = c + dir * t;
            metric.check_point(p)?;
            out.push(InteriorNode {
                point: p,
                weight: w * t * dphi * metric.sqrt_det(p),
            });
        }
    }
    Ok(out)
}

/// Both sides of the sharp Sobolev inequality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevSides {
    pub l1: f64,
    pub l2_squared: f64,
    pub gradient_l1: f64,
    /// `4π‖f‖₂²`.
    pub lhs: f64,
    /// `‖∇f‖₁² + (sup K)‖f‖₁²`.
    pub rhs: f64,
    pub margin: f64,
    pub sup_k: f64,
    pub support_diameter: Option<f64>,
}

/// Checks `diam(supp f) ≤ π/(2√sup K)` when `sup K > 0`.
pub fn check_support_diameter(
    metric: &Metric,
    f: &TestFunction,
    sup_k: f64,
    samples: usize,
) -> Result<Option<f64>> {
    if sup_k <= 0.0 {
        return Ok(None);
    }
    let pts = f.support_outline(samples);
    let mut diam: f64 = 0.0;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let gamma = connect(metric, pts[i], pts[j]).map_err(|e| match e {
                Error::ConjugatePoint { .. } => {
                    Error::Hypothesis(format!("support points are conjugate or nearly so ({e})"))
                }
                e => e,
            })?;
            diam = diam.max(gamma.length);
        }
    }
    let bound = PI / (2.0 * libm::sqrt(sup_k));
    if diam > bound {
        return Err(Error::Hypothesis(format!(
            "support diameter {diam:.6} exceeds π/(2√sup K) = {bound:.6}"
        )));
    }
    Ok(Some(diam))
}

pub fn sobolev_sides(
    metric: &Metric,
    f: &TestFunction,
    opts: &SobolevOptions,
) -> Result<SobolevSides> {
    let sup_k = metric.sup_curvature(opts.sup_k_grid);
    let support_diameter = check_support_diameter(metric, f, sup_k, opts.outline_samples)?;
    let rule = support_rule(metric, f, opts)?;
    let (mut l1, mut l2, mut grad) = (Vec::new(), Vec::new(), Vec::new());
    for n in &rule {
        let (v, df) = f.jet(n.point);
        l1.push(n.weight * v.abs());
        l2.push(n.weight * v * v);
        grad.push(n.weight * gradient_norm(metric, n.point, df));
    }
    let (l1, l2_squared, gradient_l1) = (pairwise_sum(&l1), pairwise_sum(&l2), pairwise_sum(&grad));
    let lhs = 4.0 * PI * l2_squared;
    let rhs = gradient_l1 * gradient_l1 + sup_k * l1 * l1;
    Ok(SobolevSides {
        l1,
        l2_squared,
        gradient_l1,
        lhs,
        rhs,
        margin: rhs - lhs,
        sup_k,
        support_diameter,
    })
}

fn gradient_norm(metric: &Metric, p: Vec2, df: Vec2) -> f64 {
    let g = metric.raise(p, df);
    libm::sqrt(df.dot(g).max(0.0))
}

/// How the reflection map is evaluated inside the cross term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReflectionMethod {
    /// Frame identity along the connecting geodesic.
    #[default]
    Transport,
    /// `v⃗ + 2⟨v, ∇_y r⟩∇_x r` with `v⃗` from the transport ODE.
    ClosedForm,
}

/// `∬ ⟨∇_x f, 𝖱∇_y f⟩ dA dA`. The outer integral uses the support rule;
/// the inner one uses chart polar coordinates about `x`, out to the edge of
/// the support disk, so the jump of `𝖱` across the diagonal is a coordinate
/// singularity only.
pub fn crossterm_double_integral(
    metric: &Metric,
    f: &TestFunction,
    opts: &SobolevOptions,
    method: ReflectionMethod,
) -> Result<f64> {
    let outer: Vec<(Vec2, f64, Vec2)> = support_rule(metric, f, opts)?
        .into_iter()
        .filter_map(|n| {
            let (_, df) = f.jet(n.point);
            (df != Vec2::ZERO).then_some((n.point, n.weight, df))
        })
        .collect();
    let panels = PanelRules::new(opts.radial);
    let flat = metric.is_flat();
    let rows = try_map_indexed(outer.len(), |i| {
        let (x, wx, dfx) = outer[i];
        let mut terms = Vec::with_capacity(opts.radial * opts.angular);
        let mut ray = Vec::new();
        for k in 0..opts.angular {
            let dir = Vec2::from_angle(TAU * (k as f64 + 0.5) / opts.angular as f64);
            ray.clear();
            panels.composite(&f.ray_breaks(x, dir), opts.radial, &mut ray);
            for &(t, wt) in &ray {
                let y = x + dir * t;
                let (_, dfy) = f.jet(y);
                if dfy == Vec2::ZERO {
                    continue;
                }
                let grad_y = metric.raise(y, dfy);
                let reflected = match method {
                    ReflectionMethod::Transport if flat => grad_y - dir * (2.0 * grad_y.dot(dir)),
                    ReflectionMethod::Transport => {
                        reflect_along(metric, &connect(metric, y, x)?, grad_y)
                    }
                    ReflectionMethod::ClosedForm => {
                        reflect_closed_form(metric, &connect(metric, y, x)?, grad_y)?
                    }
                };
                terms.push(wt * t * metric.sqrt_det(y) * dfx.dot(reflected));
            }
        }
        Ok(wx * TAU / opts.angular as f64 * pairwise_sum(&terms))
    })?;
    Ok(pairwise_sum(&rows))
}

/// The chain `(∫|∇f|)² ≥ ∬⟨∇_x f, 𝖱∇_y f⟩ ≥ 4π‖f‖₂² − (sup K)‖f‖₁²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevChain {
    pub sides: SobolevSides,
    pub gradient_squared: f64,
    pub crossterm: f64,
    pub lower: f64,
    /// `(∫|∇f|)² − crossterm` and `crossterm − lower`.
    pub upper_gap: f64,
    pub lower_gap: f64,
}

impl SobolevChain {
    /// True when both links hold up to `tol` relative to the gradient term.
    pub fn ordered(&self, tol: f64) -> bool {
        let slack = tol * self.gradient_squared.abs();
        self.upper_gap >= -slack && self.lower_gap >= -slack
    }
}

pub fn sobolev_chain(
    metric: &Metric,
    f: &TestFunction,
    opts: &SobolevOptions,
) -> Result<SobolevChain> {
    let sides = sobolev_sides(metric, f, opts)?;
    let crossterm = crossterm_double_integral(metric, f, opts, ReflectionMethod::Transport)?;
    let gradient_squared = sides.gradient_l1 * sides.gradient_l1;
    let lower = sides.lhs - sides.sup_k * sides.l1 * sides.l1;
    Ok(SobolevChain {
        sides,
        gradient_squared,
        crossterm,
        lower,
        upper_gap: gradient_squared - crossterm,
        lower_gap: crossterm - lower,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cone() -> TestFunction {
        TestFunction::cone(Vec2::ZERO, 1.0, 1.0).unwrap()
    }

    #[test]
    fn mollified_cone_matches_the_cone_away_from_kinks() {
        let f = cone();
        // smoothing a concave kink shifts the value by about ε²Δf/20
        let eps2 = DEFAULT_MOLLIFIER * DEFAULT_MOLLIFIER;
        for r in [0.1, 0.3, 0.5, 0.9] {
            let (v, d) = f.jet(Vec2::new(r, 0.0));
            assert!((v - (1.0 - r)).abs() < eps2 / (10.0 * r), "{r}: {v}");
            assert!(
                (d.x + 1.0).abs() < eps2 / (10.0 * r * r) && d.y.abs() < 1e-12,
                "{r}: {d:?}"
            );
        }
        assert_eq!(f.value(Vec2::new(1.02, 0.0)), 0.0);
        // the tip is rounded: the gradient vanishes there
        assert!(f.jet(Vec2::new(1e-6, 0.0)).1.norm() < 1e-3);
    }

    #[test]
    fn planar_cone_sides() {
        let s = sobolev_sides(&Metric::plane(), &cone(), &SobolevOptions::default()).unwrap();
        assert!(
            (s.lhs - 2.0 * PI * PI / 3.0).abs() < 1e-3 * s.lhs,
            "{}",
            s.lhs
        );
        assert!((s.rhs - PI * PI).abs() < 1e-3 * s.rhs, "{}", s.rhs);
        assert!(s.margin > 0.0);
        assert!((s.l1 - PI / 3.0).abs() < 1e-3);
    }

    #[test]
    fn zero_function_and_homogeneity() {
        let opts = SobolevOptions {
            radial: 16,
            angular: 32,
            ..Default::default()
        };
        let m = Metric::plane();
        let zero = sobolev_sides(&m, &cone().scaled(0.0), &opts).unwrap();
        assert_eq!((zero.lhs, zero.rhs, zero.margin), (0.0, 0.0, 0.0));
        let f = TestFunction::gaussian(Vec2::new(0.2, -0.1), 0.4, 1.0, 1.0).unwrap();
        let one = sobolev_sides(&m, &f, &opts).unwrap();
        let two = sobolev_sides(&m, &f.scaled(2.0), &opts).unwrap();
        assert!((two.lhs - 4.0 * one.lhs).abs() < 1e-12 * two.lhs);
        assert!((two.margin - 4.0 * one.margin).abs() < 1e-12 * two.rhs);
    }

    #[test]
    fn planar_crossterm_equals_lhs() {
        let m = Metric::plane();
        let opts = SobolevOptions::default();
        let f = cone();
        let s = sobolev_sides(&m, &f, &opts).unwrap();
        let c = crossterm_double_integral(&m, &f, &opts, ReflectionMethod::Transport).unwrap();
        assert!((c - s.lhs).abs() < 1e-3 * s.lhs, "{c} vs {}", s.lhs);
        assert!(c <= s.gradient_l1 * s.gradient_l1);
    }

    #[test]
    fn planar_tensor_bump_crossterm() {
        let m = Metric::plane();
        let opts = SobolevOptions::default();
        let f = TestFunction::tensor_bump(Vec2::new(0.1, 0.0), Vec2::new(0.8, 0.5), 1.0).unwrap();
        assert!(f.is_analytic());
        let s = sobolev_sides(&m, &f, &opts).unwrap();
        let c = crossterm_double_integral(&m, &f, &opts, ReflectionMethod::Transport).unwrap();
        assert!((c - s.lhs).abs() < 1e-3 * s.lhs, "{c} vs {}", s.lhs);
    }

    #[test]
    fn closed_form_and_transport_agree() {
        let f = cone();
        let opts = SobolevOptions {
            radial: 6,
            angular: 12,
            ..Default::default()
        };
        for m in [Metric::plane(), Metric::conformal_bump(0.1, 1.0)] {
            let a = crossterm_double_integral(&m, &f, &opts, ReflectionMethod::Transport).unwrap();
            let b = crossterm_double_integral(&m, &f, &opts, ReflectionMethod::ClosedForm).unwrap();
            assert!((a - b).abs() < 1e-8, "{a} {b}");
        }
    }

    #[test]
    fn chain_on_bump_metric() {
        let m = Metric::conformal_bump(0.1, 1.0);
        let opts = SobolevOptions {
            radial: 10,
            angular: 20,
            ..Default::default()
        };
        let chain = sobolev_chain(&m, &cone(), &opts).unwrap();
        assert!(chain.ordered(0.0), "{chain:?}");
        assert!(chain.sides.margin > 0.0);
    }

    #[test]
    fn large_support_on_sphere_is_rejected() {
        for r in [0.8, 1.2] {
            let f = TestFunction::cone(Vec2::ZERO, r, 1.0).unwrap();
            let err = sobolev_sides(&Metric::sphere(), &f, &SobolevOptions::default()).unwrap_err();
            assert!(matches!(err, Error::Hypothesis(_)), "{err:?}");
        }
        let small = TestFunction::cone(Vec2::ZERO, 0.3, 1.0).unwrap();
        let s = sobolev_sides(&Metric::sphere(), &small, &SobolevOptions::default()).unwrap();
        assert!(s.margin > 0.0 && s.sup_k == 1.0);
    }
}
