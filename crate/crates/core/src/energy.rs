//! The scattering energy and the deficit identities built on it.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::domain::{BoundaryNode, Domain, InteriorNode};
use crate::geometry::{connect, jacobi_forward, reflect_along, Metric};
use crate::math::wrap;
use crate::par::try_map_indexed;
use crate::quadrature::{pairwise_sum, GaussLegendre};
use crate::{Error, Result, Vec2};

/// Resolutions of the pair quadratures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyOptions {
    /// Radial and angular nodes of the fan rule used for interior pairs.
    pub interior_radial: usize,
    pub interior_angular: usize,
    /// Radial and angular Gauss nodes of the polar rule about each boundary
    /// point in the mixed boundary–interior integral.
    pub mixed_radial: usize,
    pub mixed_angular: usize,
    /// Boundary samples for the diameter hypothesis.
    pub diameter_samples: usize,
    /// Grid size for the curvature supremum over the working region.
    pub sup_k_grid: usize,
}

impl Default for EnergyOptions {
    fn default() -> Self {
        EnergyOptions {
            interior_radial: 16,
            interior_angular: 64,
            mixed_radial: 24,
            mixed_angular: 48,
            diameter_samples: 64,
            sup_k_grid: 201,
        }
    }
}

/// `|ν_x − 𝖱ν_y|²` over all boundary node pairs, row `i` = `x`, column `j` = `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualGrid {
    pub n: usize,
    pub values: Vec<f64>,
}

impl ResidualGrid {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

/// `|ν_x − 𝖱ν_y|²` for boundary nodes `x`, `y`.
pub fn pair_residual(metric: &Metric, x: &BoundaryNode, y: &BoundaryNode) -> Result<f64> {
    if x.point == y.point {
        return Ok(0.0);
    }
    let gamma = connect(metric, y.point, x.point)?;
    let d = x.normal - reflect_along(metric, &gamma, y.normal);
    Ok(metric.inner(x.point, d, d))
}

/// Sum over unordered index pairs `i < j` of `f(i, j)`, in a fixed order.
pub(crate) fn upper_pair_sum<F>(n: usize, f: F) -> Result<f64>
where
    F: Fn(usize, usize) -> Result<f64> + Sync + Send,
{
    let rows = try_map_indexed(n, |i| {
        let row: Vec<f64> = ((i + 1)..n).map(|j| f(i, j)).collect::<Result<_>>()?;
        Ok(pairwise_sum(&row))
    })?;
    Ok(pairwise_sum(&rows))
}

/// The residual grid over the boundary nodes. It is symmetric because
/// `𝖱` from `x` to `y` is the inverse isometry of `𝖱` from `y` to `x`.
pub fn residual_grid(domain: &Domain) -> Result<ResidualGrid> {
    let nodes = domain.boundary.nodes();
    let n = nodes.len();
    let m = domain.metric();
    let rows = try_map_indexed(n, |i| {
        ((i + 1)..n)
            .map(|j| pair_residual(m, &nodes[i], &nodes[j]))
            .collect::<Result<Vec<f64>>>()
    })?;
    let mut values = vec![0.0; n * n];
    for (i, row) in rows.iter().enumerate() {
        for (k, &v) in row.iter().enumerate() {
            let j = i + 1 + k;
            values[i * n + j] = v;
            values[j * n + i] = v;
        }
    }
    Ok(ResidualGrid { n, values })
}

/// `ℰ(Ω) = ½ ∬ |ν_x − 𝖱ν_y|² ds ds` from a residual grid, by the periodic
/// trapezoid rule in both variables.
pub fn energy_from_grid(domain: &Domain, grid: &ResidualGrid) -> f64 {
    let ds = domain.boundary.length() / grid.n as f64;
    let rows: Vec<f64> = (0..grid.n)
        .map(|i| pairwise_sum(&grid.values[i * grid.n..(i + 1) * grid.n]))
        .collect();
    0.5 * ds * ds * pairwise_sum(&rows)
}

/// `ℰ(Ω)` by direct quadrature over boundary node pairs.
pub fn scattering_energy_direct(domain: &Domain) -> Result<f64> {
    let nodes = domain.boundary.nodes();
    let n = nodes.len();
    let m = domain.metric();
    let ds = domain.boundary.length() / n as f64;
    // each unordered pair appears twice in the full sum; the ½ cancels it
    Ok(ds * ds * upper_pair_sum(n, |i, j| pair_residual(m, &nodes[i], &nodes[j]))?)
}

/// `L² − 4πA`.
pub fn planar_deficit(domain: &Domain) -> f64 {
    let l = domain.boundary.length();
    l * l - 4.0 * PI * domain.area
}

/// `1/g − Δ_x r Δ_y r` for two interior points; `K` on the diagonal.
pub fn interior_kernel(metric: &Metric, x: Vec2, y: Vec2) -> Result<f64> {
    if x == y {
        return metric.gauss_curvature(x);
    }
    if metric.is_flat() {
        return Ok(0.0);
    }
    let gamma = connect(metric, x, y)?;
    Ok(jacobi_forward(metric, &gamma)?.interior_kernel)
}

/// `∬_{Ω×Ω} (1/g − Δ_x r Δ_y r) dA dA` over a product of fan rules.
pub fn interior_pair_integral(metric: &Metric, rule: &[InteriorNode]) -> Result<f64> {
    let n = rule.len();
    let diag: Vec<f64> = rule
        .iter()
        .map(|p| Ok(p.weight * p.weight * interior_kernel(metric, p.point, p.point)?))
        .collect::<Result<_>>()?;
    let off =
        upper_pair_sum(n, |i, j| {
            Ok(rule[i].weight
                * rule[j].weight
                * interior_kernel(metric, rule[i].point, rule[j].point)?)
        })?;
    Ok(pairwise_sum(&diag) + 2.0 * off)
}

/// Terms of the deficit identity `ℰ = L² − 4πA + ∬ (1/g − Δ_x r Δ_y r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeficitIdentity {
    pub planar_deficit: f64,
    pub interior_integral: f64,
    pub rhs: f64,
}

pub fn deficit_identity_rhs(domain: &Domain, opts: &EnergyOptions) -> Result<DeficitIdentity> {
    let m = domain.metric();
    let interior_integral = if m.is_flat() {
        0.0
    } else {
        let rule = domain.fan_rule(opts.interior_radial, opts.interior_angular)?;
        interior_pair_integral(m, &rule)?
    };
    let planar_deficit = planar_deficit(domain);
    Ok(DeficitIdentity {
        planar_deficit,
        interior_integral,
        rhs: planar_deficit + interior_integral,
    })
}

/// Boundary parameter where the chart ray from boundary node `y` in chart
/// direction `dir` leaves a chart-convex domain.
fn chart_ray_exit(domain: &Domain, y: &BoundaryNode, dir: Vec2, theta: f64) -> f64 {
    let curve = &domain.boundary;
    let two_pi = 2.0 * PI;
    let (mut lo, mut hi) = (y.u, y.u + two_pi);
    let mut u = y.u + 2.0 * theta;
    for _ in 0..100 {
        let [p, dp, _] = curve.jet(wrap(u, two_pi));
        let q = p - y.point;
        let delta = libm::atan2(dir.cross(q), dir.dot(q));
        if delta.abs() < 1e-15 {
            break;
        }
        if delta > 0.0 {
            hi = u;
        } else {
            lo = u;
        }
        let next = u - delta * q.norm_sq() / q.cross(dp);
        u = if next > lo && next < hi {
            next
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo < 1e-15 {
            break;
        }
    }
    wrap(u, two_pi)
}

/// The mixed form `ℰ = L² − 2πA − ∫_{∂Ω} ∫_Ω Δ_x r ⟨∇_y r, ν_y⟩ dA_x ds_y`.
///
/// The inner integral is taken in chart polar coordinates about each
/// boundary point `y`, which absorbs the `1/r` singularity of `Δ_x r`; this
/// needs a chart-convex boundary in addition to geodesic convexity.
pub fn mixed_formula_rhs(domain: &Domain, opts: &EnergyOptions) -> Result<f64> {
    let m = domain.metric();
    let nodes = domain.boundary.nodes();
    for n in nodes {
        let [_, d, dd] = domain.boundary.jet(n.u);
        if n.curvature <= 0.0 || d.cross(dd) <= 0.0 {
            return Err(Error::NotConvex(format!(
                "the mixed boundary-interior formula needs a convex boundary (fails at s = {:.4})",
                n.s
            )));
        }
    }
    let ang = GaussLegendre::new(opts.mixed_angular);
    let rad = GaussLegendre::new(opts.mixed_radial);
    let per_node = try_map_indexed(nodes.len(), |j| {
        let y = &nodes[j];
        let base = y.tangent.angle();
        let mut terms = Vec::with_capacity(opts.mixed_angular);
        for (theta, wt) in ang.on_interval(0.0, PI) {
            let dir = Vec2::from_angle(base + theta);
            let u = chart_ray_exit(domain, y, dir, theta);
            let reach = (domain.boundary.jet(u)[0] - y.point).norm();
            let mut inner = Vec::with_capacity(opts.mixed_radial);
            for (rho, wr) in rad.on_interval(0.0, reach) {
                let x = y.point + dir * rho;
                let gamma = connect(m, y.point, x)?;
                let jac = jacobi_forward(m, &gamma)?;
                let grad_y = -gamma.start_tangent;
                // jac.laplacian_y_r is the Laplacian at the far end, here x
                inner.push(
                    wr * jac.laplacian_y_r
                        * m.inner(y.point, grad_y, y.normal)
                        * m.sqrt_det(x)
                        * rho,
                );
            }
            terms.push(wt * pairwise_sum(&inner));
        }
        Ok(pairwise_sum(&terms))
    })?;
    let l = domain.boundary.length();
    let ds = l / nodes.len() as f64;
    Ok(l * l - 2.0 * PI * domain.area - ds * pairwise_sum(&per_node))
}

/// Sides of the curvature-corrected isoperimetric inequality
/// `L² − 4πA + (sup K) A² ≥ ℰ(Ω)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BolCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub sup_k: f64,
    /// Sampled boundary diameter, when the hypothesis needed it.
    pub diameter: Option<f64>,
}

/// Checks the diameter hypothesis `diam ≤ π/(2√sup K)` when `sup K > 0`.
pub fn check_diameter(domain: &Domain, sup_k: f64, samples: usize) -> Result<Option<f64>> {
    if sup_k <= 0.0 {
        return Ok(None);
    }
    let diam = domain.boundary_diameter(samples)?;
    let bound = PI / (2.0 * libm::sqrt(sup_k));
    if diam > bound {
        return Err(Error::Hypothesis(format!(
            "domain diameter {diam:.6} exceeds π/(2√sup K) = {bound:.6}"
        )));
    }
    Ok(Some(diam))
}

pub fn bol_check(
    domain: &Domain,
    energy: f64,
    sup_k: f64,
    opts: &EnergyOptions,
) -> Result<BolCheck> {
    let diameter = check_diameter(domain, sup_k, opts.diameter_samples)?;
    let lhs = planar_deficit(domain) + sup_k * domain.area * domain.area;
    Ok(BolCheck {
        lhs,
        rhs: energy,
        margin: lhs - energy,
        sup_k,
        diameter,
    })
}

/// Every side of the energy identities for one domain.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport {
    pub length: f64,
    pub area: f64,
    pub e_direct: f64,
    pub identity: DeficitIdentity,
    pub bol: BolCheck,
    pub mixed_rhs: f64,
    pub sup_k_used: f64,
    /// `(N_b, interior radial, interior angular)`.
    pub resolutions: (usize, usize, usize),
    pub identity_residual: f64,
    pub mixed_residual: f64,
}

/// Relative disagreement of two evaluations of the same quantity, measured
/// against the largest of the two and a reference scale.
pub fn relative_gap(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(scale.abs()).max(1e-300)
}

pub fn energy_report(domain: &Domain, opts: &EnergyOptions) -> Result<EnergyReport> {
    let m = domain.metric();
    let sup_k = m.sup_curvature(opts.sup_k_grid);
    let e_direct = scattering_energy_direct(domain)?;
    let identity = deficit_identity_rhs(domain, opts)?;
    let mixed_rhs = mixed_formula_rhs(domain, opts)?;
    let bol = bol_check(domain, e_direct, sup_k, opts)?;
    let scale = identity.planar_deficit;
    Ok(EnergyReport {
        length: domain.boundary.length(),
        area: domain.area,
        e_direct,
        identity,
        bol,
        mixed_rhs,
        sup_k_used: sup_k,
        resolutions: (
            domain.boundary.nodes().len(),
            opts.interior_radial,
            opts.interior_angular,
        ),
        identity_residual: relative_gap(e_direct, identity.rhs, scale),
        mixed_residual: relative_gap(e_direct, mixed_rhs, scale),
    })
}
