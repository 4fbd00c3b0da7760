//! Boundary-based chord coordinates, Santaló's formula, the convex-domain
//! decomposition of the deficit and the symmetry diagnostics of domains with
//! vanishing energy.
//!
//! At a boundary point `y`, `θ ∈ (−π/2, π/2)` is the angle between the
//! inward normal and the chord, positive towards increasing arclength. The
//! chord leaves the domain at `β(θ)` after length `ρ(θ)`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::domain::{BoundaryNode, Domain};
use crate::energy::ResidualGrid;
use crate::geometry::{
    connect, geodesic_field, initial_state, initial_step, reflect_along, step_control,
    GeodesicSample, GeodesicSolution, JacobiState,
};
use crate::math::wrap;
use crate::ode::Dopri;
use crate::par::try_map_indexed;
use crate::quadrature::{pairwise_sum, GaussLegendre};
use crate::{Error, Result, Vec2};

/// Default number of Gauss–Legendre angles per boundary point.
pub const DEFAULT_THETA_NODES: usize = 128;

/// Chord tables at one boundary point, on Gauss–Legendre angles.
#[derive(Debug, Clone, PartialEq)]
pub struct ChordField {
    pub s_y: f64,
    pub theta: Vec<f64>,
    pub weights: Vec<f64>,
    pub rho: Vec<f64>,
    /// Exit point arclength, unwrapped into `(s_y, s_y + L)`.
    pub beta: Vec<f64>,
    /// `|dβ/dθ|`.
    pub tau: Vec<f64>,
    pub rho_prime: Vec<f64>,
    /// Angle between the arriving chord and the outward normal at `β`.
    pub exit_angle: Vec<f64>,
    /// `√g(y, β(θ))`.
    pub sqrt_g: Vec<f64>,
    /// `⟨𝖱ν_y, ν_β⟩`.
    pub reflected_normal: Vec<f64>,
}

struct ChordEnd {
    rho: f64,
    point: Vec2,
    tangent: Vec2,
    jacobi: [f64; 4],
}

/// Shared angular rule: Gauss–Legendre nodes on `(−π/2, π/2)` and the
/// spectral differentiation matrix in `θ`.
pub struct AngularRule {
    theta: Vec<f64>,
    weights: Vec<f64>,
    diff: Vec<f64>,
}

impl AngularRule {
    pub fn new(n: usize) -> AngularRule {
        let gl = GaussLegendre::new(n);
        let scale = 2.0 / PI;
        AngularRule {
            theta: gl.nodes.iter().map(|x| 0.5 * PI * x).collect(),
            weights: gl.weights.iter().map(|w| 0.5 * PI * w).collect(),
            diff: gl
                .differentiation_matrix()
                .into_iter()
                .map(|d| d * scale)
                .collect(),
        }
    }

    fn derivative(&self, f: &[f64]) -> Vec<f64> {
        let n = f.len();
        (0..n)
            .map(|i| (0..n).map(|j| self.diff[i * n + j] * f[j]).sum())
            .collect()
    }
}

fn shoot_chord(domain: &Domain, y: &BoundaryNode, theta: f64) -> Result<ChordEnd> {
    let m = domain.metric();
    let v = -y.normal * libm::cos(theta) + y.tangent * libm::sin(theta);
    let limit = domain.boundary.length();
    let mut f = geodesic_field(m);
    let mut st = Dopri::new(
        &mut f,
        0.0,
        initial_state(y.point, v),
        initial_step(0.1 * limit),
        step_control(m),
    );
    let escape = Error::ChordEscape { s: y.s, theta };
    loop {
        let prev = st.clone();
        st.step(&mut f, limit)?;
        let p = Vec2::new(st.y[0], st.y[1]);
        if domain.boundary_gap(p) >= 0.0 {
            // the exit lies inside the last step: bisect with single steps
            let (mut lo, mut hi) = (0.0, st.t - prev.t);
            while hi - lo > 1e-12 {
                let mid = 0.5 * (lo + hi);
                let s = prev.peek(&mut f, mid);
                if domain.boundary_gap(Vec2::new(s[0], s[1])) >= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let h = 0.5 * (lo + hi);
            let s = prev.peek(&mut f, h);
            return Ok(ChordEnd {
                rho: prev.t + h,
                point: Vec2::new(s[0], s[1]),
                tangent: Vec2::new(s[2], s[3]),
                jacobi: [s[4], s[5], s[6], s[7]],
            });
        }
        if !m.contains(p) {
            return Err(Error::OutsideRegion(p));
        }
        if st.t >= limit {
            return Err(escape);
        }
    }
}

/// Chord field at the boundary point with arclength `s_y`.
pub fn chord_field(domain: &Domain, s_y: f64, n_theta: usize) -> Result<ChordField> {
    chord_field_with(
        domain,
        &domain.boundary.eval(s_y),
        &AngularRule::new(n_theta),
    )
}

pub fn chord_field_with(
    domain: &Domain,
    y: &BoundaryNode,
    rule: &AngularRule,
) -> Result<ChordField> {
    let m = domain.metric();
    let curve = &domain.boundary;
    let l = curve.length();
    let n = rule.theta.len();
    let mut field = ChordField {
        s_y: y.s,
        theta: rule.theta.clone(),
        weights: rule.weights.clone(),
        rho: Vec::with_capacity(n),
        beta: Vec::with_capacity(n),
        tau: Vec::new(),
        rho_prime: Vec::new(),
        exit_angle: Vec::with_capacity(n),
        sqrt_g: Vec::with_capacity(n),
        reflected_normal: Vec::with_capacity(n),
    };
    for &theta in &rule.theta {
        let end = shoot_chord(domain, y, theta)?;
        let u = domain.boundary_param_toward(end.point);
        let exit = curve.node_at_param(u);
        let beta_raw = curve.arclength_at(u);
        field.rho.push(end.rho);
        field.beta.push(y.s + wrap(beta_raw - y.s, l));
        let t1 = m.normalize(end.point, end.tangent);
        field.exit_angle.push(libm::acos(
            m.inner(end.point, t1, exit.normal).clamp(-1.0, 1.0),
        ));
        field.sqrt_g.push(end.jacobi[0]);
        let chord = GeodesicSolution {
            samples: Vec::new(),
            length: end.rho,
            start: y.point,
            end: end.point,
            start_tangent: -y.normal * libm::cos(theta) + y.tangent * libm::sin(theta),
            end_tangent: t1,
            jacobi: JacobiState {
                a: end.jacobi[0],
                da: end.jacobi[1],
                c: end.jacobi[2],
                dc: end.jacobi[3],
            },
        };
        let r = reflect_along(m, &chord, y.normal);
        field
            .reflected_normal
            .push(m.inner(end.point, r, exit.normal));
    }
    field.rho_prime = rule.derivative(&field.rho);
    field.tau = rule
        .derivative(&field.beta)
        .into_iter()
        .map(f64::abs)
        .collect();
    Ok(field)
}

/// Chord quadratures over the whole boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct ChordReport {
    pub n_boundary: usize,
    pub n_theta: usize,
    /// `∬ ρ cos θ dθ ds`.
    pub santalo_lhs: f64,
    /// `2πA`.
    pub santalo_rhs: f64,
    pub santalo_residual: f64,
    /// `∬ √g cos θ dθ ds`.
    pub jacobi_term: f64,
    /// `L² − 2πA − jacobi_term`.
    pub e_chords: f64,
    /// `L² − ∬ ⟨𝖱ν_y, ν_β⟩ τ dθ ds`.
    pub e_reflection: f64,
    /// `L² + ∬ ρ′ sin θ − ∬ √g cos θ`.
    pub e_parts: f64,
    /// `|∬ ρ′ sin θ + ∬ ρ cos θ|`, the integration by parts in `θ`.
    pub parts_residual: f64,
    /// Largest `|⟨𝖱ν_y, ν_β⟩ − (√g cos θ − ρ′ sin θ)/τ|` over all chords.
    pub formula_residual: f64,
    pub max_exit_angle_gap: f64,
}

pub fn chord_report(domain: &Domain, n_theta: usize) -> Result<ChordReport> {
    let rule = AngularRule::new(n_theta);
    let nodes = domain.boundary.nodes();
    let fields = try_map_indexed(nodes.len(), |i| chord_field_with(domain, &nodes[i], &rule))?;
    let l = domain.boundary.length();
    let ds = l / nodes.len() as f64;
    let sum = |g: &dyn Fn(&ChordField, usize) -> f64| -> f64 {
        let per: Vec<f64> = fields
            .iter()
            .map(|f| {
                pairwise_sum(
                    &(0..f.theta.len())
                        .map(|k| f.weights[k] * g(f, k))
                        .collect::<Vec<_>>(),
                )
            })
            .collect();
        ds * pairwise_sum(&per)
    };
    let santalo_lhs = sum(&|f, k| f.rho[k] * libm::cos(f.theta[k]));
    let jacobi_term = sum(&|f, k| f.sqrt_g[k] * libm::cos(f.theta[k]));
    let reflection_term = sum(&|f, k| f.reflected_normal[k] * f.tau[k]);
    let parts = sum(&|f, k| f.rho_prime[k] * libm::sin(f.theta[k]));
    let santalo_rhs = 2.0 * PI * domain.area;
    let mut formula_residual: f64 = 0.0;
    let mut max_exit_angle_gap: f64 = 0.0;
    for f in &fields {
        for k in 0..f.theta.len() {
            let (c, s) = (libm::cos(f.theta[k]), libm::sin(f.theta[k]));
            let predicted = (f.sqrt_g[k] * c - f.rho_prime[k] * s) / f.tau[k];
            formula_residual = formula_residual.max((f.reflected_normal[k] - predicted).abs());
            max_exit_angle_gap = max_exit_angle_gap.max((f.exit_angle[k] - f.theta[k].abs()).abs());
        }
    }
    Ok(ChordReport {
        n_boundary: nodes.len(),
        n_theta,
        santalo_lhs,
        santalo_rhs,
        santalo_residual: (santalo_lhs - santalo_rhs).abs() / santalo_rhs.abs(),
        jacobi_term,
        e_chords: l * l - santalo_rhs - jacobi_term,
        e_reflection: l * l - reflection_term,
        e_parts: l * l + parts - jacobi_term,
        parts_residual: (parts + santalo_lhs).abs(),
        formula_residual,
        max_exit_angle_gap,
    })
}

/// Statistics that vanish when the scattering energy does.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryDiagnostics {
    /// Largest gap between the chord's angles with the boundary at its ends.
    pub angle_residual: f64,
    /// Largest spread of `r(x, y)` among pairs with equal boundary distance.
    pub chord_dispersion: f64,
    /// `max κ − min κ` over the boundary nodes.
    pub curvature_dispersion: f64,
    /// `|ν_x − 𝖱ν_y|²` on the sample grid.
    pub residual_grid: ResidualGrid,
}

pub fn symmetry_diagnostics(domain: &Domain, n_samples: usize) -> Result<SymmetryDiagnostics> {
    let m = domain.metric();
    let curve = &domain.boundary;
    let l = curve.length();
    let pts: Vec<BoundaryNode> = (0..n_samples)
        .map(|k| curve.eval(l * k as f64 / n_samples as f64))
        .collect();
    let bin = l / 256.0;
    // per row: (max angle gap, [(bin, r)], residuals for j > i)
    let rows = try_map_indexed(n_samples, |i| {
        let mut angle: f64 = 0.0;
        let mut dist = Vec::new();
        let mut res = Vec::new();
        for j in (i + 1)..n_samples {
            let (y, x) = (&pts[i], &pts[j]);
            let gamma = connect(m, y.point, x.point)?;
            let entry = libm::acos(
                m.inner(y.point, gamma.start_tangent, -y.normal)
                    .clamp(-1.0, 1.0),
            );
            let t1 = m.normalize(x.point, gamma.end_tangent);
            let exit = libm::acos(m.inner(x.point, t1, x.normal).clamp(-1.0, 1.0));
            angle = angle.max((entry - exit).abs());
            let sep = (x.s - y.s).abs();
            let boundary_dist = sep.min(l - sep);
            dist.push((libm::round(boundary_dist / bin) as i64, gamma.length));
            let d = x.normal - reflect_along(m, &gamma, y.normal);
            res.push(m.inner(x.point, d, d));
        }
        Ok((angle, dist, res))
    })?;
    let mut angle_residual: f64 = 0.0;
    let mut spread: BTreeMap<i64, (f64, f64)> = BTreeMap::new();
    let mut values = alloc::vec![0.0; n_samples * n_samples];
    for (i, (a, dist, res)) in rows.into_iter().enumerate() {
        angle_residual = angle_residual.max(a);
        for (b, r) in dist {
            let e = spread
                .entry(b)
                .or_insert((f64::INFINITY, f64::NEG_INFINITY));
            e.0 = e.0.min(r);
            e.1 = e.1.max(r);
        }
        for (k, v) in res.into_iter().enumerate() {
            let j = i + 1 + k;
            values[i * n_samples + j] = v;
            values[j * n_samples + i] = v;
        }
    }
    let chord_dispersion = spread.values().map(|(lo, hi)| hi - lo).fold(0.0, f64::max);
    let ks = curve.nodes().iter().map(|n| n.curvature);
    let curvature_dispersion =
        ks.clone().fold(f64::NEG_INFINITY, f64::max) - ks.fold(f64::INFINITY, f64::min);
    Ok(SymmetryDiagnostics {
        angle_residual,
        chord_dispersion,
        curvature_dispersion,
        residual_grid: ResidualGrid {
            n: n_samples,
            values,
        },
    })
}

/// Samples of the geodesic between two boundary points (for plotting).
pub fn chord_samples(domain: &Domain, s: f64, t: f64) -> Result<Vec<GeodesicSample>> {
    let c = &domain.boundary;
    Ok(connect(domain.metric(), c.point(s), c.point(t))?.samples)
}
