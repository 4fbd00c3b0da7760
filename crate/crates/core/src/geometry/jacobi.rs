use super::comparison::comparison_fns;
use super::geodesic::{shoot, GeodesicSolution};
use super::metric::Metric;
use crate::{Error, Result};

/// Two-point quantities along the geodesic from `x = γ.start` to `y = γ.end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiData {
    pub length: f64,
    /// Volume density `√g(x, y)`.
    pub sqrt_g: f64,
    /// Laplacian of `r(·, y)` at `x`.
    pub laplacian_x_r: f64,
    /// Laplacian of `r(x, ·)` at `y`.
    pub laplacian_y_r: f64,
    /// `1/√g + Δ_x r`.
    pub w: f64,
    /// `1/g − Δ_x r · Δ_y r`, computed without cancellation as `−c′(r)/a(r)`.
    pub interior_kernel: f64,
    /// `|√g(x, y) − √g(y, x)|` from the two integration directions.
    pub symmetry_residual: f64,
    pub k_min: f64,
    pub k_max: f64,
}

impl JacobiData {
    /// Smallest relative slack in the comparison sandwich
    /// `sn_{K̄} ≤ √g ≤ sn_{K̲}` and `ct²_{K̄} ≤ Δ_x r Δ_y r ≤ ct²_{K̲}`.
    /// Negative values are violations.
    pub fn sandwich_slack(&self) -> f64 {
        let lo = comparison_fns(self.k_max, self.length);
        let hi = comparison_fns(self.k_min, self.length);
        let prod = self.laplacian_x_r * self.laplacian_y_r;
        let rel = |d: f64, s: f64| d / s.abs().max(1e-300);
        rel(self.sqrt_g - lo.sn, lo.sn)
            .min(rel(hi.sn - self.sqrt_g, hi.sn))
            .min(rel(prod - lo.ct * lo.ct, lo.ct * lo.ct))
            .min(rel(hi.ct * hi.ct - prod, hi.ct * hi.ct))
    }
}

fn near_diagonal(r: f64, k: f64) -> JacobiData {
    let lap = 1.0 / r - k * r / 3.0;
    let sqrt_g = comparison_fns(k, r).sn;
    JacobiData {
        length: r,
        sqrt_g,
        laplacian_x_r: lap,
        laplacian_y_r: lap,
        w: 1.0 / sqrt_g + lap,
        interior_kernel: k,
        symmetry_residual: 0.0,
        k_min: k,
        k_max: k,
    }
}

/// Jacobi data using only the forward integration stored with `γ`.
pub fn jacobi_forward(metric: &Metric, gamma: &GeodesicSolution) -> Result<JacobiData> {
    let r = gamma.length;
    let (k_min, k_max) = gamma.curvature_range();
    if metric.is_flat() {
        return Ok(JacobiData {
            length: r,
            sqrt_g: r,
            laplacian_x_r: 1.0 / r,
            laplacian_y_r: 1.0 / r,
            w: 2.0 / r,
            interior_kernel: 0.0,
            symmetry_residual: 0.0,
            k_min,
            k_max,
        });
    }
    if r < metric.tol.diag_cutoff {
        let mid = (gamma.start + gamma.end) * 0.5;
        return Ok(near_diagonal(r, metric.gauss_curvature(mid)?));
    }
    let j = gamma.jacobi;
    if j.a <= 0.0 {
        return Err(Error::ConjugatePoint {
            from: gamma.start,
            to: gamma.end,
            t: r,
        });
    }
    let lap_x = j.c / j.a;
    Ok(JacobiData {
        length: r,
        sqrt_g: j.a,
        laplacian_x_r: lap_x,
        laplacian_y_r: j.da / j.a,
        w: 1.0 / j.a + lap_x,
        interior_kernel: -j.dc / j.a,
        symmetry_residual: 0.0,
        k_min,
        k_max,
    })
}

/// Jacobi data along `γ`, integrating `u″ + K u = 0` from both ends.
///
/// The shot from `y` back to `x` gives `√g(y, x)` and `Δ_x r`; the forward
/// solutions stored with `γ` give `√g(x, y)` and `Δ_y r`.
pub fn jacobi_along(metric: &Metric, gamma: &GeodesicSolution) -> Result<JacobiData> {
    let mut data = jacobi_forward(metric, gamma)?;
    if metric.is_flat() || gamma.length < metric.tol.diag_cutoff {
        return Ok(data);
    }
    let back_dir = metric.normalize(gamma.end, -gamma.end_tangent);
    let back = shoot(metric, gamma.end, back_dir, gamma.length)?;
    let b = back.jacobi;
    if b.a <= 0.0 {
        return Err(Error::ConjugatePoint {
            from: gamma.end,
            to: gamma.start,
            t: gamma.length,
        });
    }
    data.laplacian_x_r = b.da / b.a;
    data.w = 1.0 / data.sqrt_g + data.laplacian_x_r;
    data.symmetry_residual = (b.a - data.sqrt_g).abs();
    let (lo, hi) = back.curvature_range();
    data.k_min = data.k_min.min(lo);
    data.k_max = data.k_max.max(hi);
    Ok(data)
}
